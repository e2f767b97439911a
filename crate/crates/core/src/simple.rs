// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Envy-free orientations of simple graphs with monotone valuations and
//! total subsidy at most n-2.

use num_traits::{One, Zero};

use crate::envy;
use crate::error::{Error, Result};
use crate::model::{AgentId, Diagnostics, Instance, Orientation, PaymentVector, Solution};
use crate::monotone::solve_monotone_multigraph;
use crate::rational::{int, positive_part, Rational};

/// Lowest-id agent outside `pair` whose whole neighbourhood is worth at
/// least `t`.
fn pick_anchor(inst: &Instance, pair: (AgentId, AgentId), t: &Rational) -> Option<AgentId> {
    (0..inst.n_agents()).find(|&a| {
        a != pair.0 && a != pair.1 && inst.eval(a, inst.graph().incident(a).iter().copied()) >= *t
    })
}

pub fn solve_simple_monotone(inst: &Instance) -> Result<Solution> {
    if !inst.graph().is_simple() {
        return Err(Error::InvalidInput("the graph has parallel edges".into()));
    }
    if inst.n_agents() < 3 {
        return solve_monotone_multigraph(inst);
    }
    if let Some(a) = (0..inst.n_agents()).find(|&a| inst.max_marginal(a) > Rational::one()) {
        return Err(Error::Normalization(format!(
            "agent {a} has max marginal value {} > 1",
            inst.max_marginal(a)
        )));
    }
    let n = inst.n_agents();
    let g = inst.graph();

    let mut t = Rational::zero();
    let mut pair = (0, 1);
    let mut best: Option<(Rational, AgentId, AgentId)> = None;
    for e in g.edges() {
        for (a, b) in [(e.u, e.v), (e.v, e.u)] {
            let v = inst.single(a, e.id);
            let better = match &best {
                None => true,
                Some((bv, ba, bb)) => v > *bv || (v == *bv && (a, b) < (*ba, *bb)),
            };
            if better {
                best = Some((v, a, b));
            }
        }
    }
    if let Some((v, a, b)) = best {
        t = v;
        pair = (a, b);
    }
    let orient = |anchor: AgentId| -> Result<Orientation> {
        let owner = g
            .edges()
            .iter()
            .map(|e| {
                if e.touches(anchor) {
                    anchor
                } else {
                    let (vu, vv) = (inst.single(e.u, e.id), inst.single(e.v, e.id));
                    if vu > vv || (vu == vv && e.u < e.v) {
                        e.u
                    } else {
                        e.v
                    }
                }
            })
            .collect();
        Orientation::new(g, owner)
    };
    let bound = int(n as i64 - 2);
    let mut diag = Diagnostics::default();
    let (orientation, payments) = match pick_anchor(inst, pair, &t) {
        Some(anchor) => {
            let orientation = orient(anchor)?;
            let bundles = orientation.bundles(n);
            let p: Vec<Rational> = (0..n)
                .map(|a| positive_part(&(&t - inst.eval(a, bundles[a].iter().copied()))))
                .collect();
            (orientation, PaymentVector::new(p)?)
        }
        None => {
            // Nobody outside the pair reaches t, so the threshold payments
            // can overshoot; settle the same orientation at minimum cost.
            let anchor = (0..n).find(|&a| a != pair.0 && a != pair.1).unwrap_or(0);
            let orientation = orient(anchor)?;
            let settled = envy::min_payments(inst, &orientation).ok().filter(|p| {
                p.total() <= bound && p.as_slice().iter().filter(|x| x.is_zero()).count() >= 2
            });
            let Some(payments) = settled else {
                let mut sol = solve_monotone_multigraph(inst)?;
                sol.diagnostics.check(
                    "anchor_fallback",
                    true,
                    format!("no agent outside {pair:?} values its neighbourhood at least {t}"),
                );
                return Ok(sol);
            };
            diag.check(
                "anchor_below_t",
                true,
                format!("agent {anchor} anchors below t = {t}; minimum payments used"),
            );
            (orientation, payments)
        }
    };
    if !envy::is_ef_with_payments(inst, &orientation, &payments) {
        return Err(Error::Invariant("simple-graph orientation is not envy-free".into()));
    }
    let zeros = payments.as_slice().iter().filter(|x| x.is_zero()).count();
    diag.check("two_unpaid_agents", zeros >= 2, format!("{zeros} agents unpaid"));
    diag.check(
        "payments_at_most_t",
        payments.as_slice().iter().all(|x| x <= &t),
        format!("t = {t}"),
    );
    diag.thresholds = Some(vec![t]);
    Ok(Solution {
        algorithm: "simple-monotone".into(),
        orientation,
        payments,
        bound: Some(("n-2".into(), bound)),
        diagnostics: diag,
    })
}
