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

//! Two-agent allocation primitives: round-robin, envy-cycle elimination
//! and welfare-maximizing assignment.

use num_traits::Zero;

use crate::error::{invalid, Result};
use crate::model::{AgentId, EdgeId, Instance};
use crate::rational::Rational;

pub type Split = (Vec<EdgeId>, Vec<EdgeId>);

fn checked_items(inst: &Instance, a: AgentId, b: AgentId, items: &[EdgeId]) -> Result<Vec<EdgeId>> {
    inst.graph().check_agent(a)?;
    inst.graph().check_agent(b)?;
    if a == b {
        return invalid("two distinct agents are required");
    }
    let mut out = items.to_vec();
    out.sort_unstable();
    out.dedup();
    for &e in &out {
        inst.graph().check_edge(e)?;
        let edge = inst.graph().edge(e);
        if !(edge.touches(a) && edge.touches(b)) {
            return invalid(format!("edge {e} does not join agents {a} and {b}"));
        }
    }
    Ok(out)
}

/// Alternating picks starting with `first`. A picker takes a highest-valued
/// remaining item; among ties it takes `prefer` when available, otherwise
/// the lowest id.
pub fn round_robin(
    inst: &Instance,
    first: AgentId,
    second: AgentId,
    items: &[EdgeId],
    prefer: Option<EdgeId>,
) -> Result<Split> {
    let mut left = checked_items(inst, first, second, items)?;
    let mut bundles = (Vec::new(), Vec::new());
    let mut turn_first = true;
    while !left.is_empty() {
        let picker = if turn_first { first } else { second };
        let best = left
            .iter()
            .map(|&e| inst.single(picker, e))
            .max()
            .expect("nonempty");
        let tied = |e: &EdgeId| inst.single(picker, *e) == best;
        let pos = prefer
            .and_then(|r| left.iter().position(|e| *e == r && tied(e)))
            .or_else(|| left.iter().position(tied))
            .expect("a maximizer exists");
        let e = left.remove(pos);
        if turn_first {
            bundles.0.push(e);
        } else {
            bundles.1.push(e);
        }
        turn_first = !turn_first;
    }
    bundles.0.sort_unstable();
    bundles.1.sort_unstable();
    Ok(bundles)
}

/// Envy-cycle elimination restricted to two agents. The agent not envied by
/// the other (agent `a` when neither is envied) receives its highest
/// marginal remaining item; mutual envy is resolved by swapping bundles.
pub fn envy_cycle_two(inst: &Instance, a: AgentId, b: AgentId, items: &[EdgeId]) -> Result<Split> {
    let mut left = checked_items(inst, a, b, items)?;
    let mut ba: Vec<EdgeId> = Vec::new();
    let mut bb: Vec<EdgeId> = Vec::new();
    let val = |i: AgentId, s: &[EdgeId]| inst.eval(i, s.iter().copied());
    let mutual = |ba: &[EdgeId], bb: &[EdgeId]| val(a, bb) > val(a, ba) && val(b, ba) > val(b, bb);
    while !left.is_empty() {
        if mutual(&ba, &bb) {
            std::mem::swap(&mut ba, &mut bb);
        }
        let b_envies_a = val(b, &ba) > val(b, &bb);
        let (who, bundle) = if b_envies_a { (b, &mut bb) } else { (a, &mut ba) };
        let base = val(who, bundle);
        let mut best: Option<(Rational, usize)> = None;
        for (pos, &e) in left.iter().enumerate() {
            bundle.push(e);
            let gain = val(who, bundle) - &base;
            bundle.pop();
            if best.as_ref().is_none_or(|(g, _)| gain > *g) {
                best = Some((gain, pos));
            }
        }
        let (_, pos) = best.expect("nonempty");
        bundle.push(left.remove(pos));
    }
    if mutual(&ba, &bb) {
        std::mem::swap(&mut ba, &mut bb);
    }
    ba.sort_unstable();
    bb.sort_unstable();
    Ok((ba, bb))
}

/// Each item goes to its strictly higher valuer; ties go to `favored`.
pub fn max_utility(inst: &Instance, favored: AgentId, other: AgentId, items: &[EdgeId]) -> Result<Split> {
    let items = checked_items(inst, favored, other, items)?;
    Ok(items
        .into_iter()
        .partition(|&e| inst.single(favored, e) >= inst.single(other, e)))
}

/// EF1 check for a two-agent split under arbitrary monotone valuations.
pub fn is_ef1(inst: &Instance, a: AgentId, b: AgentId, ba: &[EdgeId], bb: &[EdgeId]) -> bool {
    let ok = |i: AgentId, own: &[EdgeId], other: &[EdgeId]| {
        let mine = inst.eval(i, own.iter().copied());
        if inst.eval(i, other.iter().copied()) <= mine {
            return true;
        }
        (0..other.len()).any(|skip| {
            let rest = other
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != skip)
                .map(|(_, &e)| e);
            inst.eval(i, rest) <= mine
        })
    };
    ok(a, ba, bb) && ok(b, bb, ba)
}

/// Sum of both agents' values for a split.
pub fn welfare(inst: &Instance, a: AgentId, b: AgentId, ba: &[EdgeId], bb: &[EdgeId]) -> Rational {
    let mut w = Rational::zero();
    w += inst.eval(a, ba.iter().copied());
    w += inst.eval(b, bb.iter().copied());
    w
}
