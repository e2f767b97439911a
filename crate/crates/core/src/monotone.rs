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

//! Envy-freeable orientations of multigraphs with monotone valuations and
//! at most one unit of subsidy per agent.

use num_traits::{One, Zero};

use crate::envy;
use crate::error::{Error, Result};
use crate::model::{AgentId, Diagnostics, EdgeId, Instance, Orientation, Solution};
use crate::rational::{int, Rational};
use crate::subroutines::envy_cycle_two;

/// Temporary split of `E_{i,j}` between an adjacent pair, `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairwiseTemp {
    pub i: AgentId,
    pub j: AgentId,
    pub t_i: Vec<EdgeId>,
    pub t_j: Vec<EdgeId>,
    pub i_envies: bool,
    pub j_envies: bool,
}

pub fn pairwise_temp(inst: &Instance) -> Result<Vec<PairwiseTemp>> {
    inst.graph()
        .adjacent_pairs()
        .map(|((i, j), items)| {
            let (t_i, t_j) = envy_cycle_two(inst, i, j, items)?;
            let i_envies = envy::envies(inst, i, &t_i, &t_j);
            let j_envies = envy::envies(inst, j, &t_j, &t_i);
            if i_envies && j_envies {
                return Err(Error::Invariant(format!("mutual envy left between {i} and {j}")));
            }
            Ok(PairwiseTemp { i, j, t_i, t_j, i_envies, j_envies })
        })
        .collect()
}

/// `b_i`: over neighbours, the best value `i` can guarantee from either side
/// of the temporary split.
pub fn thresholds(inst: &Instance, temp: &[PairwiseTemp]) -> Vec<Rational> {
    let mut b = vec![Rational::zero(); inst.n_agents()];
    for t in temp {
        for (a, x, y) in [(t.i, &t.t_i, &t.t_j), (t.j, &t.t_j, &t.t_i)] {
            let m = inst.eval(a, x.iter().copied()).min(inst.eval(a, y.iter().copied()));
            if m > b[a] {
                b[a] = m;
            }
        }
    }
    b
}

pub fn solve_monotone_multigraph(inst: &Instance) -> Result<Solution> {
    if let Some(r) = inst
        .check_normalization()
        .into_iter()
        .find(|r| r.max_marginal > Rational::one())
    {
        return Err(Error::Normalization(format!(
            "agent {} has max marginal value {} > 1",
            r.agent, r.max_marginal
        )));
    }
    let n = inst.n_agents();
    let temp = pairwise_temp(inst)?;
    let b = thresholds(inst, &temp);
    let mut diag = Diagnostics::default();
    let mut owner: Vec<AgentId> = vec![0; inst.n_edges()];
    for t in &temp {
        let (win_i, t_bundle, u_bundle) = if !t.i_envies && !t.j_envies {
            (true, &t.t_i, &t.t_j)
        } else {
            let (envied, other) = if t.i_envies { (&t.t_j, &t.t_i) } else { (&t.t_i, &t.t_j) };
            let di = inst.eval(t.i, envied.iter().copied()) - &b[t.i];
            let dj = inst.eval(t.j, envied.iter().copied()) - &b[t.j];
            (di >= dj, envied, other)
        };
        let (winner, loser) = if win_i { (t.i, t.j) } else { (t.j, t.i) };
        for &e in t_bundle {
            owner[e] = winner;
        }
        for &e in u_bundle {
            owner[e] = loser;
        }
    }
    let orientation = Orientation::new(inst.graph(), owner)?;
    let payments = envy::min_payments(inst, &orientation)
        .map_err(|_| Error::Invariant("monotone orientation is not envy-freeable".into()))?;

    let bundles = orientation.bundles(n);
    let below: Vec<AgentId> = (0..n)
        .filter(|&a| inst.eval(a, bundles[a].iter().copied()) < b[a])
        .collect();
    diag.check("values_reach_thresholds", below.is_empty(), format!("below: {below:?}"));
    let over: Vec<AgentId> = (0..n).filter(|&a| payments.get(a) > &Rational::one()).collect();
    diag.check("payments_at_most_one", over.is_empty(), format!("over: {over:?}"));
    let bound = int(n as i64 - 1);
    let total = payments.total();
    diag.check("total_within_bound", total <= bound, format!("total {total}"));
    diag.thresholds = Some(b);
    Ok(Solution {
        algorithm: "monotone-multi".into(),
        orientation,
        payments,
        bound: Some(("n-1".into(), bound)),
        diagnostics: diag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{MonotoneFamily, MultiGraph, ValuationProfile};
    use crate::rational::frac;

    #[test]
    fn threshold_examples() {
        let inst = Instance::additive(
            3,
            &[(0, 1, int(1), int(1)), (0, 2, frac(2, 3), int(1)), (0, 2, int(1), int(1))],
        )
        .unwrap();
        let temp = vec![
            PairwiseTemp { i: 0, j: 1, t_i: vec![0], t_j: vec![], i_envies: false, j_envies: true },
            PairwiseTemp { i: 0, j: 2, t_i: vec![1], t_j: vec![2], i_envies: true, j_envies: false },
        ];
        let b = thresholds(&inst, &temp);
        assert_eq!(b[1], int(0));
        assert_eq!(b[0], frac(2, 3));
        assert_eq!(b[2], int(1));
    }

    #[test]
    fn single_edge() {
        let inst = Instance::additive(2, &[(0, 1, int(1), int(1))]).unwrap();
        let s = solve_monotone_multigraph(&inst).unwrap();
        assert_eq!(s.total_subsidy(), int(1));
    }

    #[test]
    fn triangle_within_bound() {
        let inst = Instance::additive(
            3,
            &[(0, 1, int(1), int(1)), (1, 2, int(1), int(1)), (0, 2, int(1), int(1))],
        )
        .unwrap();
        let s = solve_monotone_multigraph(&inst).unwrap();
        assert!(s.total_subsidy() <= int(2));
        assert!(envy::is_ef_with_payments(&inst, &s.orientation, &s.payments));
        assert!(s.diagnostics.failed_checks().is_empty());
    }

    #[test]
    fn rejects_large_marginals() {
        let inst = Instance::additive(2, &[(0, 1, int(2), int(1))]).unwrap();
        assert!(matches!(solve_monotone_multigraph(&inst), Err(Error::Normalization(_))));
    }

    #[test]
    fn capped_family_accepted() {
        let g = MultiGraph::new(2, &[(0, 1), (0, 1), (0, 1)]).unwrap();
        let inst = Instance::new(
            g,
            vec![[frac(1, 2), int(1)]; 3],
            ValuationProfile::Monotone(vec![
                MonotoneFamily::AdditiveCapped { cap: frac(3, 4) },
                MonotoneFamily::UnitDemand,
            ]),
        )
        .unwrap();
        let s = solve_monotone_multigraph(&inst).unwrap();
        assert!(envy::is_ef_with_payments(&inst, &s.orientation, &s.payments));
        assert!(s.total_subsidy() <= int(1));
    }
}
