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

//! Envy graphs, envy-freeability and minimum payments.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{AgentId, EdgeId, Instance, Orientation, PaymentVector};
use crate::rational::Rational;

/// Complete weighted digraph with `weight[i][j] = v_i(A_j) - v_i(A_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvyGraph {
    weight: Vec<Vec<Rational>>,
}

impl EnvyGraph {
    pub fn from_weights(weight: Vec<Vec<Rational>>) -> Self {
        EnvyGraph { weight }
    }

    pub fn n(&self) -> usize {
        self.weight.len()
    }

    pub fn weight(&self, i: AgentId, j: AgentId) -> &Rational {
        &self.weight[i][j]
    }

    pub fn weights(&self) -> &[Vec<Rational>] {
        &self.weight
    }

    /// Total weight of the closed walk `c[0] -> c[1] -> ... -> c[0]`.
    pub fn cycle_weight(&self, cycle: &[AgentId]) -> Rational {
        let mut total = Rational::zero();
        for (k, &a) in cycle.iter().enumerate() {
            total += &self.weight[a][cycle[(k + 1) % cycle.len()]];
        }
        total
    }

    /// Longest-path relaxation from every vertex. Returns the fixpoint, or
    /// a positive cycle if the relaxation does not settle.
    fn relax(&self) -> std::result::Result<Vec<Rational>, Vec<AgentId>> {
        let n = self.n();
        let mut p = vec![Rational::zero(); n];
        let mut succ: Vec<Option<AgentId>> = vec![None; n];
        let mut pass = 0;
        loop {
            let mut changed = false;
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let cand = &self.weight[i][j] + &p[j];
                    if cand > p[i] {
                        p[i] = cand;
                        succ[i] = Some(j);
                        changed = true;
                    }
                }
            }
            if !changed {
                return Ok(p);
            }
            // Past n passes the values grow without bound, which forces a
            // cycle into the successor pointers; every such cycle is positive.
            if pass >= n {
                if let Some(c) = successor_cycle(&succ) {
                    debug_assert!(self.cycle_weight(&c).is_positive());
                    return Err(c);
                }
            }
            pass += 1;
        }
    }

    /// A directed cycle of positive total weight, if one exists.
    pub fn positive_cycle(&self) -> Option<Vec<AgentId>> {
        self.relax().err()
    }

    /// `p_i` = heaviest directed path out of `i`, floored at 0.
    pub fn longest_paths(&self) -> Result<Vec<Rational>> {
        self.relax().map_err(|_| Error::NotEnvyFreeable)
    }
}

fn successor_cycle(succ: &[Option<AgentId>]) -> Option<Vec<AgentId>> {
    let n = succ.len();
    // 0 = unvisited, 1 = on the current walk, 2 = done
    let mut state = vec![0u8; n];
    for start in 0..n {
        let mut walk = Vec::new();
        let mut x = start;
        loop {
            if state[x] == 2 {
                break;
            }
            if state[x] == 1 {
                let from = walk.iter().position(|&y| y == x).unwrap_or(0);
                let mut cycle = walk[from..].to_vec();
                let lowest = (0..cycle.len()).min_by_key(|&k| cycle[k]).unwrap_or(0);
                cycle.rotate_left(lowest);
                return Some(cycle);
            }
            state[x] = 1;
            walk.push(x);
            match succ[x] {
                Some(y) => x = y,
                None => break,
            }
        }
        for y in walk {
            state[y] = 2;
        }
    }
    None
}

pub fn build_envy_graph(inst: &Instance, o: &Orientation) -> EnvyGraph {
    let n = inst.n_agents();
    let bundles = o.bundles(n);
    let weight = (0..n)
        .map(|i| {
            let own = inst.eval(i, bundles[i].iter().copied());
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational::zero()
                    } else {
                        inst.eval(i, bundles[j].iter().copied()) - &own
                    }
                })
                .collect()
        })
        .collect();
    EnvyGraph { weight }
}

pub fn is_envy_freeable(inst: &Instance, o: &Orientation) -> bool {
    build_envy_graph(inst, o).positive_cycle().is_none()
}

/// The pointwise-minimum payment vector making `o` envy-free.
pub fn min_payments(inst: &Instance, o: &Orientation) -> Result<PaymentVector> {
    let p = build_envy_graph(inst, o).longest_paths()?;
    PaymentVector::new(p)
}

pub fn is_ef_with_payments(inst: &Instance, o: &Orientation, p: &PaymentVector) -> bool {
    let n = inst.n_agents();
    if p.as_slice().len() != n {
        return false;
    }
    let bundles = o.bundles(n);
    (0..n).all(|i| {
        let own = inst.eval(i, bundles[i].iter().copied()) + p.get(i);
        (0..n).all(|j| i == j || inst.eval(i, bundles[j].iter().copied()) + p.get(j) <= own)
    })
}

/// Envy-freeability of the two-agent restriction of `o` to `E_{i,j}`.
pub fn local_efable(inst: &Instance, o: &Orientation, i: AgentId, j: AgentId) -> bool {
    let (bi, bj): (Vec<EdgeId>, Vec<EdgeId>) = inst
        .graph()
        .between(i, j)
        .iter()
        .partition(|&&e| o.owner(e) == i);
    pair_efable(inst, i, j, &bi, &bj)
}

/// `v_i(B_i) + v_j(B_j) >= v_i(B_j) + v_j(B_i)`.
pub fn pair_efable(inst: &Instance, i: AgentId, j: AgentId, bi: &[EdgeId], bj: &[EdgeId]) -> bool {
    let kept = inst.eval(i, bi.iter().copied()) + inst.eval(j, bj.iter().copied());
    let swapped = inst.eval(i, bj.iter().copied()) + inst.eval(j, bi.iter().copied());
    kept >= swapped
}

/// `v_i(B_j) - v_i(B_i)`.
pub fn envy(inst: &Instance, i: AgentId, bi: &[EdgeId], bj: &[EdgeId]) -> Rational {
    inst.eval(i, bj.iter().copied()) - inst.eval(i, bi.iter().copied())
}

pub fn envies(inst: &Instance, i: AgentId, bi: &[EdgeId], bj: &[EdgeId]) -> bool {
    envy(inst, i, bi, bj).is_positive()
}
