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

//! Instance generators: the extremal examples, the satisfiability gadget and
//! seeded random corpora.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::model::{AgentId, Instance, MonotoneFamily, MultiGraph, ValuationProfile};
use crate::rational::{frac, int, Rational};

/// CNF formula with DIMACS-style literals: `k` is variable `k - 1`,
/// `-k` its negation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    pub vars: usize,
    pub clauses: Vec<[i32; 3]>,
}

impl Formula {
    /// Every clause has three literals over distinct, in-range variables.
    pub fn validate(&self) -> Result<()> {
        for (j, c) in self.clauses.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for &l in c {
                let v = l.unsigned_abs() as usize;
                if l == 0 || v > self.vars {
                    return invalid(format!("clause {j} has literal {l} out of range"));
                }
                if !seen.insert(v) {
                    return invalid(format!("clause {j} repeats variable {v}"));
                }
            }
        }
        Ok(())
    }

    /// Additionally every variable occurs exactly twice with each sign.
    pub fn validate_2p2n(&self) -> Result<()> {
        self.validate()?;
        let mut pos = vec![0usize; self.vars];
        let mut neg = vec![0usize; self.vars];
        for &l in self.clauses.iter().flatten() {
            let v = l.unsigned_abs() as usize - 1;
            if l > 0 {
                pos[v] += 1;
            } else {
                neg[v] += 1;
            }
        }
        if let Some(v) = (0..self.vars).find(|&v| pos[v] != 2 || neg[v] != 2) {
            return invalid(format!(
                "variable {} occurs {} times positively and {} times negatively",
                v + 1,
                pos[v],
                neg[v]
            ));
        }
        Ok(())
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0))
        })
    }

    /// Exhaustive search over all assignments; at most 24 variables.
    pub fn satisfying_assignment(&self) -> Result<Option<Vec<bool>>> {
        if self.vars > 24 {
            return invalid("exhaustive satisfiability is limited to 24 variables");
        }
        for bits in 0u64..(1u64 << self.vars) {
            let a: Vec<bool> = (0..self.vars).map(|k| (bits >> k) & 1 == 1).collect();
            if self.satisfied_by(&a) {
                return Ok(Some(a));
            }
        }
        Ok(None)
    }

    /// Parses DIMACS CNF (`p cnf <vars> <clauses>` header, clauses ending in 0).
    pub fn parse_dimacs(text: &str) -> Result<Formula> {
        let mut vars = None;
        let mut lits: Vec<i32> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 || parts[0] != "cnf" {
                    return invalid(format!("bad header {line:?}"));
                }
                vars = Some(
                    parts[1]
                        .parse::<usize>()
                        .map_err(|_| Error::InvalidInput(format!("bad header {line:?}")))?,
                );
                continue;
            }
            for tok in line.split_whitespace() {
                let l: i32 = tok
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad literal {tok:?}")))?;
                lits.push(l);
            }
        }
        let vars = vars.ok_or_else(|| Error::InvalidInput("missing p cnf header".into()))?;
        let mut clauses = Vec::new();
        let mut cur = Vec::new();
        for l in lits {
            if l == 0 {
                let c: [i32; 3] = cur
                    .as_slice()
                    .try_into()
                    .map_err(|_| Error::InvalidInput("every clause needs exactly 3 literals".into()))?;
                clauses.push(c);
                cur.clear();
            } else {
                cur.push(l);
            }
        }
        if !cur.is_empty() {
            return invalid("last clause is not terminated by 0");
        }
        let f = Formula { vars, clauses };
        f.validate()?;
        Ok(f)
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.vars, self.clauses.len());
        for c in &self.clauses {
            s.push_str(&format!("{} {} {} 0\n", c[0], c[1], c[2]));
        }
        s
    }
}

/// Random formula in which each variable occurs twice with each sign.
/// `vars` must be a multiple of 3.
pub fn random_2p2n_formula(vars: usize, seed: u64) -> Result<Formula> {
    if vars == 0 || !vars.is_multiple_of(3) {
        return invalid("the number of variables must be a positive multiple of 3");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lits: Vec<i32> = (1..=vars as i32).flat_map(|v| [v, v, -v, -v]).collect();
    loop {
        lits.shuffle(&mut rng);
        let clauses: Vec<[i32; 3]> = lits.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
        let f = Formula { vars, clauses };
        if f.validate().is_ok() {
            return Ok(f);
        }
    }
}

/// Agent ids used by the satisfiability gadget.
pub mod gadget {
    use crate::model::AgentId;

    pub fn positive(var: usize) -> AgentId {
        2 * var
    }

    pub fn negative(var: usize) -> AgentId {
        2 * var + 1
    }

    pub fn clause(vars: usize, j: usize) -> AgentId {
        2 * vars + 2 * j
    }

    pub fn dummy(vars: usize, j: usize) -> AgentId {
        2 * vars + 2 * j + 1
    }
}

/// The orientation gadget for any 3-CNF formula with distinct variables per
/// clause. Variable edges are worth 1 to both ends, every other edge 1/2.
pub fn gen_clause_gadget(f: &Formula) -> Result<Instance> {
    f.validate()?;
    let (n, m) = (f.vars, f.clauses.len());
    let mut edges: Vec<(AgentId, AgentId, Rational, Rational)> = Vec::new();
    for v in 0..n {
        edges.push((gadget::positive(v), gadget::negative(v), int(1), int(1)));
    }
    let half = frac(1, 2);
    for (j, c) in f.clauses.iter().enumerate() {
        for &l in c {
            let v = l.unsigned_abs() as usize - 1;
            let lit = if l > 0 { gadget::positive(v) } else { gadget::negative(v) };
            edges.push((gadget::clause(n, j), lit, half.clone(), half.clone()));
        }
    }
    for j in 0..m {
        edges.push((gadget::dummy(n, j), gadget::clause(n, j), half.clone(), half.clone()));
    }
    Instance::additive(2 * n + 2 * m, &edges)
}

/// Reduction instance for a formula where every variable occurs twice with
/// each sign: `2n + 2m` agents and `5n + m` edges.
pub fn gen_from_2p2n3sat(f: &Formula) -> Result<Instance> {
    f.validate_2p2n()?;
    let inst = gen_clause_gadget(f)?;
    let (n, m) = (f.vars, f.clauses.len());
    if inst.n_agents() != 2 * n + 2 * m || inst.n_edges() != 5 * n + m {
        return Err(Error::Invariant("gadget size mismatch".into()));
    }
    Ok(inst)
}

/// Reads an assignment off a gadget orientation: variable `v` is true when
/// its positive vertex keeps the variable edge.
pub fn decode_assignment(f: &Formula, owners: &[AgentId]) -> Vec<bool> {
    (0..f.vars).map(|v| owners[v] == gadget::positive(v)).collect()
}

/// `pairs` disjoint edges, each worth 1 to both ends.
pub fn gen_parallel_pairs(pairs: usize) -> Result<Instance> {
    if pairs == 0 {
        return invalid("at least one pair is required");
    }
    let edges: Vec<_> = (0..pairs).map(|k| (2 * k, 2 * k + 1, int(1), int(1))).collect();
    Instance::additive(2 * pairs, &edges)
}

/// A unit edge on agents 0 and 1 plus a clique on the remaining `n - 2`
/// agents, each of whom values only holding all of its clique edges.
pub fn gen_threshold_clique(n: usize) -> Result<Instance> {
    if n < 5 {
        return invalid("the threshold clique needs n >= 5");
    }
    let mut endpoints = vec![(0, 1)];
    let mut values = vec![[int(1), int(1)]];
    for a in 2..n {
        for b in a + 1..n {
            endpoints.push((a, b));
            values.push([Rational::zero(), Rational::zero()]);
        }
    }
    let mut families = vec![MonotoneFamily::PlainAdditive; 2];
    families.extend(std::iter::repeat_n(
        MonotoneFamily::AllOrNothingDegree { threshold: n - 3 },
        n - 2,
    ));
    let g = MultiGraph::new(n, &endpoints)?;
    Instance::new(g, values, ValuationProfile::Monotone(families))
}

/// Five agents on a path with edge values built from `epsilon`.
pub fn gen_appendix_path(epsilon: &Rational) -> Result<Instance> {
    if *epsilon <= Rational::zero() || *epsilon >= frac(1, 2) {
        return invalid("epsilon must lie strictly between 0 and 1/2");
    }
    let e = epsilon.clone();
    let one = Rational::one();
    Instance::additive(
        5,
        &[
            (0, 1, one.clone(), one.clone()),
            (1, 2, &e * &e, one.clone()),
            (2, 3, &one - &e, e.clone()),
            (3, 4, one.clone(), one),
        ],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomKind {
    /// Values in {0, 1}; every agent values some incident edge at 1.
    Binary,
    /// Values in {1, 2}.
    Bivalued12,
    /// Values in sixths, rescaled so each agent's largest value is 1.
    AdditiveUnit,
    /// Unit-scaled base values with a random monotone family per agent.
    MonotoneFamily,
}

impl RandomKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(RandomKind::Binary),
            "bivalued12" => Ok(RandomKind::Bivalued12),
            "additive-unit" => Ok(RandomKind::AdditiveUnit),
            "monotone-family" => Ok(RandomKind::MonotoneFamily),
            _ => invalid(format!("unknown random kind {s:?}")),
        }
    }
}

/// Random multigraph (parallel edges allowed) with every agent covered.
/// The edge count is `max(m, ceil(n / 2))`.
pub fn gen_random(seed: u64, n: usize, m: usize, kind: RandomKind) -> Result<Instance> {
    random_instance(seed, n, m, kind, false)
}

/// Like [`gen_random`] but without parallel edges; `m` is capped at
/// `n (n - 1) / 2`.
pub fn gen_random_simple(seed: u64, n: usize, m: usize, kind: RandomKind) -> Result<Instance> {
    random_instance(seed, n, m, kind, true)
}

fn random_instance(seed: u64, n: usize, m: usize, kind: RandomKind, simple: bool) -> Result<Instance> {
    if n < 2 || m == 0 {
        return invalid("random instances need n >= 2 and m >= 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<AgentId> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut endpoints: Vec<(AgentId, AgentId)> = Vec::new();
    let mut used: BTreeSet<(AgentId, AgentId)> = BTreeSet::new();
    let mut push = |a: AgentId, b: AgentId, ends: &mut Vec<(AgentId, AgentId)>| -> bool {
        let key = (a.min(b), a.max(b));
        if simple && !used.insert(key) {
            return false;
        }
        ends.push((a, b));
        true
    };
    for pair in perm.chunks(2) {
        if let [a, b] = *pair {
            push(a, b, &mut endpoints);
        } else {
            let a = pair[0];
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            push(a, b, &mut endpoints);
        }
    }
    let cap = if simple { n * (n - 1) / 2 } else { usize::MAX };
    let target = m.max(endpoints.len()).min(cap);
    while endpoints.len() < target {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        push(a, b, &mut endpoints);
    }
    let g = MultiGraph::new(n, &endpoints)?;
    let draw = |rng: &mut ChaCha8Rng| -> Rational {
        match kind {
            RandomKind::Binary => int(rng.random_range(0..=1)),
            RandomKind::Bivalued12 => int(rng.random_range(1..=2)),
            RandomKind::AdditiveUnit | RandomKind::MonotoneFamily => frac(rng.random_range(0..=6), 6),
        }
    };
    let mut values: Vec<[Rational; 2]> = (0..g.n_edges()).map(|_| [draw(&mut rng), draw(&mut rng)]).collect();
    if kind != RandomKind::Bivalued12 {
        // make sure each agent has something worth 1 (or worth anything, before rescaling)
        for i in 0..n {
            let inc = g.incident(i);
            let side = |e: usize| usize::from(g.edge(e).u != i);
            if inc.iter().all(|&e| values[e][side(e)].is_zero()) {
                let e = inc[rng.random_range(0..inc.len())];
                values[e][side(e)] = Rational::one();
            }
            if kind == RandomKind::Binary {
                continue;
            }
            let max = inc.iter().map(|&e| values[e][side(e)].clone()).max().expect("covered");
            for &e in inc {
                values[e][side(e)] = &values[e][side(e)] / &max;
            }
        }
    }
    let profile = if kind == RandomKind::MonotoneFamily {
        let families = (0..n)
            .map(|i| match rng.random_range(0..4) {
                0 => MonotoneFamily::PlainAdditive,
                1 => MonotoneFamily::AdditiveCapped {
                    cap: frac(rng.random_range(6..=12), 6),
                },
                2 => MonotoneFamily::AllOrNothingDegree {
                    threshold: rng.random_range(1..=g.incident(i).len()),
                },
                _ => MonotoneFamily::UnitDemand,
            })
            .collect();
        ValuationProfile::Monotone(families)
    } else {
        ValuationProfile::Additive
    };
    Instance::new(g, values, profile)
}
