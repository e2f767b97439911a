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

//! Minimum-subsidy orientations for binary additive valuations.
//!
//! Edges valued 1 by both endpoints are *critical*; edges valued 1 by exactly
//! one endpoint are *non-critical* and always go to that endpoint. The
//! critical edges split into blocks (connected components). A block needs
//! one unit of subsidy exactly when none of its vertices holds a
//! non-critical edge and it has no critical cycle, no pair joined by an even
//! number of critical edges, and no vertex with two heavy neighbours.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::envy;
use crate::error::{Error, Result};
use crate::model::{
    AgentId, ComponentRecord, Diagnostics, EdgeId, Instance, Orientation, PaymentVector, Solution,
};
use crate::rational::{int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Property {
    /// Some vertex values a non-critical edge at 1.
    NonCritical,
    /// A simple cycle of length at least 3 made of critical edges.
    CriticalCycle,
    /// Two vertices joined by an even (nonzero) number of critical edges.
    EvenPair,
    /// A vertex sharing at least two critical edges with each of two neighbours.
    Fork,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::NonCritical => "non_critical",
            Property::CriticalCycle => "critical_cycle",
            Property::EvenPair => "even_pair",
            Property::Fork => "fork",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    NonCritical { edge: EdgeId, holder: AgentId },
    Cycle(Vec<AgentId>),
    EvenPair(AgentId, AgentId),
    Fork { center: AgentId, left: AgentId, right: AgentId },
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Witness::NonCritical { edge, holder } => write!(f, "edge {edge} held by {holder}"),
            Witness::Cycle(c) => {
                let s: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "cycle {}", s.join("-"))
            }
            Witness::EvenPair(i, j) => write!(f, "pair {i}-{j}"),
            Witness::Fork { center, left, right } => write!(f, "fork {left}-{center}-{right}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentClass {
    pub agents: Vec<AgentId>,
    pub satisfied: Vec<Property>,
    /// Certificate for the first satisfied property.
    pub witness: Option<Witness>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Null,
    Critical,
    NonCritical(AgentId),
}

fn check_binary(inst: &Instance) -> Result<()> {
    if !inst.is_binary() {
        return Err(Error::InvalidInput(
            "binary solver needs additive values in {0, 1}".into(),
        ));
    }
    Ok(())
}

fn edge_kind(inst: &Instance, e: EdgeId) -> Kind {
    let edge = inst.graph().edge(e);
    let [a, b] = &inst.edge_values()[e];
    match (a.is_one(), b.is_one()) {
        (true, true) => Kind::Critical,
        (true, false) => Kind::NonCritical(edge.u),
        (false, true) => Kind::NonCritical(edge.v),
        (false, false) => Kind::Null,
    }
}

struct Skeleton<'a> {
    inst: &'a Instance,
    members: BTreeSet<AgentId>,
}

impl Skeleton<'_> {
    fn critical_between(&self, i: AgentId, j: AgentId) -> Vec<EdgeId> {
        self.inst
            .graph()
            .between(i, j)
            .iter()
            .copied()
            .filter(|&e| edge_kind(self.inst, e) == Kind::Critical)
            .collect()
    }

    fn critical_neighbors(&self, i: AgentId) -> Vec<AgentId> {
        self.inst
            .graph()
            .neighbors(i)
            .into_iter()
            .filter(|j| self.members.contains(j) && !self.critical_between(i, *j).is_empty())
            .collect()
    }

    fn find_cycle(&self) -> Option<Vec<AgentId>> {
        let mut parent: std::collections::BTreeMap<AgentId, Option<AgentId>> = Default::default();
        for &root in &self.members {
            if parent.contains_key(&root) {
                continue;
            }
            parent.insert(root, None);
            // iterative DFS keeping the current path
            let mut stack: Vec<(AgentId, Vec<AgentId>, usize)> =
                vec![(root, self.critical_neighbors(root), 0)];
            let mut on_path = vec![root];
            while let Some((x, nbrs, idx)) = stack.last_mut() {
                if *idx == nbrs.len() {
                    stack.pop();
                    on_path.pop();
                    continue;
                }
                let y = nbrs[*idx];
                *idx += 1;
                let x = *x;
                if parent.get(&x).copied().flatten() == Some(y) {
                    continue;
                }
                if let Some(pos) = on_path.iter().position(|&z| z == y) {
                    return Some(on_path[pos..].to_vec());
                }
                if parent.contains_key(&y) {
                    continue;
                }
                parent.insert(y, Some(x));
                on_path.push(y);
                let ny = self.critical_neighbors(y);
                stack.push((y, ny, 0));
            }
        }
        None
    }
}

/// Evaluates the four properties on the subgraph induced by `agents`.
pub fn classify_component(inst: &Instance, agents: &[AgentId]) -> Result<ComponentClass> {
    check_binary(inst)?;
    for &a in agents {
        inst.graph().check_agent(a)?;
    }
    let members: BTreeSet<AgentId> = agents.iter().copied().collect();
    let sk = Skeleton { inst, members };
    let mut satisfied = Vec::new();
    let mut witnesses = Vec::new();

    let non_critical = sk.members.iter().find_map(|&i| {
        inst.graph().incident(i).iter().find_map(|&e| match edge_kind(inst, e) {
            Kind::NonCritical(h) if h == i => Some(Witness::NonCritical { edge: e, holder: i }),
            _ => None,
        })
    });
    if let Some(w) = non_critical {
        satisfied.push(Property::NonCritical);
        witnesses.push(w);
    }
    if let Some(c) = sk.find_cycle() {
        satisfied.push(Property::CriticalCycle);
        witnesses.push(Witness::Cycle(c));
    }
    let even = sk.members.iter().find_map(|&i| {
        sk.critical_neighbors(i)
            .into_iter()
            .filter(|&j| j > i)
            .find(|&j| sk.critical_between(i, j).len().is_multiple_of(2))
            .map(|j| Witness::EvenPair(i, j))
    });
    if let Some(w) = even {
        satisfied.push(Property::EvenPair);
        witnesses.push(w);
    }
    let fork = sk.members.iter().find_map(|&i| {
        let heavy: Vec<AgentId> = sk
            .critical_neighbors(i)
            .into_iter()
            .filter(|&j| sk.critical_between(i, j).len() >= 2)
            .collect();
        (heavy.len() >= 2).then(|| Witness::Fork {
            center: i,
            left: heavy[0],
            right: heavy[1],
        })
    });
    if let Some(w) = fork {
        satisfied.push(Property::Fork);
        witnesses.push(w);
    }
    Ok(ComponentClass {
        agents: sk.members.iter().copied().collect(),
        satisfied,
        witness: witnesses.into_iter().next(),
    })
}

struct State<'a> {
    inst: &'a Instance,
    owner: Vec<Option<AgentId>>,
    worth: Vec<i64>,
}

impl State<'_> {
    fn give(&mut self, e: EdgeId, to: AgentId) {
        debug_assert!(self.owner[e].is_none());
        self.owner[e] = Some(to);
        if self.inst.base(to, e).is_one() {
            self.worth[to] += 1;
        }
    }
}

/// Orients the critical edges of one block. Returns the subsidized agent,
/// if any.
fn orient_block(st: &mut State, class: &ComponentClass) -> Result<Option<AgentId>> {
    let sk = Skeleton {
        inst: st.inst,
        members: class.agents.iter().copied().collect(),
    };
    let mut labeled: BTreeSet<AgentId> = BTreeSet::new();
    let mut subsidized = None;
    match &class.witness {
        Some(Witness::NonCritical { .. }) => {
            labeled.extend(class.agents.iter().copied().filter(|&a| st.worth[a] > 0));
        }
        Some(Witness::Cycle(c)) => {
            for (k, &a) in c.iter().enumerate() {
                let b = c[(k + 1) % c.len()];
                let e = sk.critical_between(a, b)[0];
                st.give(e, a);
            }
            labeled.extend(c.iter().copied());
        }
        Some(Witness::EvenPair(i, j)) => {
            let es = sk.critical_between(*i, *j);
            let half = es.len() / 2;
            for (k, &e) in es.iter().enumerate() {
                st.give(e, if k < half { *i } else { *j });
            }
            labeled.extend([*i, *j]);
        }
        Some(Witness::Fork { center, left, right }) => {
            for side in [*left, *right] {
                let es = sk.critical_between(*center, side);
                for &e in &es[..es.len() / 2] {
                    st.give(e, *center);
                }
            }
            labeled.insert(*center);
        }
        None => {
            let seed = class.agents[0];
            subsidized = Some(seed);
            labeled.insert(seed);
        }
    }

    let pay = |a: AgentId| i64::from(subsidized == Some(a));
    let mut removed: BTreeSet<AgentId> = BTreeSet::new();
    while let Some(&p) = labeled.iter().find(|a| !removed.contains(a)) {
        for o in sk.critical_neighbors(p) {
            let es = sk.critical_between(p, o);
            let rest: Vec<EdgeId> = es.iter().copied().filter(|&e| st.owner[e].is_none()).collect();
            if rest.is_empty() {
                continue;
            }
            let r = rest.len() as i64;
            let held = es.iter().filter(|&&e| st.owner[e] == Some(o)).count() as i64;
            // fewest edges that stop p envying o's share of E_{p,o}
            let need = held + r - (st.worth[p] + pay(p));
            let x = need.div_euclid(2) + need.rem_euclid(2);
            let x = x.clamp(0, r) as usize;
            for (k, &e) in rest.iter().enumerate() {
                st.give(e, if k < x { p } else { o });
            }
            if x < rest.len() {
                labeled.insert(o);
            }
        }
        removed.insert(p);
    }
    for &a in &class.agents {
        for o in sk.critical_neighbors(a) {
            if sk.critical_between(a, o).iter().any(|&e| st.owner[e].is_none()) {
                return Err(Error::Invariant(format!(
                    "critical edges between {a} and {o} left unallocated"
                )));
            }
        }
    }
    Ok(subsidized)
}

fn blocks(inst: &Instance) -> Vec<Vec<AgentId>> {
    let n = inst.n_agents();
    let mut uf: Vec<usize> = (0..n).collect();
    fn find(uf: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while uf[r] != r {
            r = uf[r];
        }
        let mut y = x;
        while uf[y] != r {
            let next = uf[y];
            uf[y] = r;
            y = next;
        }
        r
    }
    let mut touched = vec![false; n];
    for e in inst.graph().edges() {
        if edge_kind(inst, e.id) == Kind::Critical {
            touched[e.u] = true;
            touched[e.v] = true;
            let (a, b) = (find(&mut uf, e.u), find(&mut uf, e.v));
            uf[a.max(b)] = a.min(b);
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<AgentId>> = Default::default();
    for i in (0..n).filter(|&i| touched[i]) {
            let r = find(&mut uf, i);
            groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Minimum-subsidy EF orientation. Every agent must value some incident edge
/// at 1; an agent valuing everything at 0 would envy any subsidized agent.
pub fn solve_binary(inst: &Instance) -> Result<Solution> {
    check_binary(inst)?;
    if let Some(i) = (0..inst.n_agents()).find(|&i| !inst.max_marginal(i).is_one()) {
        return Err(Error::Normalization(format!(
            "agent {i} has no incident edge valued 1"
        )));
    }
    let n = inst.n_agents();
    let mut st = State {
        inst,
        owner: vec![None; inst.n_edges()],
        worth: vec![0; n],
    };
    for e in inst.graph().edges() {
        if let Kind::NonCritical(h) = edge_kind(inst, e.id) {
            st.give(e.id, h);
        }
    }
    let mut diag = Diagnostics::default();
    let mut payments = vec![Rational::zero(); n];
    let mut count = 0i64;
    for block in blocks(inst) {
        let class = classify_component(inst, &block)?;
        let subsidized = orient_block(&mut st, &class)?;
        if let Some(s) = subsidized {
            payments[s] = Rational::one();
            count += 1;
        } else {
            let low = block.iter().copied().filter(|&a| st.worth[a] < 1).collect::<Vec<_>>();
            diag.check(
                "block_values_at_least_one",
                low.is_empty(),
                format!("block {block:?}, agents below 1: {low:?}"),
            );
        }
        diag.components.push(ComponentRecord {
            agents: class.agents.clone(),
            properties: class.satisfied.iter().map(|p| p.name().to_string()).collect(),
            witness: class.witness.as_ref().map(|w| w.to_string()).unwrap_or_default(),
            subsidized,
        });
    }
    let owner: Vec<AgentId> = inst
        .graph()
        .edges()
        .iter()
        .map(|e| st.owner[e.id].unwrap_or(e.u.min(e.v)))
        .collect();
    let orientation = Orientation::new(inst.graph(), owner)?;
    let payments = PaymentVector::new(payments)?;
    if !envy::is_ef_with_payments(inst, &orientation, &payments) {
        return Err(Error::Invariant("binary orientation is not envy-free".into()));
    }
    Ok(Solution {
        algorithm: "binary".into(),
        orientation,
        payments,
        bound: Some(("minimum".into(), int(count))),
        diagnostics: diag,
    })
}
