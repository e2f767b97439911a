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

//! Instances, valuations, orientations and payments.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::{invalid, Error, Result};
use crate::rational::{self, Rational};

pub type AgentId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: EdgeId,
    pub u: AgentId,
    pub v: AgentId,
}

impl Edge {
    pub fn touches(&self, i: AgentId) -> bool {
        self.u == i || self.v == i
    }

    /// The endpoint that is not `i`. `i` must be an endpoint.
    pub fn other(&self, i: AgentId) -> AgentId {
        if self.u == i {
            self.v
        } else {
            self.u
        }
    }
}

/// Undirected multigraph whose vertices are agents and whose edges are items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    n_agents: usize,
    edges: Vec<Edge>,
    incident: Vec<Vec<EdgeId>>,
    pairs: BTreeMap<(AgentId, AgentId), Vec<EdgeId>>,
}

impl MultiGraph {
    /// Builds a graph from endpoint pairs; edge `k` gets id `k`.
    pub fn new(n_agents: usize, endpoints: &[(AgentId, AgentId)]) -> Result<Self> {
        if n_agents == 0 {
            return invalid("an instance needs at least one agent");
        }
        let mut edges = Vec::with_capacity(endpoints.len());
        let mut incident = vec![Vec::new(); n_agents];
        let mut pairs: BTreeMap<(AgentId, AgentId), Vec<EdgeId>> = BTreeMap::new();
        for (id, &(u, v)) in endpoints.iter().enumerate() {
            if u >= n_agents || v >= n_agents {
                return invalid(format!("edge {id} has an endpoint outside 0..{n_agents}"));
            }
            if u == v {
                return invalid(format!("edge {id} is a self-loop on agent {u}"));
            }
            edges.push(Edge { id, u, v });
            incident[u].push(id);
            incident[v].push(id);
            pairs.entry((u.min(v), u.max(v))).or_default().push(id);
        }
        Ok(MultiGraph {
            n_agents,
            edges,
            incident,
            pairs,
        })
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    /// Edge ids incident to `i`, ascending.
    pub fn incident(&self, i: AgentId) -> &[EdgeId] {
        &self.incident[i]
    }

    /// Edge ids of E_{i,j}, ascending.
    pub fn between(&self, i: AgentId, j: AgentId) -> &[EdgeId] {
        self.pairs
            .get(&(i.min(j), i.max(j)))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Adjacent pairs `(i, j)` with `i < j` in lexicographic order.
    pub fn adjacent_pairs(&self) -> impl Iterator<Item = ((AgentId, AgentId), &[EdgeId])> {
        self.pairs.iter().map(|(&k, v)| (k, v.as_slice()))
    }

    /// Distinct neighbours of `i`, ascending.
    pub fn neighbors(&self, i: AgentId) -> Vec<AgentId> {
        let mut out: Vec<AgentId> = self.incident[i]
            .iter()
            .map(|&e| self.edges[e].other(i))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn is_simple(&self) -> bool {
        self.pairs.values().all(|v| v.len() <= 1)
    }

    pub(crate) fn check_agent(&self, i: AgentId) -> Result<()> {
        if i >= self.n_agents {
            return invalid(format!("unknown agent {i}"));
        }
        Ok(())
    }

    pub(crate) fn check_edge(&self, e: EdgeId) -> Result<()> {
        if e >= self.edges.len() {
            return invalid(format!("unknown edge {e}"));
        }
        Ok(())
    }
}

/// Closed-form monotone valuation families. The additive base values live
/// on the instance's edges; families reshape them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonotoneFamily {
    PlainAdditive,
    /// `min(cap, sum of base values)`.
    AdditiveCapped { cap: Rational },
    /// 1 if the bundle holds at least `threshold` incident edges, else 0.
    AllOrNothingDegree { threshold: usize },
    /// Value of the best single incident edge in the bundle.
    UnitDemand,
}

impl MonotoneFamily {
    pub fn name(&self) -> &'static str {
        match self {
            MonotoneFamily::PlainAdditive => "additive",
            MonotoneFamily::AdditiveCapped { .. } => "capped",
            MonotoneFamily::AllOrNothingDegree { .. } => "all_or_nothing",
            MonotoneFamily::UnitDemand => "unit_demand",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValuationProfile {
    Additive,
    Monotone(Vec<MonotoneFamily>),
}

static PLAIN: MonotoneFamily = MonotoneFamily::PlainAdditive;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizationReport {
    pub agent: AgentId,
    pub max_marginal: Rational,
    pub is_unit: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    graph: MultiGraph,
    /// `[value to edge.u, value to edge.v]` per edge.
    values: Vec<[Rational; 2]>,
    profile: ValuationProfile,
}

impl Instance {
    pub fn new(
        graph: MultiGraph,
        values: Vec<[Rational; 2]>,
        profile: ValuationProfile,
    ) -> Result<Self> {
        if values.len() != graph.n_edges() {
            return invalid(format!(
                "{} edges but {} value pairs",
                graph.n_edges(),
                values.len()
            ));
        }
        if let Some(e) = values
            .iter()
            .position(|[a, b]| a.is_negative() || b.is_negative())
        {
            return invalid(format!("edge {e} has a negative value"));
        }
        if let ValuationProfile::Monotone(families) = &profile {
            if families.len() != graph.n_agents() {
                return invalid(format!(
                    "{} agents but {} valuation families",
                    graph.n_agents(),
                    families.len()
                ));
            }
            for (i, f) in families.iter().enumerate() {
                match f {
                    MonotoneFamily::AdditiveCapped { cap } if cap.is_negative() => {
                        return invalid(format!("agent {i} has a negative cap"));
                    }
                    MonotoneFamily::AllOrNothingDegree { threshold: 0 } => {
                        return invalid(format!("agent {i} has threshold 0"));
                    }
                    _ => {}
                }
            }
        }
        Ok(Instance {
            graph,
            values,
            profile,
        })
    }

    /// Additive instance from `(u, v, value to u, value to v)` tuples.
    pub fn additive(
        n_agents: usize,
        edges: &[(AgentId, AgentId, Rational, Rational)],
    ) -> Result<Self> {
        let endpoints: Vec<_> = edges.iter().map(|(u, v, _, _)| (*u, *v)).collect();
        let graph = MultiGraph::new(n_agents, &endpoints)?;
        let values = edges
            .iter()
            .map(|(_, _, a, b)| [a.clone(), b.clone()])
            .collect();
        Instance::new(graph, values, ValuationProfile::Additive)
    }

    pub fn graph(&self) -> &MultiGraph {
        &self.graph
    }

    pub fn n_agents(&self) -> usize {
        self.graph.n_agents()
    }

    pub fn n_edges(&self) -> usize {
        self.graph.n_edges()
    }

    pub fn profile(&self) -> &ValuationProfile {
        &self.profile
    }

    pub fn edge_values(&self) -> &[[Rational; 2]] {
        &self.values
    }

    pub fn family(&self, i: AgentId) -> &MonotoneFamily {
        match &self.profile {
            ValuationProfile::Additive => &PLAIN,
            ValuationProfile::Monotone(f) => &f[i],
        }
    }

    /// True when every agent's valuation is additive in the base values.
    pub fn is_additive(&self) -> bool {
        match &self.profile {
            ValuationProfile::Additive => true,
            ValuationProfile::Monotone(f) => {
                f.iter().all(|x| *x == MonotoneFamily::PlainAdditive)
            }
        }
    }

    pub fn is_binary(&self) -> bool {
        self.is_additive()
            && self
                .values
                .iter()
                .flatten()
                .all(|x| x.is_zero() || x.is_one())
    }

    /// Base value of edge `e` to agent `i`; 0 when `i` is not an endpoint.
    pub fn base(&self, i: AgentId, e: EdgeId) -> &Rational {
        static ZERO: std::sync::OnceLock<Rational> = std::sync::OnceLock::new();
        let edge = self.graph.edge(e);
        if edge.u == i {
            &self.values[e][0]
        } else if edge.v == i {
            &self.values[e][1]
        } else {
            ZERO.get_or_init(Rational::zero)
        }
    }

    /// `v_i({e})`.
    pub fn single(&self, i: AgentId, e: EdgeId) -> Rational {
        self.eval(i, std::iter::once(e))
    }

    /// `v_i(bundle)` with validation of ids. Duplicate ids count once.
    pub fn value(&self, i: AgentId, bundle: &[EdgeId]) -> Result<Rational> {
        self.graph.check_agent(i)?;
        for &e in bundle {
            self.graph.check_edge(e)?;
        }
        let mut set = bundle.to_vec();
        set.sort_unstable();
        set.dedup();
        Ok(self.eval(i, set))
    }

    /// `v_i(bundle)` for distinct, in-range ids. Non-incident edges are ignored.
    pub fn eval(&self, i: AgentId, bundle: impl IntoIterator<Item = EdgeId>) -> Rational {
        let own = bundle
            .into_iter()
            .filter(|&e| self.graph.edge(e).touches(i));
        match self.family(i) {
            MonotoneFamily::PlainAdditive => {
                own.fold(Rational::zero(), |acc, e| acc + self.base(i, e))
            }
            MonotoneFamily::AdditiveCapped { cap } => {
                let s = own.fold(Rational::zero(), |acc, e| acc + self.base(i, e));
                if &s > cap {
                    cap.clone()
                } else {
                    s
                }
            }
            MonotoneFamily::AllOrNothingDegree { threshold } => {
                if own.count() >= *threshold {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }
            MonotoneFamily::UnitDemand => own
                .map(|e| self.base(i, e))
                .max()
                .cloned()
                .unwrap_or_else(Rational::zero),
        }
    }

    /// Largest marginal value any single item can add to agent `i`.
    pub fn max_marginal(&self, i: AgentId) -> Rational {
        let max_base = self
            .graph
            .incident(i)
            .iter()
            .map(|&e| self.base(i, e))
            .max()
            .cloned()
            .unwrap_or_else(Rational::zero);
        match self.family(i) {
            MonotoneFamily::PlainAdditive | MonotoneFamily::UnitDemand => max_base,
            MonotoneFamily::AdditiveCapped { cap } => max_base.min(cap.clone()),
            MonotoneFamily::AllOrNothingDegree { threshold } => {
                if self.graph.incident(i).len() >= *threshold {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }
        }
    }

    pub fn check_normalization(&self) -> Vec<NormalizationReport> {
        (0..self.n_agents())
            .map(|i| {
                let max_marginal = self.max_marginal(i);
                let is_unit = max_marginal.is_one();
                NormalizationReport {
                    agent: i,
                    max_marginal,
                    is_unit,
                }
            })
            .collect()
    }

    pub fn is_unit_normalized(&self) -> bool {
        self.check_normalization().iter().all(|r| r.is_unit)
    }

    pub fn max_marginal_at_most_one(&self) -> bool {
        (0..self.n_agents()).all(|i| self.max_marginal(i) <= Rational::one())
    }

    /// Divides each agent's values by that agent's largest incident value.
    /// Payments computed on the result are in per-agent normalized units.
    pub fn normalize_additive(&self) -> Result<Instance> {
        if !self.is_additive() {
            return Err(Error::Precondition(
                "normalize_additive needs additive valuations".into(),
            ));
        }
        let mut scale = Vec::with_capacity(self.n_agents());
        for i in 0..self.n_agents() {
            let m = self.max_marginal(i);
            if m.is_zero() {
                return Err(Error::Normalization(format!(
                    "agent {i} values every incident edge at 0"
                )));
            }
            scale.push(m);
        }
        let values = self
            .graph
            .edges()
            .iter()
            .map(|e| {
                [
                    &self.values[e.id][0] / &scale[e.u],
                    &self.values[e.id][1] / &scale[e.v],
                ]
            })
            .collect();
        Instance::new(self.graph.clone(), values, self.profile.clone())
    }
}

/// Owner of every edge; `owner[e]` is always an endpoint of `e`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Orientation {
    owner: Vec<AgentId>,
}

impl Orientation {
    pub fn new(graph: &MultiGraph, owner: Vec<AgentId>) -> Result<Self> {
        if owner.len() != graph.n_edges() {
            return invalid(format!(
                "orientation covers {} edges, graph has {}",
                owner.len(),
                graph.n_edges()
            ));
        }
        for (e, &o) in owner.iter().enumerate() {
            if !graph.edge(e).touches(o) {
                return invalid(format!("edge {e} given to non-endpoint agent {o}"));
            }
        }
        Ok(Orientation { owner })
    }

    pub(crate) fn from_raw(owner: Vec<AgentId>) -> Self {
        Orientation { owner }
    }

    pub fn owner(&self, e: EdgeId) -> AgentId {
        self.owner[e]
    }

    pub fn owners(&self) -> &[AgentId] {
        &self.owner
    }

    /// A_i, ascending edge ids.
    pub fn bundle(&self, i: AgentId) -> Vec<EdgeId> {
        self.owner
            .iter()
            .enumerate()
            .filter(|(_, &o)| o == i)
            .map(|(e, _)| e)
            .collect()
    }

    pub fn bundles(&self, n_agents: usize) -> Vec<Vec<EdgeId>> {
        let mut out = vec![Vec::new(); n_agents];
        for (e, &o) in self.owner.iter().enumerate() {
            out[o].push(e);
        }
        out
    }
}

/// Nonnegative subsidy per agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaymentVector(Vec<Rational>);

impl PaymentVector {
    pub fn new(p: Vec<Rational>) -> Result<Self> {
        if let Some(i) = p.iter().position(Signed::is_negative) {
            return invalid(format!("payment of agent {i} is negative"));
        }
        Ok(PaymentVector(p))
    }

    pub fn zeros(n: usize) -> Self {
        PaymentVector(vec![Rational::zero(); n])
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn get(&self, i: AgentId) -> &Rational {
        &self.0[i]
    }

    pub fn total(&self) -> Rational {
        rational::sum(&self.0)
    }

    pub fn into_inner(self) -> Vec<Rational> {
        self.0
    }
}

/// Result of a runtime self-check performed by a solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Per-component classification recorded by the binary solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentRecord {
    pub agents: Vec<AgentId>,
    pub properties: Vec<String>,
    pub witness: String,
    pub subsidized: Option<AgentId>,
}

/// Per-node record of the additive solver's tree subroutine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sub2Record {
    pub agent: AgentId,
    pub parent: AgentId,
    pub k: AgentId,
    pub w: Rational,
    pub t: Rational,
    pub children_w: Rational,
    pub r: Vec<AgentId>,
    pub q1: Vec<AgentId>,
    pub q1_prime: Vec<AgentId>,
    pub q2: Vec<AgentId>,
    pub q3: Vec<AgentId>,
    pub q4: Vec<AgentId>,
    pub q5: Vec<AgentId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub thresholds: Option<Vec<Rational>>,
    pub w: Option<Vec<Rational>>,
    pub t: Option<Vec<Rational>>,
    pub components: Vec<ComponentRecord>,
    pub sub2: Vec<Sub2Record>,
    pub checks: Vec<Check>,
}

impl Diagnostics {
    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub algorithm: String,
    pub orientation: Orientation,
    pub payments: PaymentVector,
    /// Name and value of the guarantee the producing algorithm promises.
    pub bound: Option<(String, Rational)>,
    pub diagnostics: Diagnostics,
}

impl Solution {
    pub fn total_subsidy(&self) -> Rational {
        self.payments.total()
    }
}
