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

//! Envy-free orientations of additive multigraphs with total subsidy at most
//! n/2.
//!
//! Every agent claims one of its unit-valued edges; the claims form the
//! reserve graph, a functional digraph whose components each carry exactly
//! one cycle. Edges along reserve arcs are split first, component by
//! component, while per-agent budgets `t` are tracked. The remaining pairs
//! are then split by round-robin and the budgets shrink into payments.

use std::collections::{BTreeMap, VecDeque};

use num_traits::{One, Signed, Zero};

use crate::envy;
use crate::error::{Error, Result};
use crate::model::{
    AgentId, Diagnostics, EdgeId, Instance, Orientation, PaymentVector, Solution, Sub2Record,
};
use crate::rational::{frac, positive_part, Rational};
use crate::subroutines::{max_utility, round_robin};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReserveComponent {
    pub agents: Vec<AgentId>,
    /// The unique directed cycle, starting from its lowest id and following
    /// arcs forward.
    pub cycle: Vec<AgentId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReserveGraph {
    /// Edge claimed by each agent.
    pub claim: Vec<EdgeId>,
    /// Other endpoint of each agent's claim; the arc runs `parent[i] -> i`.
    pub parent: Vec<AgentId>,
    pub components: Vec<ReserveComponent>,
}

impl ReserveGraph {
    pub fn arcs(&self) -> Vec<(AgentId, AgentId)> {
        self.parent.iter().enumerate().map(|(i, &p)| (p, i)).collect()
    }

    /// Out-neighbours of `i`, ascending.
    pub fn children(&self, i: AgentId) -> Vec<AgentId> {
        (0..self.parent.len()).filter(|&c| self.parent[c] == i).collect()
    }

    /// BFS order of the out-tree rooted at `root`, skipping `skip`.
    pub fn tree_order(&self, root: AgentId, skip: AgentId) -> Vec<AgentId> {
        let mut order = Vec::new();
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            order.push(x);
            queue.extend(self.children(x).into_iter().filter(|&c| c != skip && c != root));
        }
        order
    }

    /// Whether a reserve arc runs between `i` and `j` in either direction.
    pub fn joined(&self, i: AgentId, j: AgentId) -> bool {
        self.parent[i] == j || self.parent[j] == i
    }
}

fn check_pre(inst: &Instance) -> Result<()> {
    if !inst.is_additive() {
        return Err(Error::Precondition("additive valuations are required".into()));
    }
    if let Some(r) = inst.check_normalization().into_iter().find(|r| !r.is_unit) {
        return Err(Error::Normalization(format!(
            "agent {} has max value {}, expected exactly 1",
            r.agent, r.max_marginal
        )));
    }
    Ok(())
}

pub fn build_reserve_graph(inst: &Instance) -> Result<ReserveGraph> {
    let n = inst.n_agents();
    let mut claim = Vec::with_capacity(n);
    for i in 0..n {
        let e = inst
            .graph()
            .incident(i)
            .iter()
            .copied()
            .find(|&e| inst.base(i, e).is_one())
            .ok_or_else(|| Error::Precondition(format!("agent {i} has no unit-valued edge")))?;
        claim.push(e);
    }
    let parent: Vec<AgentId> = (0..n).map(|i| inst.graph().edge(claim[i]).other(i)).collect();

    // weak components of the functional graph
    let mut comp = vec![usize::MAX; n];
    let mut components = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut agents = vec![start];
        comp[start] = id;
        let mut k = 0;
        while k < agents.len() {
            let x = agents[k];
            k += 1;
            let nbrs = std::iter::once(parent[x]).chain((0..n).filter(|&c| parent[c] == x));
            for y in nbrs.collect::<Vec<_>>() {
                if comp[y] == usize::MAX {
                    comp[y] = id;
                    agents.push(y);
                }
            }
        }
        agents.sort_unstable();
        let mut x = agents[0];
        for _ in 0..n {
            x = parent[x];
        }
        // x is on the cycle; walk backwards along parents and reverse
        let mut back = vec![x];
        let mut y = parent[x];
        while y != x {
            back.push(y);
            y = parent[y];
        }
        back.reverse();
        let low = (0..back.len()).min_by_key(|&k| back[k]).unwrap_or(0);
        back.rotate_left(low);
        components.push(ReserveComponent { agents, cycle: back });
    }
    Ok(ReserveGraph { claim, parent, components })
}

struct Run<'a> {
    inst: &'a Instance,
    reserve: ReserveGraph,
    owner: Vec<Option<AgentId>>,
    w: Vec<Rational>,
    t: Vec<Rational>,
    diag: Diagnostics,
}

impl Run<'_> {
    fn val(&self, i: AgentId, b: &[EdgeId]) -> Rational {
        self.inst.eval(i, b.iter().copied())
    }

    fn held(&self, i: AgentId) -> Vec<EdgeId> {
        (0..self.owner.len()).filter(|&e| self.owner[e] == Some(i)).collect()
    }

    /// The part of `E_{a,b}` currently held by `b`.
    fn share(&self, a: AgentId, b: AgentId) -> Vec<EdgeId> {
        self.inst
            .graph()
            .between(a, b)
            .iter()
            .copied()
            .filter(|&e| self.owner[e] == Some(b))
            .collect()
    }

    fn commit(&mut self, a: AgentId, ba: &[EdgeId], b: AgentId, bb: &[EdgeId]) {
        for &e in ba {
            debug_assert!(self.owner[e].is_none());
            self.owner[e] = Some(a);
        }
        for &e in bb {
            debug_assert!(self.owner[e].is_none());
            self.owner[e] = Some(b);
        }
    }

    fn swap_pair(&mut self, a: AgentId, b: AgentId) {
        for &e in self.inst.graph().between(a, b) {
            self.owner[e] = match self.owner[e] {
                Some(x) if x == a => Some(b),
                Some(_) => Some(a),
                None => None,
            };
        }
    }

    fn pair_efable(&self, a: AgentId, b: AgentId) -> bool {
        envy::pair_efable(self.inst, a, b, &self.share(b, a), &self.share(a, b))
    }

    fn split_round_robin(&mut self, first: AgentId, second: AgentId, prefer: Option<EdgeId>) -> Result<()> {
        let items = self.inst.graph().between(first, second).to_vec();
        let (bf, bs) = round_robin(self.inst, first, second, &items, prefer)?;
        self.commit(first, &bf, second, &bs);
        Ok(())
    }

    fn sub1(&mut self, i: AgentId, skip: AgentId) -> Result<()> {
        for j in self.reserve.children(i) {
            if j == skip {
                continue;
            }
            self.split_round_robin(j, i, None)?;
        }
        Ok(())
    }

    fn sub2(&mut self, i: AgentId, skip: AgentId) -> Result<()> {
        let inst = self.inst;
        let s = self.reserve.parent[i];
        let children: Vec<AgentId> = self.reserve.children(i).into_iter().filter(|&c| c != skip).collect();
        if !self.w[i].is_zero() || !self.t[i].is_zero() {
            return Err(Error::Invariant(format!("budgets of agent {i} set twice")));
        }
        let own_s = self.share(s, i);
        let other_s = self.share(i, s);
        let w_i = positive_part(&(&self.t[s] + self.val(i, &other_s) - self.val(i, &own_s)));

        let mut virt: BTreeMap<AgentId, (Vec<EdgeId>, Vec<EdgeId>)> = BTreeMap::new();
        for &j in &children {
            let items = inst.graph().between(i, j).to_vec();
            virt.insert(j, round_robin(inst, j, i, &items, Some(self.reserve.claim[j]))?);
        }
        let mut k = s;
        let mut best = self.val(i, &other_s) + &self.t[s];
        for &j in &children {
            let cand = self.val(i, &virt[&j].0) + &self.t[j];
            if cand > best {
                best = cand;
                k = j;
            }
        }

        let mut rec = Sub2Record {
            agent: i,
            parent: s,
            k,
            w: w_i.clone(),
            t: Rational::zero(),
            children_w: Rational::zero(),
            r: vec![],
            q1: vec![],
            q1_prime: vec![],
            q2: vec![],
            q3: vec![],
            q4: vec![],
            q5: vec![],
        };
        let mut util: BTreeMap<AgentId, (Vec<EdgeId>, Vec<EdgeId>)> = BTreeMap::new();
        for &j in &children {
            if self.val(i, inst.graph().between(i, j)) < best {
                let items = inst.graph().between(i, j).to_vec();
                util.insert(j, max_utility(inst, j, i, &items)?);
                rec.r.push(j);
            }
        }
        for &j in &rec.r {
            let (sj, si) = &util[&j];
            let d = self.val(j, si) - self.val(j, sj);
            if !d.is_negative() && d <= w_i {
                if rec.q1.is_empty() {
                    rec.q1.push(j);
                } else {
                    rec.q1_prime.push(j);
                }
            } else if d > w_i {
                rec.q2.push(j);
            } else {
                rec.q3.push(j);
            }
        }
        for &j in &children {
            let use_util = rec.q1.contains(&j) || rec.q3.contains(&j);
            let (bj, bi) = if use_util { util[&j].clone() } else { virt[&j].clone() };
            self.commit(j, &bj, i, &bi);
        }
        let own_total = self.val(i, &self.held(i));
        let mut violators = Vec::new();
        for &j in &children {
            if rec.r.contains(&j) {
                continue;
            }
            let a_j = self.share(i, j);
            let a_i = self.share(j, i);
            let lhs = self.val(i, &a_j) + self.val(j, &a_i);
            let rhs = &own_total + self.val(j, &a_j);
            if lhs > rhs {
                violators.push((self.val(i, &a_j), j));
            }
        }
        let mut q = None;
        for (v, j) in violators {
            if q.as_ref().is_none_or(|(bv, _)| v > *bv) {
                q = Some((v, j));
            }
        }
        if let Some((_, q)) = q {
            self.swap_pair(i, q);
            rec.q4.push(q);
        }
        for &j in &children {
            let placed = [&rec.q1, &rec.q1_prime, &rec.q2, &rec.q3, &rec.q4];
            if !placed.iter().any(|set| set.contains(&j)) {
                rec.q5.push(j);
            }
        }
        let k_share = self.share(i, k);
        let t_i = positive_part(&(self.val(i, &k_share) + &self.t[k] - self.val(i, &self.held(i))));

        let covered = self.val(i, &own_s) + &w_i >= Rational::one();
        self.diag.check(
            "sub2_parent_share_covered",
            covered,
            format!("agent {i}: own share with parent plus w is below 1"),
        );
        self.diag.check(
            "sub2_t_at_most_w",
            t_i <= w_i,
            format!("agent {i}: t = {t_i}, w = {w_i}"),
        );
        self.w[i] = w_i;
        self.t[i] = t_i.clone();
        rec.t = t_i;
        self.diag.sub2.push(rec);
        Ok(())
    }

    fn phase_one(&mut self) -> Result<()> {
        let comps = self.reserve.components.clone();
        for comp in &comps {
            if comp.cycle.len() >= 3 {
                for &j in &comp.agents {
                    let i = self.reserve.parent[j];
                    self.split_round_robin(j, i, None)?;
                }
                continue;
            }
            let (mut f, mut g) = (comp.cycle[0], comp.cycle[1]);
            self.split_round_robin(g, f, None)?;
            if !self.pair_efable(f, g) {
                self.swap_pair(f, g);
            }
            let f_envies = envy::envies(self.inst, f, &self.share(g, f), &self.share(f, g));
            let g_envies = envy::envies(self.inst, g, &self.share(f, g), &self.share(g, f));
            if !f_envies && !g_envies {
                for x in self.reserve.tree_order(f, g) {
                    self.sub1(x, g)?;
                }
                for x in self.reserve.tree_order(g, f) {
                    self.sub1(x, f)?;
                }
                continue;
            }
            if g_envies {
                std::mem::swap(&mut f, &mut g);
            }
            let order = self.reserve.tree_order(f, g);
            for &x in &order {
                self.sub2(x, g)?;
            }
            for x in self.reserve.tree_order(g, f) {
                self.sub1(x, f)?;
            }
            self.check_budgets(&order, g);
        }
        Ok(())
    }

    /// `t_i` plus the children's `w` never exceeds `w_i` at any tree node.
    fn check_budgets(&mut self, order: &[AgentId], skip: AgentId) {
        for &i in order {
            let mut sum = self.t[i].clone();
            for c in self.reserve.children(i) {
                if c != skip {
                    sum += &self.w[c];
                }
            }
            let ok = sum <= self.w[i];
            if let Some(r) = self.diag.sub2.iter_mut().find(|r| r.agent == i) {
                r.children_w = &sum - &self.t[i];
            }
            self.diag.check(
                "sub2_budget",
                ok,
                format!("agent {i}: t plus children's w = {sum}, w = {}", self.w[i]),
            );
        }
    }

    fn phase_one_checks(&mut self) {
        for comp in self.reserve.components.clone() {
            let total = crate::rational::sum(comp.agents.iter().map(|&a| &self.t[a]));
            self.diag.check(
                "component_t_at_most_one",
                total <= Rational::one(),
                format!("component {:?}: sum of t = {total}", comp.agents),
            );
        }
        let n = self.inst.n_agents();
        let bundles: Vec<Vec<EdgeId>> = (0..n).map(|i| self.held(i)).collect();
        let worth = |i: AgentId, b: &[EdgeId]| self.inst.eval(i, b.iter().copied());
        let mut bad = Vec::new();
        for (p, c) in self.reserve.arcs() {
            for (x, y) in [(p, c), (c, p)] {
                if worth(x, &bundles[y]) + &self.t[y] > worth(x, &bundles[x]) + &self.t[x] {
                    bad.push((x, y));
                }
            }
        }
        self.diag.check(
            "reserve_neighbors_envy_free",
            bad.is_empty(),
            format!("envious (agent, target) pairs: {bad:?}"),
        );
    }

    fn phase_two(&mut self) -> Result<Vec<Rational>> {
        let inst = self.inst;
        let n = inst.n_agents();
        let mut p = self.t.clone();
        let pairs: Vec<(AgentId, AgentId)> = inst
            .graph()
            .adjacent_pairs()
            .map(|(k, _)| k)
            .filter(|&(i, j)| !self.reserve.joined(i, j))
            .collect();
        for (a, b) in pairs {
            let before: Vec<Rational> = (0..n).map(|x| self.val(x, &self.held(x)) + &p[x]).collect();
            self.split_round_robin(a, b, None)?;
            if !self.pair_efable(a, b) {
                self.swap_pair(a, b);
            }
            let a_ok = !envy::envies(inst, a, &self.share(b, a), &self.share(a, b));
            let (j, i) = if a_ok { (a, b) } else { (b, a) };
            let lhs = self.val(i, &self.share(i, j)) + &p[j];
            let rhs = self.val(i, &self.held(i)) + &p[i];
            if lhs > rhs {
                p[j] = positive_part(&(rhs - self.val(i, &self.share(i, j))));
            }
            let dropped: Vec<AgentId> = (0..n)
                .filter(|&x| self.val(x, &self.held(x)) + &p[x] < before[x])
                .collect();
            self.diag.check(
                "settlement_monotone",
                dropped.is_empty(),
                format!("pair {a}-{b}: agents {dropped:?} lost value plus payment"),
            );
        }
        Ok(p)
    }
}

pub fn solve_additive_multigraph(inst: &Instance) -> Result<Solution> {
    check_pre(inst)?;
    let n = inst.n_agents();
    let reserve = build_reserve_graph(inst)?;
    let mut run = Run {
        inst,
        reserve,
        owner: vec![None; inst.n_edges()],
        w: vec![Rational::zero(); n],
        t: vec![Rational::zero(); n],
        diag: Diagnostics::default(),
    };
    run.phase_one()?;
    run.phase_one_checks();
    let p = run.phase_two()?;
    let owner: Vec<AgentId> = run
        .owner
        .iter()
        .enumerate()
        .map(|(e, o)| o.ok_or_else(|| Error::Invariant(format!("edge {e} left unallocated"))))
        .collect::<Result<_>>()?;
    let orientation = Orientation::new(inst.graph(), owner)?;
    let payments = PaymentVector::new(p)?;
    if !envy::is_ef_with_payments(inst, &orientation, &payments) {
        return Err(Error::Invariant("additive orientation is not envy-free with its payments".into()));
    }
    let t_total = crate::rational::sum(run.t.iter());
    let pay_total = payments.total();
    run.diag.check(
        "payments_within_budgets",
        pay_total <= t_total,
        format!("payments {pay_total}, budgets {t_total}"),
    );
    let mut diag = run.diag;
    diag.w = Some(run.w);
    diag.t = Some(run.t);
    Ok(Solution {
        algorithm: "additive-multi".into(),
        orientation,
        payments,
        bound: Some(("n/2".into(), frac(n as i64, 2))),
        diagnostics: diag,
    })
}
