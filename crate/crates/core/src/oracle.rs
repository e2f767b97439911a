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

//! Exhaustive ground truth over all 2^m orientations, plus solution checks.

use std::sync::atomic::{AtomicI64, AtomicU64, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::envy;
use crate::error::{Error, Result};
use crate::model::{
    AgentId, Check, Diagnostics, Instance, MonotoneFamily, Orientation, PaymentVector, Solution,
};
use crate::rational::Rational;

pub const DEFAULT_MAX_EDGES: usize = 20;

/// Hard ceiling regardless of what the caller asks for.
const ABSOLUTE_MAX_EDGES: usize = 40;

#[derive(Debug, Clone)]
pub struct OracleOptions {
    pub max_edges: usize,
    /// Worker threads; 0 means one per available core.
    pub jobs: usize,
    /// Stop as soon as a zero-subsidy orientation is seen. The answer is the
    /// same, only `visited` shrinks.
    pub stop_at_zero: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            max_edges: DEFAULT_MAX_EDGES,
            jobs: 0,
            stop_at_zero: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub min_total: Rational,
    /// First minimizing orientation in binary-counter order, with its
    /// minimum payments.
    pub argmin: Solution,
    pub ef_zero_exists: bool,
    /// Orientations examined.
    pub visited: u64,
}

pub fn brute_force_min_subsidy(inst: &Instance, max_edges: usize) -> Result<OracleResult> {
    brute_force_with(
        inst,
        &OracleOptions {
            max_edges,
            ..OracleOptions::default()
        },
    )
}

/// Owner of edge `e` under orientation index `x`: bit `e` clear means
/// `edge.u`, set means `edge.v`.
pub fn orientation_from_index(inst: &Instance, x: u64) -> Orientation {
    let owner = inst
        .graph()
        .edges()
        .iter()
        .map(|e| if (x >> e.id) & 1 == 0 { e.u } else { e.v })
        .collect();
    Orientation::from_raw(owner)
}

#[derive(Clone, Copy)]
enum Fam {
    Sum,
    Capped(i64),
    AtLeast(usize, i64),
    Max,
}

/// All values multiplied by a common denominator so enumeration runs on i64.
struct Scaled {
    n: usize,
    ends: Vec<(usize, usize, i64, i64)>,
    fam: Vec<Fam>,
}

fn lcm_denominators<'a>(vals: impl Iterator<Item = &'a Rational>) -> BigInt {
    vals.fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

impl Scaled {
    fn build(inst: &Instance) -> Option<(Scaled, BigInt)> {
        let caps: Vec<Rational> = (0..inst.n_agents())
            .filter_map(|i| match inst.family(i) {
                MonotoneFamily::AdditiveCapped { cap } => Some(cap.clone()),
                _ => None,
            })
            .collect();
        let scale = lcm_denominators(inst.edge_values().iter().flatten().chain(caps.iter()));
        let limit = BigInt::from(1i64 << 40);
        let to_i = |r: &Rational| -> Option<i64> {
            let v = (r * Rational::from_integer(scale.clone())).to_integer();
            (v.abs() < limit).then(|| v.to_i64()).flatten()
        };
        let mut total = BigInt::zero();
        let mut ends = Vec::with_capacity(inst.n_edges());
        for e in inst.graph().edges() {
            let [a, b] = &inst.edge_values()[e.id];
            let (a, b) = (to_i(a)?, to_i(b)?);
            total += a + b;
            ends.push((e.u, e.v, a, b));
        }
        if total >= limit || scale >= limit {
            return None;
        }
        let unit = scale.to_i64()?;
        let mut fam = Vec::with_capacity(inst.n_agents());
        for i in 0..inst.n_agents() {
            fam.push(match inst.family(i) {
                MonotoneFamily::PlainAdditive => Fam::Sum,
                MonotoneFamily::AdditiveCapped { cap } => Fam::Capped(to_i(cap)?),
                MonotoneFamily::AllOrNothingDegree { threshold } => Fam::AtLeast(*threshold, unit),
                MonotoneFamily::UnitDemand => Fam::Max,
            });
        }
        Some((Scaled { n: inst.n_agents(), ends, fam }, scale))
    }
}

struct Scratch {
    sum: Vec<i64>,
    cnt: Vec<usize>,
    mx: Vec<i64>,
    w: Vec<i64>,
    p: Vec<i64>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            sum: vec![0; n * n],
            cnt: vec![0; n * n],
            mx: vec![0; n * n],
            w: vec![0; n * n],
            p: vec![0; n],
        }
    }
}

enum Outcome {
    NotEfable,
    Pruned,
    Total(i64),
}

impl Scaled {
    fn value(&self, i: usize, s: &Scratch, k: usize) -> i64 {
        match self.fam[i] {
            Fam::Sum => s.sum[k],
            Fam::Capped(c) => s.sum[k].min(c),
            Fam::AtLeast(t, unit) => {
                if s.cnt[k] >= t {
                    unit
                } else {
                    0
                }
            }
            Fam::Max => s.mx[k],
        }
    }

    /// Minimum total subsidy of orientation `x`, or a proof that it cannot
    /// beat `bound`.
    fn evaluate(&self, x: u64, bound: i64, s: &mut Scratch) -> Outcome {
        let n = self.n;
        s.sum.iter_mut().for_each(|v| *v = 0);
        s.cnt.iter_mut().for_each(|v| *v = 0);
        s.mx.iter_mut().for_each(|v| *v = 0);
        for (e, &(u, v, vu, vv)) in self.ends.iter().enumerate() {
            let o = if (x >> e) & 1 == 0 { u } else { v };
            for (a, va) in [(u, vu), (v, vv)] {
                let k = a * n + o;
                s.sum[k] += va;
                s.cnt[k] += 1;
                if va > s.mx[k] {
                    s.mx[k] = va;
                }
            }
        }
        let mut lower = 0i64;
        for i in 0..n {
            let own = self.value(i, s, i * n + i);
            let mut row_max = 0i64;
            for j in 0..n {
                let w = if i == j { 0 } else { self.value(i, s, i * n + j) - own };
                s.w[i * n + j] = w;
                row_max = row_max.max(w);
            }
            lower += row_max;
        }
        if lower > bound {
            return Outcome::Pruned;
        }
        s.p.iter_mut().for_each(|v| *v = 0);
        for pass in 0..=n {
            let mut changed = false;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let cand = s.w[i * n + j] + s.p[j];
                        if cand > s.p[i] {
                            s.p[i] = cand;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return Outcome::Total(s.p.iter().sum());
            }
            if pass == n {
                return Outcome::NotEfable;
            }
        }
        Outcome::NotEfable
    }
}

const CHUNK: u64 = 1 << 12;

pub fn brute_force_with(inst: &Instance, opts: &OracleOptions) -> Result<OracleResult> {
    let m = inst.n_edges();
    let limit = opts.max_edges.min(ABSOLUTE_MAX_EDGES);
    if m > limit {
        return Err(Error::TooManyEdges { edges: m, limit });
    }
    let space: u64 = 1u64 << m;
    let jobs = match opts.jobs {
        0 => std::thread::available_parallelism().map(|x| x.get()).unwrap_or(1),
        j => j,
    }
    .min(space.div_ceil(CHUNK) as usize)
    .max(1);

    let (best_total, best_index, visited) = match Scaled::build(inst) {
        Some((scaled, scale)) => {
            let (t, x, v) = enumerate_scaled(&scaled, space, jobs, opts.stop_at_zero);
            match t {
                Some(t) => (Some(Rational::new(BigInt::from(t), scale)), x, v),
                None => (None, x, v),
            }
        }
        None => enumerate_exact(inst, space, opts.stop_at_zero),
    };
    let min_total = best_total
        .ok_or_else(|| Error::Invariant("no envy-freeable orientation exists".into()))?;
    let orientation = orientation_from_index(inst, best_index);
    let payments = envy::min_payments(inst, &orientation)?;
    if payments.total() != min_total {
        return Err(Error::Invariant("scaled and exact payments disagree".into()));
    }
    Ok(OracleResult {
        ef_zero_exists: min_total.is_zero(),
        argmin: Solution {
            algorithm: "oracle".into(),
            orientation,
            payments,
            bound: Some(("minimum".into(), min_total.clone())),
            diagnostics: Diagnostics::default(),
        },
        min_total,
        visited,
    })
}

fn enumerate_scaled(sc: &Scaled, space: u64, jobs: usize, stop_at_zero: bool) -> (Option<i64>, u64, u64) {
    let next = AtomicU64::new(0);
    let zero_at = AtomicU64::new(u64::MAX);
    let global = AtomicI64::new(i64::MAX);
    let visited = AtomicU64::new(0);
    let results: Vec<(i64, u64)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|_| {
                scope.spawn(|| {
                    let mut s = Scratch::new(sc.n);
                    let mut best = (i64::MAX, u64::MAX);
                    let mut seen = 0u64;
                    loop {
                        let start = next.fetch_add(CHUNK, Ordering::Relaxed);
                        if start >= space || (stop_at_zero && start > zero_at.load(Ordering::Relaxed)) {
                            break;
                        }
                        let end = (start + CHUNK).min(space);
                        for x in start..end {
                            if stop_at_zero && x > zero_at.load(Ordering::Relaxed) {
                                break;
                            }
                            seen += 1;
                            // prune only on strict excess so ties keep the lowest index
                            let bound = (best.0.saturating_sub(1)).min(global.load(Ordering::Relaxed));
                            if let Outcome::Total(t) = sc.evaluate(x, bound, &mut s) {
                                if (t, x) < best {
                                    best = (t, x);
                                    global.fetch_min(t, Ordering::Relaxed);
                                    if t == 0 {
                                        zero_at.fetch_min(x, Ordering::Relaxed);
                                    }
                                }
                            }
                        }
                    }
                    visited.fetch_add(seen, Ordering::Relaxed);
                    best
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("oracle worker panicked")).collect()
    });
    let best = results.into_iter().min().unwrap_or((i64::MAX, u64::MAX));
    let total = (best.0 != i64::MAX).then_some(best.0);
    (total, best.1, visited.into_inner())
}

fn enumerate_exact(inst: &Instance, space: u64, stop_at_zero: bool) -> (Option<Rational>, u64, u64) {
    let mut best: Option<(Rational, u64)> = None;
    let mut visited = 0;
    for x in 0..space {
        visited += 1;
        let o = orientation_from_index(inst, x);
        if let Ok(p) = envy::min_payments(inst, &o) {
            let t = p.total();
            if best.as_ref().is_none_or(|(b, _)| t < *b) {
                let zero = t.is_zero();
                best = Some((t, x));
                if zero && stop_at_zero {
                    break;
                }
            }
        }
    }
    match best {
        Some((t, x)) => (Some(t), x, visited),
        None => (None, 0, visited),
    }
}

/// Exact search for an orientation that is envy-free with no payments.
/// Backtracks over edges and prunes as soon as some agent's best reachable
/// bundle is worth less than what a neighbour already holds.
pub fn find_envy_free_orientation(inst: &Instance) -> Result<Option<Orientation>> {
    if !inst.is_additive() {
        return Err(Error::Precondition("envy-free search needs additive valuations".into()));
    }
    let (sc, _) = Scaled::build(inst)
        .ok_or_else(|| Error::Precondition("values too large for the integer search".into()))?;
    let n = sc.n;
    let mut reach = vec![0i64; n];
    for &(u, v, vu, vv) in &sc.ends {
        reach[u] += vu;
        reach[v] += vv;
    }
    let mut st = Search {
        ends: &sc.ends,
        n,
        reach,
        held: vec![0i64; n * n],
        owner: vec![0; sc.ends.len()],
    };
    if st.descend(0) {
        Ok(Some(Orientation::new(inst.graph(), st.owner)?))
    } else {
        Ok(None)
    }
}

struct Search<'a> {
    ends: &'a [(usize, usize, i64, i64)],
    n: usize,
    /// Value of own edges plus every still-undecided incident edge.
    reach: Vec<i64>,
    /// `held[i * n + j]`: value to `i` of the edges between them held by `j`.
    held: Vec<i64>,
    owner: Vec<AgentId>,
}

impl Search<'_> {
    fn ok(&self, i: usize) -> bool {
        let row = &self.held[i * self.n..(i + 1) * self.n];
        row.iter().all(|&h| h <= self.reach[i])
    }

    fn descend(&mut self, e: usize) -> bool {
        if e == self.ends.len() {
            return true;
        }
        let (u, v, vu, vv) = self.ends[e];
        let order = if vu >= vv { [(u, v, vv), (v, u, vu)] } else { [(v, u, vu), (u, v, vv)] };
        for (keeper, loser, lv) in order {
            self.owner[e] = keeper;
            self.reach[loser] -= lv;
            self.held[loser * self.n + keeper] += lv;
            if self.ok(loser) && self.descend(e + 1) {
                return true;
            }
            self.reach[loser] += lv;
            self.held[loser * self.n + keeper] -= lv;
        }
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub all_pass: bool,
    pub total_subsidy: Option<Rational>,
}

/// Checks a raw owner list and payment list against an instance.
pub fn verify_raw(inst: &Instance, owner: &[AgentId], payments: &[Rational]) -> VerifyReport {
    let mut d = Diagnostics::default();
    let orientation = Orientation::new(inst.graph(), owner.to_vec());
    d.check(
        "orientation_valid",
        orientation.is_ok(),
        orientation.as_ref().err().map(|e| e.to_string()).unwrap_or_default(),
    );
    let len_ok = payments.len() == inst.n_agents();
    d.check(
        "payments_length",
        len_ok,
        format!("{} payments for {} agents", payments.len(), inst.n_agents()),
    );
    let neg: Vec<usize> = (0..payments.len()).filter(|&i| payments[i].is_negative()).collect();
    d.check("payments_nonnegative", neg.is_empty(), format!("negative: {neg:?}"));
    let mut total = None;
    if let Ok(o) = &orientation {
        let g = envy::build_envy_graph(inst, o);
        match g.positive_cycle() {
            None => d.check("envy_freeable", true, ""),
            Some(c) => {
                let w = g.cycle_weight(&c);
                d.check("envy_freeable", false, format!("positive cycle {c:?} of weight {w}"));
            }
        }
        if len_ok && neg.is_empty() {
            let p = PaymentVector::new(payments.to_vec()).expect("checked nonnegative");
            d.check("ef_with_payments", envy::is_ef_with_payments(inst, o, &p), "");
            total = Some(p.total());
        } else {
            d.check("ef_with_payments", false, "payment vector unusable");
        }
    } else {
        d.check("envy_freeable", false, "orientation invalid");
        d.check("ef_with_payments", false, "orientation invalid");
    }
    let all_pass = d.checks.iter().all(|c| c.passed);
    VerifyReport {
        checks: d.checks,
        all_pass,
        total_subsidy: total,
    }
}

pub fn verify_solution(inst: &Instance, sol: &Solution) -> VerifyReport {
    verify_raw(inst, sol.orientation.owners(), sol.payments.as_slice())
}
