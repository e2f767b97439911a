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

use num_traits::{One, Zero};

use subsidy_orient::additive::build_reserve_graph;
use subsidy_orient::binary::{classify_component, Property, Witness};
use subsidy_orient::envy::{
    build_envy_graph, is_ef_with_payments, is_envy_freeable, local_efable, min_payments,
};
use subsidy_orient::error::Error;
use subsidy_orient::instances::{
    gen_appendix_path, gen_from_2p2n3sat, gen_parallel_pairs, gen_random, gen_threshold_clique,
    Formula, RandomKind,
};
use subsidy_orient::model::{
    Instance, MonotoneFamily, MultiGraph, Orientation, PaymentVector, ValuationProfile,
};
use subsidy_orient::monotone::{pairwise_temp, thresholds, PairwiseTemp};
use subsidy_orient::oracle::{brute_force_min_subsidy, find_envy_free_orientation, verify_raw};
use subsidy_orient::rational::{frac, int, positive_part, Rational};
use subsidy_orient::subroutines::{envy_cycle_two, is_ef1, max_utility, round_robin};
use subsidy_orient::{
    format, solve_additive_multigraph, solve_binary, solve_monotone_multigraph,
    solve_simple_monotone, verify_solution,
};

fn additive(n: usize, edges: &[(usize, usize, Rational, Rational)]) -> Instance {
    Instance::additive(n, edges).unwrap()
}

fn unit_edge() -> Instance {
    additive(2, &[(0, 1, int(1), int(1))])
}

fn unit_triangle() -> Instance {
    additive(3, &[(0, 1, int(1), int(1)), (1, 2, int(1), int(1)), (0, 2, int(1), int(1))])
}

fn oracle_min(inst: &Instance) -> Rational {
    brute_force_min_subsidy(inst, 20).unwrap().min_total
}

/// Three agents, two parallel edges per pair, unit-demand valuations; every
/// pair is locally envy-freeable but the whole orientation is not.
fn three_cycle_fixture() -> (Instance, Orientation) {
    let g = MultiGraph::new(3, &[(0, 1), (0, 1), (1, 2), (1, 2), (0, 2), (0, 2)]).unwrap();
    let values = vec![
        [int(1), frac(2, 3)],
        [frac(2, 3), int(0)],
        [int(1), frac(2, 3)],
        [frac(2, 3), int(0)],
        [frac(2, 3), int(1)],
        [int(0), frac(2, 3)],
    ];
    let inst =
        Instance::new(g, values, ValuationProfile::Monotone(vec![MonotoneFamily::UnitDemand; 3]))
            .unwrap();
    let o = Orientation::new(inst.graph(), vec![1, 0, 2, 1, 0, 2]).unwrap();
    (inst, o)
}

// ---- valuations ----

#[test]
fn empty_bundle_is_worth_nothing() {
    assert!(unit_edge().value(0, &[]).unwrap().is_zero());
}

#[test]
fn path_first_agent_values_first_edge_at_one() {
    let p = gen_appendix_path(&frac(1, 100)).unwrap();
    assert_eq!(p.value(0, &[0]).unwrap(), int(1));
}

#[test]
fn all_or_nothing_needs_every_required_edge() {
    let g = MultiGraph::new(3, &[(0, 1), (0, 2)]).unwrap();
    let fams = vec![
        MonotoneFamily::AllOrNothingDegree { threshold: 2 },
        MonotoneFamily::PlainAdditive,
        MonotoneFamily::PlainAdditive,
    ];
    let inst = Instance::new(g, vec![[int(0), int(1)]; 2], ValuationProfile::Monotone(fams)).unwrap();
    assert_eq!(inst.value(0, &[0, 1]).unwrap(), int(1));
    assert!(inst.value(0, &[1]).unwrap().is_zero());
}

#[test]
fn value_rejects_unknown_ids() {
    let inst = unit_edge();
    assert!(matches!(inst.value(0, &[3]), Err(Error::InvalidInput(_))));
    assert!(matches!(inst.value(5, &[0]), Err(Error::InvalidInput(_))));
}

#[test]
fn normalization_report() {
    assert!(unit_triangle().check_normalization().iter().all(|r| r.is_unit));
    let inst = additive(2, &[(0, 1, int(2), int(1))]);
    let r = inst.check_normalization();
    assert!(!r[0].is_unit);
    assert_eq!(r[0].max_marginal, int(2));
    let path = gen_appendix_path(&frac(1, 100)).unwrap();
    assert!(path.check_normalization().iter().all(|r| r.is_unit));
}

#[test]
fn normalize_divides_by_agent_maximum() {
    let inst = additive(3, &[(0, 1, int(2), int(1)), (0, 2, int(1), int(2))]);
    let norm = inst.normalize_additive().unwrap();
    assert_eq!(norm.base(0, 0), &int(1));
    assert_eq!(norm.base(0, 1), &frac(1, 2));
    assert_eq!(norm.normalize_additive().unwrap(), norm);
    let halves = additive(2, &[(0, 1, int(1), int(2)), (0, 1, int(2), int(1))]);
    let h = halves.normalize_additive().unwrap();
    assert_eq!(h.base(0, 0), &frac(1, 2));
    assert_eq!(h.base(1, 0), &int(1));
    let dead = additive(2, &[(0, 1, int(0), int(1))]);
    assert!(matches!(dead.normalize_additive(), Err(Error::Normalization(_))));
}

#[test]
fn positive_part_clamps_at_zero() {
    assert!(positive_part(&int(-3)).is_zero());
    assert!(positive_part(&int(0)).is_zero());
    assert_eq!(positive_part(&frac(5, 2)), frac(5, 2));
}

// ---- envy ----

#[test]
fn unit_edge_envy_weights() {
    let inst = unit_edge();
    let o = Orientation::new(inst.graph(), vec![0]).unwrap();
    let g = build_envy_graph(&inst, &o);
    assert_eq!(g.weight(1, 0), &int(1));
    assert_eq!(g.weight(0, 1), &int(-1));
    assert!(is_envy_freeable(&inst, &Orientation::new(inst.graph(), vec![1]).unwrap()));
    assert_eq!(min_payments(&inst, &o).unwrap().as_slice(), &[int(0), int(1)]);
    let half = PaymentVector::new(vec![int(0), frac(1, 2)]).unwrap();
    assert!(!is_ef_with_payments(&inst, &o, &half));
}

#[test]
fn three_cycle_fixture_is_locally_but_not_globally_envy_freeable() {
    let (inst, o) = three_cycle_fixture();
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        assert!(local_efable(&inst, &o, i, j));
    }
    assert!(!is_envy_freeable(&inst, &o));
    let g = build_envy_graph(&inst, &o);
    assert_eq!(g.positive_cycle().unwrap(), vec![0, 1, 2]);
    assert_eq!(g.cycle_weight(&[0, 1, 2]), int(1));
    assert!(matches!(min_payments(&inst, &o), Err(Error::NotEnvyFreeable)));
    let report = verify_raw(&inst, o.owners(), &[int(5), int(5), int(5)]);
    assert!(!report.all_pass);
    assert!(report.checks.iter().any(|c| c.name == "envy_freeable" && !c.passed));
}

#[test]
fn nonpositive_weights_need_no_payment() {
    let inst = additive(2, &[(0, 1, int(1), int(0))]);
    let o = Orientation::new(inst.graph(), vec![0]).unwrap();
    assert!(min_payments(&inst, &o).unwrap().total().is_zero());
    assert!(is_ef_with_payments(&inst, &o, &PaymentVector::zeros(2)));
}

#[test]
fn local_efable_cases() {
    let inst = additive(
        3,
        &[(0, 1, int(1), frac(9, 10)), (0, 1, int(1), frac(9, 10)), (1, 2, int(1), int(1))],
    );
    let to_j = Orientation::new(inst.graph(), vec![1, 1, 1]).unwrap();
    assert!(!local_efable(&inst, &to_j, 0, 1));
    let to_i = Orientation::new(inst.graph(), vec![0, 0, 1]).unwrap();
    assert!(local_efable(&inst, &to_i, 0, 1));
    assert!(local_efable(&inst, &to_i, 0, 2));
}

// ---- two-agent subroutines ----

#[test]
fn round_robin_examples() {
    let inst = additive(2, &[(0, 1, int(1), frac(9, 10)), (0, 1, frac(2, 5), frac(4, 5))]);
    assert_eq!(round_robin(&inst, 0, 1, &[], None).unwrap(), (vec![], vec![]));
    assert_eq!(round_robin(&inst, 0, 1, &[0, 1], None).unwrap(), (vec![0], vec![1]));
    let flat = additive(2, &vec![(0, 1, int(1), int(1)); 3]);
    assert_eq!(round_robin(&flat, 0, 1, &[0, 1, 2], None).unwrap(), (vec![0, 2], vec![1]));
}

#[test]
fn subroutines_reject_foreign_items() {
    let inst = additive(3, &[(0, 1, int(1), int(1)), (1, 2, int(1), int(1))]);
    assert!(matches!(round_robin(&inst, 0, 1, &[1], None), Err(Error::InvalidInput(_))));
    assert!(envy_cycle_two(&inst, 0, 1, &[1]).is_err());
    assert!(max_utility(&inst, 0, 1, &[1]).is_err());
}

#[test]
fn envy_cycle_two_examples() {
    let inst = unit_edge();
    assert_eq!(envy_cycle_two(&inst, 0, 1, &[]).unwrap(), (vec![], vec![]));
    let (a, b) = envy_cycle_two(&inst, 0, 1, &[0]).unwrap();
    assert_eq!(a.len() + b.len(), 1);
    assert!(is_ef1(&inst, 0, 1, &a, &b));
}

#[test]
fn max_utility_examples() {
    let inst = additive(2, &[(0, 1, int(1), int(1)), (0, 1, frac(1, 3), frac(1, 2))]);
    assert_eq!(max_utility(&inst, 0, 1, &[]).unwrap(), (vec![], vec![]));
    assert_eq!(max_utility(&inst, 0, 1, &[0]).unwrap(), (vec![0], vec![]));
    assert_eq!(max_utility(&inst, 1, 0, &[0, 1]).unwrap(), (vec![0, 1], vec![]));
    let (f, _) = max_utility(&inst, 0, 1, &[0, 1]).unwrap();
    assert!(inst.value(0, &f).unwrap() >= Rational::one());
}

// ---- binary solver ----

#[test]
fn classification_examples() {
    let tri = unit_triangle();
    let c = classify_component(&tri, &[0, 1, 2]).unwrap();
    assert_eq!(c.satisfied.first(), Some(&Property::CriticalCycle));
    assert_eq!(c.witness, Some(Witness::Cycle(vec![0, 1, 2])));
    let pair = additive(2, &[(0, 1, int(1), int(1)), (0, 1, int(1), int(1))]);
    let c = classify_component(&pair, &[0, 1]).unwrap();
    assert_eq!(c.satisfied, vec![Property::EvenPair]);
    let c = classify_component(&unit_edge(), &[0, 1]).unwrap();
    assert!(c.satisfied.is_empty());
}

#[test]
fn binary_critical_triangle_gives_one_edge_each() {
    let tri = unit_triangle();
    let s = solve_binary(&tri).unwrap();
    for a in 0..3 {
        assert_eq!(s.orientation.bundle(a).len(), 1);
    }
    assert!(s.total_subsidy().is_zero());
    // Brute force over all eight orientations: exactly the two cyclic ones
    // are envy-free without payments.
    let free = (0..8u64)
        .filter(|&x| {
            let o = subsidy_orient::oracle::orientation_from_index(&tri, x);
            is_ef_with_payments(&tri, &o, &PaymentVector::zeros(3))
        })
        .count();
    assert_eq!(free, 2);
}

#[test]
fn binary_two_parallel_critical_edges_split() {
    let pair = additive(2, &[(0, 1, int(1), int(1)), (0, 1, int(1), int(1))]);
    let s = solve_binary(&pair).unwrap();
    assert_eq!(s.orientation.bundle(0).len(), 1);
    assert!(s.total_subsidy().is_zero());
}

#[test]
fn binary_single_critical_edge_subsidizes_the_non_owner() {
    let s = solve_binary(&unit_edge()).unwrap();
    assert_eq!(s.orientation.owner(0), 1);
    assert_eq!(s.payments.as_slice(), &[int(1), int(0)]);
}

#[test]
fn binary_disjoint_critical_edges_cost_one_each() {
    for t in 1..=4 {
        let s = solve_binary(&gen_parallel_pairs(t).unwrap()).unwrap();
        assert_eq!(s.total_subsidy(), int(t as i64));
    }
}

#[test]
fn binary_component_with_non_critical_edge_is_free() {
    let inst = additive(3, &[(0, 1, int(1), int(1)), (1, 2, int(1), int(0)), (0, 2, int(0), int(1))]);
    let s = solve_binary(&inst).unwrap();
    assert!(s.total_subsidy().is_zero());
    assert!(oracle_min(&inst).is_zero());
}

#[test]
fn binary_rejects_other_values() {
    let inst = additive(2, &[(0, 1, frac(1, 2), int(1))]);
    assert!(matches!(solve_binary(&inst), Err(Error::InvalidInput(_))));
}

// ---- monotone multigraph solver ----

fn temp(t_i: Vec<usize>, t_j: Vec<usize>) -> Vec<PairwiseTemp> {
    vec![PairwiseTemp { i: 0, j: 1, t_i, t_j, i_envies: false, j_envies: false }]
}

#[test]
fn threshold_examples() {
    let inst = additive(2, &[(0, 1, int(1), int(1)), (0, 1, int(0), int(1))]);
    assert!(thresholds(&inst, &temp(vec![0], vec![1]))[0].is_zero());
    let inst = additive(2, &[(0, 1, frac(2, 3), int(1)), (0, 1, int(1), int(1))]);
    assert_eq!(thresholds(&inst, &temp(vec![0], vec![1]))[0], frac(2, 3));
    let star = additive(
        3,
        &[(0, 1, frac(1, 3), int(0)), (0, 1, frac(1, 3), int(1)), (0, 2, frac(1, 2), int(1)), (0, 2, frac(1, 2), int(1))],
    );
    let t = pairwise_temp(&star).unwrap();
    assert_eq!(thresholds(&star, &t)[0], frac(1, 2));
}

#[test]
fn monotone_unit_triangle() {
    let tri = unit_triangle();
    let s = solve_monotone_multigraph(&tri).unwrap();
    assert!(verify_solution(&tri, &s).all_pass);
    assert!(s.total_subsidy() <= int(2));
    assert!(oracle_min(&tri).is_zero());
}

#[test]
fn monotone_unit_edge_costs_one() {
    assert_eq!(solve_monotone_multigraph(&unit_edge()).unwrap().total_subsidy(), int(1));
}

#[test]
fn monotone_threshold_clique() {
    let inst = gen_threshold_clique(5).unwrap();
    let s = solve_monotone_multigraph(&inst).unwrap();
    assert!(verify_solution(&inst, &s).all_pass);
    assert!(s.total_subsidy() <= int(4));
    assert_eq!(oracle_min(&inst), int(3));
}

#[test]
fn monotone_rejects_large_marginals() {
    let inst = additive(2, &[(0, 1, int(2), int(1))]);
    assert!(matches!(solve_monotone_multigraph(&inst), Err(Error::Normalization(_))));
}

// ---- additive multigraph solver ----

#[test]
fn reserve_graph_single_edge() {
    let r = build_reserve_graph(&unit_edge()).unwrap();
    assert_eq!(r.claim, vec![0, 0]);
    assert_eq!(r.components.len(), 1);
    assert_eq!(r.components[0].cycle, vec![0, 1]);
}

#[test]
fn reserve_graph_forced_triangle() {
    let h = frac(1, 2);
    let inst = additive(
        3,
        &[(0, 1, int(1), h.clone()), (1, 2, int(1), h.clone()), (2, 0, int(1), h)],
    );
    let r = build_reserve_graph(&inst).unwrap();
    assert_eq!(r.claim, vec![0, 1, 2]);
    assert_eq!(r.components.len(), 1);
    assert_eq!(r.components[0].cycle.len(), 3);
}

#[test]
fn reserve_graph_of_the_path() {
    let r = build_reserve_graph(&gen_appendix_path(&frac(1, 100)).unwrap()).unwrap();
    assert_eq!(r.claim, vec![0, 0, 1, 3, 3]);
    let comps: Vec<_> = r.components.iter().map(|c| c.agents.clone()).collect();
    assert_eq!(comps, vec![vec![0, 1, 2], vec![3, 4]]);
    assert_eq!(r.components[0].cycle, vec![0, 1]);
    assert_eq!(r.parent[2], 1);
}

#[test]
fn reserve_graph_needs_a_unit_edge() {
    let inst = additive(2, &[(0, 1, frac(1, 2), int(1))]);
    assert!(matches!(build_reserve_graph(&inst), Err(Error::Precondition(_))));
}

#[test]
fn additive_chain_hands_each_claimant_its_edge() {
    let inst = additive(4, &[(0, 1, int(1), int(1)), (1, 2, int(1), int(1)), (2, 3, int(1), int(1))]);
    let s = solve_additive_multigraph(&inst).unwrap();
    assert_eq!(s.orientation.owners(), &[1, 2, 3]);
    for (i, j) in [(0, 1), (1, 2), (2, 3)] {
        assert!(local_efable(&inst, &s.orientation, i, j));
    }
    // The root of the envious side has no children.
    let rec = s.diagnostics.sub2.iter().find(|r| r.agent == 0).unwrap();
    assert_eq!((rec.parent, rec.w.clone(), rec.t.clone()), (1, int(1), int(1)));
    assert!(rec.q5.is_empty() && rec.r.is_empty());
    assert_eq!(s.total_subsidy(), int(1));
}

#[test]
fn additive_unit_edge_and_disjoint_pairs_hit_half_n() {
    assert_eq!(solve_additive_multigraph(&unit_edge()).unwrap().total_subsidy(), int(1));
    let pairs = gen_parallel_pairs(2).unwrap();
    assert_eq!(solve_additive_multigraph(&pairs).unwrap().total_subsidy(), int(2));
}

#[test]
fn additive_path_within_five_halves() {
    let path = gen_appendix_path(&frac(1, 100)).unwrap();
    let s = solve_additive_multigraph(&path).unwrap();
    assert!(verify_solution(&path, &s).all_pass);
    assert!(s.total_subsidy() <= frac(5, 2));
    assert!(s.diagnostics.failed_checks().is_empty());
}

#[test]
fn additive_requires_unit_normalization() {
    let inst = additive(2, &[(0, 1, int(2), int(1))]);
    assert!(matches!(solve_additive_multigraph(&inst), Err(Error::Normalization(_))));
    let clique = gen_threshold_clique(5).unwrap();
    assert!(matches!(solve_additive_multigraph(&clique), Err(Error::Precondition(_))));
}

// ---- simple-graph solver ----

#[test]
fn simple_threshold_clique_costs_exactly_three() {
    let inst = gen_threshold_clique(5).unwrap();
    let s = solve_simple_monotone(&inst).unwrap();
    assert_eq!(s.algorithm, "simple-monotone");
    assert_eq!(s.total_subsidy(), int(3));
    assert!(verify_solution(&inst, &s).all_pass);
}

#[test]
fn simple_unit_triangle() {
    let tri = unit_triangle();
    let s = solve_simple_monotone(&tri).unwrap();
    assert_eq!(s.diagnostics.thresholds, Some(vec![int(1)]));
    assert_eq!(s.orientation.bundle(2).len(), 2);
    assert!(s.total_subsidy() <= int(1));
    assert!(s.payments.as_slice().iter().all(|p| p <= &int(1)));
}

#[test]
fn simple_star_anchors_on_a_leaf() {
    let star = additive(4, &[(0, 1, int(1), int(0)), (0, 2, int(1), int(0)), (0, 3, int(1), int(0))]);
    let s = solve_simple_monotone(&star).unwrap();
    assert_eq!(s.orientation.owner(1), 2);
    assert!(s.total_subsidy() <= int(2));
    assert!(verify_solution(&star, &s).all_pass);
}

// ---- oracle ----

#[test]
fn oracle_minima() {
    assert_eq!(oracle_min(&unit_edge()), int(1));
    assert_eq!(oracle_min(&gen_parallel_pairs(2).unwrap()), int(2));
    assert_eq!(oracle_min(&gen_parallel_pairs(3).unwrap()), int(3));
    assert_eq!(oracle_min(&gen_threshold_clique(5).unwrap()), int(3));
    assert_eq!(oracle_min(&gen_threshold_clique(6).unwrap()), int(4));
    assert_eq!(oracle_min(&gen_appendix_path(&frac(1, 100)).unwrap()), int(2));
}

#[test]
fn oracle_visits_every_orientation() {
    let inst = gen_random(5, 4, 9, RandomKind::AdditiveUnit).unwrap();
    let r = brute_force_min_subsidy(&inst, 20).unwrap();
    assert_eq!(r.visited, 1 << inst.n_edges());
}

#[test]
fn oracle_refuses_large_instances() {
    let inst = gen_random(1, 6, 12, RandomKind::Binary).unwrap();
    assert!(matches!(
        brute_force_min_subsidy(&inst, 10),
        Err(Error::TooManyEdges { edges: 12, limit: 10 })
    ));
}

#[test]
fn corrupted_payment_fails_verification() {
    let inst = unit_edge();
    let mut s = solve_binary(&inst).unwrap();
    assert!(verify_solution(&inst, &s).all_pass);
    s.payments = PaymentVector::new(vec![frac(1, 2), int(0)]).unwrap();
    let r = verify_solution(&inst, &s);
    assert!(!r.all_pass);
    assert!(r.checks.iter().any(|c| c.name == "ef_with_payments" && !c.passed));
}

// ---- generators ----

fn small_formula() -> Formula {
    Formula { vars: 3, clauses: vec![[1, 2, 3], [1, -2, -3], [-1, 2, -3], [-1, -2, 3]] }
}

#[test]
fn reduction_sizes() {
    let inst = gen_from_2p2n3sat(&small_formula()).unwrap();
    assert_eq!((inst.n_agents(), inst.n_edges()), (14, 19));
    assert!(inst.max_marginal_at_most_one());
}

#[test]
fn satisfiable_reduction_has_free_orientation() {
    let f = small_formula();
    assert!(f.satisfying_assignment().unwrap().is_some());
    let inst = gen_from_2p2n3sat(&f).unwrap();
    assert!(brute_force_min_subsidy(&inst, 20).unwrap().ef_zero_exists);
    assert!(find_envy_free_orientation(&inst).unwrap().is_some());
}

#[test]
fn reduction_rejects_malformed_formulas() {
    let bad = Formula { vars: 3, clauses: vec![[1, 1, 2]] };
    assert!(matches!(gen_from_2p2n3sat(&bad), Err(Error::InvalidInput(_))));
    let unbalanced = Formula { vars: 3, clauses: vec![[1, 2, 3]] };
    assert!(gen_from_2p2n3sat(&unbalanced).is_err());
}

#[test]
fn fixed_generator_shapes() {
    let p1 = gen_parallel_pairs(1).unwrap();
    assert_eq!(p1, unit_edge());
    assert_eq!(gen_parallel_pairs(2).unwrap().n_agents(), 4);
    let c = gen_threshold_clique(5).unwrap();
    assert_eq!((c.n_agents(), c.n_edges()), (5, 4));
    assert!(gen_threshold_clique(4).is_err());
    let p = gen_appendix_path(&frac(1, 100)).unwrap();
    assert_eq!((p.n_agents(), p.n_edges()), (5, 4));
    assert_eq!(p.base(1, 1), &frac(1, 10000));
    assert!(gen_appendix_path(&frac(1, 2)).is_err());
}

#[test]
fn random_generator_contracts() {
    let a = gen_random(0, 6, 10, RandomKind::AdditiveUnit).unwrap();
    let b = gen_random(0, 6, 10, RandomKind::AdditiveUnit).unwrap();
    assert_eq!(format::instance_to_json(&a, None), format::instance_to_json(&b, None));
    assert!(a.check_normalization().iter().all(|r| r.is_unit));
    let bin = gen_random(3, 7, 12, RandomKind::Binary).unwrap();
    assert!(bin.is_binary());
    assert!(gen_random(0, 1, 3, RandomKind::Binary).is_err());
}
