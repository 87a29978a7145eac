//! End-to-end properties over the generated families.

use std::collections::BTreeSet;

use eulerflow::generate::{gen_grid, gen_outer_boundary, GridParams};
use eulerflow::parallel::solve_parallel;
use eulerflow_core::embedding::trace_faces;
use eulerflow_core::oracle::{
    brute_force, check_interval_structure, check_scheme_bridge, check_side_bridge, check_uncrossed, count_crossings, uncross, OracleConfig,
    OracleOutcome,
};
use eulerflow_core::preprocess::{check_eulerian, normalize, topological_order};
use eulerflow_core::solver::{solve, solve_outer_boundary, verify_solution, SchemeFamily, SolverConfig, Strategy as SearchStrategy};
use eulerflow_core::{Instance, Side, VertexId};
use proptest::prelude::*;

fn grid() -> impl Strategy<Value = (GridParams, u64)> {
    (2u32..=5, 2u32..=5, 1u32..=2, 1u32..=2, any::<bool>(), any::<bool>(), any::<u64>()).prop_map(
        |(width, height, k, r, corners, scramble, seed)| (GridParams { width, height, k, r, corners, scramble }, seed),
    )
}

fn oracle(inst: &Instance) -> OracleOutcome {
    let rep = brute_force(inst, &OracleConfig::default());
    assert!(!matches!(rep.outcome, OracleOutcome::BudgetExceeded), "oracle budget hit");
    rep.outcome
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn generated_instances_normalize((p, seed) in grid()) {
        let inst = gen_grid(&p, seed).unwrap().instance;
        prop_assert!(check_eulerian(&inst));
        prop_assert!(topological_order(&inst.graph).is_ok());
        let norm = normalize(&inst).unwrap();
        let g = norm.graph();
        let k = norm.demand_count();
        let big_r = norm.requests().into_iter().max().unwrap_or(0) as usize;
        let terminals: BTreeSet<VertexId> = norm.instance.demand_ids().flat_map(|h| [norm.source(h), norm.sink(h)]).collect();
        for h in norm.instance.demand_ids() {
            let r = norm.request(h) as usize;
            prop_assert_eq!((g.in_degree(norm.source(h)), g.out_degree(norm.source(h))), (0, r));
            prop_assert_eq!((g.in_degree(norm.sink(h)), g.out_degree(norm.sink(h))), (r, 0));
        }
        for v in g.vertices().filter(|v| !terminals.contains(v)) {
            prop_assert_eq!(g.in_degree(v), g.out_degree(v));
            prop_assert!(g.in_degree(v) <= big_r * k);
        }
    }

    #[test]
    fn normalization_keeps_feasibility((p, seed) in grid()) {
        let inst = gen_grid(&p, seed).unwrap().instance;
        let norm = normalize(&inst).unwrap();
        prop_assume!(norm.graph().arc_count() <= 40);
        prop_assert_eq!(oracle(&inst).is_feasible(), oracle(&norm.instance).is_feasible());
    }

    #[test]
    fn solve_agrees_with_oracle((p, seed) in grid()) {
        let inst = gen_grid(&p, seed).unwrap().instance;
        prop_assume!(normalize(&inst).unwrap().graph().arc_count() <= 40);
        let report = solve(&inst, &SolverConfig::default()).unwrap();
        prop_assert_eq!(report.is_feasible(), oracle(&inst).is_feasible());
        if let Some(sol) = report.verdict.solution() {
            prop_assert!(verify_solution(&inst, sol).is_ok());
        }
        // Pure function of the instance.
        prop_assert_eq!(solve(&inst, &SolverConfig::default()).unwrap(), report);
    }

    #[test]
    fn uncrossing_oracle_solutions((p, seed) in grid()) {
        let inst = gen_grid(&p, seed).unwrap().instance;
        let norm = normalize(&inst).unwrap();
        let g = norm.graph();
        prop_assume!(g.arc_count() <= 40);
        let OracleOutcome::Feasible(sol) = oracle(&norm.instance) else { return Ok(()) };
        let done = uncross(g, &norm.order, &sol).unwrap();
        let flat = |s: &eulerflow_core::Solution| s.all_paths().map(|(_, p)| p.clone()).collect::<Vec<_>>();
        let mut current = count_crossings(g, &norm.order, &flat(&sol));
        for swap in &done.swaps {
            prop_assert_eq!(&swap.before, &current);
            prop_assert!(swap.after < swap.before);
            current = swap.after.clone();
        }
        prop_assert_eq!(current, count_crossings(g, &norm.order, &flat(&done.solution)));
        prop_assert!(verify_solution(&norm.instance, &done.solution).is_ok());
        prop_assert!(check_uncrossed(g, &done.solution).is_ok());
        prop_assert!(verify_solution(&inst, &done.solution.project(&norm, inst.demands.len())).is_ok());
        prop_assert!(check_interval_structure(g, &done.solution).is_ok());
        prop_assert!(check_side_bridge(g, &done.solution).is_ok());
    }

    #[test]
    fn lifting_inverts_projection((p, seed) in grid()) {
        let inst = gen_grid(&p, seed).unwrap().instance;
        let norm = normalize(&inst).unwrap();
        let Some(sol) = solve(&inst, &SolverConfig::default()).unwrap().verdict.solution().cloned() else { return Ok(()) };
        let lifted = norm.lift_solution(&sol).unwrap();
        prop_assert!(verify_solution(&norm.instance, &lifted).is_ok());
        prop_assert_eq!(lifted.project(&norm, inst.demands.len()), sol);
    }

    #[test]
    fn outer_boundary_terminals_lie_on_the_outer_face(n in 2u32..=6, k in 1u32..=4, seed in any::<u64>()) {
        let f = gen_outer_boundary(n, k, seed).unwrap();
        let g = &f.instance.graph;
        let faces = trace_faces(g);
        let outer = &faces.faces[faces.index_of_key(f.outer_face.unwrap()).unwrap()];
        let on_boundary: BTreeSet<VertexId> = outer
            .boundary
            .iter()
            .map(|d| if d.side == Side::Left { g.tail(d.arc) } else { g.head(d.arc) })
            .collect();
        for v in g.vertices().filter(|&v| g.in_degree(v) == 0) {
            prop_assert!(on_boundary.contains(&v), "source {v} is inside");
        }
        for d in &f.instance.demands {
            prop_assert!(on_boundary.contains(&d.tail), "demand tail {} is inside", d.tail);
        }
    }

    #[test]
    fn outer_boundary_agrees_with_oracle(n in 2u32..=5, k in 1u32..=3, seed in any::<u64>()) {
        let f = gen_outer_boundary(n, k, seed).unwrap();
        let greedy = solve_outer_boundary(&f.instance, f.outer_face.unwrap()).unwrap();
        prop_assert_eq!(greedy.is_feasible(), oracle(&f.instance).is_feasible());
        if let Some(sol) = greedy.solution() {
            prop_assert!(verify_solution(&f.instance, sol).is_ok());
        }
    }
}

#[test]
fn parallel_reports_the_first_success_in_enumeration_order() {
    let p = GridParams { width: 4, height: 4, k: 2, r: 2, corners: false, scramble: true };
    for seed in 0..40 {
        let inst = gen_grid(&p, seed).unwrap().instance;
        let cfg = SolverConfig { strategy: SearchStrategy::Enumerate, family: SchemeFamily::Matrix, ..Default::default() };
        let seq = solve(&inst, &cfg).unwrap();
        for threads in [1, 3, 8] {
            let par = solve_parallel(&inst, &cfg, threads).unwrap();
            assert_eq!(par.verdict, seq.verdict, "seed {seed}, {threads} threads");
            assert_eq!(par.scheme, seq.scheme, "seed {seed}, {threads} threads");
        }
    }
}

/// Four demands on a 4x4 outer-boundary grid: after uncrossing, the single
/// path of demand 0 runs between the two paths of demand 2, on the left of
/// one and the right of the other. A lone path carries one label of the
/// behaviour matrix, and every label fixes its side towards all paths of the
/// other demand, so no matrix scheme describes this solution and the matrix
/// family misses it. The side family and per-vertex behaviour branching find it.
#[test]
fn matrix_family_misses_a_path_between_two_paths_of_one_demand() {
    let f = gen_outer_boundary(4, 4, 29).unwrap();
    let inst = &f.instance;
    let norm = normalize(inst).unwrap();
    assert_eq!(norm.requests(), vec![1, 1, 2, 2]);
    let OracleOutcome::Feasible(sol) = oracle(&norm.instance) else { panic!("oracle says infeasible") };
    let done = uncross(norm.graph(), &norm.order, &sol).unwrap();
    assert!(check_interval_structure(norm.graph(), &done.solution).is_ok());
    assert!(check_scheme_bridge(norm.graph(), &done.solution).is_err());
    assert!(check_side_bridge(norm.graph(), &done.solution).is_ok());

    let matrix = SolverConfig { family: SchemeFamily::Matrix, ..Default::default() };
    assert!(!solve(inst, &matrix).unwrap().is_feasible());
    assert!(solve(inst, &SolverConfig::default()).unwrap().is_feasible());
    let pairs = SolverConfig { family: SchemeFamily::PairBehaviours, ..Default::default() };
    assert!(solve(inst, &pairs).unwrap().is_feasible());
    assert!(solve_outer_boundary(inst, f.outer_face.unwrap()).unwrap().is_feasible());
}

/// The same defect on the grid family: both paths of demand 1 run between
/// the two paths of demand 0.
#[test]
fn matrix_family_misses_a_grid_lens() {
    let p = GridParams { width: 4, height: 4, k: 2, r: 2, corners: true, scramble: false };
    let inst = gen_grid(&p, 4225673176289810987).unwrap().instance;
    let norm = normalize(&inst).unwrap();
    let OracleOutcome::Feasible(sol) = oracle(&norm.instance) else { panic!("oracle says infeasible") };
    let done = uncross(norm.graph(), &norm.order, &sol).unwrap();
    assert!(check_scheme_bridge(norm.graph(), &done.solution).is_err());
    assert!(check_side_bridge(norm.graph(), &done.solution).is_ok());
    let matrix = SolverConfig { family: SchemeFamily::Matrix, ..Default::default() };
    assert!(!solve(&inst, &matrix).unwrap().is_feasible());
    assert!(solve(&inst, &SolverConfig::default()).unwrap().is_feasible());
}
