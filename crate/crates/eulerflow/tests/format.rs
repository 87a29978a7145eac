use eulerflow::fixtures::{figure1, figure1_doubled, FIGURE1_DOUBLED_JSON, FIGURE1_JSON};
use eulerflow::format::{parse_instance, parse_solution, write_instance, write_solution, FormatError};
use eulerflow::generate::{gen_grid, gen_outer_boundary, GridParams};
use eulerflow_core::embedding::trace_faces;
use eulerflow_core::preprocess::{check_eulerian, topological_order};
use eulerflow_core::solver::{solve, SolverConfig};
use eulerflow_core::{ArcId, Solution};
use proptest::prelude::*;

#[test]
fn fixtures_are_canonical() {
    assert_eq!(write_instance(&figure1()), FIGURE1_JSON);
    assert_eq!(write_instance(&figure1_doubled()), FIGURE1_DOUBLED_JSON);
}

#[test]
fn figure_one_shape() {
    let f = figure1();
    let inst = &f.instance;
    let g = &inst.graph;
    assert!(check_eulerian(inst));
    assert!(topological_order(g).is_ok());
    assert_eq!(inst.demands.len(), 8);
    assert!(inst.demands.iter().all(|d| d.request == 1));
    assert!(g.arcs().all(|a| inst.capacity(a) == 1));
    // Planar: Euler's formula for the traced faces of a connected graph.
    let faces = trace_faces(g).faces.len() as i64;
    assert_eq!(g.vertex_count() as i64 - g.arc_count() as i64 + faces, 2);
    assert_eq!(figure1_doubled().instance, inst.scaled(2));
}

#[test]
fn doubled_solution_halves_to_a_fractional_flow() {
    // Every path of the doubled solution, given weight 1/2, is a fractional
    // multiflow of the original: each demand gets 2 halves and each unit arc
    // at most 2 halves.
    let f = figure1();
    let sol = solve(&figure1_doubled().instance, &SolverConfig::default()).unwrap().verdict.solution().cloned().unwrap();
    let mut load = vec![0u32; f.instance.graph.arc_count()];
    for (h, ps) in sol.paths.iter().enumerate() {
        assert_eq!(ps.len(), 2 * f.instance.demands[h].request as usize);
        for a in ps.iter().flatten() {
            load[a.index()] += 1;
        }
    }
    assert!(f.instance.graph.arcs().all(|a| load[a.index()] <= 2 * f.instance.capacity(a)));
}

#[test]
fn errors_carry_a_location() {
    let e = parse_instance("{\"vertices\": [").unwrap_err();
    assert!(matches!(e, FormatError::Syntax { line: 1, .. }), "{e}");
    let bad = FIGURE1_JSON.replacen("\"capacity\":1", "\"capacity\":1,\"colour\":2", 1);
    assert!(matches!(parse_instance(&bad).unwrap_err(), FormatError::Syntax { .. }));
    let unknown = FIGURE1_JSON.replacen("\"rotation\":[5,4,1,6]", "\"rotation\":[5,4,1,99]", 1);
    let FormatError::Invalid { path, .. } = parse_instance(&unknown).unwrap_err() else { panic!("expected Invalid") };
    assert_eq!(path, "vertices[id 0].rotation");
}

fn instance_file() -> impl Strategy<Value = eulerflow::format::InstanceFile> {
    prop_oneof![
        (2u32..=5, 2u32..=5, 1u32..=3, 1u32..=2, any::<bool>(), any::<u64>()).prop_map(|(w, h, k, r, corners, seed)| {
            gen_grid(&GridParams { width: w, height: h, k, r, corners, scramble: true }, seed).unwrap()
        }),
        (2u32..=5, 1u32..=4, any::<u64>()).prop_map(|(n, k, seed)| gen_outer_boundary(n, k, seed).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn instances_round_trip(f in instance_file()) {
        let text = write_instance(&f);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(write_instance(&back), text);
    }

    #[test]
    fn solutions_round_trip(paths in proptest::collection::vec(
        proptest::collection::vec(proptest::collection::vec(0u32..500, 1..8), 0..4), 0..5)
    ) {
        let sol = Solution { paths: paths.into_iter().map(|ps| ps.into_iter().map(|p| p.into_iter().map(ArcId).collect()).collect()).collect() };
        prop_assert_eq!(parse_solution(&write_solution(&sol)).unwrap(), sol);
    }
}
