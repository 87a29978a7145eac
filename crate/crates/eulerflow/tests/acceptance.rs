//! One PASS/FAIL line per acceptance criterion. Run with
//! `cargo test --release --test acceptance` for meaningful timings.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use eulerflow::bench::bench_grid;
use eulerflow::fixtures::{figure1, figure1_doubled};
use eulerflow::generate::{gen_grid, gen_outer_boundary, GridParams};
use eulerflow_core::oracle::{
    brute_force, check_interval_structure, check_scheme_bridge, check_side_bridge, check_uncrossed, count_crossings,
    uncross, OracleConfig, OracleOutcome,
};
use eulerflow_core::preprocess::normalize;
use eulerflow_core::scheme::{enumerate_schemes, partitions_of, Label};
use eulerflow_core::solver::vertex::{all_assignments, brute_force_routes, realized_behaviours, route_vertex, BehaviourTable};
use eulerflow_core::solver::{solve, solve_outer_boundary, verify_solution, SchemeFamily, SolverConfig};
use eulerflow_core::{ArcId, Behaviour, EmbeddedDigraph, Instance, Solution, VertexId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FIGURE_ORACLE_LIMIT: Duration = Duration::from_secs(60);
const FIGURE_SOLVER_LIMIT: Duration = Duration::from_secs(600);
const GRID_INSTANCES: usize = 360;
const GRID_MAX_ARCS: usize = 30;
const GRID_TIME_LIMIT: Duration = Duration::from_secs(300);
const MAX_SCHEME_K: usize = 3;
const MAX_SCHEME_R: u32 = 4;
const MAX_PARTITION_R: u32 = 5;
const VERTEX_CONFIGS: usize = 4000;
const MAX_VERTEX_DEGREE: usize = 10;
const OUTER_INSTANCES: usize = 150;
const OUTER_MAX_ARCS: usize = 36;
const SCALING_SIZES: [u32; 4] = [100, 200, 400, 800];
const SCALING_FACTOR: f64 = 4.0;
const SCALING_SEEDS: u64 = 5;
const SCALING_MIN_TIME: Duration = Duration::from_millis(200);

struct Tally {
    failed: usize,
}

impl Tally {
    fn report(&mut self, id: u32, ok: bool, detail: String) {
        if !ok {
            self.failed += 1;
        }
        println!("{} criterion {id}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn info(detail: String) {
    println!("INFO {detail}");
}

fn oracle(inst: &Instance) -> OracleOutcome {
    brute_force(inst, &OracleConfig::default()).outcome
}

fn figure_one(t: &mut Tally) {
    let fig = figure1().instance;
    let start = Instant::now();
    let o = oracle(&fig);
    let oracle_time = start.elapsed();
    let start = Instant::now();
    let s = solve(&fig, &SolverConfig::default()).unwrap();
    let solve_time = start.elapsed();
    let dbl = figure1_doubled().instance;
    let d = solve(&dbl, &SolverConfig::default()).unwrap();
    let start = Instant::now();
    let od = oracle(&dbl);
    let dbl_oracle_time = start.elapsed();
    let dbl_ok = d.verdict.solution().is_some_and(|sol| verify_solution(&dbl, sol).is_ok())
        && matches!(&od, OracleOutcome::Feasible(sol) if verify_solution(&dbl, sol).is_ok());
    let ok = matches!(o, OracleOutcome::Infeasible)
        && !s.is_feasible()
        && !matches!(s.verdict, eulerflow_core::Verdict::Undecided)
        && dbl_ok
        && oracle_time < FIGURE_ORACLE_LIMIT
        && dbl_oracle_time < FIGURE_ORACLE_LIMIT
        && solve_time < FIGURE_SOLVER_LIMIT;
    t.report(
        1,
        ok,
        format!(
            "four-gadget fixture: oracle {} in {oracle_time:.2?} (limit {FIGURE_ORACLE_LIMIT:?}), solver {} in {solve_time:.2?} (limit {FIGURE_SOLVER_LIMIT:?}), doubled {}",
            if matches!(o, OracleOutcome::Infeasible) { "infeasible" } else { "NOT infeasible" },
            s.verdict.solution().map_or("infeasible", |_| "feasible"),
            if dbl_ok { "feasible for both, verified" } else { "NOT feasible for both" },
        ),
    );
}

fn star(dirs: &[bool]) -> EmbeddedDigraph {
    let mut arcs = Vec::new();
    let mut rot = vec![Vec::new()];
    for (i, &inward) in dirs.iter().enumerate() {
        let leaf = VertexId(i as u32 + 1);
        arcs.push(if inward { (leaf, VertexId(0)) } else { (VertexId(0), leaf) });
        rot.push(vec![ArcId(i as u32)]);
    }
    rot[0] = (0..dirs.len() as u32).map(ArcId).collect();
    EmbeddedDigraph::new(dirs.len() + 1, arcs, rot).unwrap()
}

fn worked_example(t: &mut Tally) {
    // Anticlockwise from P's in-arc; numbers are out-arcs, letters in-arcs
    // of paths P must go left of, cross, or go right of.
    let figure = ["P", "L", "1", "2", "3", "L", "4", "5", "C", "R", "C", "6"];
    let g = star(&figure.map(|s| s.parse::<u32>().is_err()));
    let c = VertexId(0);
    let ins: Vec<ArcId> = g.in_arcs(c).collect();
    let p = ins.iter().position(|a| figure[a.index()] == "P").unwrap();
    let want = |y: usize| match figure[ins[y].index()] {
        "L" => Behaviour::Left,
        "R" => Behaviour::Right,
        _ => Behaviour::Cross,
    };
    let mut exits = BTreeSet::new();
    let mut routed = true;
    for outs in all_assignments(&g, c, ins.len()) {
        let table = realized_behaviours(&g, c, &ins, &outs);
        if (0..ins.len()).filter(|&y| y != p).all(|y| table.get(p, y) == want(y)) {
            exits.insert(figure[outs[p].index()]);
            routed &= route_vertex(&g, c, &ins, &table).ok() == Some(outs);
        }
    }
    let ok = exits.len() == 1 && exits.contains("5") && routed;
    t.report(2, ok, format!("worked example leaves by arc {exits:?}, counting rule agrees: {routed}"));
}

/// The fixed instance set of criterion 3: grid instances with `k, r <= 2`
/// and at most `GRID_MAX_ARCS` normalized arcs.
fn grid_set() -> Vec<(String, Instance)> {
    let shapes = [(2, 3), (3, 3), (3, 4), (4, 4), (4, 5), (5, 5)];
    let mut out = Vec::new();
    let mut seed = 0u64;
    while out.len() < GRID_INSTANCES {
        for &(w, h) in &shapes {
            for k in 1..=2 {
                for r in 1..=2 {
                    for corners in [false, true] {
                        let p = GridParams { width: w, height: h, k, r, corners, scramble: true };
                        let inst = gen_grid(&p, seed).unwrap().instance;
                        if normalize(&inst).unwrap().graph().arc_count() <= GRID_MAX_ARCS && out.len() < GRID_INSTANCES {
                            out.push((format!("{p:?} seed {seed}"), inst));
                        }
                    }
                }
            }
        }
        seed += 1;
    }
    out
}

fn flat(sol: &Solution) -> Vec<Vec<ArcId>> {
    sol.all_paths().map(|(_, p)| p.clone()).collect()
}

fn grids(t: &mut Tally) {
    let start = Instant::now();
    let set = grid_set();
    let mut agree = 0;
    let mut verified = 0;
    let mut feasible = 0;
    let mut solutions = Vec::new();
    let mut first_miss = None;
    for (name, inst) in &set {
        let o = oracle(inst);
        let s = solve(inst, &SolverConfig::default()).unwrap();
        let same = match &o {
            OracleOutcome::Feasible(_) => s.is_feasible(),
            OracleOutcome::Infeasible => matches!(s.verdict, eulerflow_core::Verdict::Infeasible),
            OracleOutcome::BudgetExceeded => false,
        };
        if same {
            agree += 1;
        } else if first_miss.is_none() {
            first_miss = Some(name.clone());
        }
        let sol_ok = s.verdict.solution().is_none_or(|sol| verify_solution(inst, sol).is_ok());
        let oracle_ok = match &o {
            OracleOutcome::Feasible(sol) => verify_solution(inst, sol).is_ok(),
            _ => true,
        };
        verified += (sol_ok && oracle_ok) as usize;
        if let OracleOutcome::Feasible(sol) = o {
            feasible += 1;
            solutions.push((name.clone(), inst.clone(), sol));
        }
    }
    let elapsed = start.elapsed();
    let n = set.len();
    let ok = n >= 300 && agree == n && verified == n && elapsed < GRID_TIME_LIMIT;
    let miss = first_miss.map_or(String::new(), |m| format!(", first disagreement: {m}"));
    t.report(
        3,
        ok,
        format!(
            "{agree}/{n} grid instances agree with the oracle ({feasible} feasible), {verified}/{n} verified, {elapsed:.2?} (limit {GRID_TIME_LIMIT:?}){miss}"
        ),
    );

    let matrix = SolverConfig { family: SchemeFamily::Matrix, ..Default::default() };
    let matrix_agree = set
        .iter()
        .filter(|(_, inst)| solve(inst, &matrix).unwrap().is_feasible() == oracle(inst).is_feasible())
        .count();
    info(format!("matrix family agrees with the oracle on {matrix_agree}/{n} of the criterion 3 instances"));

    uncrossing(t, &solutions);
}

fn uncrossing(t: &mut Tally, solutions: &[(String, Instance, Solution)]) {
    let (mut decreasing, mut uncrossed, mut intervals, mut bridged, mut sided, mut swaps) = (0, 0, 0, 0, 0, 0usize);
    let mut bridge_miss = Vec::new();
    for (name, inst, sol) in solutions {
        let norm = normalize(inst).unwrap();
        let g = norm.graph();
        let lifted = norm.lift_solution(sol).expect("oracle solutions lift");
        let Ok(done) = uncross(g, &norm.order, &lifted) else { continue };
        swaps += done.swaps.len();
        let mut current = count_crossings(g, &norm.order, &flat(&lifted));
        let mut chain = true;
        for s in &done.swaps {
            chain &= s.before == current && s.after < s.before;
            current = s.after.clone();
        }
        chain &= current == count_crossings(g, &norm.order, &flat(&done.solution));
        decreasing += chain as usize;
        let valid = verify_solution(&norm.instance, &done.solution).is_ok();
        if valid && check_uncrossed(g, &done.solution).is_ok() {
            uncrossed += 1;
            intervals += check_interval_structure(g, &done.solution).is_ok() as usize;
            if check_scheme_bridge(g, &done.solution).is_ok() {
                bridged += 1;
            } else {
                bridge_miss.push(name.clone());
            }
            sided += check_side_bridge(g, &done.solution).is_ok() as usize;
        }
    }
    let n = solutions.len();
    t.report(
        4,
        decreasing == n && uncrossed == n,
        format!("{decreasing}/{n} swap chains strictly decrease the crossing vector ({swaps} swaps), {uncrossed}/{n} outputs uncrossed"),
    );
    let miss = if bridge_miss.is_empty() { String::new() } else { format!(", matrix misses: {}", bridge_miss.join("; ")) };
    t.report(
        5,
        intervals == n && bridged == n,
        format!("{intervals}/{n} uncrossed solutions have the interval structure, {bridged}/{n} first meetings reproduced by the behaviour matrix{miss}"),
    );
    info(format!("{sided}/{n} first meetings reproduced by a side scheme"));
    lenses();
}

/// Known instances where a path of one demand runs between two paths of
/// another, outside the criterion 3 set.
fn lenses() {
    let grid = GridParams { width: 4, height: 4, k: 2, r: 2, corners: true, scramble: false };
    let cases = [
        ("outer n 4 k 4 seed 29", gen_outer_boundary(4, 4, 29).unwrap().instance),
        ("grid 4x4 corners k 2 r 2 seed 4225673176289810987", gen_grid(&grid, 4225673176289810987).unwrap().instance),
    ];
    let matrix = SolverConfig { family: SchemeFamily::Matrix, ..Default::default() };
    for (name, inst) in cases {
        let norm = normalize(&inst).unwrap();
        let g = norm.graph();
        let OracleOutcome::Feasible(sol) = oracle(&norm.instance) else {
            info(format!("{name}: oracle does not find a solution"));
            continue;
        };
        let done = uncross(g, &norm.order, &sol).unwrap();
        info(format!(
            "{name}: oracle feasible; uncrossed: intervals {}, behaviour matrix {}, side scheme {}; matrix solver {}, default solver {}",
            if check_interval_structure(g, &done.solution).is_ok() { "ok" } else { "violated" },
            if check_scheme_bridge(g, &done.solution).is_ok() { "reproduces" } else { "does not reproduce" },
            if check_side_bridge(g, &done.solution).is_ok() { "reproduces" } else { "does not reproduce" },
            if solve(&inst, &matrix).unwrap().is_feasible() { "feasible" } else { "infeasible" },
            if solve(&inst, &SolverConfig::default()).unwrap().is_feasible() { "feasible" } else { "infeasible" },
        ));
    }
}

fn brute_partitions(r: u32) -> BTreeSet<Vec<Label>> {
    let mut out = BTreeSet::new();
    for code in 0..4u32.pow(r) {
        let labels: Vec<Label> = (0..r).map(|i| Label::ALL[((code >> (2 * i)) & 3) as usize]).collect();
        let sorted_from = |s: u32| (0..r - 1).all(|i| labels[((s + i) % r) as usize] <= labels[((s + i + 1) % r) as usize]);
        if (0..r).any(sorted_from) {
            out.insert(labels);
        }
    }
    out
}

fn scheme_counts(t: &mut Tally) {
    let mut vectors = vec![Vec::new()];
    let mut checked = 0;
    let mut within = 0;
    let mut worst = 0f64;
    for k in 1..=MAX_SCHEME_K {
        vectors = vectors.into_iter().flat_map(|v: Vec<u32>| (1..=MAX_SCHEME_R).map(move |r| [v.clone(), vec![r]].concat())).collect();
        for req in &vectors {
            let count = enumerate_schemes(req).count().unwrap();
            let big_r = *req.iter().max().unwrap() as u128 + 1;
            let bound = big_r.pow(4 * k as u32 * (k as u32 - 1));
            checked += 1;
            within += (count <= bound) as usize;
            worst = worst.max(count as f64 / bound as f64);
        }
    }
    let mut partitions_ok = true;
    for r in 1..=MAX_PARTITION_R {
        let ours: Vec<Vec<Label>> = partitions_of(r).iter().map(|p| p.labels()).collect();
        let set: BTreeSet<Vec<Label>> = ours.iter().cloned().collect();
        partitions_ok &= set.len() == ours.len() && set == brute_partitions(r);
    }
    t.report(
        6,
        within == checked && partitions_ok,
        format!(
            "{within}/{checked} request vectors (k <= {MAX_SCHEME_K}, r <= {MAX_SCHEME_R}) within R^(4k(k-1)), largest count/bound {worst:.3}; partitions match brute force for r <= {MAX_PARTITION_R}: {partitions_ok}"
        ),
    );
}

fn vertex_routing(t: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let behaviours = [Behaviour::Left, Behaviour::Right, Behaviour::Cross];
    let (mut unique, mut agree, mut realized_found) = (0, 0, 0);
    let mut realized = 0;
    for i in 0..VERTEX_CONFIGS {
        let n = rng.random_range(1..=MAX_VERTEX_DEGREE / 2);
        let mut dirs: Vec<bool> = (0..2 * n).map(|j| j < n).collect();
        dirs.shuffle(&mut rng);
        let g = star(&dirs);
        let c = VertexId(0);
        let ins: Vec<ArcId> = g.in_arcs(c).collect();
        let (table, planted) = if i % 2 == 0 {
            let mut outs: Vec<ArcId> = g.out_arcs(c).collect();
            outs.shuffle(&mut rng);
            (realized_behaviours(&g, c, &ins, &outs), Some(outs))
        } else {
            let mut t = BehaviourTable::new(n);
            for x in 0..n {
                for y in 0..n {
                    t.set(x, y, behaviours[rng.random_range(0..3)]);
                }
            }
            (t, None)
        };
        let found = brute_force_routes(&g, c, &ins, &table);
        unique += (found.len() <= 1) as usize;
        let routed = route_vertex(&g, c, &ins, &table).ok();
        agree += (routed.iter().cloned().collect::<Vec<_>>() == found) as usize;
        if let Some(outs) = planted {
            realized += 1;
            realized_found += (found == vec![outs]) as usize;
        }
    }
    t.report(
        7,
        unique == VERTEX_CONFIGS && agree == VERTEX_CONFIGS && realized_found == realized,
        format!(
            "{VERTEX_CONFIGS} vertex configurations (degree <= {MAX_VERTEX_DEGREE}): {unique} with at most one routing, {agree} equal to the counting rule, {realized_found}/{realized} planted routings recovered"
        ),
    );
}

fn outer_boundary(t: &mut Tally) {
    let mut set = Vec::new();
    let mut seed = 0u64;
    while set.len() < OUTER_INSTANCES {
        for n in 2..=5 {
            for k in 2..=4 {
                let f = gen_outer_boundary(n, k, seed).unwrap();
                if normalize(&f.instance).unwrap().graph().arc_count() <= OUTER_MAX_ARCS && set.len() < OUTER_INSTANCES {
                    set.push((format!("n {n} k {k} seed {seed}"), f));
                }
            }
        }
        seed += 1;
    }
    let (mut agree, mut feasible) = (0, 0);
    let mut first_miss = None;
    for (name, f) in &set {
        let inst = &f.instance;
        let greedy = solve_outer_boundary(inst, f.outer_face.unwrap()).unwrap();
        let general = solve(inst, &SolverConfig::default()).unwrap();
        let o = oracle(inst);
        let decided = !matches!(o, OracleOutcome::BudgetExceeded);
        let verified = [greedy.solution(), general.verdict.solution()].into_iter().flatten().all(|s| verify_solution(inst, s).is_ok());
        let same = decided && greedy.is_feasible() == o.is_feasible() && general.is_feasible() == o.is_feasible();
        if same && verified {
            agree += 1;
        } else if first_miss.is_none() {
            first_miss = Some(name.clone());
        }
        feasible += o.is_feasible() as usize;
    }
    let n = set.len();
    let miss = first_miss.map_or(String::new(), |m| format!(", first disagreement: {m}"));
    t.report(
        8,
        agree == n && n >= 100,
        format!("{agree}/{n} outer-boundary instances: greedy, solver and oracle agree ({feasible} feasible){miss}"),
    );
}

fn scaling(t: &mut Tally) {
    let rows = bench_grid(&SCALING_SIZES, 2, 1, SCALING_SEEDS, SCALING_MIN_TIME).unwrap();
    let ratios: Vec<f64> = rows.windows(2).map(|w| w[1].seconds / w[0].seconds).collect();
    let ok = ratios.iter().all(|&r| r <= SCALING_FACTOR);
    let detail: Vec<String> = rows.iter().map(|r| format!("n {} ({:.0} vertices) {:.3e}s", r.scale, r.vertices, r.seconds)).collect();
    let ratio_text: Vec<String> = ratios.iter().map(|r| format!("{r:.2}")).collect();
    t.report(
        9,
        ok,
        format!("grid k=2 r=1: {}; doubling factors [{}] (limit {SCALING_FACTOR})", detail.join(", "), ratio_text.join(", ")),
    );
}

fn main() -> ExitCode {
    let mut t = Tally { failed: 0 };
    figure_one(&mut t);
    worked_example(&mut t);
    grids(&mut t);
    scheme_counts(&mut t);
    vertex_routing(&mut t);
    outer_boundary(&mut t);
    scaling(&mut t);
    if t.failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", t.failed);
        ExitCode::FAILURE
    }
}
