//! Wall-clock scaling of the solver on the grid family.

use std::time::{Duration, Instant};

use eulerflow_core::preprocess::normalize;
use eulerflow_core::scheme::enumerate_schemes;
use eulerflow_core::scheme::sides::SideSpace;
use eulerflow_core::solver::{solve, SolverConfig};
use eulerflow_core::Instance;

use crate::generate::{gen_grid, GenError, GridParams};

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    /// Requested vertex count.
    pub scale: u32,
    /// Mean vertex count of the generated instances.
    pub vertices: f64,
    pub normalized_arcs: f64,
    /// Matrix schemes for the planted requests.
    pub scheme_count: u128,
    /// Side schemes for the planted requests, the family searched.
    pub side_scheme_count: u128,
    /// `R^(4k(k-1))` with `R = max r + 1`.
    pub bound: Option<u128>,
    /// The same bound with `R = max r`.
    pub bound_max_r: Option<u128>,
    pub trials: u64,
    pub feasible: usize,
    pub instances: usize,
    /// Mean wall time of one solve.
    pub seconds: f64,
}

fn power(base: u128, exp: u32) -> Option<u128> {
    base.checked_pow(exp)
}

/// Smallest square corner-to-corner grid instance of `seed` with at least
/// `n` vertices. Two walks across a side-`s` grid visit about `4s` cells.
pub fn sized_grid(n: u32, k: u32, r: u32, seed: u64) -> Result<Instance, GenError> {
    let mut side = (n / 4).max(2);
    loop {
        let p = GridParams { width: side, height: side, k, r, corners: true, scramble: false };
        let inst = gen_grid(&p, seed)?.instance;
        if inst.graph.vertex_count() >= n as usize {
            return Ok(inst);
        }
        side += 1;
    }
}

/// Solve `seeds` planted, unscrambled grid instances per scale, each the
/// [`sized_grid`] of its seed. Each solve is repeated until it has taken
/// `min_time` in total, and the mean is kept.
pub fn bench_grid(scales: &[u32], k: u32, r: u32, seeds: u64, min_time: Duration) -> Result<Vec<BenchRow>, GenError> {
    let cfg = SolverConfig::default();
    let mut rows = Vec::new();
    for &scale in scales {
        let (mut vertices, mut arcs, mut trials, mut feasible, mut seconds) = (0usize, 0usize, 0u64, 0usize, 0.0);
        for seed in 0..seeds {
            let inst = sized_grid(scale, k, r, seed)?;
            vertices += inst.graph.vertex_count();
            if let Ok(norm) = normalize(&inst) {
                arcs += norm.graph().arc_count();
            }
            let mut reps = 0u32;
            let start = Instant::now();
            let mut last = None;
            while reps == 0 || start.elapsed() < min_time {
                last = Some(solve(&inst, &cfg).expect("generated instances normalize"));
                reps += 1;
            }
            seconds += start.elapsed().as_secs_f64() / reps as f64;
            let report = last.unwrap();
            trials += report.stats.trials;
            feasible += report.is_feasible() as usize;
        }
        let n = seeds.max(1) as f64;
        let exp = 4 * k * k.saturating_sub(1);
        let requests = vec![r; k as usize];
        let space = enumerate_schemes(&requests);
        debug_assert_eq!(space.bound(), power(r as u128 + 1, exp));
        rows.push(BenchRow {
            scale,
            vertices: vertices as f64 / n,
            normalized_arcs: arcs as f64 / n,
            scheme_count: space.count().unwrap_or(u128::MAX),
            side_scheme_count: SideSpace::new(&requests).count().unwrap_or(u128::MAX),
            bound: space.bound(),
            bound_max_r: power(r as u128, exp),
            trials,
            feasible,
            instances: seeds as usize,
            seconds: seconds / n,
        });
    }
    Ok(rows)
}

pub fn format_table(rows: &[BenchRow]) -> String {
    let opt = |x: Option<u128>| x.map_or("overflow".to_string(), |v| v.to_string());
    let mut out = String::from("scale\tvertices\tarcs\tschemes\tside schemes\tbound(R=r+1)\tbound(R=r)\ttrials\tfeasible\tseconds\n");
    for r in rows {
        out.push_str(&format!(
            "{}\t{:.1}\t{:.1}\t{}\t{}\t{}\t{}\t{}\t{}/{}\t{:.6}\n",
            r.scale,
            r.vertices,
            r.normalized_arcs,
            r.scheme_count,
            r.side_scheme_count,
            opt(r.bound),
            opt(r.bound_max_r),
            r.trials,
            r.feasible,
            r.instances,
            r.seconds
        ));
    }
    out
}
