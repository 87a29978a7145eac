//! The scheme-driven solver.
//!
//! After normalization, vertices are processed in topological order. Under a
//! routing scheme the out-arc of every path at every vertex is forced: pairs
//! meeting for the first time take their behaviour from the scheme, pairs
//! that met before take it from the side of the destination, and the
//! counting rule of [`vertex::route_vertex`] turns behaviours into arcs.

mod outer;
mod search;
pub mod vertex;

use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

use crate::ids::{ArcId, DemandId, VertexId};
use crate::preprocess::{normalize, Instance, NormalizeError, NormalizedInstance};
use crate::scheme::RoutingScheme;

pub use outer::{solve_outer_boundary, OuterError};
pub use search::{Prepared, SearchStats, TraceEvent};
pub use vertex::{route_vertex, RouteError, RouteFailure};

/// Paths per demand, each a sequence of arc ids.
///
/// Which graph the ids refer to depends on the producer: [`solve`] and the
/// oracle report input arcs, [`Prepared::run_scheme`] normalized ones.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Solution {
    pub paths: Vec<Vec<Vec<ArcId>>>,
}

impl Solution {
    /// Every path of every demand, demand by demand.
    pub fn all_paths(&self) -> impl Iterator<Item = (DemandId, &Vec<ArcId>)> {
        self.paths.iter().enumerate().flat_map(|(h, ps)| ps.iter().map(move |p| (DemandId::from_index(h), p)))
    }

    /// Map a solution of the normalized instance to the input instance.
    pub fn project(&self, norm: &NormalizedInstance, original_demands: usize) -> Solution {
        let mut paths = vec![Vec::new(); original_demands];
        for (h, ps) in self.paths.iter().enumerate() {
            let orig = norm.original_demand[h].index();
            paths[orig].extend(ps.iter().map(|p| norm.project_path(p)));
        }
        Solution { paths }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Feasible(Solution),
    Infeasible,
    /// A trial budget stopped the search before it could conclude.
    Undecided,
}

impl Verdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Verdict::Feasible(_))
    }

    pub fn solution(&self) -> Option<&Solution> {
        match self {
            Verdict::Feasible(s) => Some(s),
            _ => None,
        }
    }
}

/// Why a trial stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Failure {
    /// No assignment at this vertex realizes the required behaviours.
    NotRoutable { vertex: VertexId, reason: RouteFailure },
    /// A path of `demand` reached the sink of another demand.
    WrongTerminal { demand: DemandId, vertex: VertexId },
    /// A path of `demand` reached `vertex`, from which its sink is unreachable.
    Unreachable { demand: DemandId, vertex: VertexId },
    /// No bijection respects the behaviours forced by earlier meetings.
    NoOption { vertex: VertexId },
    /// The face-based side test rejected its input.
    SideTest { vertex: VertexId },
}

/// The two ways a trial fails: some vertex cannot be routed, or some demand
/// is not satisfied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FailureMode {
    VertexNotRoutable,
    DemandNotSatisfied,
}

impl Failure {
    pub fn mode(&self) -> FailureMode {
        match self {
            Failure::NotRoutable { .. } | Failure::NoOption { .. } | Failure::SideTest { .. } => {
                FailureMode::VertexNotRoutable
            }
            Failure::WrongTerminal { .. } | Failure::Unreachable { .. } => FailureMode::DemandNotSatisfied,
        }
    }
}

impl core::fmt::Display for Failure {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Failure::NotRoutable { vertex, reason } => write!(f, "vertex {vertex} not routable ({reason:?})"),
            Failure::WrongTerminal { demand, vertex } => write!(f, "demand {demand} not satisfied: path ends at {vertex}"),
            Failure::Unreachable { demand, vertex } => {
                write!(f, "demand {demand} not satisfied: sink unreachable from {vertex}")
            }
            Failure::NoOption { vertex } => write!(f, "vertex {vertex} not routable (no consistent assignment)"),
            Failure::SideTest { vertex } => write!(f, "vertex {vertex} not routable (side test failed)"),
        }
    }
}

/// How schemes are explored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Depth-first over first-meeting outcomes; a branch stands for every
    /// scheme giving those outcomes, so the verdict is that of trying them all.
    #[default]
    Lazy,
    /// Try matrix schemes one by one in enumeration order. Other families
    /// are always searched lazily.
    Enumerate,
}

/// Which behaviours first meetings may take.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum SchemeFamily {
    /// Per demand pair a crossing pattern and, for each path, a cyclic
    /// interval of partner paths it goes to the left of. Contains the matrix
    /// family and also describes a path running between two paths of
    /// another demand; see [`crate::scheme::sides`].
    #[default]
    Sides,
    /// Four-interval partitions and the fixed behaviour matrix. Every path
    /// keeps one side towards all non-crossing paths of the other demand,
    /// which misses some feasible instances.
    Matrix,
    /// Any behaviour pair at any first meeting. Exhaustive; diagnostic use.
    /// Only meaningful with [`Strategy::Lazy`].
    PairBehaviours,
}

/// How the side of a destination is decided for pairs that met before.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum SideTest {
    /// From the rotation at the current vertex and destination reachability.
    #[default]
    Rotation,
    /// From the inside/outside face partition of the closed walk.
    Faces,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SolverConfig {
    pub strategy: Strategy,
    pub family: SchemeFamily,
    pub side_test: SideTest,
    /// Stop after this many trials and report [`Verdict::Undecided`].
    pub max_trials: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub verdict: Verdict,
    /// The same solution on the normalized instance.
    pub normalized_solution: Option<Solution>,
    /// A matrix scheme under which routing succeeds; only the matrix family reports one.
    pub scheme: Option<RoutingScheme>,
    pub stats: SearchStats,
    /// Number of schemes of the family searched (saturating), 0 for the pair family.
    pub scheme_count: u128,
}

impl SolveReport {
    pub fn is_feasible(&self) -> bool {
        self.verdict.is_feasible()
    }
}

/// Decide an instance. Any returned solution has passed [`verify_solution`].
pub fn solve(inst: &Instance, config: &SolverConfig) -> Result<SolveReport, NormalizeError> {
    solve_traced(inst, config, &mut |_, _| {})
}

/// [`solve`] with a callback per finished trial.
pub fn solve_traced(
    inst: &Instance,
    config: &SolverConfig,
    trace: &mut dyn FnMut(&Prepared<'_>, &TraceEvent),
) -> Result<SolveReport, NormalizeError> {
    let norm = normalize(inst)?;
    Ok(solve_normalized(inst, &norm, config, trace))
}

pub fn solve_normalized(
    inst: &Instance,
    norm: &NormalizedInstance,
    config: &SolverConfig,
    trace: &mut dyn FnMut(&Prepared<'_>, &TraceEvent),
) -> SolveReport {
    let prepared = Prepared::new(norm, config);
    check_degree_bound(norm);
    let scheme_count = prepared.scheme_count(config.family);
    let (found, stats) = match (config.strategy, config.family) {
        (Strategy::Enumerate, SchemeFamily::Matrix) => enumerate(&prepared, config.max_trials, trace),
        _ => {
            let p = &prepared;
            let (found, stats) = prepared.lazy_search(config.family, config.max_trials, &mut |e| trace(p, e));
            let found =
                found.map(|(sol, cands)| (sol, (config.family == SchemeFamily::Matrix).then(|| prepared.witness(&cands))));
            (found, stats)
        }
    };
    finish(inst, norm, found, stats, scheme_count)
}

fn enumerate(
    prepared: &Prepared<'_>,
    max_trials: Option<u64>,
    trace: &mut dyn FnMut(&Prepared<'_>, &TraceEvent),
) -> (Option<(Solution, Option<RoutingScheme>)>, SearchStats) {
    let mut stats = SearchStats::default();
    for scheme in prepared.space.iter() {
        if max_trials.is_some_and(|m| stats.trials >= m) {
            stats.exhausted = true;
            return (None, stats);
        }
        stats.trials += 1;
        let result = prepared.run_scheme(&scheme);
        let cands: Vec<Vec<u32>> = scheme.digits.iter().map(|&d| vec![d]).collect();
        trace(prepared, &TraceEvent { family: SchemeFamily::Matrix, candidates: &cands, result: result.as_ref().map(|_| ()).map_err(|f| *f) });
        if let Ok(sol) = result {
            return (Some((sol, Some(scheme))), stats);
        }
    }
    (None, stats)
}

/// Assemble a report from a search result, verifying any solution.
pub fn finish(
    inst: &Instance,
    norm: &NormalizedInstance,
    found: Option<(Solution, Option<RoutingScheme>)>,
    stats: SearchStats,
    scheme_count: u128,
) -> SolveReport {
    match found {
        Some((sol, scheme)) => {
            let projected = sol.project(norm, inst.demands.len());
            if let Err(v) = verify_solution(inst, &projected) {
                panic!("solver produced an invalid solution: {v}");
            }
            SolveReport {
                verdict: Verdict::Feasible(projected),
                normalized_solution: Some(sol),
                scheme,
                stats,
                scheme_count,
            }
        }
        None => SolveReport {
            verdict: if stats.exhausted { Verdict::Undecided } else { Verdict::Infeasible },
            normalized_solution: None,
            scheme: None,
            stats,
            scheme_count,
        },
    }
}

/// Every vertex is used by at most `R·k` paths, hence has in-degree at most that.
fn check_degree_bound(norm: &NormalizedInstance) {
    let g = norm.graph();
    let big_r = norm.requests().iter().copied().max().unwrap_or(0) as usize + 1;
    let k = norm.demand_count();
    debug_assert!(g.vertices().all(|v| g.in_degree(v) <= big_r * k));
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SolutionViolation {
    #[error("expected paths for {expected} demands, found {found}")]
    DemandCount { expected: usize, found: usize },
    #[error("demand {demand} has {found} paths, requested {expected}")]
    Request { demand: DemandId, expected: u32, found: usize },
    #[error("path {path} of demand {demand} is empty")]
    EmptyPath { demand: DemandId, path: usize },
    #[error("path {path} of demand {demand} mentions unknown arc {arc}")]
    UnknownArc { demand: DemandId, path: usize, arc: ArcId },
    #[error("path {path} of demand {demand} is broken before position {position}")]
    NotConnected { demand: DemandId, path: usize, position: usize },
    #[error("path {path} of demand {demand} has the wrong endpoints")]
    Endpoints { demand: DemandId, path: usize },
    #[error("path {path} of demand {demand} repeats {arc}")]
    RepeatedArc { demand: DemandId, path: usize, arc: ArcId },
    #[error("{arc} carries {used} paths, capacity {capacity}")]
    Capacity { arc: ArcId, used: u32, capacity: u32 },
}

/// Check a solution against the input instance: every demand gets exactly
/// its request of paths from its source to its target, and no arc carries
/// more paths than its capacity.
pub fn verify_solution(inst: &Instance, sol: &Solution) -> Result<(), SolutionViolation> {
    let g = &inst.graph;
    if sol.paths.len() != inst.demands.len() {
        return Err(SolutionViolation::DemandCount { expected: inst.demands.len(), found: sol.paths.len() });
    }
    let mut used = vec![0u32; g.arc_count()];
    for (h, (d, paths)) in inst.demands.iter().zip(&sol.paths).enumerate() {
        let demand = DemandId::from_index(h);
        if paths.len() != d.request as usize {
            return Err(SolutionViolation::Request { demand, expected: d.request, found: paths.len() });
        }
        for (i, p) in paths.iter().enumerate() {
            if p.is_empty() {
                return Err(SolutionViolation::EmptyPath { demand, path: i });
            }
            if let Some(&arc) = p.iter().find(|a| a.index() >= g.arc_count()) {
                return Err(SolutionViolation::UnknownArc { demand, path: i, arc });
            }
            for (j, w) in p.windows(2).enumerate() {
                if g.head(w[0]) != g.tail(w[1]) {
                    return Err(SolutionViolation::NotConnected { demand, path: i, position: j + 1 });
                }
            }
            if g.tail(p[0]) != d.source() || g.head(*p.last().unwrap()) != d.target() {
                return Err(SolutionViolation::Endpoints { demand, path: i });
            }
            for (j, &a) in p.iter().enumerate() {
                if p[..j].contains(&a) {
                    return Err(SolutionViolation::RepeatedArc { demand, path: i, arc: a });
                }
                used[a.index()] += 1;
            }
        }
    }
    for a in g.arcs() {
        if used[a.index()] > inst.capacity(a) {
            return Err(SolutionViolation::Capacity { arc: a, used: used[a.index()], capacity: inst.capacity(a) });
        }
    }
    Ok(())
}
