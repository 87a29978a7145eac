//! Topological routing under a routing scheme, and the search over schemes.

use alloc::vec;
use alloc::vec::Vec;

use super::vertex::{route_vertex, BehaviourTable, RouteError};
use super::{Failure, SchemeFamily, SideTest, Solution, SolverConfig};
use alloc::string::String;

use crate::embedding::{classify_positions, trace_faces, Behaviour, Faces};
use crate::geometry::{side_by_rotation, side_of_destination, Reachability, SideError};
use crate::ids::{ArcId, DemandId, VertexId};
use crate::preprocess::NormalizedInstance;
use crate::scheme::sides::SideSpace;
use crate::scheme::{pair_index, BehaviourPair, RoutingScheme, SchemeSpace};

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    Source(DemandId),
    Sink(DemandId),
    Internal,
}

/// Everything about an instance that scheme trials share read-only.
#[derive(Debug)]
pub struct Prepared<'a> {
    pub norm: &'a NormalizedInstance,
    pub space: SchemeSpace,
    pub sides: SideSpace,
    side_test: SideTest,
    faces: Option<Faces>,
    reach: Reachability,
    roles: Vec<Role>,
    /// First path id of each demand; the last entry is the path count.
    offsets: Vec<u32>,
    path_demand: Vec<DemandId>,
}

impl<'a> Prepared<'a> {
    pub fn new(norm: &'a NormalizedInstance, config: &SolverConfig) -> Self {
        let g = norm.graph();
        let k = norm.demand_count();
        let mut roles = vec![Role::Internal; g.vertex_count()];
        for h in 0..k {
            let h = DemandId::from_index(h);
            roles[norm.source(h).index()] = Role::Source(h);
            roles[norm.sink(h).index()] = Role::Sink(h);
        }
        let mut offsets = vec![0u32];
        let mut path_demand = Vec::new();
        for h in 0..k {
            let r = norm.request(DemandId::from_index(h));
            path_demand.extend(core::iter::repeat_n(DemandId::from_index(h), r as usize));
            offsets.push(offsets[h] + r);
        }
        let sinks: Vec<VertexId> = (0..k).map(|h| norm.sink(DemandId::from_index(h))).collect();
        let faces = (config.side_test == SideTest::Faces).then(|| trace_faces(g));
        Self {
            norm,
            space: SchemeSpace::new(&norm.requests()),
            sides: SideSpace::new(&norm.requests()),
            side_test: config.side_test,
            faces,
            reach: Reachability::new(g, &sinks),
            roles,
            offsets,
            path_demand,
        }
    }

    pub fn path_count(&self) -> usize {
        self.path_demand.len()
    }

    fn index_in_demand(&self, p: usize) -> u32 {
        p as u32 - self.offsets[self.path_demand[p].index()]
    }

    fn start_state(&self, cands: Vec<Vec<u32>>) -> RoutingState {
        let n = self.path_count();
        RoutingState {
            paths: vec![Vec::new(); n],
            owner: vec![NONE; self.norm.graph().arc_count()],
            met: vec![NONE; n * n],
            cands,
        }
    }

    /// Every value of every component: the whole scheme space of `family`.
    fn full_candidates(&self, family: SchemeFamily) -> Vec<Vec<u32>> {
        match family {
            SchemeFamily::Matrix => (0..self.space.pairs.len()).map(|p| (0..self.space.radix(p)).collect()).collect(),
            SchemeFamily::Sides => (0..self.sides.component_count()).map(|c| (0..self.sides.radix(c)).collect()).collect(),
            SchemeFamily::PairBehaviours => Vec::new(),
        }
    }

    /// Number of schemes of `family`, saturating; 0 for the pair family,
    /// which has none.
    pub fn scheme_count(&self, family: SchemeFamily) -> u128 {
        match family {
            SchemeFamily::Matrix => self.space.count().unwrap_or(u128::MAX),
            SchemeFamily::Sides => self.sides.count().unwrap_or(u128::MAX),
            SchemeFamily::PairBehaviours => 0,
        }
    }

    /// The smallest scheme a trace event stands for.
    pub fn describe(&self, ev: &TraceEvent) -> String {
        let values: Vec<u32> = ev.candidates.iter().map(|c| c[0]).collect();
        match ev.family {
            SchemeFamily::Matrix => self.space.describe(&RoutingScheme { digits: values }),
            SchemeFamily::Sides => self.sides.describe(&values),
            SchemeFamily::PairBehaviours => String::from("pair behaviours"),
        }
    }

    /// Route every vertex under one fixed scheme.
    pub fn run_scheme(&self, scheme: &RoutingScheme) -> Result<Solution, Failure> {
        let cands = scheme.digits.iter().map(|&d| vec![d]).collect();
        let mut st = self.start_state(cands);
        let mut stats = SearchStats::default();
        let mut sink = |_: &TraceEvent| {};
        match self.search(&mut st, 0, SchemeFamily::Matrix, &mut stats, &mut sink, None) {
            Outcome::Found(sol, _) => Ok(sol),
            Outcome::Failed(f) => Err(f),
            Outcome::Aborted => unreachable!("no budget"),
        }
    }

    /// Depth-first search over behaviour outcomes, branching only where a
    /// first meeting is not yet decided by the remaining candidates.
    pub fn lazy_search(
        &self,
        family: SchemeFamily,
        budget: Option<u64>,
        trace: &mut dyn FnMut(&TraceEvent),
    ) -> (Option<(Solution, Vec<Vec<u32>>)>, SearchStats) {
        let mut st = self.start_state(self.full_candidates(family));
        let mut stats = SearchStats::default();
        let out = self.search(&mut st, 0, family, &mut stats, trace, budget);
        stats.exhausted = matches!(out, Outcome::Aborted);
        match out {
            Outcome::Found(sol, cands) => (Some((sol, cands)), stats),
            _ => (None, stats),
        }
    }

    fn search(
        &self,
        st: &mut RoutingState,
        mut rank: usize,
        family: SchemeFamily,
        stats: &mut SearchStats,
        trace: &mut dyn FnMut(&TraceEvent),
        budget: Option<u64>,
    ) -> Outcome {
        let order = self.norm.order.order();
        while rank < order.len() {
            let v = order[rank];
            match self.roles[v.index()] {
                Role::Source(h) => self.start_paths(st, h),
                Role::Sink(h) => {
                    if let Err(f) = self.finish_paths(st, v, h) {
                        return self.leaf_failure(stats, trace, st, family, f);
                    }
                }
                Role::Internal => {
                    let prep = match self.prepare_vertex(st, v) {
                        Ok(p) => p,
                        Err(f) => return self.leaf_failure(stats, trace, st, family, f),
                    };
                    let mut options = self.options(st, v, &prep, family).peekable();
                    let Some(first) = options.next() else {
                        return self.leaf_failure(stats, trace, st, family, Failure::NoOption { vertex: v });
                    };
                    if options.peek().is_none() {
                        if let Err(f) = self.apply(st, v, &prep, first) {
                            return self.leaf_failure(stats, trace, st, family, f);
                        }
                    } else {
                        let mut last = None;
                        for opt in core::iter::once(first).chain(options) {
                            if budget.is_some_and(|b| stats.trials >= b) {
                                return Outcome::Aborted;
                            }
                            let mut branch = st.clone();
                            match self.apply(&mut branch, v, &prep, opt) {
                                Err(f) => {
                                    let _ = self.leaf_failure(stats, trace, &branch, family, f);
                                    last = Some(f);
                                }
                                Ok(()) => match self.search(&mut branch, rank + 1, family, stats, &mut *trace, budget) {
                                    Outcome::Failed(f) => last = Some(f),
                                    done => return done,
                                },
                            }
                        }
                        return Outcome::Failed(last.expect("at least two options"));
                    }
                }
            }
            rank += 1;
            stats.vertices_routed += 1;
        }
        stats.trials += 1;
        let sol = self.collect(st);
        trace(&TraceEvent { family, candidates: &st.cands, result: Ok(()) });
        Outcome::Found(sol, st.cands.clone())
    }

    fn leaf_failure(
        &self,
        stats: &mut SearchStats,
        trace: &mut dyn FnMut(&TraceEvent),
        st: &RoutingState,
        family: SchemeFamily,
        f: Failure,
    ) -> Outcome {
        stats.trials += 1;
        trace(&TraceEvent { family, candidates: &st.cands, result: Err(f) });
        Outcome::Failed(f)
    }

    fn start_paths(&self, st: &mut RoutingState, h: DemandId) {
        let g = self.norm.graph();
        let s = self.norm.source(h);
        let rot = g.rotation(s);
        let first = rot.iter().enumerate().min_by_key(|(_, &a)| a).map(|(i, _)| i).unwrap_or(0);
        let base = self.offsets[h.index()] as usize;
        let r = rot.len();
        for i in 0..r {
            let a = rot[(first + i) % r];
            st.paths[base + i].push(a);
            st.owner[a.index()] = (base + i) as u32;
        }
        let n = self.path_count();
        for x in base..base + r {
            for y in base..base + r {
                if x != y {
                    st.met[x * n + y] = s.0;
                }
            }
        }
    }

    fn finish_paths(&self, st: &RoutingState, v: VertexId, h: DemandId) -> Result<(), Failure> {
        let g = self.norm.graph();
        for a in g.in_arcs(v) {
            let p = st.owner[a.index()];
            debug_assert_ne!(p, NONE, "in-arc of a processed vertex is unowned");
            let got = self.path_demand[p as usize];
            if got != h {
                return Err(Failure::WrongTerminal { demand: got, vertex: v });
            }
        }
        Ok(())
    }

    /// Entering paths and the behaviours already forced by earlier meetings.
    fn prepare_vertex(&self, st: &RoutingState, v: VertexId) -> Result<VertexPrep, Failure> {
        let g = self.norm.graph();
        let ins: Vec<ArcId> = g.in_arcs(v).collect();
        let paths: Vec<usize> = ins.iter().map(|a| st.owner[a.index()] as usize).collect();
        debug_assert!(paths.iter().all(|&p| p != NONE as usize));
        debug_assert_eq!(ins.len(), g.out_degree(v), "saturation");
        let n = ins.len();
        let np = self.path_count();
        let mut required = BehaviourTable::new(n);
        let mut fresh = Vec::new();
        for x in 0..n {
            for y in x + 1..n {
                let (p, q) = (paths[x], paths[y]);
                let u = st.met[p * np + q];
                if u == NONE {
                    fresh.push((x, y));
                    continue;
                }
                let u = VertexId(u);
                required.set(x, y, self.side(st, v, p, q, ins[x], ins[y], u)?);
                required.set(y, x, self.side(st, v, q, p, ins[y], ins[x], u)?);
            }
        }
        Ok(VertexPrep { ins, paths, required, fresh })
    }

    #[allow(clippy::too_many_arguments)]
    fn side(&self, st: &RoutingState, v: VertexId, p: usize, q: usize, p_in: ArcId, q_in: ArcId, u: VertexId) -> Result<Behaviour, Failure> {
        let h = self.path_demand[p].index();
        let res = match self.side_test {
            SideTest::Rotation => side_by_rotation(self.norm.graph(), v, p_in, q_in, |x| self.reach.reaches_target(x, h)),
            SideTest::Faces => side_of_destination(
                self.norm.graph(),
                self.faces.as_ref().expect("faces traced"),
                &st.paths[p],
                &st.paths[q],
                u,
                v,
                self.norm.sink(DemandId::from_index(h)),
            ),
        };
        res.map_err(|e| match e {
            SideError::DestinationUnreachable { vertex } => Failure::Unreachable { demand: self.path_demand[p], vertex },
            _ => Failure::SideTest { vertex: v },
        })
    }

    /// Ways to decide the first meetings at this vertex.
    fn options<'s>(&'s self, st: &RoutingState, v: VertexId, prep: &VertexPrep, family: SchemeFamily) -> Options<'s> {
        if prep.fresh.is_empty() {
            return Options::List(vec![VertexOption { required: prep.required.clone(), cands: None }].into_iter());
        }
        match family {
            SchemeFamily::Matrix => Options::Product(self.matrix_options(st, prep)),
            SchemeFamily::Sides => Options::Routes(self.route_options(st, v, prep, Some(&self.sides))),
            SchemeFamily::PairBehaviours => Options::Routes(self.route_options(st, v, prep, None)),
        }
    }

    /// Bijections honouring the forced pairs, with the side candidates they
    /// leave. Distinct bijections realize distinct behaviour tables, so with
    /// no narrowing this covers every outcome exactly once.
    fn route_options<'s>(&self, st: &RoutingState, v: VertexId, prep: &VertexPrep, sides: Option<&'s SideSpace>) -> RouteOptions<'s> {
        let g = self.norm.graph();
        let n = prep.ins.len();
        let pos = |a: ArcId| g.position(v, a).expect("arc at v");
        let mut fresh = vec![false; n * n];
        for &(x, y) in &prep.fresh {
            fresh[x * n + y] = true;
            fresh[y * n + x] = true;
        }
        RouteOptions {
            sides,
            deg: g.degree(v),
            pin: prep.ins.iter().map(|&a| pos(a)).collect(),
            pout: g.out_arcs(v).map(pos).collect(),
            forced: prep.required.clone(),
            fresh,
            who: prep.paths.iter().map(|&p| (self.path_demand[p], self.index_in_demand(p))).collect(),
            levels: vec![(0, st.cands.clone())],
            assign: Vec::with_capacity(n),
            used: vec![false; g.degree(v)],
        }
    }

    fn matrix_options(&self, st: &RoutingState, prep: &VertexPrep) -> ProductOptions {
        let k = self.norm.demand_count();
        // Fresh meetings grouped by demand pair.
        let mut by_pair: Vec<(usize, Vec<(usize, usize)>)> = Vec::new();
        for &(x, y) in &prep.fresh {
            let (p, q) = (prep.paths[x], prep.paths[y]);
            let dp = pair_index(k, self.path_demand[p], self.path_demand[q]);
            match by_pair.iter_mut().find(|(d, _)| *d == dp) {
                Some((_, list)) => list.push((x, y)),
                None => by_pair.push((dp, vec![(x, y)])),
            }
        }
        by_pair.sort_by_key(|(d, _)| *d);
        // For each demand pair, candidates grouped by the outcomes they give.
        let mut groups: Vec<Vec<(Vec<BehaviourPair>, Vec<u32>)>> = Vec::new();
        for (dp, list) in &by_pair {
            let mut gs: Vec<(Vec<BehaviourPair>, Vec<u32>)> = Vec::new();
            for &digit in &st.cands[*dp] {
                let scheme_outcomes: Vec<BehaviourPair> = list
                    .iter()
                    .map(|&(x, y)| {
                        let (p, q) = (prep.paths[x], prep.paths[y]);
                        self.lookup_digit(*dp, digit, p, q)
                    })
                    .collect();
                match gs.iter_mut().find(|(o, _)| *o == scheme_outcomes) {
                    Some((_, ds)) => ds.push(digit),
                    None => gs.push((scheme_outcomes, vec![digit])),
                }
            }
            groups.push(gs);
        }
        ProductOptions::new(prep.required.clone(), by_pair, groups)
    }

    /// Behaviours of path `p` relative to `q` and back, under candidate `digit` of demand pair `dp`.
    fn lookup_digit(&self, dp: usize, digit: u32, p: usize, q: usize) -> BehaviourPair {
        let (hp, hq) = (self.path_demand[p], self.path_demand[q]);
        let pp = self.space.partition_pair(dp, digit);
        let (ip, iq) = (self.index_in_demand(p), self.index_in_demand(q));
        if hp < hq {
            crate::scheme::behaviour_lookup(&pp, ip, iq).expect("index in range")
        } else {
            crate::scheme::behaviour_lookup(&pp, iq, ip).expect("index in range").swapped()
        }
    }

    fn apply(&self, st: &mut RoutingState, v: VertexId, prep: &VertexPrep, opt: VertexOption) -> Result<(), Failure> {
        let g = self.norm.graph();
        if let Some(cands) = opt.cands {
            for (c, values) in cands {
                st.cands[c] = values;
            }
        }
        let outs = route_vertex(g, v, &prep.ins, &opt.required)?;
        self.extend(st, v, prep, &outs)
    }

    fn extend(&self, st: &mut RoutingState, v: VertexId, prep: &VertexPrep, outs: &[ArcId]) -> Result<(), Failure> {
        let g = self.norm.graph();
        let np = self.path_count();
        for (&p, &a) in prep.paths.iter().zip(outs) {
            st.paths[p].push(a);
            st.owner[a.index()] = p as u32;
        }
        for &(x, y) in &prep.fresh {
            let (p, q) = (prep.paths[x], prep.paths[y]);
            st.met[p * np + q] = v.0;
            st.met[q * np + p] = v.0;
        }
        for (&p, &a) in prep.paths.iter().zip(outs) {
            let h = self.path_demand[p];
            if !self.reach.reaches_target(g.head(a), h.index()) {
                return Err(Failure::Unreachable { demand: h, vertex: g.head(a) });
            }
        }
        Ok(())
    }

    fn collect(&self, st: &RoutingState) -> Solution {
        let k = self.norm.demand_count();
        let paths = (0..k)
            .map(|h| (self.offsets[h]..self.offsets[h + 1]).map(|p| st.paths[p as usize].clone()).collect())
            .collect();
        Solution { paths }
    }

    /// Smallest scheme consistent with the candidates left at the end of a trial.
    pub fn witness(&self, cands: &[Vec<u32>]) -> RoutingScheme {
        RoutingScheme { digits: cands.iter().map(|c| c[0]).collect() }
    }
}

#[derive(Clone, Debug)]
struct VertexPrep {
    ins: Vec<ArcId>,
    paths: Vec<usize>,
    required: BehaviourTable,
    /// Index pairs `x < y` of entering paths meeting for the first time.
    fresh: Vec<(usize, usize)>,
}

enum Options<'s> {
    List(vec::IntoIter<VertexOption>),
    Product(ProductOptions),
    Routes(RouteOptions<'s>),
}

impl Iterator for Options<'_> {
    type Item = VertexOption;

    fn next(&mut self) -> Option<VertexOption> {
        match self {
            Options::List(it) => it.next(),
            Options::Product(p) => p.next(),
            Options::Routes(r) => r.next(),
        }
    }
}

/// Depth-first over bijections at one vertex, entering path by entering
/// path. Each new pair is checked as soon as both out-arcs are chosen: forced
/// pairs against their required behaviours, fresh ones by narrowing the side
/// candidates.
struct RouteOptions<'s> {
    sides: Option<&'s SideSpace>,
    deg: usize,
    /// Rotation positions of the in-arcs and of the out-arcs.
    pin: Vec<usize>,
    pout: Vec<usize>,
    forced: BehaviourTable,
    fresh: Vec<bool>,
    /// Demand and index within it of each entering path.
    who: Vec<(DemandId, u32)>,
    /// Per assigned depth: next out-arc to try, and candidates before it.
    levels: Vec<(usize, Vec<Vec<u32>>)>,
    /// Out-arc index chosen for each entering path so far.
    assign: Vec<usize>,
    used: Vec<bool>,
}

impl RouteOptions<'_> {
    fn behaviour(&self, x: usize, ox: usize, y: usize, oy: usize) -> Behaviour {
        classify_positions(self.deg, self.pin[x], self.pout[ox], self.pin[y], self.pout[oy])
    }

    /// Candidates after sending path `d` out by `o`, given the earlier choices.
    fn admit(&self, d: usize, o: usize, cands: &[Vec<u32>]) -> Option<Vec<Vec<u32>>> {
        let n = self.pin.len();
        let mut out: Option<Vec<Vec<u32>>> = None;
        for y in 0..d {
            let oy = self.assign[y];
            let (dy, yd) = (self.behaviour(d, o, y, oy), self.behaviour(y, oy, d, o));
            if !self.fresh[d * n + y] {
                if self.forced.get(d, y) != dy || self.forced.get(y, d) != yd {
                    return None;
                }
            } else if let Some(sides) = self.sides {
                let c = out.get_or_insert_with(|| cands.to_vec());
                let ((hy, iy), (hd, id)) = (self.who[y], self.who[d]);
                sides.narrow(c, hy, iy, hd, id, BehaviourPair { first: yd, second: dy })?;
            }
        }
        Some(out.unwrap_or_else(|| cands.to_vec()))
    }
}

impl Iterator for RouteOptions<'_> {
    type Item = VertexOption;

    fn next(&mut self) -> Option<VertexOption> {
        let n = self.pin.len();
        loop {
            let d = self.levels.len().checked_sub(1)?;
            if self.assign.len() > d {
                let o = self.assign.pop().unwrap();
                self.used[o] = false;
            }
            let start = self.levels[d].0;
            let Some(o) = (start..self.pout.len()).find(|&o| !self.used[o]) else {
                self.levels.pop();
                continue;
            };
            self.levels[d].0 = o + 1;
            let Some(cands) = self.admit(d, o, &self.levels[d].1) else { continue };
            self.assign.push(o);
            self.used[o] = true;
            if d + 1 < n {
                self.levels.push((0, cands));
                continue;
            }
            let mut required = self.forced.clone();
            for x in 0..n {
                for y in 0..n {
                    if x != y && self.fresh[x * n + y] {
                        required.set(x, y, self.behaviour(x, self.assign[x], y, self.assign[y]));
                    }
                }
            }
            let base = &self.levels[0].1;
            let changed = (self.sides.is_some())
                .then(|| cands.into_iter().enumerate().filter(|(c, v)| v.len() != base[*c].len()).collect());
            return Some(VertexOption { required, cands: changed });
        }
    }
}

/// Outcome groups of several demand pairs combined lazily, first demand pair
/// varying slowest. The product can be far too large to hold in memory.
struct ProductOptions {
    base: BehaviourTable,
    by_pair: Vec<(usize, Vec<(usize, usize)>)>,
    groups: Vec<Vec<(Vec<BehaviourPair>, Vec<u32>)>>,
    /// Next combination; `None` once exhausted.
    idx: Option<Vec<usize>>,
}

impl ProductOptions {
    fn new(base: BehaviourTable, by_pair: Vec<(usize, Vec<(usize, usize)>)>, groups: Vec<Vec<(Vec<BehaviourPair>, Vec<u32>)>>) -> Self {
        let idx = (!groups.iter().any(|g| g.is_empty())).then(|| vec![0; groups.len()]);
        Self { base, by_pair, groups, idx }
    }
}

impl Iterator for ProductOptions {
    type Item = VertexOption;

    fn next(&mut self) -> Option<VertexOption> {
        let idx = self.idx.as_mut()?;
        let mut required = self.base.clone();
        let mut cands = Vec::with_capacity(self.groups.len());
        for (g, &i) in idx.iter().enumerate() {
            let (outcomes, digits) = &self.groups[g][i];
            for (&(x, y), bp) in self.by_pair[g].1.iter().zip(outcomes) {
                required.set(x, y, bp.first);
                required.set(y, x, bp.second);
            }
            cands.push((self.by_pair[g].0, digits.clone()));
        }
        let item = VertexOption { required, cands: Some(cands) };
        let mut g = idx.len();
        loop {
            if g == 0 {
                self.idx = None;
                break;
            }
            g -= 1;
            idx[g] += 1;
            if idx[g] < self.groups[g].len() {
                break;
            }
            idx[g] = 0;
        }
        Some(item)
    }
}

/// One way of settling the behaviours at a vertex.
#[derive(Clone, Debug)]
struct VertexOption {
    required: BehaviourTable,
    /// Candidate sets narrowed by this choice, by component.
    cands: Option<Vec<(usize, Vec<u32>)>>,
}

#[derive(Clone, Debug)]
struct RoutingState {
    paths: Vec<Vec<ArcId>>,
    owner: Vec<u32>,
    /// `met[p * n + q]`: first common vertex of paths `p` and `q`, if any yet.
    met: Vec<u32>,
    /// Remaining values per scheme component: partition-pair digits per
    /// demand pair for the matrix family, side components for the side family.
    cands: Vec<Vec<u32>>,
}

enum Outcome {
    Found(Solution, Vec<Vec<u32>>),
    Failed(Failure),
    Aborted,
}

/// Counters reported by a search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Completed trials: a leaf of the search, failed or successful.
    pub trials: u64,
    pub vertices_routed: u64,
    /// The budget ran out before the search finished.
    pub exhausted: bool,
}

/// One finished trial, for tracing.
#[derive(Debug)]
pub struct TraceEvent<'a> {
    pub family: SchemeFamily,
    /// Candidate values left per scheme component when the trial ended.
    pub candidates: &'a [Vec<u32>],
    pub result: Result<(), Failure>,
}

impl From<RouteError> for Failure {
    fn from(e: RouteError) -> Self {
        Failure::NotRoutable { vertex: e.vertex, reason: e.reason }
    }
}
