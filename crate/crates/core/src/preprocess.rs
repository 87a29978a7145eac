//! Instances and their normalization.
//!
//! A normalized instance has unit capacities, and every demand `h` owns a
//! fresh source `s_h` (out-degree `r(h)`) and a fresh sink `t_h`
//! (in-degree `r(h)`), attached to the original endpoints by bundles of
//! parallel arcs.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use thiserror::Error;

use crate::embedding::{validate_embedding, Dart, EmbeddedDigraph, EmbeddingViolation, Side};
use crate::ids::{ArcId, DemandId, VertexId};
use crate::solver::Solution;

/// A request for `request` paths from `head` to `tail`.
///
/// The naming follows the demand-graph arc `tail -> head`, which closes each
/// supply path into a cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Demand {
    pub tail: VertexId,
    pub head: VertexId,
    pub request: u32,
}

impl Demand {
    /// Where the requested paths start.
    pub fn source(&self) -> VertexId {
        self.head
    }

    /// Where the requested paths end.
    pub fn target(&self) -> VertexId {
        self.tail
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("expected {expected} capacities, found {found}")]
    CapacityCount { expected: usize, found: usize },
    #[error("demand {demand} has an endpoint outside the vertex range")]
    DemandEndpoint { demand: DemandId },
    #[error("demand {demand} has equal tail and head")]
    DemandLoop { demand: DemandId },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub graph: EmbeddedDigraph,
    pub capacities: Vec<u32>,
    pub demands: Vec<Demand>,
}

impl Instance {
    pub fn new(graph: EmbeddedDigraph, capacities: Vec<u32>, demands: Vec<Demand>) -> Result<Self, InstanceError> {
        if capacities.len() != graph.arc_count() {
            return Err(InstanceError::CapacityCount { expected: graph.arc_count(), found: capacities.len() });
        }
        for (i, d) in demands.iter().enumerate() {
            let id = DemandId::from_index(i);
            if d.tail.index() >= graph.vertex_count() || d.head.index() >= graph.vertex_count() {
                return Err(InstanceError::DemandEndpoint { demand: id });
            }
            if d.tail == d.head {
                return Err(InstanceError::DemandLoop { demand: id });
            }
        }
        Ok(Self { graph, capacities, demands })
    }

    pub fn demand_ids(&self) -> impl ExactSizeIterator<Item = DemandId> {
        (0..self.demands.len()).map(DemandId::from_index)
    }

    pub fn demand(&self, h: DemandId) -> &Demand {
        &self.demands[h.index()]
    }

    pub fn capacity(&self, a: ArcId) -> u32 {
        self.capacities[a.index()]
    }

    /// Sum of capacities.
    pub fn total_capacity(&self) -> u64 {
        self.capacities.iter().map(|&c| c as u64).sum()
    }

    /// Same instance with every capacity and request multiplied by `factor`.
    pub fn scaled(&self, factor: u32) -> Instance {
        Instance {
            graph: self.graph.clone(),
            capacities: self.capacities.iter().map(|&c| c * factor).collect(),
            demands: self.demands.iter().map(|d| Demand { request: d.request * factor, ..*d }).collect(),
        }
    }
}

/// First vertex breaking the Eulerian condition, with its imbalance
/// (outgoing minus incoming, supply and demand arcs together).
pub fn eulerian_defect(inst: &Instance) -> Option<(VertexId, i64)> {
    let g = &inst.graph;
    let mut balance = vec![0i64; g.vertex_count()];
    for a in g.arcs() {
        let c = inst.capacity(a) as i64;
        balance[g.tail(a).index()] += c;
        balance[g.head(a).index()] -= c;
    }
    for d in &inst.demands {
        balance[d.tail.index()] += d.request as i64;
        balance[d.head.index()] -= d.request as i64;
    }
    balance.iter().position(|&b| b != 0).map(|i| (VertexId::from_index(i), balance[i]))
}

pub fn check_eulerian(inst: &Instance) -> bool {
    eulerian_defect(inst).is_none()
}

/// A total order of the vertices compatible with every arc.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopoOrder {
    order: Vec<VertexId>,
    rank: Vec<u32>,
}

impl TopoOrder {
    pub fn order(&self) -> &[VertexId] {
        &self.order
    }

    #[inline]
    pub fn rank(&self, v: VertexId) -> usize {
        self.rank[v.index()] as usize
    }

    pub fn is_valid_for(&self, g: &EmbeddedDigraph) -> bool {
        self.order.len() == g.vertex_count() && g.arcs().all(|a| self.rank(g.tail(a)) < self.rank(g.head(a)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("cycle detected through arcs {cycle:?}")]
pub struct CycleDetected {
    /// Arcs of a directed cycle, in traversal order.
    pub cycle: Vec<ArcId>,
}

/// Kahn's algorithm, always emitting the smallest available vertex id.
pub fn topological_order(g: &EmbeddedDigraph) -> Result<TopoOrder, CycleDetected> {
    let n = g.vertex_count();
    let mut indeg: Vec<usize> = g.vertices().map(|v| g.in_degree(v)).collect();
    let mut heap: BinaryHeap<Reverse<VertexId>> = g.vertices().filter(|v| indeg[v.index()] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    let mut rank = vec![u32::MAX; n];
    while let Some(Reverse(v)) = heap.pop() {
        rank[v.index()] = order.len() as u32;
        order.push(v);
        for a in g.out_arcs(v) {
            let w = g.head(a);
            indeg[w.index()] -= 1;
            if indeg[w.index()] == 0 {
                heap.push(Reverse(w));
            }
        }
    }
    if order.len() == n {
        return Ok(TopoOrder { order, rank });
    }
    // Every unranked vertex has an unranked in-neighbour: walk backwards until a repeat.
    let mut step = vec![None; n];
    let mut v = VertexId::from_index(rank.iter().position(|&r| r == u32::MAX).unwrap());
    while step[v.index()].is_none() {
        let a = g.in_arcs(v).find(|&a| rank[g.tail(a).index()] == u32::MAX).unwrap();
        step[v.index()] = Some(a);
        v = g.tail(a);
    }
    let start = v;
    let mut cycle = Vec::new();
    loop {
        let a = step[v.index()].unwrap();
        cycle.push(a);
        v = g.tail(a);
        if v == start {
            break;
        }
    }
    cycle.reverse();
    Err(CycleDetected { cycle })
}

/// Result of replacing each arc by `capacity` parallel unit arcs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub instance: Instance,
    /// For each new arc, the arc it copies.
    pub original_arc: Vec<ArcId>,
    /// For each original arc, the range of its copies (empty for capacity 0).
    pub copies: Vec<core::ops::Range<u32>>,
}

impl Expansion {
    /// Dart of the expanded graph lying on the face that `d` lies on originally.
    /// `None` when the arc was deleted.
    pub fn map_dart(&self, d: Dart) -> Option<Dart> {
        let r = self.copies[d.arc.index()].clone();
        if r.is_empty() {
            return None;
        }
        // Copies fan out anticlockwise at the tail, so the last is leftmost.
        Some(match d.side {
            Side::Left => Dart::new(ArcId(r.end - 1), Side::Left),
            Side::Right => Dart::new(ArcId(r.start), Side::Right),
        })
    }
}

/// Replace every arc of capacity `c` by `c` consecutive parallel arcs.
/// Arcs of capacity 0 disappear; ids are reassigned densely in order.
pub fn expand_capacities(inst: &Instance) -> Result<Expansion, EmbeddingViolation> {
    let g = &inst.graph;
    let mut original_arc = Vec::new();
    let mut copies = Vec::with_capacity(g.arc_count());
    let mut ends = Vec::new();
    for a in g.arcs() {
        let start = original_arc.len() as u32;
        for _ in 0..inst.capacity(a) {
            original_arc.push(a);
            ends.push(g.ends(a));
        }
        copies.push(start..original_arc.len() as u32);
    }
    let rotation = g
        .vertices()
        .map(|v| {
            let mut rot = Vec::new();
            for &a in g.rotation(v) {
                let r = copies[a.index()].clone();
                if g.tail(a) == v {
                    rot.extend(r.map(ArcId));
                } else {
                    rot.extend(r.rev().map(ArcId));
                }
            }
            rot
        })
        .collect();
    let graph = EmbeddedDigraph::new(g.vertex_count(), ends, rotation)?;
    let capacities = vec![1; graph.arc_count()];
    let instance = Instance { graph, capacities, demands: inst.demands.clone() };
    Ok(Expansion { instance, original_arc, copies })
}

/// Terminal vertices created for one demand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Terminals {
    pub source: VertexId,
    pub sink: VertexId,
}

/// Result of splitting every demand onto its own terminal pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Terminalized {
    pub instance: Instance,
    pub terminals: Vec<Terminals>,
    /// Number of arcs before terminal arcs were appended.
    pub base_arcs: usize,
}

/// Insert `bundle` in the rotation `rot` right after the incident arc of smallest id.
fn insert_after_smallest(rot: &mut Vec<ArcId>, bundle: &[ArcId]) {
    let at = match rot.iter().enumerate().min_by_key(|(_, &a)| a) {
        Some((i, _)) => i + 1,
        None => 0,
    };
    rot.splice(at..at, bundle.iter().copied());
}

/// Give each demand its own source and sink. Capacities must be unit.
///
/// For demand `h` asking paths from `u` to `v`: new vertices `s_h`, `t_h`,
/// `r(h)` arcs `s_h -> u` and `r(h)` arcs `v -> t_h`, and the demand becomes
/// `t_h -> s_h`. Demands are kept in order and never merged.
pub fn add_terminals(inst: &Instance) -> Terminalized {
    debug_assert!(inst.capacities.iter().all(|&c| c == 1));
    let g = &inst.graph;
    let base_arcs = g.arc_count();
    let mut ends = g.arc_ends().to_vec();
    let mut rotation = g.rotations().to_vec();
    let mut terminals = Vec::with_capacity(inst.demands.len());
    let mut demands = Vec::with_capacity(inst.demands.len());
    for d in &inst.demands {
        let (u, v, r) = (d.source(), d.target(), d.request as usize);
        let s = VertexId::from_index(rotation.len());
        rotation.push(Vec::new());
        let t = VertexId::from_index(rotation.len());
        rotation.push(Vec::new());

        let out: Vec<ArcId> = (0..r).map(|i| ArcId::from_index(ends.len() + i)).collect();
        ends.extend(core::iter::repeat_n((s, u), r));
        // Both bundles are inserted before touching either rotation, so that
        // "smallest incident arc" refers to the graph as it was.
        let inn: Vec<ArcId> = (0..r).map(|i| ArcId::from_index(ends.len() + i)).collect();
        ends.extend(core::iter::repeat_n((v, t), r));

        insert_after_smallest(&mut rotation[u.index()], &out);
        rotation[s.index()] = out.iter().rev().copied().collect();
        insert_after_smallest(&mut rotation[v.index()], &inn);
        rotation[t.index()] = inn.iter().rev().copied().collect();

        terminals.push(Terminals { source: s, sink: t });
        demands.push(Demand { tail: t, head: s, request: d.request });
    }
    let graph = EmbeddedDigraph::from_raw(ends, rotation);
    debug_assert_eq!(validate_embedding(&graph), Ok(()));
    let capacities = vec![1; graph.arc_count()];
    Terminalized { instance: Instance { graph, capacities, demands }, terminals, base_arcs }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("invalid embedding: {0}")]
    BadEmbedding(EmbeddingViolation),
    #[error("supply graph is disconnected at {vertex}")]
    Disconnected { vertex: VertexId },
    #[error("not Eulerian: imbalance {imbalance} at {vertex}")]
    NotEulerian { vertex: VertexId, imbalance: i64 },
    #[error("not acyclic: {0}")]
    NotAcyclic(CycleDetected),
}

impl From<EmbeddingViolation> for NormalizeError {
    fn from(e: EmbeddingViolation) -> Self {
        match e {
            EmbeddingViolation::Disconnected { vertex } => NormalizeError::Disconnected { vertex },
            e => NormalizeError::BadEmbedding(e),
        }
    }
}

/// A normalized instance plus the bookkeeping needed to map results back.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedInstance {
    /// Unit capacities; demand `i` runs from `s_i` to `t_i`.
    pub instance: Instance,
    pub order: TopoOrder,
    pub terminals: Vec<Terminals>,
    /// For each normalized demand, the demand of the input it serves.
    pub original_demand: Vec<DemandId>,
    /// For each normalized arc, the input arc it copies; `None` on terminal arcs.
    pub original_arc: Vec<Option<ArcId>>,
    pub expansion: Expansion,
}

impl NormalizedInstance {
    pub fn graph(&self) -> &EmbeddedDigraph {
        &self.instance.graph
    }

    pub fn demand_count(&self) -> usize {
        self.terminals.len()
    }

    pub fn request(&self, h: DemandId) -> u32 {
        self.instance.demands[h.index()].request
    }

    pub fn requests(&self) -> Vec<u32> {
        self.instance.demands.iter().map(|d| d.request).collect()
    }

    pub fn source(&self, h: DemandId) -> VertexId {
        self.terminals[h.index()].source
    }

    pub fn sink(&self, h: DemandId) -> VertexId {
        self.terminals[h.index()].sink
    }

    /// The demand whose sink is `v`, if any.
    pub fn demand_of_sink(&self, v: VertexId) -> Option<DemandId> {
        self.terminals.iter().position(|t| t.sink == v).map(DemandId::from_index)
    }

    /// Map a path of the normalized graph back to input arcs.
    pub fn project_path(&self, path: &[ArcId]) -> Vec<ArcId> {
        path.iter().filter_map(|&a| self.original_arc[a.index()]).collect()
    }

    /// Map a solution of the input instance onto the normalized graph: each
    /// path takes the next unused copy of every arc, plus one terminal arc at
    /// each end. `None` if the solution overuses some arc or has the wrong
    /// number of paths.
    pub fn lift_solution(&self, sol: &Solution) -> Option<Solution> {
        let g = self.graph();
        let mut next: Vec<u32> = self.expansion.copies.iter().map(|r| r.start).collect();
        let mut paths = Vec::with_capacity(self.demand_count());
        for (h, orig) in self.original_demand.iter().enumerate() {
            let h = DemandId::from_index(h);
            let given = sol.paths.get(orig.index())?;
            if given.len() != self.request(h) as usize {
                return None;
            }
            let mut outs: Vec<ArcId> = g.out_arcs(self.source(h)).collect();
            let mut ins: Vec<ArcId> = g.in_arcs(self.sink(h)).collect();
            outs.sort();
            ins.sort();
            let mut lifted = Vec::with_capacity(given.len());
            for (i, p) in given.iter().enumerate() {
                let mut q = Vec::with_capacity(p.len() + 2);
                q.push(outs[i]);
                for &a in p {
                    let c = next.get_mut(a.index())?;
                    if *c >= self.expansion.copies[a.index()].end {
                        return None;
                    }
                    q.push(ArcId(*c));
                    *c += 1;
                }
                q.push(ins[i]);
                lifted.push(q);
            }
            paths.push(lifted);
        }
        Some(Solution { paths })
    }
}

/// Validate, check the Eulerian condition, expand capacities, check
/// acyclicity, drop empty demands, split terminals and order the vertices.
pub fn normalize(inst: &Instance) -> Result<NormalizedInstance, NormalizeError> {
    validate_embedding(&inst.graph)?;
    if let Some((vertex, imbalance)) = eulerian_defect(inst) {
        return Err(NormalizeError::NotEulerian { vertex, imbalance });
    }
    let expansion = expand_capacities(inst)?;
    topological_order(&expansion.instance.graph).map_err(|c| {
        NormalizeError::NotAcyclic(CycleDetected {
            cycle: c.cycle.iter().map(|a| expansion.original_arc[a.index()]).collect(),
        })
    })?;
    let mut reduced = expansion.instance.clone();
    let mut original_demand = Vec::new();
    reduced.demands.clear();
    for (i, d) in inst.demands.iter().enumerate() {
        if d.request > 0 {
            reduced.demands.push(*d);
            original_demand.push(DemandId::from_index(i));
        }
    }
    let split = add_terminals(&reduced);
    let order = topological_order(&split.instance.graph).expect("terminal arcs keep the graph acyclic");
    let mut original_arc: Vec<Option<ArcId>> = expansion.original_arc.iter().copied().map(Some).collect();
    original_arc.resize(split.instance.graph.arc_count(), None);
    debug_assert!(check_eulerian(&split.instance));
    Ok(NormalizedInstance {
        instance: split.instance,
        order,
        terminals: split.terminals,
        original_demand,
        original_arc,
        expansion,
    })
}
