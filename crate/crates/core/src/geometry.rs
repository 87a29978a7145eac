//! Closed walks `P_uv Q_uv^-1`, their inside and outside, and the side test
//! that decides how two paths which already met behave at a later vertex.

use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

use crate::cyclic::strictly_between;
use crate::embedding::{Behaviour, Dart, EmbeddedDigraph, Faces, Side};
use crate::ids::{ArcId, VertexId};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WalkError {
    #[error("{vertex} is not on the path")]
    VertexNotOnPath { vertex: VertexId },
    #[error("{from} does not come before {to} on the path")]
    WrongOrder { from: VertexId, to: VertexId },
    #[error("both paths use {arc}")]
    SharedArc { arc: ArcId },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PartitionError {
    /// Some face is reached from both sides of the walk: the walk crosses itself.
    #[error("walk crosses itself (face {face} is on both sides)")]
    SelfCrossing { face: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SideError {
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("destination {vertex} lies on the walk")]
    DestinationOnWalk { vertex: VertexId },
    #[error("faces around {vertex} disagree on its side")]
    InconsistentIncidence { vertex: VertexId },
    #[error("destination cannot be reached from {vertex}")]
    DestinationUnreachable { vertex: VertexId },
}

/// Vertices of a path, in order. A path is a non-empty sequence of arcs.
pub fn path_vertices(g: &EmbeddedDigraph, path: &[ArcId]) -> Vec<VertexId> {
    let mut out = Vec::with_capacity(path.len() + 1);
    if let Some(&first) = path.first() {
        out.push(g.tail(first));
    }
    out.extend(path.iter().map(|&a| g.head(a)));
    out
}

/// Index range of the arcs of `path` between its vertices `u` and `v`.
fn subpath(g: &EmbeddedDigraph, path: &[ArcId], u: VertexId, v: VertexId) -> Result<core::ops::Range<usize>, WalkError> {
    let vs = path_vertices(g, path);
    let iu = vs.iter().position(|&x| x == u).ok_or(WalkError::VertexNotOnPath { vertex: u })?;
    let iv = vs.iter().position(|&x| x == v).ok_or(WalkError::VertexNotOnPath { vertex: v })?;
    if iu >= iv {
        return Err(WalkError::WrongOrder { from: u, to: v });
    }
    Ok(iu..iv)
}

/// The closed walk following `forward` from `u` to `v`, then `backward` from `v` back to `u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedWalk {
    pub u: VertexId,
    pub v: VertexId,
    pub forward: Vec<ArcId>,
    /// Arcs in their own direction (`u` to `v`); the walk uses them reversed.
    pub backward: Vec<ArcId>,
}

impl ClosedWalk {
    /// Darts whose face lies on the positive (left) side of the walk.
    pub fn inner_darts(&self) -> impl Iterator<Item = Dart> + '_ {
        let f = self.forward.iter().map(|&a| Dart::new(a, Side::Left));
        let b = self.backward.iter().map(|&a| Dart::new(a, Side::Right));
        f.chain(b)
    }

    pub fn outer_darts(&self) -> impl Iterator<Item = Dart> + '_ {
        self.inner_darts().map(|d| Dart::new(d.arc, d.side.opposite()))
    }

    pub fn arcs(&self) -> impl Iterator<Item = ArcId> + '_ {
        self.forward.iter().chain(self.backward.iter()).copied()
    }

    /// The same curve run the other way: `Q_uv P_uv^-1`.
    pub fn reversed(&self) -> ClosedWalk {
        ClosedWalk { u: self.u, v: self.v, forward: self.backward.clone(), backward: self.forward.clone() }
    }

    pub fn contains_vertex(&self, g: &EmbeddedDigraph, w: VertexId) -> bool {
        w == self.u || self.arcs().any(|a| g.head(a) == w)
    }
}

/// Build `P_uv Q_uv^-1`.
pub fn make_walk(
    g: &EmbeddedDigraph,
    p: &[ArcId],
    q: &[ArcId],
    u: VertexId,
    v: VertexId,
) -> Result<ClosedWalk, WalkError> {
    let rp = subpath(g, p, u, v)?;
    let rq = subpath(g, q, u, v)?;
    let forward = p[rp].to_vec();
    let backward = q[rq].to_vec();
    if let Some(&arc) = forward.iter().find(|a| backward.contains(a)) {
        return Err(WalkError::SharedArc { arc });
    }
    Ok(ClosedWalk { u, v, forward, backward })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexSide {
    Inside,
    Outside,
    OnWalk,
}

/// Faces split by a closed walk. A walk that touches itself at a vertex can
/// cut the sphere into more than two dual components; each of them still
/// gets a single side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionPartition {
    pub walk: ClosedWalk,
    /// Per face: `true` if inside.
    pub inside: Vec<bool>,
    pub components: usize,
}

impl RegionPartition {
    pub fn inside_faces(&self) -> Vec<usize> {
        (0..self.inside.len()).filter(|&f| self.inside[f]).collect()
    }

    pub fn outside_faces(&self) -> Vec<usize> {
        (0..self.inside.len()).filter(|&f| !self.inside[f]).collect()
    }
}

/// Flood fill of the dual graph with the walk's arcs as barriers.
pub fn partition_faces(g: &EmbeddedDigraph, faces: &Faces, walk: &ClosedWalk) -> Result<RegionPartition, PartitionError> {
    let nf = faces.len();
    let mut barrier = vec![false; g.arc_count()];
    for a in walk.arcs() {
        barrier[a.index()] = true;
    }
    // Dual adjacency through non-barrier arcs.
    let mut comp = vec![usize::MAX; nf];
    let mut components = 0;
    for start in 0..nf {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = components;
        let mut stack = vec![start];
        while let Some(f) = stack.pop() {
            for &d in &faces.faces[f].boundary {
                if barrier[d.arc.index()] {
                    continue;
                }
                let other = faces.face_of(Dart::new(d.arc, d.side.opposite()));
                if comp[other] == usize::MAX {
                    comp[other] = components;
                    stack.push(other);
                }
            }
        }
        components += 1;
    }
    let mut label: Vec<Option<bool>> = vec![None; components];
    let sides = walk.inner_darts().map(|d| (d, true)).chain(walk.outer_darts().map(|d| (d, false)));
    for (d, is_inside) in sides {
        let f = faces.face_of(d);
        match label[comp[f]] {
            None => label[comp[f]] = Some(is_inside),
            Some(x) if x != is_inside => return Err(PartitionError::SelfCrossing { face: f }),
            Some(_) => {}
        }
    }
    // Every component borders the walk; an unlabelled one would mean an empty walk.
    let inside = (0..nf).map(|f| label[comp[f]].unwrap_or(false)).collect();
    Ok(RegionPartition { walk: walk.clone(), inside, components })
}

/// Side of `w` with respect to a partition.
pub fn vertex_side(
    g: &EmbeddedDigraph,
    faces: &Faces,
    partition: &RegionPartition,
    w: VertexId,
) -> Result<VertexSide, SideError> {
    if partition.walk.contains_vertex(g, w) {
        return Ok(VertexSide::OnWalk);
    }
    let mut side = None;
    for &a in g.rotation(w) {
        // The dart leaving `w` along `a`.
        let d = Dart::new(a, if g.tail(a) == w { Side::Left } else { Side::Right });
        let here = partition.inside[faces.face_of(d)];
        match side {
            None => side = Some(here),
            Some(s) if s != here => return Err(SideError::InconsistentIncidence { vertex: w }),
            Some(_) => {}
        }
    }
    Ok(match side {
        Some(true) => VertexSide::Inside,
        _ => VertexSide::Outside,
    })
}

/// Behaviour of P relative to Q at `v` when both already met at `u`:
/// `Left` iff the destination of P is inside `P_uv Q_uv^-1`.
pub fn side_of_destination(
    g: &EmbeddedDigraph,
    faces: &Faces,
    p: &[ArcId],
    q: &[ArcId],
    u: VertexId,
    v: VertexId,
    dest_p: VertexId,
) -> Result<Behaviour, SideError> {
    let walk = make_walk(g, p, q, u, v)?;
    let partition = partition_faces(g, faces, &walk)?;
    match vertex_side(g, faces, &partition, dest_p)? {
        VertexSide::Inside => Ok(Behaviour::Left),
        VertexSide::Outside => Ok(Behaviour::Right),
        VertexSide::OnWalk => Err(SideError::DestinationOnWalk { vertex: dest_p }),
    }
}

/// For each target vertex, which vertices can reach it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reachability {
    targets: Vec<VertexId>,
    reach: Vec<Vec<bool>>,
}

impl Reachability {
    pub fn new(g: &EmbeddedDigraph, targets: &[VertexId]) -> Self {
        let reach = targets
            .iter()
            .map(|&t| {
                let mut seen = vec![false; g.vertex_count()];
                seen[t.index()] = true;
                let mut stack = vec![t];
                while let Some(x) = stack.pop() {
                    for a in g.in_arcs(x) {
                        let y = g.tail(a);
                        if !seen[y.index()] {
                            seen[y.index()] = true;
                            stack.push(y);
                        }
                    }
                }
                seen
            })
            .collect();
        Self { targets: targets.to_vec(), reach }
    }

    /// Whether `target` (one of the targets given at construction) is reachable from `from`.
    #[inline]
    pub fn reaches(&self, from: VertexId, target: VertexId) -> bool {
        let i = self.targets.iter().position(|&t| t == target).expect("unknown target");
        self.reach[i][from.index()]
    }

    #[inline]
    pub fn reaches_target(&self, from: VertexId, target_index: usize) -> bool {
        self.reach[target_index][from.index()]
    }
}

/// Same answer as [`side_of_destination`], read off the rotation at `v`.
///
/// Every vertex of the walk other than `v` precedes `v` in any topological
/// order, so a path from `v` that starts with a fresh out-arc never meets the
/// walk again. The side of the destination is then the side of the corner
/// holding such an out-arc; the positive side of the walk at `v` is the span
/// running anticlockwise from `q_in` to `p_in`.
///
/// `reaches(x)` tells whether the destination is reachable from `x`; `used`
/// tells whether an out-arc of `v` is already taken.
pub fn side_by_rotation(
    g: &EmbeddedDigraph,
    v: VertexId,
    p_in: ArcId,
    q_in: ArcId,
    reaches: impl Fn(VertexId) -> bool,
) -> Result<Behaviour, SideError> {
    let n = g.degree(v);
    let pi = g.position(v, p_in).expect("p_in at v");
    let qi = g.position(v, q_in).expect("q_in at v");
    for (pos, &a) in g.rotation(v).iter().enumerate() {
        if g.tail(a) == v && reaches(g.head(a)) {
            return Ok(if strictly_between(n, qi, pos, pi) { Behaviour::Left } else { Behaviour::Right });
        }
    }
    Err(SideError::DestinationUnreachable { vertex: v })
}

/// The area between two consecutive paths of one demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    pub index: usize,
    /// Per face: whether it lies in the region.
    pub faces: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RegionError {
    #[error("paths must share their source and their target")]
    EndpointsDiffer,
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error("paths cross: {0}")]
    Crossed(#[from] PartitionError),
    #[error("face {face} lies in several regions")]
    Overlap { face: usize },
}

/// Regions between consecutive paths of a single demand. `paths` must be
/// listed in the anticlockwise order of their first arcs at the source. With
/// a single path the one region is everything.
pub fn regions_of_demand(g: &EmbeddedDigraph, faces: &Faces, paths: &[Vec<ArcId>]) -> Result<Vec<Region>, RegionError> {
    let nf = faces.len();
    if paths.len() <= 1 {
        return Ok(vec![Region { index: 0, faces: vec![true; nf] }]);
    }
    let s = g.tail(paths[0][0]);
    let t = g.head(*paths[0].last().unwrap());
    if paths.iter().any(|p| g.tail(p[0]) != s || g.head(*p.last().unwrap()) != t) {
        return Err(RegionError::EndpointsDiffer);
    }
    let mut out = Vec::with_capacity(paths.len());
    let mut owner = vec![usize::MAX; nf];
    for i in 0..paths.len() {
        let next = &paths[(i + 1) % paths.len()];
        let walk = make_walk(g, &paths[i], next, s, t)?;
        let part = partition_faces(g, faces, &walk)?;
        for f in 0..nf {
            if part.inside[f] {
                if owner[f] != usize::MAX {
                    return Err(RegionError::Overlap { face: f });
                }
                owner[f] = i;
            }
        }
        out.push(Region { index: i, faces: part.inside });
    }
    Ok(out)
}
