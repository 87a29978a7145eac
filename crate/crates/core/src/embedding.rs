//! Digraphs embedded on the sphere through a rotation system.
//!
//! Each vertex stores the anticlockwise cyclic order of the arcs incident to
//! it. Since loops are forbidden, an arc id names a unique arc-end at each of
//! its two endpoints, so parallel arcs need no extra bookkeeping.

use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

use crate::cyclic::{forward_distance, strictly_between};
use crate::ids::{ArcId, VertexId};

const NO_POS: u32 = u32::MAX;

/// Which side of an arc, relative to its direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// An arc together with one of its sides. Ordered by arc, then `Left < Right`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dart {
    pub arc: ArcId,
    pub side: Side,
}

impl Dart {
    pub fn new(arc: ArcId, side: Side) -> Self {
        Self { arc, side }
    }

    #[inline]
    pub(crate) fn index(self) -> usize {
        2 * self.arc.index() + (self.side == Side::Right) as usize
    }

    #[inline]
    pub(crate) fn from_index(i: usize) -> Self {
        let side = if i % 2 == 0 { Side::Left } else { Side::Right };
        Self { arc: ArcId::from_index(i / 2), side }
    }
}

/// The smallest dart on a face boundary. Independent of tracing order.
pub type FaceKey = Dart;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Behaviour {
    Cross,
    Left,
    Right,
}

impl Behaviour {
    /// Exchange `Left` and `Right`; what the observed path sees after reversal.
    pub fn mirrored(self) -> Behaviour {
        match self {
            Behaviour::Cross => Behaviour::Cross,
            Behaviour::Left => Behaviour::Right,
            Behaviour::Right => Behaviour::Left,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EmbeddingViolation {
    #[error("graph has no vertex")]
    NoVertices,
    #[error("expected {expected} rotations, found {found}")]
    RotationCount { expected: usize, found: usize },
    #[error("arc {arc} has an endpoint outside the vertex range")]
    EndpointOutOfRange { arc: ArcId },
    #[error("arc {arc} is a loop")]
    Loop { arc: ArcId },
    #[error("rotation of {vertex} mentions unknown arc {arc}")]
    UnknownArc { vertex: VertexId, arc: ArcId },
    #[error("rotation of {vertex} mentions {arc}, which is not incident to it")]
    NotIncident { vertex: VertexId, arc: ArcId },
    #[error("rotation of {vertex} lists {arc} twice")]
    DuplicateInRotation { vertex: VertexId, arc: ArcId },
    #[error("rotation incomplete: {arc} is missing at {vertex}")]
    RotationIncomplete { vertex: VertexId, arc: ArcId },
    #[error("graph is disconnected: {vertex} is not reachable from v0")]
    Disconnected { vertex: VertexId },
    #[error("Euler formula fails: V - A + F = {vertices} - {arcs} + {faces} != 2")]
    EulerFails { vertices: usize, arcs: usize, faces: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IncidenceError {
    #[error("{arc} is not incident to {vertex}")]
    NotIncident { vertex: VertexId, arc: ArcId },
    #[error("{arc} does not {expected} {vertex}")]
    WrongDirection { vertex: VertexId, arc: ArcId, expected: &'static str },
    #[error("the four arcs must be distinct")]
    NotDistinct,
}

/// A digraph with a rotation system. Ids are dense: vertices `0..n`, arcs `0..m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddedDigraph {
    ends: Vec<(VertexId, VertexId)>,
    rotation: Vec<Vec<ArcId>>,
    tail_pos: Vec<u32>,
    head_pos: Vec<u32>,
}

impl EmbeddedDigraph {
    /// Build and fully validate (structure, connectivity, sphericity).
    pub fn new(
        vertex_count: usize,
        arcs: Vec<(VertexId, VertexId)>,
        rotation: Vec<Vec<ArcId>>,
    ) -> Result<Self, EmbeddingViolation> {
        if rotation.len() != vertex_count {
            return Err(EmbeddingViolation::RotationCount { expected: vertex_count, found: rotation.len() });
        }
        let g = Self::from_raw(arcs, rotation);
        validate_embedding(&g)?;
        Ok(g)
    }

    /// Build without any validation. Positions of malformed rotations are
    /// left unset; use [`validate_embedding`] before relying on the result.
    pub fn from_raw(arcs: Vec<(VertexId, VertexId)>, rotation: Vec<Vec<ArcId>>) -> Self {
        let m = arcs.len();
        let mut tail_pos = vec![NO_POS; m];
        let mut head_pos = vec![NO_POS; m];
        for (v, rot) in rotation.iter().enumerate() {
            for (i, &a) in rot.iter().enumerate() {
                let Some(&(t, h)) = arcs.get(a.index()) else { continue };
                if t.index() == v && tail_pos[a.index()] == NO_POS {
                    tail_pos[a.index()] = i as u32;
                } else if h.index() == v && head_pos[a.index()] == NO_POS {
                    head_pos[a.index()] = i as u32;
                }
            }
        }
        Self { ends: arcs, rotation, tail_pos, head_pos }
    }

    pub fn vertex_count(&self) -> usize {
        self.rotation.len()
    }

    pub fn arc_count(&self) -> usize {
        self.ends.len()
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> + Clone {
        (0..self.vertex_count()).map(VertexId::from_index)
    }

    pub fn arcs(&self) -> impl ExactSizeIterator<Item = ArcId> + Clone {
        (0..self.arc_count()).map(ArcId::from_index)
    }

    #[inline]
    pub fn tail(&self, a: ArcId) -> VertexId {
        self.ends[a.index()].0
    }

    #[inline]
    pub fn head(&self, a: ArcId) -> VertexId {
        self.ends[a.index()].1
    }

    #[inline]
    pub fn ends(&self, a: ArcId) -> (VertexId, VertexId) {
        self.ends[a.index()]
    }

    pub fn arc_ends(&self) -> &[(VertexId, VertexId)] {
        &self.ends
    }

    /// Anticlockwise order of the arcs incident to `v`.
    #[inline]
    pub fn rotation(&self, v: VertexId) -> &[ArcId] {
        &self.rotation[v.index()]
    }

    pub fn rotations(&self) -> &[Vec<ArcId>] {
        &self.rotation
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.rotation[v.index()].len()
    }

    pub fn out_arcs(&self, v: VertexId) -> impl Iterator<Item = ArcId> + '_ {
        self.rotation(v).iter().copied().filter(move |&a| self.tail(a) == v)
    }

    pub fn in_arcs(&self, v: VertexId) -> impl Iterator<Item = ArcId> + '_ {
        self.rotation(v).iter().copied().filter(move |&a| self.head(a) == v)
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out_arcs(v).count()
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.in_arcs(v).count()
    }

    /// Position of `a` in the rotation of `v`, if incident.
    #[inline]
    pub fn position(&self, v: VertexId, a: ArcId) -> Option<usize> {
        let (t, h) = *self.ends.get(a.index())?;
        let p = if t == v {
            self.tail_pos[a.index()]
        } else if h == v {
            self.head_pos[a.index()]
        } else {
            return None;
        };
        (p != NO_POS).then_some(p as usize)
    }

    /// Next arc anticlockwise around `v`.
    #[inline]
    pub fn succ(&self, v: VertexId, a: ArcId) -> ArcId {
        let rot = self.rotation(v);
        let p = self.position(v, a).expect("arc not in rotation");
        rot[(p + 1) % rot.len()]
    }

    /// Next arc clockwise around `v`.
    #[inline]
    pub fn pred(&self, v: VertexId, a: ArcId) -> ArcId {
        let rot = self.rotation(v);
        let p = self.position(v, a).expect("arc not in rotation");
        rot[(p + rot.len() - 1) % rot.len()]
    }

    /// The endpoint of `a` that is not `v`.
    #[inline]
    pub fn opposite(&self, a: ArcId, v: VertexId) -> VertexId {
        let (t, h) = self.ends(a);
        if t == v {
            h
        } else {
            t
        }
    }

    /// Behaviour of P relative to Q at `v`, from the four arcs.
    pub fn classify_behaviour(
        &self,
        v: VertexId,
        p_in: ArcId,
        p_out: ArcId,
        q_in: ArcId,
        q_out: ArcId,
    ) -> Result<Behaviour, IncidenceError> {
        let pos = |a: ArcId| self.position(v, a).ok_or(IncidenceError::NotIncident { vertex: v, arc: a });
        let positions = [pos(p_in)?, pos(p_out)?, pos(q_in)?, pos(q_out)?];
        for (i, x) in positions.iter().enumerate() {
            if positions[..i].contains(x) {
                return Err(IncidenceError::NotDistinct);
            }
        }
        for a in [p_in, q_in] {
            if self.head(a) != v {
                return Err(IncidenceError::WrongDirection { vertex: v, arc: a, expected: "enter" });
            }
        }
        for a in [p_out, q_out] {
            if self.tail(a) != v {
                return Err(IncidenceError::WrongDirection { vertex: v, arc: a, expected: "leave" });
            }
        }
        let [pi, po, qi, qo] = positions;
        Ok(classify_positions(self.degree(v), pi, po, qi, qo))
    }
}

/// Behaviour of P relative to Q from rotation positions in a vertex of degree `n`.
///
/// The two open intervals with extremities `q_in`, `q_out` split the other arcs.
/// P crosses Q if its arcs fall in different intervals; otherwise it goes to
/// the right when it enters before it leaves, reading the interval positively.
#[inline]
pub fn classify_positions(n: usize, p_in: usize, p_out: usize, q_in: usize, q_out: usize) -> Behaviour {
    let a = strictly_between(n, q_in, p_in, q_out);
    let b = strictly_between(n, q_in, p_out, q_out);
    if a != b {
        return Behaviour::Cross;
    }
    let start = if a { q_in } else { q_out };
    if forward_distance(n, start, p_in) < forward_distance(n, start, p_out) {
        Behaviour::Right
    } else {
        Behaviour::Left
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    /// Darts in traversal order, with the face on the left of the walk.
    pub boundary: Vec<Dart>,
}

impl Face {
    pub fn key(&self) -> FaceKey {
        *self.boundary.iter().min().expect("faces are nonempty")
    }
}

/// All faces of an embedding, with a dart → face index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Faces {
    pub faces: Vec<Face>,
    face_of: Vec<u32>,
}

impl Faces {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    #[inline]
    pub fn face_of(&self, d: Dart) -> usize {
        self.face_of[d.index()] as usize
    }

    pub fn index_of_key(&self, key: FaceKey) -> Option<usize> {
        self.face_of.get(key.index()).map(|&f| f as usize)
    }
}

/// The dart following `d` on its face.
#[inline]
pub fn next_dart(g: &EmbeddedDigraph, d: Dart) -> Dart {
    let x = match d.side {
        Side::Left => g.head(d.arc),
        Side::Right => g.tail(d.arc),
    };
    let e = g.pred(x, d.arc);
    let side = if g.tail(e) == x { Side::Left } else { Side::Right };
    Dart::new(e, side)
}

/// Vertex at which dart `d` starts when walking its face.
#[inline]
pub fn dart_origin(g: &EmbeddedDigraph, d: Dart) -> VertexId {
    match d.side {
        Side::Left => g.tail(d.arc),
        Side::Right => g.head(d.arc),
    }
}

/// Trace every face of a structurally valid rotation system.
///
/// Faces are produced in increasing order of their key. A graph without arcs
/// yields no face here; [`face_count`] accounts for that case.
///
/// # Panics
/// If some rotation does not list every incident arc exactly once.
pub fn trace_faces(g: &EmbeddedDigraph) -> Faces {
    let darts = 2 * g.arc_count();
    let mut face_of = vec![u32::MAX; darts];
    let mut faces = Vec::new();
    for start in 0..darts {
        if face_of[start] != u32::MAX {
            continue;
        }
        let id = faces.len() as u32;
        let mut boundary = Vec::new();
        let mut d = Dart::from_index(start);
        loop {
            face_of[d.index()] = id;
            boundary.push(d);
            d = next_dart(g, d);
            if d.index() == start {
                break;
            }
            assert!(face_of[d.index()] == u32::MAX, "rotation system is not a permutation");
        }
        faces.push(Face { boundary });
    }
    Faces { faces, face_of }
}

/// Face count of the embedding, counting the single face of an arcless graph.
pub fn face_count(g: &EmbeddedDigraph, faces: &Faces) -> usize {
    if g.arc_count() == 0 && g.vertex_count() > 0 {
        1
    } else {
        faces.len()
    }
}

fn check_structure(g: &EmbeddedDigraph) -> Result<(), EmbeddingViolation> {
    let n = g.vertex_count();
    for a in g.arcs() {
        let (t, h) = g.ends(a);
        if t.index() >= n || h.index() >= n {
            return Err(EmbeddingViolation::EndpointOutOfRange { arc: a });
        }
        if t == h {
            return Err(EmbeddingViolation::Loop { arc: a });
        }
    }
    let mut seen = vec![0u8; g.arc_count()];
    for v in g.vertices() {
        for &a in g.rotation(v) {
            if a.index() >= g.arc_count() {
                return Err(EmbeddingViolation::UnknownArc { vertex: v, arc: a });
            }
            let (t, h) = g.ends(a);
            let bit = if t == v {
                1
            } else if h == v {
                2
            } else {
                return Err(EmbeddingViolation::NotIncident { vertex: v, arc: a });
            };
            if seen[a.index()] & bit != 0 {
                return Err(EmbeddingViolation::DuplicateInRotation { vertex: v, arc: a });
            }
            seen[a.index()] |= bit;
        }
    }
    for a in g.arcs() {
        let s = seen[a.index()];
        if s & 1 == 0 {
            return Err(EmbeddingViolation::RotationIncomplete { vertex: g.tail(a), arc: a });
        }
        if s & 2 == 0 {
            return Err(EmbeddingViolation::RotationIncomplete { vertex: g.head(a), arc: a });
        }
    }
    Ok(())
}

fn check_connected(g: &EmbeddedDigraph) -> Result<(), EmbeddingViolation> {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut stack = vec![VertexId(0)];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &a in g.rotation(v) {
            let w = g.opposite(a, v);
            if !seen[w.index()] {
                seen[w.index()] = true;
                stack.push(w);
            }
        }
    }
    match seen.iter().position(|&s| !s) {
        Some(i) => Err(EmbeddingViolation::Disconnected { vertex: VertexId::from_index(i) }),
        None => Ok(()),
    }
}

/// Check every invariant of an embedded digraph; report the first violation.
pub fn validate_embedding(g: &EmbeddedDigraph) -> Result<(), EmbeddingViolation> {
    if g.vertex_count() == 0 {
        return Err(EmbeddingViolation::NoVertices);
    }
    check_structure(g)?;
    check_connected(g)?;
    let faces = trace_faces(g);
    let f = face_count(g, &faces);
    let (v, a) = (g.vertex_count(), g.arc_count());
    if v + f != a + 2 {
        return Err(EmbeddingViolation::EulerFails { vertices: v, arcs: a, faces: f });
    }
    Ok(())
}
