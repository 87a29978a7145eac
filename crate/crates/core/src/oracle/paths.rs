//! Per-path lookup tables shared by the structural checks.

use alloc::vec;
use alloc::vec::Vec;

use crate::embedding::{Behaviour, EmbeddedDigraph};
use crate::ids::{ArcId, VertexId};

const ABSENT: u32 = u32::MAX;

/// A path with its vertex sequence and a position table.
#[derive(Clone, Debug)]
pub(crate) struct Traversal {
    pub arcs: Vec<ArcId>,
    pub vertices: Vec<VertexId>,
    /// Position of each graph vertex in `vertices`, or `ABSENT`.
    at: Vec<u32>,
}

impl Traversal {
    pub fn new(g: &EmbeddedDigraph, arcs: &[ArcId]) -> Self {
        let mut vertices = Vec::with_capacity(arcs.len() + 1);
        if let Some(&a) = arcs.first() {
            vertices.push(g.tail(a));
        }
        vertices.extend(arcs.iter().map(|&a| g.head(a)));
        let mut at = vec![ABSENT; g.vertex_count()];
        for (i, v) in vertices.iter().enumerate() {
            at[v.index()] = i as u32;
        }
        Self { arcs: arcs.to_vec(), vertices, at }
    }

    pub fn position(&self, v: VertexId) -> Option<usize> {
        match self.at[v.index()] {
            ABSENT => None,
            i => Some(i as usize),
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.at[v.index()] != ABSENT
    }

    /// In- and out-arc at an inner vertex.
    pub fn through(&self, v: VertexId) -> Option<(ArcId, ArcId)> {
        let i = self.position(v)?;
        if i == 0 || i == self.arcs.len() {
            return None;
        }
        Some((self.arcs[i - 1], self.arcs[i]))
    }

    pub fn origin(&self) -> Option<VertexId> {
        self.vertices.first().copied()
    }

    pub fn destination(&self) -> Option<VertexId> {
        self.vertices.last().copied()
    }

    /// First vertex of `self` that also lies on `other`. Paths of an acyclic
    /// graph meet their vertices in topological order, so this is the
    /// smallest common vertex.
    pub fn first_common(&self, other: &Traversal) -> Option<VertexId> {
        self.vertices.iter().copied().find(|&v| other.contains(v))
    }

    pub fn common<'a>(&'a self, other: &'a Traversal) -> impl Iterator<Item = VertexId> + 'a {
        let other_at = &other.at;
        self.vertices.iter().copied().filter(move |v| other_at[v.index()] != ABSENT)
    }
}

/// Behaviour of `p` relative to `q` at `v`, when both pass through `v`.
pub(crate) fn behaviour_at(g: &EmbeddedDigraph, p: &Traversal, q: &Traversal, v: VertexId) -> Option<Behaviour> {
    let (pi, po) = p.through(v)?;
    let (qi, qo) = q.through(v)?;
    g.classify_behaviour(v, pi, po, qi, qo).ok()
}

pub(crate) fn crosses_at(g: &EmbeddedDigraph, p: &Traversal, q: &Traversal, v: VertexId) -> bool {
    behaviour_at(g, p, q, v) == Some(Behaviour::Cross)
}
