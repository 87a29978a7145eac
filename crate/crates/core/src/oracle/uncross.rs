//! Crossing counts and the segment-exchange normalizer.
//!
//! Two paths `P`, `Q` with common vertices `u < v` that cross at `v`, or
//! cross at `u` and end at `v`, are replaced by `P' = P..u Q[u..v] P v..`
//! and `Q' = Q..u P[u..v] Q v..`. Origins and destinations are kept, so the
//! demands stay satisfied, and the crossing counts ordered from the greatest
//! vertex down decrease lexicographically.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use thiserror::Error;

use super::paths::{crosses_at, Traversal};
use crate::embedding::EmbeddedDigraph;
use crate::ids::{ArcId, DemandId, VertexId};
use crate::preprocess::TopoOrder;
use crate::solver::Solution;

/// Number of crossing path pairs at each vertex, indexed by topological rank.
///
/// The order compares the entry of the greatest vertex first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CrossVector {
    counts: Vec<u32>,
}

impl CrossVector {
    pub fn at_rank(&self, rank: usize) -> u32 {
        self.counts[rank]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }
}

impl Ord for CrossVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.counts.iter().rev().cmp(other.counts.iter().rev())
    }
}

impl PartialOrd for CrossVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Count, per vertex, the unordered pairs of paths that cross there.
pub fn count_crossings(g: &EmbeddedDigraph, order: &TopoOrder, paths: &[Vec<ArcId>]) -> CrossVector {
    let ts: Vec<Traversal> = paths.iter().map(|p| Traversal::new(g, p)).collect();
    count_traversals(g, order, &ts)
}

fn count_traversals(g: &EmbeddedDigraph, order: &TopoOrder, ts: &[Traversal]) -> CrossVector {
    let mut counts = vec![0u32; g.vertex_count()];
    for (i, p) in ts.iter().enumerate() {
        for q in &ts[i + 1..] {
            for w in p.common(q) {
                if crosses_at(g, p, q, w) {
                    counts[order.rank(w)] += 1;
                }
            }
        }
    }
    CrossVector { counts }
}

/// A path named by its demand and its index within the demand.
pub type PathRef = (DemandId, usize);

/// One exchange, with the crossing counts around it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Swap {
    pub first: PathRef,
    pub second: PathRef,
    pub u: VertexId,
    pub v: VertexId,
    pub before: CrossVector,
    pub after: CrossVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Uncrossed {
    pub solution: Solution,
    pub swaps: Vec<Swap>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum UncrossError {
    /// An exchange failed to decrease the crossing vector; the loop stops
    /// rather than risk running forever.
    #[error("exchange of {:?} and {:?} at ({}, {}) did not decrease the crossing vector", .0.first, .0.second, .0.u, .0.v)]
    NoProgress(Swap),
}

/// Exchange segments until both uncrossing conditions hold.
///
/// Vertices are scanned from the greatest down, and at each vertex the path
/// pairs in order of their flattened index (demand by demand). Every
/// exchange is logged with the crossing vectors before and after it.
pub fn uncross(g: &EmbeddedDigraph, order: &TopoOrder, sol: &Solution) -> Result<Uncrossed, UncrossError> {
    let refs: Vec<PathRef> = sol.all_paths().scan((None, 0), |st, (h, _)| {
        if st.0 != Some(h) {
            *st = (Some(h), 0);
        }
        st.1 += 1;
        Some((h, st.1 - 1))
    }).collect();
    let mut ts: Vec<Traversal> = sol.all_paths().map(|(_, p)| Traversal::new(g, p)).collect();
    let mut swaps = Vec::new();
    let mut current = count_traversals(g, order, &ts);
    while let Some((i, j, u, v)) = find_violation(g, order, &ts) {
        let (p, q) = (&ts[i], &ts[j]);
        let (pu, pv) = (p.position(u).unwrap(), p.position(v).unwrap());
        let (qu, qv) = (q.position(u).unwrap(), q.position(v).unwrap());
        let splice = |a: &Traversal, b: &Traversal, au: usize, av: usize, bu: usize, bv: usize| {
            let mut arcs = a.arcs[..au].to_vec();
            arcs.extend_from_slice(&b.arcs[bu..bv]);
            arcs.extend_from_slice(&a.arcs[av..]);
            Traversal::new(g, &arcs)
        };
        let np = splice(p, q, pu, pv, qu, qv);
        let nq = splice(q, p, qu, qv, pu, pv);
        ts[i] = np;
        ts[j] = nq;
        let after = count_traversals(g, order, &ts);
        let swap = Swap { first: refs[i], second: refs[j], u, v, before: current, after: after.clone() };
        let progressed = swap.after < swap.before;
        if !progressed {
            return Err(UncrossError::NoProgress(swap));
        }
        swaps.push(swap);
        current = after;
    }
    let mut paths: Vec<Vec<Vec<ArcId>>> = sol.paths.iter().map(|ps| Vec::with_capacity(ps.len())).collect();
    for (r, t) in refs.iter().zip(ts) {
        paths[r.0.index()].push(t.arcs);
    }
    Ok(Uncrossed { solution: Solution { paths }, swaps })
}

/// The violation at the greatest vertex: `(i, j, u, v)` with `u < v`.
fn find_violation(g: &EmbeddedDigraph, order: &TopoOrder, ts: &[Traversal]) -> Option<(usize, usize, VertexId, VertexId)> {
    for &x in order.order().iter().rev() {
        for i in 0..ts.len() {
            if !ts[i].contains(x) {
                continue;
            }
            for j in i + 1..ts.len() {
                let (p, q) = (&ts[i], &ts[j]);
                if !q.contains(x) || !crosses_at(g, p, q, x) {
                    continue;
                }
                // Greatest common vertex before x, if any.
                let earlier = p.common(q).take_while(|&w| w != x).last();
                if let Some(u) = earlier {
                    return Some((i, j, u, x));
                }
                if let (Some(d), true) = (p.destination(), p.destination() == q.destination()) {
                    return Some((i, j, x, d));
                }
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum UncrossViolation {
    #[error("{first:?} and {second:?} share an endpoint but cross at {vertex}")]
    SharedEndpoint { first: PathRef, second: PathRef, vertex: VertexId },
    #[error("{first:?} and {second:?} cross at {vertex}, which is not their first common vertex")]
    NotFirstCommon { first: PathRef, second: PathRef, vertex: VertexId },
}

/// Check that paths sharing an endpoint never cross and that other pairs
/// cross at most at their first common vertex.
pub fn check_uncrossed(g: &EmbeddedDigraph, sol: &Solution) -> Result<(), UncrossViolation> {
    let flat: Vec<(PathRef, Traversal)> = sol
        .paths
        .iter()
        .enumerate()
        .flat_map(|(h, ps)| ps.iter().enumerate().map(move |(i, p)| ((DemandId::from_index(h), i), p)))
        .map(|(r, p)| (r, Traversal::new(g, p)))
        .collect();
    for (i, (rp, p)) in flat.iter().enumerate() {
        for (rq, q) in &flat[i + 1..] {
            let shared = p.origin() == q.origin() || p.destination() == q.destination();
            let first = p.first_common(q);
            for w in p.common(q) {
                if !crosses_at(g, p, q, w) {
                    continue;
                }
                if shared {
                    return Err(UncrossViolation::SharedEndpoint { first: *rp, second: *rq, vertex: w });
                }
                if Some(w) != first {
                    return Err(UncrossViolation::NotFirstCommon { first: *rp, second: *rq, vertex: w });
                }
            }
        }
    }
    Ok(())
}
