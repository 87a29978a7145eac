//! Greedy peeling for instances whose sources and demand targets all lie on
//! one designated face.
//!
//! A source `s` on the outer boundary sends every unit waiting at it along
//! its out-arcs, in the order in which the units' targets appear along the
//! boundary. Removing `s` then merges its faces into the outer face and
//! leaves an instance of the same kind.

use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

use super::{verify_solution, Solution, Verdict};
use crate::embedding::{trace_faces, Dart, EmbeddedDigraph, FaceKey, Side};
use crate::ids::{ArcId, DemandId, VertexId};
use crate::preprocess::{eulerian_defect, expand_capacities, topological_order, Instance};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OuterError {
    #[error("{vertex} must lie on the designated outer face")]
    PreconditionViolated { vertex: VertexId },
    #[error("outer face key does not name a face of the graph")]
    UnknownFace,
    #[error("instance is not Eulerian at {vertex}")]
    NotEulerian { vertex: VertexId },
    #[error("instance is not acyclic")]
    NotAcyclic,
    #[error("invalid embedding")]
    BadEmbedding,
}

struct Unit {
    demand: DemandId,
    target: VertexId,
    at: VertexId,
    arcs: Vec<ArcId>,
}

/// Live arcs of the graph still being peeled.
struct Residual<'a> {
    g: &'a EmbeddedDigraph,
    alive: Vec<bool>,
}

impl Residual<'_> {
    fn succ(&self, x: VertexId, a: ArcId) -> ArcId {
        let rot = self.g.rotation(x);
        let p = self.g.position(x, a).unwrap();
        (1..=rot.len()).map(|i| rot[(p + i) % rot.len()]).find(|b| self.alive[b.index()]).unwrap()
    }

    fn pred(&self, x: VertexId, a: ArcId) -> ArcId {
        let rot = self.g.rotation(x);
        let p = self.g.position(x, a).unwrap();
        (1..=rot.len()).map(|i| rot[(p + rot.len() - i) % rot.len()]).find(|b| self.alive[b.index()]).unwrap()
    }

    fn live_arcs(&self, x: VertexId) -> impl Iterator<Item = ArcId> + '_ {
        self.g.rotation(x).iter().copied().filter(|a| self.alive[a.index()])
    }

    /// Face-left successor of a dart among live arcs.
    fn next_dart(&self, d: Dart) -> Dart {
        let x = if d.side == Side::Left { self.g.head(d.arc) } else { self.g.tail(d.arc) };
        let e = self.pred(x, d.arc);
        Dart::new(e, if self.g.tail(e) == x { Side::Left } else { Side::Right })
    }

    fn face_darts(&self, start: Dart) -> Vec<Dart> {
        let mut out = vec![start];
        let mut d = self.next_dart(start);
        while d != start {
            out.push(d);
            d = self.next_dart(d);
        }
        out
    }

    /// Vertices met walking the boundary with the face on the right,
    /// starting at `s` along `first`.
    fn right_walk(&self, s: VertexId, first: ArcId) -> Vec<VertexId> {
        let mut out = vec![s];
        let (mut x, mut e) = (s, first);
        loop {
            let z = self.g.opposite(e, x);
            let next = self.succ(z, e);
            if z == s && next == first {
                break;
            }
            out.push(z);
            x = z;
            e = next;
        }
        let _ = x;
        out
    }
}

fn outgoing_dart(g: &EmbeddedDigraph, x: VertexId, a: ArcId) -> Dart {
    Dart::new(a, if g.tail(a) == x { Side::Left } else { Side::Right })
}

/// Solve an instance whose sources and demand targets lie on the face with
/// key `outer` (a dart of the input graph).
pub fn solve_outer_boundary(inst: &Instance, outer: FaceKey) -> Result<Verdict, OuterError> {
    if let Some((vertex, _)) = eulerian_defect(inst) {
        return Err(OuterError::NotEulerian { vertex });
    }
    let orig_faces = trace_faces(&inst.graph);
    let Some(outer_index) = orig_faces.index_of_key(outer) else { return Err(OuterError::UnknownFace) };
    let expansion = expand_capacities(inst).map_err(|_| OuterError::BadEmbedding)?;
    let g = &expansion.instance.graph;
    topological_order(g).map_err(|_| OuterError::NotAcyclic)?;
    let faces = trace_faces(g);

    // Outer face of the expanded graph: the image of any surviving dart.
    let mut outer_mark = vec![false; 2 * g.arc_count()];
    let mapped = orig_faces.faces[outer_index].boundary.iter().find_map(|&d| expansion.map_dart(d));
    if let Some(d) = mapped {
        for &e in &faces.faces[faces.face_of(d)].boundary {
            outer_mark[e.index()] = true;
        }
    }
    let on_outer = |v: VertexId, marks: &[bool], res: &Residual| {
        res.live_arcs(v).any(|a| marks[outgoing_dart(g, v, a).index()])
    };

    let mut res = Residual { g, alive: vec![true; g.arc_count()] };
    for v in g.vertices() {
        let is_source = g.degree(v) > 0 && g.in_degree(v) == 0;
        let is_target = inst.demands.iter().any(|d| d.request > 0 && d.target() == v);
        if (is_source || is_target) && g.degree(v) > 0 && !on_outer(v, &outer_mark, &res) {
            return Err(OuterError::PreconditionViolated { vertex: v });
        }
    }

    let mut units: Vec<Unit> = Vec::new();
    for (h, d) in inst.demands.iter().enumerate() {
        for _ in 0..d.request {
            units.push(Unit { demand: DemandId::from_index(h), target: d.target(), at: d.source(), arcs: Vec::new() });
        }
    }
    let mut in_live: Vec<usize> = g.vertices().map(|v| g.in_degree(v)).collect();
    let mut out_live: Vec<usize> = g.vertices().map(|v| g.out_degree(v)).collect();

    loop {
        let source = g.vertices().find(|&v| out_live[v.index()] > 0 && in_live[v.index()] == 0);
        let Some(s) = source else { break };
        if !on_outer(s, &outer_mark, &res) {
            return Err(OuterError::PreconditionViolated { vertex: s });
        }
        let first = res
            .live_arcs(s)
            .filter(|&a| outer_mark[Dart::new(a, Side::Right).index()])
            .min()
            .expect("an outer corner at s");
        let walk = res.right_walk(s, first);
        let mut waiting: Vec<usize> = (0..units.len()).filter(|&u| units[u].at == s && units[u].target != s).collect();
        if waiting.len() != out_live[s.index()] {
            return Ok(Verdict::Infeasible);
        }
        let rank = |t: VertexId| walk.iter().position(|&x| x == t).unwrap_or(usize::MAX);
        waiting.sort_by_key(|&u| (rank(units[u].target), units[u].demand, u));
        let rot = g.rotation(s);
        let p0 = g.position(s, first).unwrap();
        let arcs: Vec<ArcId> =
            (0..rot.len()).map(|i| rot[(p0 + i) % rot.len()]).filter(|a| res.alive[a.index()]).collect();

        // The faces around s join the outer face once s is gone.
        for a in res.live_arcs(s).collect::<Vec<_>>() {
            for d in res.face_darts(outgoing_dart(g, s, a)) {
                outer_mark[d.index()] = true;
            }
        }
        for (&u, &a) in waiting.iter().zip(&arcs) {
            units[u].arcs.push(a);
            units[u].at = g.head(a);
            res.alive[a.index()] = false;
            in_live[g.head(a).index()] -= 1;
        }
        out_live[s.index()] = 0;
    }

    if units.iter().any(|u| u.at != u.target) {
        return Ok(Verdict::Infeasible);
    }
    let mut paths = vec![Vec::new(); inst.demands.len()];
    for u in &units {
        paths[u.demand.index()].push(u.arcs.iter().map(|a| expansion.original_arc[a.index()]).collect());
    }
    let sol = Solution { paths };
    if let Err(v) = verify_solution(inst, &sol) {
        panic!("outer-boundary solver produced an invalid solution: {v}");
    }
    Ok(Verdict::Feasible(sol))
}
