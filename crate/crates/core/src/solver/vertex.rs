//! Routing at one vertex: the out-arc of each entering path is forced by the
//! in-arcs and the required pairwise behaviours.

use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

use crate::embedding::{classify_positions, Behaviour, EmbeddedDigraph};
use crate::ids::{ArcId, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RouteFailure {
    /// The forced position does not hold a leaving arc.
    CandidateNotOutArc,
    /// Two paths were sent to the same arc.
    NotBijective,
    /// The forced arcs do not realize the required behaviours.
    BehaviourMismatch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("cannot route {vertex}: {reason:?}")]
pub struct RouteError {
    pub vertex: VertexId,
    pub reason: RouteFailure,
}

/// Required behaviours of `n` entering paths: `get(x, y)` is how path `x`
/// must behave relative to path `y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BehaviourTable {
    n: usize,
    cells: Vec<Behaviour>,
}

impl BehaviourTable {
    pub fn new(n: usize) -> Self {
        Self { n, cells: vec![Behaviour::Cross; n * n] }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Behaviour {
        self.cells[x * self.n + y]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, b: Behaviour) {
        self.cells[x * self.n + y] = b;
    }
}

/// Behaviours realized by a complete assignment `outs[x]` of the paths entering by `ins[x]`.
pub fn realized_behaviours(g: &EmbeddedDigraph, v: VertexId, ins: &[ArcId], outs: &[ArcId]) -> BehaviourTable {
    let n = ins.len();
    let deg = g.degree(v);
    let pos = |a: ArcId| g.position(v, a).expect("arc at v");
    let mut t = BehaviourTable::new(n);
    for x in 0..n {
        for y in 0..n {
            if x != y {
                t.set(x, y, classify_positions(deg, pos(ins[x]), pos(outs[x]), pos(ins[y]), pos(outs[y])));
            }
        }
    }
    t
}

/// The unique candidate assignment, or why there is none.
///
/// Path `x` entering by `ins[x]` leaves by the arc `2|L| + |C| + 1` positions
/// after its in-arc, anticlockwise, where `L` and `C` are the paths it must go
/// to the left of and cross. The result is accepted only if it is a bijection
/// onto out-arcs that realizes every required behaviour.
pub fn route_vertex(
    g: &EmbeddedDigraph,
    v: VertexId,
    ins: &[ArcId],
    required: &BehaviourTable,
) -> Result<Vec<ArcId>, RouteError> {
    let n = ins.len();
    let deg = g.degree(v);
    let rot = g.rotation(v);
    let fail = |reason| RouteError { vertex: v, reason };
    let mut outs = Vec::with_capacity(n);
    let mut taken = vec![false; deg];
    for x in 0..n {
        let mut l = 0;
        let mut c = 0;
        for y in 0..n {
            if y == x {
                continue;
            }
            match required.get(x, y) {
                Behaviour::Left => l += 1,
                Behaviour::Cross => c += 1,
                Behaviour::Right => {}
            }
        }
        let p0 = g.position(v, ins[x]).expect("in-arc at v");
        let p = (p0 + 2 * l + c + 1) % deg;
        let a = rot[p];
        if g.tail(a) != v {
            return Err(fail(RouteFailure::CandidateNotOutArc));
        }
        if core::mem::replace(&mut taken[p], true) {
            return Err(fail(RouteFailure::NotBijective));
        }
        outs.push(a);
    }
    if realized_behaviours(g, v, ins, &outs) != masked(required, n) {
        return Err(fail(RouteFailure::BehaviourMismatch));
    }
    Ok(outs)
}

/// Copy of `t` with the (meaningless) diagonal reset.
fn masked(t: &BehaviourTable, n: usize) -> BehaviourTable {
    let mut m = t.clone();
    for x in 0..n {
        m.set(x, x, Behaviour::Cross);
    }
    m
}

/// Every bijection from the entering paths onto the out-arcs of `v`, in
/// lexicographic order of the out-arc rotation positions.
pub fn all_assignments(g: &EmbeddedDigraph, v: VertexId, n: usize) -> Vec<Vec<ArcId>> {
    let outs: Vec<ArcId> = g.out_arcs(v).collect();
    let mut result = Vec::new();
    let mut current = Vec::with_capacity(n);
    let mut used = vec![false; outs.len()];
    fn rec(outs: &[ArcId], n: usize, current: &mut Vec<ArcId>, used: &mut [bool], result: &mut Vec<Vec<ArcId>>) {
        if current.len() == n {
            result.push(current.clone());
            return;
        }
        for i in 0..outs.len() {
            if !used[i] {
                used[i] = true;
                current.push(outs[i]);
                rec(outs, n, current, used, result);
                current.pop();
                used[i] = false;
            }
        }
    }
    if outs.len() >= n {
        rec(&outs, n, &mut current, &mut used, &mut result);
    }
    result
}

/// Exhaustive counterpart of [`route_vertex`]: every bijection consistent
/// with the required behaviours.
pub fn brute_force_routes(g: &EmbeddedDigraph, v: VertexId, ins: &[ArcId], required: &BehaviourTable) -> Vec<Vec<ArcId>> {
    let want = masked(required, ins.len());
    all_assignments(g, v, ins.len())
        .into_iter()
        .filter(|outs| realized_behaviours(g, v, ins, outs) == want)
        .collect()
}
