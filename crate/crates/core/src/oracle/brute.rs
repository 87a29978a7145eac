//! Exhaustive backtracking over demand units.
//!
//! Units are routed one at a time, demand by demand, each by a depth-first
//! walk over arcs with spare capacity taken in increasing id order. Paths of
//! one demand are kept in non-decreasing lexicographic order, so the first
//! solution met is the lexicographically smallest one.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::embedding::EmbeddedDigraph;
use crate::ids::{ArcId, DemandId, VertexId};
use crate::preprocess::{check_eulerian, topological_order, Instance};
use crate::solver::Solution;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    /// Arc extensions allowed before giving up.
    pub budget: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { budget: 10_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    Feasible(Solution),
    Infeasible,
    BudgetExceeded,
}

impl OracleOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, OracleOutcome::Feasible(_))
    }
}

/// Outcome together with the number of arc extensions spent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    pub outcome: OracleOutcome,
    pub nodes: u64,
}

struct Unit {
    demand: DemandId,
    source: VertexId,
    target: VertexId,
    /// Index into the per-target reachability table.
    reach: usize,
}

struct Budget;

struct Dfs<'a> {
    g: &'a EmbeddedDigraph,
    cap: &'a [u32],
    used: Vec<u32>,
    out_sorted: Vec<Vec<ArcId>>,
    units: Vec<Unit>,
    /// `reach[t][v]`: some arc path of positive capacity leads from `v` to target `t`.
    reach: Vec<Vec<bool>>,
    /// Every arc must be saturated in a solution (Eulerian and acyclic input).
    saturate: bool,
    paths: Vec<Vec<ArcId>>,
    nodes: u64,
    budget: u64,
}

/// Decide an instance by exhaustive search.
///
/// Works on any instance with an acyclic supply graph, capacities included.
pub fn brute_force(inst: &Instance, config: &OracleConfig) -> OracleReport {
    let g = &inst.graph;
    let acyclic = topological_order(g).is_ok();
    let mut units = Vec::new();
    let mut targets: Vec<VertexId> = Vec::new();
    for (h, d) in inst.demands.iter().enumerate() {
        let reach = match targets.iter().position(|&t| t == d.target()) {
            Some(i) => i,
            None => {
                targets.push(d.target());
                targets.len() - 1
            }
        };
        for _ in 0..d.request {
            units.push(Unit { demand: DemandId::from_index(h), source: d.source(), target: d.target(), reach });
        }
    }
    let reach = targets.iter().map(|&t| backward(g, t, |a| inst.capacities[a.index()] > 0)).collect();
    let out_sorted = g
        .vertices()
        .map(|v| {
            let mut outs: Vec<ArcId> = g.out_arcs(v).collect();
            outs.sort();
            outs
        })
        .collect();
    let mut dfs = Dfs {
        g,
        cap: &inst.capacities,
        used: vec![0; g.arc_count()],
        out_sorted,
        paths: vec![Vec::new(); units.len()],
        units,
        reach,
        saturate: acyclic && check_eulerian(inst),
        nodes: 0,
        budget: config.budget,
    };
    let outcome = match dfs.next_unit(0) {
        Err(Budget) => OracleOutcome::BudgetExceeded,
        Ok(false) => OracleOutcome::Infeasible,
        Ok(true) => {
            let mut paths = vec![Vec::new(); inst.demands.len()];
            for (u, p) in dfs.units.iter().zip(dfs.paths) {
                paths[u.demand.index()].push(p);
            }
            OracleOutcome::Feasible(Solution { paths })
        }
    };
    OracleReport { outcome, nodes: dfs.nodes }
}

/// Vertices from which `t` is reachable over arcs passing `keep`.
fn backward(g: &EmbeddedDigraph, t: VertexId, keep: impl Fn(ArcId) -> bool) -> Vec<bool> {
    let mut seen = vec![false; g.vertex_count()];
    seen[t.index()] = true;
    let mut queue = VecDeque::from([t]);
    while let Some(x) = queue.pop_front() {
        for a in g.in_arcs(x) {
            let y = g.tail(a);
            if keep(a) && !seen[y.index()] {
                seen[y.index()] = true;
                queue.push_back(y);
            }
        }
    }
    seen
}

fn forward(g: &EmbeddedDigraph, starts: impl Iterator<Item = VertexId>, keep: impl Fn(ArcId) -> bool) -> Vec<bool> {
    let mut seen = vec![false; g.vertex_count()];
    let mut queue = VecDeque::new();
    for s in starts {
        if !seen[s.index()] {
            seen[s.index()] = true;
            queue.push_back(s);
        }
    }
    while let Some(x) = queue.pop_front() {
        for a in g.out_arcs(x) {
            let y = g.head(a);
            if keep(a) && !seen[y.index()] {
                seen[y.index()] = true;
                queue.push_back(y);
            }
        }
    }
    seen
}

impl Dfs<'_> {
    fn next_unit(&mut self, u: usize) -> Result<bool, Budget> {
        if u == self.units.len() {
            return Ok(true);
        }
        let tight = u > 0 && self.units[u - 1].demand == self.units[u].demand;
        self.extend(u, self.units[u].source, tight)
    }

    fn extend(&mut self, u: usize, x: VertexId, tight: bool) -> Result<bool, Budget> {
        if x == self.units[u].target {
            return if self.residual_ok(u + 1) { self.next_unit(u + 1) } else { Ok(false) };
        }
        let i = self.paths[u].len();
        let floor = if tight { self.paths[u - 1].get(i).copied() } else { None };
        let reach = self.units[u].reach;
        for k in 0..self.out_sorted[x.index()].len() {
            let a = self.out_sorted[x.index()][k];
            if floor.is_some_and(|f| a < f) {
                continue;
            }
            let y = self.g.head(a);
            if self.used[a.index()] >= self.cap[a.index()] || !self.reach[reach][y.index()] {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Budget);
            }
            self.used[a.index()] += 1;
            self.paths[u].push(a);
            let found = self.extend(u, y, floor == Some(a))?;
            if found {
                return Ok(true);
            }
            self.paths[u].pop();
            self.used[a.index()] -= 1;
        }
        Ok(false)
    }

    /// Cheap necessary conditions for routing units `from..` in what is left.
    fn residual_ok(&self, from: usize) -> bool {
        let live = |a: ArcId| self.used[a.index()] < self.cap[a.index()];
        let rest = &self.units[from..];
        let mut checked: Vec<(VertexId, VertexId)> = Vec::new();
        for unit in rest {
            if checked.contains(&(unit.source, unit.target)) {
                continue;
            }
            checked.push((unit.source, unit.target));
            if !backward(self.g, unit.target, live)[unit.source.index()] {
                return false;
            }
        }
        if self.saturate {
            // Spare capacity can only be used by the remaining units.
            let fwd = forward(self.g, rest.iter().map(|u| u.source), live);
            let mut bwd = vec![false; self.g.vertex_count()];
            for unit in rest {
                if !bwd[unit.target.index()] {
                    for (b, r) in bwd.iter_mut().zip(backward(self.g, unit.target, live)) {
                        *b |= r;
                    }
                }
            }
            for a in self.g.arcs() {
                if live(a) && !(fwd[self.g.tail(a).index()] && bwd[self.g.head(a).index()]) {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::Demand;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }
    fn a(i: u32) -> ArcId {
        ArcId(i)
    }

    /// Two parallel routes 0 -> 1 -> 3 and 0 -> 2 -> 3.
    fn diamond(caps: Vec<u32>, request: u32) -> Instance {
        let g = EmbeddedDigraph::new(
            4,
            vec![(v(0), v(1)), (v(1), v(3)), (v(0), v(2)), (v(2), v(3))],
            vec![vec![a(0), a(2)], vec![a(1), a(0)], vec![a(2), a(3)], vec![a(3), a(1)]],
        )
        .unwrap();
        Instance::new(g, caps, vec![Demand { tail: v(3), head: v(0), request }]).unwrap()
    }

    #[test]
    fn single_path() {
        let r = brute_force(&diamond(vec![1, 1, 0, 0], 1), &OracleConfig::default());
        assert_eq!(r.outcome, OracleOutcome::Feasible(Solution { paths: vec![vec![vec![a(0), a(1)]]] }));
    }

    #[test]
    fn smallest_solution_first() {
        let r = brute_force(&diamond(vec![1, 1, 1, 1], 2), &OracleConfig::default());
        let want = Solution { paths: vec![vec![vec![a(0), a(1)], vec![a(2), a(3)]]] };
        assert_eq!(r.outcome, OracleOutcome::Feasible(want));
    }

    #[test]
    fn capacity_shortfall() {
        let r = brute_force(&diamond(vec![2, 1, 1, 1], 3), &OracleConfig::default());
        assert_eq!(r.outcome, OracleOutcome::Infeasible);
    }

    #[test]
    fn budget_is_reported() {
        let r = brute_force(&diamond(vec![1, 1, 1, 1], 2), &OracleConfig { budget: 1 });
        assert_eq!(r.outcome, OracleOutcome::BudgetExceeded);
    }
}
