//! A finer scheme family that keeps one side per path.
//!
//! The matrix gives every path a single label per demand pair, and the label
//! fixes on which side the path leaves every non-crossing partner at their
//! first meeting. A path running between two paths of the other demand
//! leaves one of them on its left and the other on its right, which no label
//! expresses. Here each demand pair `(h1, h2)` carries
//!
//! * a crossing pattern: paths `i` of `h1` and `j` of `h2` cross at their
//!   first meeting iff `i in I1` and `j in I2` agree, for cyclic intervals
//!   `I1`, `I2`;
//! * for each path `i` of `h1`, a cyclic interval of paths of `h2` it goes
//!   to the left of when they do not cross;
//! * the same for each path `j` of `h2`.
//!
//! Every behaviour table the matrix can produce is produced here too (take
//! empty or full side intervals), and the number of schemes still depends
//! only on the requests.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use super::{demand_pairs, pair_index, BehaviourPair};
use crate::cyclic::CyclicInterval;
use crate::embedding::Behaviour;
use crate::ids::DemandId;

/// Crossings between two demands: `i` and `j` cross iff `i in first` and
/// `j in second` agree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CrossPattern {
    pub first: CyclicInterval,
    pub second: CyclicInterval,
}

impl CrossPattern {
    #[inline]
    pub fn crosses(&self, i: u32, j: u32) -> bool {
        self.first.contains(i) == self.second.contains(j)
    }
}

/// Distinct crossing relations between `r1` and `r2` paths, each by its first
/// encoding in interval enumeration order.
pub fn cross_patterns(r1: u32, r2: u32) -> Vec<CrossPattern> {
    let mut seen: BTreeSet<Vec<bool>> = BTreeSet::new();
    let mut out = Vec::new();
    for first in CyclicInterval::all(r1) {
        for second in CyclicInterval::all(r2) {
            let p = CrossPattern { first, second };
            let rel = (0..r1).flat_map(|i| (0..r2).map(move |j| p.crosses(i, j))).collect();
            if seen.insert(rel) {
                out.push(p);
            }
        }
    }
    out
}

/// What a component of a side scheme decides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Component {
    /// The crossing pattern of demand pair `pair`.
    Cross { pair: usize },
    /// Left interval of path `path` of the first demand of `pair`.
    FirstSide { pair: usize, path: u32 },
    /// Left interval of path `path` of the second demand of `pair`.
    SecondSide { pair: usize, path: u32 },
}

/// Layout of side schemes: one value per component.
#[derive(Clone, Debug)]
pub struct SideSpace {
    pub requests: Vec<u32>,
    pub pairs: Vec<(DemandId, DemandId)>,
    patterns: Vec<Vec<CrossPattern>>,
    /// `intervals[r]`: every cyclic interval of `0..r`.
    intervals: Vec<Vec<CyclicInterval>>,
    /// First component of each pair; the last entry is the component count.
    offsets: Vec<usize>,
}

impl SideSpace {
    pub fn new(requests: &[u32]) -> Self {
        let pairs = demand_pairs(requests.len());
        let max_r = requests.iter().copied().max().unwrap_or(0);
        let intervals = (0..=max_r).map(CyclicInterval::all).collect();
        let mut patterns = Vec::with_capacity(pairs.len());
        let mut offsets = Vec::with_capacity(pairs.len() + 1);
        offsets.push(0);
        for &(a, b) in &pairs {
            let (r1, r2) = (requests[a.index()], requests[b.index()]);
            patterns.push(cross_patterns(r1, r2));
            offsets.push(offsets.last().unwrap() + 1 + (r1 + r2) as usize);
        }
        Self { requests: requests.to_vec(), pairs, patterns, intervals, offsets }
    }

    pub fn component_count(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn component(&self, c: usize) -> Component {
        let pair = self.offsets.partition_point(|&o| o <= c) - 1;
        let r1 = self.requests[self.pairs[pair].0.index()];
        match (c - self.offsets[pair]) as u32 {
            0 => Component::Cross { pair },
            k if k <= r1 => Component::FirstSide { pair, path: k - 1 },
            k => Component::SecondSide { pair, path: k - 1 - r1 },
        }
    }

    pub fn cross_component(&self, pair: usize) -> usize {
        self.offsets[pair]
    }

    pub fn first_side_component(&self, pair: usize, i: u32) -> usize {
        self.offsets[pair] + 1 + i as usize
    }

    pub fn second_side_component(&self, pair: usize, j: u32) -> usize {
        let r1 = self.requests[self.pairs[pair].0.index()];
        self.offsets[pair] + 1 + (r1 + j) as usize
    }

    pub fn radix(&self, c: usize) -> u32 {
        match self.component(c) {
            Component::Cross { pair } => self.patterns[pair].len() as u32,
            Component::FirstSide { pair, .. } => self.intervals[self.requests[self.pairs[pair].1.index()] as usize].len() as u32,
            Component::SecondSide { pair, .. } => self.intervals[self.requests[self.pairs[pair].0.index()] as usize].len() as u32,
        }
    }

    /// Number of side schemes; `None` on overflow.
    pub fn count(&self) -> Option<u128> {
        (0..self.component_count()).try_fold(1u128, |acc, c| acc.checked_mul(self.radix(c) as u128))
    }

    pub fn pattern(&self, pair: usize, value: u32) -> CrossPattern {
        self.patterns[pair][value as usize]
    }

    pub fn side_interval(&self, c: usize, value: u32) -> CyclicInterval {
        let r = match self.component(c) {
            Component::Cross { .. } => panic!("not a side component"),
            Component::FirstSide { pair, .. } => self.requests[self.pairs[pair].1.index()],
            Component::SecondSide { pair, .. } => self.requests[self.pairs[pair].0.index()],
        };
        self.intervals[r as usize][value as usize]
    }

    /// Behaviours of path `i` of demand `a` and path `j` of demand `b` under
    /// component values `values`.
    pub fn lookup(&self, values: &[u32], a: DemandId, i: u32, b: DemandId, j: u32) -> BehaviourPair {
        if a > b {
            return self.lookup(values, b, j, a, i).swapped();
        }
        let pair = pair_index(self.requests.len(), a, b);
        if self.pattern(pair, values[self.cross_component(pair)]).crosses(i, j) {
            return BehaviourPair::CROSS;
        }
        let side = |inside: bool| if inside { Behaviour::Left } else { Behaviour::Right };
        let c1 = self.first_side_component(pair, i);
        let c2 = self.second_side_component(pair, j);
        BehaviourPair {
            first: side(self.side_interval(c1, values[c1]).contains(j)),
            second: side(self.side_interval(c2, values[c2]).contains(i)),
        }
    }

    /// Keep the values of the three components deciding the first meeting
    /// of path `i` of `a` and path `j` of `b` that give `outcome`. `None`
    /// when some component runs out.
    pub fn narrow(
        &self,
        cands: &mut [Vec<u32>],
        a: DemandId,
        i: u32,
        b: DemandId,
        j: u32,
        outcome: BehaviourPair,
    ) -> Option<()> {
        if a > b {
            return self.narrow(cands, b, j, a, i, outcome.swapped());
        }
        let pair = pair_index(self.requests.len(), a, b);
        let cross = outcome == BehaviourPair::CROSS;
        let cc = self.cross_component(pair);
        cands[cc].retain(|&v| self.pattern(pair, v).crosses(i, j) == cross);
        if cands[cc].is_empty() {
            return None;
        }
        if cross {
            return Some(());
        }
        let c1 = self.first_side_component(pair, i);
        let want1 = outcome.first == Behaviour::Left;
        cands[c1].retain(|&v| self.side_interval(c1, v).contains(j) == want1);
        let c2 = self.second_side_component(pair, j);
        let want2 = outcome.second == Behaviour::Left;
        cands[c2].retain(|&v| self.side_interval(c2, v).contains(i) == want2);
        (!cands[c1].is_empty() && !cands[c2].is_empty()).then_some(())
    }

    /// `h1:h2 X=<I1>~<I2> L=<side of each path of h1> | <same for h2>`,
    /// pairs joined by `; `. Intervals print as `start+len`.
    pub fn describe(&self, values: &[u32]) -> String {
        let iv = |s: &mut String, x: CyclicInterval| {
            let _ = write!(s, "{}+{}", x.start, x.len);
        };
        let mut s = String::new();
        for (p, &(a, b)) in self.pairs.iter().enumerate() {
            if p > 0 {
                s.push_str("; ");
            }
            let pat = self.pattern(p, values[self.cross_component(p)]);
            let _ = write!(s, "{}:{} X=", a.0, b.0);
            iv(&mut s, pat.first);
            s.push('~');
            iv(&mut s, pat.second);
            s.push_str(" L=");
            for i in 0..self.requests[a.index()] {
                if i > 0 {
                    s.push(',');
                }
                let c = self.first_side_component(p, i);
                iv(&mut s, self.side_interval(c, values[c]));
            }
            s.push_str(" | ");
            for j in 0..self.requests[b.index()] {
                if j > 0 {
                    s.push(',');
                }
                let c = self.second_side_component(p, j);
                iv(&mut s, self.side_interval(c, values[c]));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::scheme::{behaviour_lookup, partitions_of, PartitionPair};

    #[test]
    fn pattern_counts() {
        assert_eq!(cross_patterns(1, 1).len(), 2);
        // Empty relations collapse, as do complementary encodings.
        for (r1, r2) in [(1, 2), (2, 2), (3, 2), (3, 3)] {
            let ps = cross_patterns(r1, r2);
            let rels: BTreeSet<Vec<bool>> =
                ps.iter().map(|p| (0..r1).flat_map(|i| (0..r2).map(move |j| p.crosses(i, j))).collect()).collect();
            assert_eq!(rels.len(), ps.len());
        }
    }

    #[test]
    fn component_layout_round_trips() {
        let s = SideSpace::new(&[2, 1, 3]);
        assert_eq!(s.component_count(), (1 + 3) + (1 + 5) + (1 + 4));
        for pair in 0..s.pairs.len() {
            assert_eq!(s.component(s.cross_component(pair)), Component::Cross { pair });
            let (a, b) = s.pairs[pair];
            for i in 0..s.requests[a.index()] {
                assert_eq!(s.component(s.first_side_component(pair, i)), Component::FirstSide { pair, path: i });
            }
            for j in 0..s.requests[b.index()] {
                assert_eq!(s.component(s.second_side_component(pair, j)), Component::SecondSide { pair, path: j });
            }
        }
    }

    /// Every matrix scheme for two demands has a side scheme with the same
    /// behaviour table.
    #[test]
    fn contains_the_matrix_family() {
        for (r1, r2) in [(1, 1), (1, 2), (2, 2), (2, 3)] {
            let s = SideSpace::new(&[r1, r2]);
            let (a, b) = (DemandId(0), DemandId(1));
            let n = s.component_count();
            let mut tables: BTreeSet<Vec<BehaviourPair>> = BTreeSet::new();
            let mut values = vec![0u32; n];
            loop {
                tables.insert((0..r1).flat_map(|i| (0..r2).map(move |j| (i, j))).map(|(i, j)| s.lookup(&values, a, i, b, j)).collect());
                let mut c = n;
                loop {
                    if c == 0 {
                        break;
                    }
                    c -= 1;
                    values[c] += 1;
                    if values[c] < s.radix(c) {
                        break;
                    }
                    values[c] = 0;
                }
                if values.iter().all(|&v| v == 0) {
                    break;
                }
            }
            for first in partitions_of(r1) {
                for second in partitions_of(r2) {
                    let pp = PartitionPair { first, second };
                    let t: Vec<BehaviourPair> = (0..r1)
                        .flat_map(|i| (0..r2).map(move |j| (i, j)))
                        .map(|(i, j)| behaviour_lookup(&pp, i, j).unwrap())
                        .collect();
                    assert!(tables.contains(&t), "{r1}x{r2}: matrix table missing");
                }
            }
        }
    }

    #[test]
    fn a_path_between_two_paths_is_expressible() {
        // Path 0 of demand 1 leaves path 0 of demand 0 on its left and path 1 on its right.
        let s = SideSpace::new(&[2, 1]);
        let mut cands: Vec<Vec<u32>> = (0..s.component_count()).map(|c| (0..s.radix(c)).collect()).collect();
        let (a, b) = (DemandId(0), DemandId(1));
        let lr = BehaviourPair { first: Behaviour::Right, second: Behaviour::Left };
        let rl = BehaviourPair { first: Behaviour::Left, second: Behaviour::Right };
        assert!(s.narrow(&mut cands, a, 0, b, 0, lr).is_some());
        assert!(s.narrow(&mut cands, a, 1, b, 0, rl).is_some());
        let values: Vec<u32> = cands.iter().map(|c| c[0]).collect();
        assert_eq!(s.lookup(&values, a, 0, b, 0), lr);
        assert_eq!(s.lookup(&values, b, 0, a, 1), rl.swapped());
    }

    #[test]
    fn description_lists_every_component() {
        let s = SideSpace::new(&[2, 1]);
        let values = vec![0; s.component_count()];
        assert_eq!(s.describe(&values), "0:1 X=0+0~0+0 L=0+0,0+0 | 0+0");
    }
}
