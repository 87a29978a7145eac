//! Routing schemes.
//!
//! For each pair of distinct demands, the paths of each demand are cut into
//! four consecutive cyclic intervals `A, B, C, D`. A fixed 4×4 matrix then
//! gives the relative behaviour at the first common vertex of any two paths
//! of the two demands.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::{self, Write as _};
use thiserror::Error;

use crate::embedding::Behaviour;
use crate::ids::DemandId;

pub mod sides;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    A,
    B,
    C,
    D,
}

impl Label {
    pub const ALL: [Label; 4] = [Label::A, Label::B, Label::C, Label::D];

    fn index(self) -> usize {
        self as usize
    }
}

/// Four consecutive cyclic intervals of `{0, .., r-1}`: `A` starts at
/// `start` and has `lens[0]` elements, then `B`, `C`, and `D` takes the rest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntervalPartition4 {
    pub r: u32,
    pub start: u32,
    pub lens: [u32; 3],
}

impl IntervalPartition4 {
    pub fn new(r: u32, start: u32, lens: [u32; 3]) -> Option<Self> {
        let used: u32 = lens.iter().sum();
        (r > 0 && start < r && used <= r).then_some(Self { r, start, lens })
    }

    pub fn len_of(&self, l: Label) -> u32 {
        match l {
            Label::D => self.r - self.lens.iter().sum::<u32>(),
            l => self.lens[l.index()],
        }
    }

    /// Label of path index `i < r`.
    pub fn label(&self, i: u32) -> Label {
        debug_assert!(i < self.r);
        let off = (i + self.r - self.start) % self.r;
        let [a, b, c] = self.lens;
        if off < a {
            Label::A
        } else if off < a + b {
            Label::B
        } else if off < a + b + c {
            Label::C
        } else {
            Label::D
        }
    }

    pub fn labels(&self) -> Vec<Label> {
        (0..self.r).map(|i| self.label(i)).collect()
    }

    pub fn members(&self, l: Label) -> Vec<u32> {
        (0..self.r).filter(|&i| self.label(i) == l).collect()
    }
}

impl fmt::Display for IntervalPartition4 {
    /// `A=0.1,B=-,C=2,D=-`: members of each interval, `-` when empty.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, l) in Label::ALL.iter().enumerate() {
            if k > 0 {
                f.write_char(',')?;
            }
            write!(f, "{l:?}=")?;
            let m = self.members(*l);
            if m.is_empty() {
                f.write_char('-')?;
            }
            for (j, i) in m.iter().enumerate() {
                if j > 0 {
                    f.write_char('.')?;
                }
                write!(f, "{i}")?;
            }
        }
        Ok(())
    }
}

/// All distinct labelled partitions of `{0, .., r-1}`, each represented by its
/// lexicographically smallest `(start, lens)` encoding, in increasing order
/// of that encoding.
pub fn partitions_of(r: u32) -> Vec<IntervalPartition4> {
    assert!(r >= 1, "partitions need at least one path");
    let mut seen: BTreeSet<Vec<Label>> = BTreeSet::new();
    let mut out = Vec::new();
    for start in 0..r {
        for a in 0..=r {
            for b in 0..=r - a {
                for c in 0..=r - a - b {
                    let p = IntervalPartition4 { r, start, lens: [a, b, c] };
                    if seen.insert(p.labels()) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Behaviours at the first common vertex: `(P1 relative to P2, P2 relative to P1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BehaviourPair {
    pub first: Behaviour,
    pub second: Behaviour,
}

impl BehaviourPair {
    pub const CROSS: BehaviourPair = BehaviourPair { first: Behaviour::Cross, second: Behaviour::Cross };

    /// Every pair allowed at a first meeting: both cross or neither does.
    pub const ALL: [BehaviourPair; 5] = [
        BehaviourPair::CROSS,
        BehaviourPair { first: Behaviour::Left, second: Behaviour::Left },
        BehaviourPair { first: Behaviour::Left, second: Behaviour::Right },
        BehaviourPair { first: Behaviour::Right, second: Behaviour::Left },
        BehaviourPair { first: Behaviour::Right, second: Behaviour::Right },
    ];

    pub fn swapped(self) -> BehaviourPair {
        BehaviourPair { first: self.second, second: self.first }
    }
}

/// The fixed matrix, rows indexed by the label of P1, columns by that of P2.
pub fn matrix_cell(l1: Label, l2: Label) -> BehaviourPair {
    use Behaviour::{Left as L, Right as R};
    let lr = |first, second| BehaviourPair { first, second };
    const MATRIX: [[u8; 4]; 4] = [
        // 0 = C, 1 = L/L, 2 = L/R, 3 = R/L, 4 = R/R
        [0, 0, 1, 2],
        [0, 0, 3, 4],
        [1, 2, 0, 0],
        [3, 4, 0, 0],
    ];
    match MATRIX[l1.index()][l2.index()] {
        0 => BehaviourPair::CROSS,
        1 => lr(L, L),
        2 => lr(L, R),
        3 => lr(R, L),
        _ => lr(R, R),
    }
}

/// Partitions chosen for one pair of demands `(h1, h2)` with `h1 < h2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PartitionPair {
    pub first: IntervalPartition4,
    pub second: IntervalPartition4,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("path index ({i}, {j}) out of range for requests ({r1}, {r2})")]
pub struct IndexOutOfRange {
    pub i: u32,
    pub j: u32,
    pub r1: u32,
    pub r2: u32,
}

/// Behaviours of path `i` of the first demand and path `j` of the second.
pub fn behaviour_lookup(p: &PartitionPair, i: u32, j: u32) -> Result<BehaviourPair, IndexOutOfRange> {
    if i >= p.first.r || j >= p.second.r {
        return Err(IndexOutOfRange { i, j, r1: p.first.r, r2: p.second.r });
    }
    Ok(matrix_cell(p.first.label(i), p.second.label(j)))
}

/// Unordered pairs of distinct demands in lexicographic order.
pub fn demand_pairs(k: usize) -> Vec<(DemandId, DemandId)> {
    let mut out = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            out.push((DemandId::from_index(a), DemandId::from_index(b)));
        }
    }
    out
}

/// Index of the unordered pair `{a, b}` (distinct) in [`demand_pairs`] order.
pub fn pair_index(k: usize, a: DemandId, b: DemandId) -> usize {
    let (a, b) = if a < b { (a.index(), b.index()) } else { (b.index(), a.index()) };
    debug_assert!(a != b && b < k);
    // Pairs before row a: sum_{x<a} (k-1-x).
    a * (2 * k - a - 1) / 2 + (b - a - 1)
}

/// All routing schemes for a list of requests, with their mixed-radix layout.
///
/// Scheme number `n` is read in mixed radix: one digit per demand pair, the
/// last pair varying fastest; a digit `d` denotes the partition pair
/// `(partitions[h1][d / n2], partitions[h2][d % n2])`.
#[derive(Clone, Debug)]
pub struct SchemeSpace {
    pub requests: Vec<u32>,
    pub partitions: Vec<Vec<IntervalPartition4>>,
    pub pairs: Vec<(DemandId, DemandId)>,
}

/// One routing scheme: a digit per demand pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RoutingScheme {
    pub digits: Vec<u32>,
}

impl SchemeSpace {
    pub fn new(requests: &[u32]) -> Self {
        let partitions = requests.iter().map(|&r| partitions_of(r)).collect();
        Self { requests: requests.to_vec(), partitions, pairs: demand_pairs(requests.len()) }
    }

    pub fn demand_count(&self) -> usize {
        self.requests.len()
    }

    /// Number of partition pairs available to demand pair `p`.
    pub fn radix(&self, p: usize) -> u32 {
        let (a, b) = self.pairs[p];
        (self.partitions[a.index()].len() * self.partitions[b.index()].len()) as u32
    }

    /// Total number of schemes; `None` on overflow.
    pub fn count(&self) -> Option<u128> {
        (0..self.pairs.len()).try_fold(1u128, |acc, p| acc.checked_mul(self.radix(p) as u128))
    }

    /// The bound `R^{4k(k-1)}` with `R = max r + 1`; `None` on overflow.
    pub fn bound(&self) -> Option<u128> {
        let big_r = self.requests.iter().copied().max().unwrap_or(0) as u128 + 1;
        let k = self.requests.len() as u32;
        big_r.checked_pow(4 * k * k.saturating_sub(1))
    }

    pub fn partition_pair(&self, p: usize, digit: u32) -> PartitionPair {
        let (a, b) = self.pairs[p];
        let n2 = self.partitions[b.index()].len() as u32;
        PartitionPair {
            first: self.partitions[a.index()][(digit / n2) as usize],
            second: self.partitions[b.index()][(digit % n2) as usize],
        }
    }

    /// Behaviours of path `i` of demand `a` and path `j` of demand `b`
    /// (in that order, `a != b`) under `scheme`.
    pub fn lookup(&self, scheme: &RoutingScheme, a: DemandId, i: u32, b: DemandId, j: u32) -> BehaviourPair {
        let p = pair_index(self.demand_count(), a, b);
        let pp = self.partition_pair(p, scheme.digits[p]);
        if a < b {
            behaviour_lookup(&pp, i, j).expect("path index in range")
        } else {
            behaviour_lookup(&pp, j, i).expect("path index in range").swapped()
        }
    }

    /// Deterministic stream of every scheme in increasing number.
    pub fn iter(&self) -> SchemeIter<'_> {
        SchemeIter { space: self, next: Some(vec![0; self.pairs.len()]) }
    }

    /// Scheme by its number, if in range.
    pub fn nth(&self, mut n: u128) -> Option<RoutingScheme> {
        let mut digits = vec![0; self.pairs.len()];
        for p in (0..self.pairs.len()).rev() {
            let r = self.radix(p) as u128;
            digits[p] = (n % r) as u32;
            n /= r;
        }
        (n == 0).then_some(RoutingScheme { digits })
    }

    /// One line per scheme: `h1:h2 <partition of h1> | <partition of h2>`, pairs joined by `; `.
    pub fn describe(&self, scheme: &RoutingScheme) -> String {
        let mut s = String::new();
        for (p, &(a, b)) in self.pairs.iter().enumerate() {
            if p > 0 {
                s.push_str("; ");
            }
            let pp = self.partition_pair(p, scheme.digits[p]);
            let _ = write!(s, "{}:{} {} | {}", a.0, b.0, pp.first, pp.second);
        }
        s
    }
}

/// Enumerates schemes for `requests`.
pub fn enumerate_schemes(requests: &[u32]) -> SchemeSpace {
    SchemeSpace::new(requests)
}

#[derive(Clone, Debug)]
pub struct SchemeIter<'a> {
    space: &'a SchemeSpace,
    next: Option<Vec<u32>>,
}

impl Iterator for SchemeIter<'_> {
    type Item = RoutingScheme;

    fn next(&mut self) -> Option<RoutingScheme> {
        let digits = self.next.take()?;
        let mut succ = digits.clone();
        let mut p = succ.len();
        let mut carry = true;
        while carry && p > 0 {
            p -= 1;
            succ[p] += 1;
            if succ[p] == self.space.radix(p) {
                succ[p] = 0;
            } else {
                carry = false;
            }
        }
        if !carry {
            self.next = Some(succ);
        }
        Some(RoutingScheme { digits })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Behaviour::{Left as L, Right as R};

    /// Every labelling whose label sequence, rotated somehow, is non-decreasing.
    fn brute_force_partitions(r: u32) -> Vec<Vec<Label>> {
        let mut out = Vec::new();
        for code in 0..4u32.pow(r) {
            let labels: Vec<Label> = (0..r).map(|i| Label::ALL[((code >> (2 * i)) & 3) as usize]).collect();
            let ok = (0..r as usize).any(|s| {
                (0..r as usize - 1).all(|t| labels[(s + t) % r as usize] <= labels[(s + t + 1) % r as usize])
            });
            if ok {
                out.push(labels);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn partitions_match_brute_force() {
        for r in 1..=5 {
            let mut got: Vec<Vec<Label>> = partitions_of(r).iter().map(|p| p.labels()).collect();
            let n = got.len();
            got.sort();
            got.dedup();
            assert_eq!(got.len(), n, "duplicates for r={r}");
            assert_eq!(got, brute_force_partitions(r), "r={r}");
            assert!(n as u32 <= (r + 1).pow(4));
        }
        assert_eq!(partitions_of(1).len(), 4);
        assert_eq!(partitions_of(2).len(), 16);
    }

    #[test]
    fn canonical_encoding_is_smallest() {
        for r in 1..=4 {
            for p in partitions_of(r) {
                for start in 0..r {
                    for a in 0..=r {
                        for b in 0..=r - a {
                            for c in 0..=r - a - b {
                                let q = IntervalPartition4 { r, start, lens: [a, b, c] };
                                if q.labels() == p.labels() {
                                    assert!((p.start, p.lens) <= (q.start, q.lens));
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn matrix_examples() {
        let all = |l| IntervalPartition4::new(1, 0, match l {
            Label::A => [1, 0, 0],
            Label::B => [0, 1, 0],
            Label::C => [0, 0, 1],
            Label::D => [0, 0, 0],
        })
        .unwrap();
        let look = |l1, l2| behaviour_lookup(&PartitionPair { first: all(l1), second: all(l2) }, 0, 0).unwrap();
        assert_eq!(look(Label::A, Label::A), BehaviourPair::CROSS);
        assert_eq!(look(Label::A, Label::D), BehaviourPair { first: L, second: R });
        assert_eq!(look(Label::D, Label::B), BehaviourPair { first: R, second: R });
        assert!(behaviour_lookup(&PartitionPair { first: all(Label::A), second: all(Label::A) }, 1, 0).is_err());
    }

    #[test]
    fn matrix_is_transpose_symmetric() {
        for x in Label::ALL {
            for y in Label::ALL {
                assert_eq!(matrix_cell(y, x), matrix_cell(x, y).swapped(), "{x:?} {y:?}");
            }
        }
    }

    #[test]
    fn scheme_counts() {
        assert_eq!(enumerate_schemes(&[3]).count(), Some(1));
        assert_eq!(enumerate_schemes(&[3]).iter().count(), 1);
        let s = enumerate_schemes(&[1, 1]);
        assert_eq!(s.count(), Some(16));
        assert_eq!(s.iter().count(), 16);
        let s = enumerate_schemes(&[1, 2, 1]);
        assert_eq!(s.iter().count() as u128, s.count().unwrap());
        assert!(s.count().unwrap() <= s.bound().unwrap());
    }

    #[test]
    fn pair_index_matches_listing() {
        for k in 2..6 {
            for (n, &(a, b)) in demand_pairs(k).iter().enumerate() {
                assert_eq!(pair_index(k, a, b), n);
                assert_eq!(pair_index(k, b, a), n);
            }
        }
    }

    #[test]
    fn nth_inverts_iteration() {
        let s = enumerate_schemes(&[2, 1, 1]);
        for (n, scheme) in s.iter().enumerate().step_by(37) {
            assert_eq!(s.nth(n as u128), Some(scheme));
        }
        assert_eq!(s.nth(s.count().unwrap()), None);
    }

    #[test]
    fn lookup_is_role_symmetric() {
        let s = enumerate_schemes(&[2, 3]);
        for scheme in s.iter().step_by(11) {
            for i in 0..2 {
                for j in 0..3 {
                    let ab = s.lookup(&scheme, DemandId(0), i, DemandId(1), j);
                    let ba = s.lookup(&scheme, DemandId(1), j, DemandId(0), i);
                    assert_eq!(ab, ba.swapped());
                }
            }
        }
    }

    #[test]
    fn describe_format() {
        let s = enumerate_schemes(&[2, 1]);
        let line = s.describe(&s.nth(0).unwrap());
        assert_eq!(line, "0:1 A=-,B=-,C=-,D=0.1 | A=-,B=-,C=-,D=0");
    }
}
