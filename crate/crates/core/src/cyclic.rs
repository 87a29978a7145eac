//! Cyclic orders and intervals.
//!
//! Positions are indices `0..n` read cyclically in the positive direction.
//! An interval `[a, c]` is the set of positions met when walking forward
//! from `a` to `c`, both included.

use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CyclicError {
    #[error("element is not in the cyclic order")]
    NotAnElement,
    #[error("duplicate element in cyclic order")]
    Duplicate,
    #[error("interval extremities must be distinct")]
    DegenerateInterval,
}

/// Number of forward steps from `from` to `to` in a cycle of length `n`.
#[inline]
pub fn forward_distance(n: usize, from: usize, to: usize) -> usize {
    debug_assert!(from < n && to < n);
    (to + n - from) % n
}

/// `b` lies on the forward walk from `a` to `c` (inclusive).
#[inline]
pub fn between(n: usize, a: usize, b: usize, c: usize) -> bool {
    forward_distance(n, a, b) <= forward_distance(n, a, c)
}

/// `b` lies on the forward walk from `a` to `c` and differs from both.
#[inline]
pub fn strictly_between(n: usize, a: usize, b: usize, c: usize) -> bool {
    let d = forward_distance(n, a, b);
    d != 0 && d < forward_distance(n, a, c)
}

/// A cyclic interval of `0..r`; `len == r` is the full set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CyclicInterval {
    pub r: u32,
    pub start: u32,
    pub len: u32,
}

impl CyclicInterval {
    pub fn contains(&self, i: u32) -> bool {
        (i + self.r - self.start) % self.r < self.len
    }

    /// Every cyclic interval of `0..r`, the empty and full ones once each.
    pub fn all(r: u32) -> Vec<CyclicInterval> {
        let mut out = vec![CyclicInterval { r, start: 0, len: 0 }];
        for len in 1..r {
            out.extend((0..r).map(|start| CyclicInterval { r, start, len }));
        }
        if r > 0 {
            out.push(CyclicInterval { r, start: 0, len: r });
        }
        out
    }
}

/// A finite family read cyclically ("consecutive" wraps from last to first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicOrder<T> {
    elements: Vec<T>,
}

impl<T: PartialEq> CyclicOrder<T> {
    pub fn new(elements: Vec<T>) -> Result<Self, CyclicError> {
        for (i, x) in elements.iter().enumerate() {
            if elements[..i].contains(x) {
                return Err(CyclicError::Duplicate);
            }
        }
        Ok(Self { elements })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.elements
    }

    pub fn position(&self, x: &T) -> Option<usize> {
        self.elements.iter().position(|e| e == x)
    }

    fn pos(&self, x: &T) -> Result<usize, CyclicError> {
        self.position(x).ok_or(CyclicError::NotAnElement)
    }

    /// Whether `b` appears in the run of consecutive elements from `a` to `c`.
    pub fn between(&self, a: &T, b: &T, c: &T) -> Result<bool, CyclicError> {
        let (a, b, c) = (self.pos(a)?, self.pos(b)?, self.pos(c)?);
        if a == c {
            return Err(CyclicError::DegenerateInterval);
        }
        Ok(between(self.len(), a, b, c))
    }

    pub fn strictly_between(&self, a: &T, b: &T, c: &T) -> Result<bool, CyclicError> {
        let (a, b, c) = (self.pos(a)?, self.pos(b)?, self.pos(c)?);
        if a == c {
            return Err(CyclicError::DegenerateInterval);
        }
        Ok(strictly_between(self.len(), a, b, c))
    }

    /// Successor in the cyclic order.
    pub fn next(&self, x: &T) -> Option<&T> {
        let i = self.position(x)?;
        self.elements.get((i + 1) % self.len())
    }
}

/// Whether `set` (a membership mask over `0..n`) is a cyclic interval.
/// The empty and the full set count as intervals.
pub fn is_cyclic_interval(set: &[bool]) -> bool {
    let n = set.len();
    if n == 0 {
        return true;
    }
    // An interval has at most one "entry" point: a member whose predecessor is not.
    let entries = (0..n).filter(|&i| set[i] && !set[(i + n - 1) % n]).count();
    entries <= 1
}
