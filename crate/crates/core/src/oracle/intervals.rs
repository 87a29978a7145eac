//! Interval structure of uncrossed solutions.
//!
//! Paths of a demand are indexed by the position of their first arc in the
//! rotation at the source, starting from the arc with smallest id (the order
//! the solver uses). For two demands, the crossing pairs form `I1 x I2`
//! together with the product of the complements, for cyclic intervals `I1`,
//! `I2`. For a cycle `QR^-1` formed by consecutive paths of one demand, the
//! paths of another demand going to its left at their first common vertex
//! form a cyclic interval, and so do those going to its right.

use alloc::vec::Vec;
use thiserror::Error;

use super::paths::{behaviour_at, Traversal};
pub use crate::cyclic::CyclicInterval;
use crate::embedding::{classify_positions, Behaviour, EmbeddedDigraph};
use crate::ids::{ArcId, DemandId};
use crate::scheme::{behaviour_lookup, partitions_of, BehaviourPair, PartitionPair};
use crate::solver::Solution;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IntervalViolation {
    #[error("crossings between {first} and {second} are not a product of intervals")]
    Crossing { first: DemandId, second: DemandId },
    #[error("paths of {demand} going {side:?} of the cycle formed by paths {cycle:?} of {cycle_demand} are not an interval")]
    NotInterval { demand: DemandId, cycle_demand: DemandId, cycle: (usize, usize), side: Behaviour },
    #[error("no pair of interval partitions reproduces the first meetings of {first} and {second}")]
    NoMatchingPartition { first: DemandId, second: DemandId },
    #[error("no side scheme reproduces the first meetings of {first} and {second}")]
    NoMatchingSides { first: DemandId, second: DemandId },
}

/// Paths of one demand in rotation order at their common origin, as
/// indices into `paths`.
pub fn rotation_order(g: &EmbeddedDigraph, paths: &[Vec<ArcId>]) -> Vec<usize> {
    let Some(s) = paths.iter().find_map(|p| p.first().map(|&a| g.tail(a))) else {
        return (0..paths.len()).collect();
    };
    let rot = g.rotation(s);
    let base = rot.iter().enumerate().min_by_key(|(_, &a)| a).map(|(i, _)| i).unwrap_or(0);
    let key = |p: &Vec<ArcId>| p.first().and_then(|&a| g.position(s, a)).map(|i| (i + rot.len() - base) % rot.len());
    let mut idx: Vec<usize> = (0..paths.len()).collect();
    idx.sort_by_key(|&i| key(&paths[i]));
    idx
}

fn ordered(g: &EmbeddedDigraph, sol: &Solution) -> Vec<Vec<Traversal>> {
    sol.paths
        .iter()
        .map(|ps| rotation_order(g, ps).into_iter().map(|i| Traversal::new(g, &ps[i])).collect())
        .collect()
}

fn crosses_anywhere(g: &EmbeddedDigraph, p: &Traversal, q: &Traversal) -> bool {
    p.common(q).any(|w| behaviour_at(g, p, q, w) == Some(Behaviour::Cross))
}

/// Intervals `(I1, I2)` explaining the crossings between demands `h1` and `h2`.
pub fn crossing_intervals(
    g: &EmbeddedDigraph,
    sol: &Solution,
    h1: DemandId,
    h2: DemandId,
) -> Option<(CyclicInterval, CyclicInterval)> {
    let paths = ordered(g, sol);
    intervals_for(g, &paths[h1.index()], &paths[h2.index()])
}

fn intervals_for(g: &EmbeddedDigraph, ps: &[Traversal], qs: &[Traversal]) -> Option<(CyclicInterval, CyclicInterval)> {
    let cross: Vec<Vec<bool>> = ps.iter().map(|p| qs.iter().map(|q| crosses_anywhere(g, p, q)).collect()).collect();
    let (r1, r2) = (ps.len() as u32, qs.len() as u32);
    for i1 in CyclicInterval::all(r1) {
        for i2 in CyclicInterval::all(r2) {
            let fits = (0..r1).all(|i| (0..r2).all(|j| cross[i as usize][j as usize] == (i1.contains(i) == i2.contains(j))));
            if fits {
                return Some((i1, i2));
            }
        }
    }
    None
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum CycleSide {
    Side(Behaviour),
    /// No common vertex with the cycle.
    Absent,
    /// The first common vertex lies on both paths of the cycle, where the
    /// cycle passes twice, or is an endpoint of the path.
    Ambiguous,
}

/// Behaviour of `p` relative to the cycle `q r^-1` at their first common vertex.
fn side_of_cycle(g: &EmbeddedDigraph, p: &Traversal, q: &Traversal, r: &Traversal) -> CycleSide {
    let Some(v) = p.vertices.iter().copied().find(|&w| q.contains(w) || r.contains(w)) else {
        return CycleSide::Absent;
    };
    if q.contains(v) && r.contains(v) {
        return CycleSide::Ambiguous;
    }
    // Along r^-1 the cycle enters by r's out-arc and leaves by its in-arc.
    let c = if q.contains(v) { q.through(v) } else { r.through(v).map(|(i, o)| (o, i)) };
    let (Some((pi, po)), Some((ci, co))) = (p.through(v), c) else { return CycleSide::Ambiguous };
    let pos = |a: ArcId| g.position(v, a).expect("arc at its endpoint");
    CycleSide::Side(classify_positions(g.degree(v), pos(pi), pos(po), pos(ci), pos(co)))
}

/// Whether some cyclic interval holds every `member` and no `excluded` index.
fn interval_around(member: &[bool], excluded: &[bool]) -> bool {
    let r = member.len() as u32;
    CyclicInterval::all(r).into_iter().any(|iv| {
        (0..r).all(|i| {
            let inside = iv.contains(i);
            (!member[i as usize] || inside) && (!excluded[i as usize] || !inside)
        })
    })
}

/// Check both interval properties for every pair of demands.
pub fn check_interval_structure(g: &EmbeddedDigraph, sol: &Solution) -> Result<(), IntervalViolation> {
    let paths = ordered(g, sol);
    let k = paths.len();
    for h1 in 0..k {
        for h2 in h1 + 1..k {
            if intervals_for(g, &paths[h1], &paths[h2]).is_none() {
                return Err(IntervalViolation::Crossing {
                    first: DemandId::from_index(h1),
                    second: DemandId::from_index(h2),
                });
            }
        }
    }
    for (hc, cyc) in paths.iter().enumerate() {
        let n = cyc.len();
        if n < 2 {
            continue;
        }
        for j in 0..n {
            let (q, r) = (&cyc[j], &cyc[(j + 1) % n]);
            for (h, ps) in paths.iter().enumerate() {
                if h == hc {
                    continue;
                }
                let sides: Vec<CycleSide> = ps.iter().map(|p| side_of_cycle(g, p, q, r)).collect();
                for side in [Behaviour::Left, Behaviour::Right] {
                    let member: Vec<bool> = sides.iter().map(|&s| s == CycleSide::Side(side)).collect();
                    let excluded: Vec<bool> =
                        sides.iter().zip(&member).map(|(&s, &m)| !m && s != CycleSide::Ambiguous).collect();
                    if !interval_around(&member, &excluded) {
                        return Err(IntervalViolation::NotInterval {
                            demand: DemandId::from_index(h),
                            cycle_demand: DemandId::from_index(hc),
                            cycle: (j, (j + 1) % n),
                            side,
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Behaviours of every pair of paths from `h1` and `h2` at their first common
/// vertex, `None` where they never meet at an inner vertex of both.
pub fn first_meetings(g: &EmbeddedDigraph, sol: &Solution, h1: DemandId, h2: DemandId) -> Vec<Vec<Option<BehaviourPair>>> {
    let paths = ordered(g, sol);
    meetings(g, &paths[h1.index()], &paths[h2.index()])
}

fn meetings(g: &EmbeddedDigraph, ps: &[Traversal], qs: &[Traversal]) -> Vec<Vec<Option<BehaviourPair>>> {
    ps.iter()
        .map(|p| {
            qs.iter()
                .map(|q| {
                    let v = p.first_common(q)?;
                    Some(BehaviourPair { first: behaviour_at(g, p, q, v)?, second: behaviour_at(g, q, p, v)? })
                })
                .collect()
        })
        .collect()
}

/// A pair of interval partitions whose matrix entries agree with every
/// observed first meeting between `h1` and `h2`.
pub fn matching_partitions(g: &EmbeddedDigraph, sol: &Solution, h1: DemandId, h2: DemandId) -> Option<PartitionPair> {
    let paths = ordered(g, sol);
    matching_for(g, &paths[h1.index()], &paths[h2.index()])
}

fn matching_for(g: &EmbeddedDigraph, ps: &[Traversal], qs: &[Traversal]) -> Option<PartitionPair> {
    let seen = meetings(g, ps, qs);
    let (r1, r2) = (ps.len() as u32, qs.len() as u32);
    let (parts1, parts2) = (partitions_of(r1), partitions_of(r2));
    for &first in &parts1 {
        for &second in &parts2 {
            let pp = PartitionPair { first, second };
            let agrees = (0..r1).all(|i| {
                (0..r2).all(|j| match seen[i as usize][j as usize] {
                    Some(b) => behaviour_lookup(&pp, i, j).ok() == Some(b),
                    None => true,
                })
            });
            if agrees {
                return Some(pp);
            }
        }
    }
    None
}

/// Every demand pair has a matching pair of interval partitions.
pub fn check_scheme_bridge(g: &EmbeddedDigraph, sol: &Solution) -> Result<(), IntervalViolation> {
    let paths = ordered(g, sol);
    for h1 in 0..paths.len() {
        for h2 in h1 + 1..paths.len() {
            if matching_for(g, &paths[h1], &paths[h2]).is_none() {
                return Err(IntervalViolation::NoMatchingPartition {
                    first: DemandId::from_index(h1),
                    second: DemandId::from_index(h2),
                });
            }
        }
    }
    Ok(())
}

/// Whether a side scheme reproduces the first meetings between `ps` and
/// `qs`: crossings as a two-interval pattern, and for each path the partners
/// it goes left of as a cyclic interval. The components are independent, so
/// each is checked on its own.
fn sides_match(g: &EmbeddedDigraph, ps: &[Traversal], qs: &[Traversal]) -> bool {
    let seen = meetings(g, ps, qs);
    let (r1, r2) = (ps.len() as u32, qs.len() as u32);
    let crossing = CyclicInterval::all(r1).into_iter().any(|i1| {
        CyclicInterval::all(r2).into_iter().any(|i2| {
            (0..r1).all(|i| {
                (0..r2).all(|j| match seen[i as usize][j as usize] {
                    Some(b) => (b == BehaviourPair::CROSS) == (i1.contains(i) == i2.contains(j)),
                    None => true,
                })
            })
        })
    });
    let left_of = |b: Option<BehaviourPair>, mine: bool, side: Behaviour| {
        b.is_some_and(|b| b != BehaviourPair::CROSS && (if mine { b.first } else { b.second }) == side)
    };
    let rows = seen.iter().all(|row| {
        let member: Vec<bool> = row.iter().map(|&b| left_of(b, true, Behaviour::Left)).collect();
        let excluded: Vec<bool> = row.iter().map(|&b| left_of(b, true, Behaviour::Right)).collect();
        interval_around(&member, &excluded)
    });
    let cols = (0..r2 as usize).all(|j| {
        let member: Vec<bool> = seen.iter().map(|row| left_of(row[j], false, Behaviour::Left)).collect();
        let excluded: Vec<bool> = seen.iter().map(|row| left_of(row[j], false, Behaviour::Right)).collect();
        interval_around(&member, &excluded)
    });
    crossing && rows && cols
}

/// Every demand pair has a side scheme agreeing with its first meetings.
pub fn check_side_bridge(g: &EmbeddedDigraph, sol: &Solution) -> Result<(), IntervalViolation> {
    let paths = ordered(g, sol);
    for h1 in 0..paths.len() {
        for h2 in h1 + 1..paths.len() {
            if !sides_match(g, &paths[h1], &paths[h2]) {
                return Err(IntervalViolation::NoMatchingSides {
                    first: DemandId::from_index(h1),
                    second: DemandId::from_index(h2),
                });
            }
        }
    }
    Ok(())
}
