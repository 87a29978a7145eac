//! Seeded instance families.
//!
//! Instances are planted: every demand unit walks a random monotone lattice
//! path (rightward or downward) between boundary vertices of a grid, and the
//! arc capacities are the numbers of walks using each arc. The supply graph
//! is the union of the walks, so the Eulerian condition holds by
//! construction. Optionally, half of the instances then rotate targets between
//! demands of equal request, which keeps the condition but usually breaks
//! feasibility.

use std::collections::BTreeMap;

use eulerflow_core::embedding::trace_faces;
use eulerflow_core::{ArcId, Demand, EmbeddedDigraph, FaceKey, Instance, VertexId};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::format::InstanceFile;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridParams {
    pub width: u32,
    pub height: u32,
    /// Number of demands.
    pub k: u32,
    /// Request of every demand.
    pub r: u32,
    /// Draw sources near the top-left corner and targets near the
    /// bottom-right one, so that walks run across the whole grid.
    pub corners: bool,
    /// Rotate targets between demands of equal request half of the time.
    pub scramble: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("a {width}x{height} grid has no two distinct boundary vertices in monotone position")]
    TooSmall { width: u32, height: u32 },
    #[error("k and r must be positive")]
    Empty,
    #[error("no connected instance found after {attempts} attempts")]
    Disconnected { attempts: u32 },
}

type Cell = (u32, u32);

struct Plant {
    height: u32,
    /// Walk count per grid arc, keyed by (tail cell, head cell).
    load: BTreeMap<(Cell, Cell), u32>,
    demands: Vec<(Cell, Cell, u32)>,
}

fn pick_endpoints(rng: &mut ChaCha8Rng, p: &GridParams) -> Option<(Cell, Cell)> {
    let (w, h) = (p.width, p.height);
    let near = |c: Cell, corner: Cell| {
        !p.corners || (c.0.abs_diff(corner.0) <= w.div_ceil(4) && c.1.abs_diff(corner.1) <= h.div_ceil(4))
    };
    let starts: Vec<Cell> = (0..w).map(|x| (x, 0)).chain((1..h).map(|y| (0, y))).collect();
    let ends: Vec<Cell> = (0..w).map(|x| (x, h - 1)).chain((0..h - 1).map(|y| (w - 1, y))).collect();
    let after = |s: Cell, t: Cell| t != s && t.0 >= s.0 && t.1 >= s.1;
    let sources: Vec<Cell> = starts
        .iter()
        .copied()
        .filter(|&c| near(c, (0, 0)) && ends.iter().any(|&t| after(c, t)))
        .collect();
    let &s = sources.choose(rng)?;
    let mut targets: Vec<Cell> = ends.iter().copied().filter(|&t| after(s, t) && near(t, (w - 1, h - 1))).collect();
    if targets.is_empty() {
        targets = ends.iter().copied().filter(|&t| after(s, t)).collect();
    }
    let &t = targets.choose(rng)?;
    Some((s, t))
}

fn walk(rng: &mut ChaCha8Rng, s: Cell, t: Cell, load: &mut BTreeMap<(Cell, Cell), u32>) {
    let (mut right, mut down) = (t.0 - s.0, t.1 - s.1);
    let mut c = s;
    while right + down > 0 {
        let go_right = rng.random_range(0..right + down) < right;
        let next = if go_right { (c.0 + 1, c.1) } else { (c.0, c.1 + 1) };
        if go_right {
            right -= 1;
        } else {
            down -= 1;
        }
        *load.entry((c, next)).or_insert(0) += 1;
        c = next;
    }
}

fn scramble(rng: &mut ChaCha8Rng, demands: &mut [(Cell, Cell, u32)]) {
    if !rng.random_bool(0.5) {
        return;
    }
    let mut by_request: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, d) in demands.iter().enumerate() {
        by_request.entry(d.2).or_default().push(i);
    }
    for group in by_request.values().filter(|g| g.len() >= 2) {
        let targets: Vec<Cell> = group.iter().map(|&i| demands[i].1).collect();
        let shifted = |j: usize| targets[(j + 1) % targets.len()];
        if group.iter().enumerate().all(|(j, &i)| demands[i].0 != shifted(j)) {
            for (j, &i) in group.iter().enumerate() {
                demands[i].1 = shifted(j);
            }
        }
    }
}

/// Rotation systems from a straight-line drawing: arcs sorted anticlockwise
/// by the angle at which they leave each vertex.
pub fn rotation_from_coords(coords: &[[f64; 2]], ends: &[(VertexId, VertexId)]) -> Vec<Vec<ArcId>> {
    let mut rot: Vec<Vec<(f64, ArcId)>> = vec![Vec::new(); coords.len()];
    for (i, &(t, h)) in ends.iter().enumerate() {
        let (pt, ph) = (coords[t.index()], coords[h.index()]);
        rot[t.index()].push(((ph[1] - pt[1]).atan2(ph[0] - pt[0]), ArcId(i as u32)));
        rot[h.index()].push(((pt[1] - ph[1]).atan2(pt[0] - ph[0]), ArcId(i as u32)));
    }
    rot.into_iter()
        .map(|mut r| {
            r.sort_by(|a, b| a.0.total_cmp(&b.0));
            r.into_iter().map(|(_, a)| a).collect()
        })
        .collect()
}

/// The unbounded face of a straight-line drawing: the only face whose
/// boundary, traced with the face on the left, has negative signed area.
pub fn outer_face_from_coords(g: &EmbeddedDigraph, coords: &[[f64; 2]]) -> FaceKey {
    let faces = trace_faces(g);
    let area = |f: &eulerflow_core::Face| {
        f.boundary
            .iter()
            .map(|d| {
                let (a, b) = match d.side {
                    eulerflow_core::Side::Left => (g.tail(d.arc), g.head(d.arc)),
                    eulerflow_core::Side::Right => (g.head(d.arc), g.tail(d.arc)),
                };
                let (p, q) = (coords[a.index()], coords[b.index()]);
                p[0] * q[1] - q[0] * p[1]
            })
            .sum::<f64>()
    };
    faces
        .faces
        .iter()
        .min_by(|x, y| area(x).total_cmp(&area(y)))
        .map(|f| f.key())
        .expect("a connected graph has a face")
}

impl Plant {
    fn build(&self) -> Option<InstanceFile> {
        let mut used: Vec<Cell> = Vec::new();
        for &(a, b) in self.load.keys() {
            used.push(a);
            used.push(b);
        }
        for &(s, t, _) in &self.demands {
            used.push(s);
            used.push(t);
        }
        used.sort_by_key(|c| (c.1, c.0));
        used.dedup();
        let id = |c: Cell| VertexId(used.binary_search_by_key(&(c.1, c.0), |u| (u.1, u.0)).unwrap() as u32);
        let coords: Vec<[f64; 2]> = used.iter().map(|c| [c.0 as f64, (self.height - 1 - c.1) as f64]).collect();
        let ends: Vec<(VertexId, VertexId)> = self.load.keys().map(|&(a, b)| (id(a), id(b))).collect();
        let caps: Vec<u32> = self.load.values().copied().collect();
        let rotation = rotation_from_coords(&coords, &ends);
        let graph = EmbeddedDigraph::new(used.len(), ends, rotation).ok()?;
        let demands = self.demands.iter().map(|&(s, t, r)| Demand { tail: id(t), head: id(s), request: r }).collect();
        let instance = Instance::new(graph, caps, demands).ok()?;
        let outer = outer_face_from_coords(&instance.graph, &coords);
        Some(InstanceFile { instance, coords: coords.into_iter().map(Some).collect(), outer_face: Some(outer) })
    }
}

const ATTEMPTS: u32 = 64;

fn planted(p: &GridParams, requests: impl Fn(&mut ChaCha8Rng) -> u32, seed: u64) -> Result<InstanceFile, GenError> {
    if p.k == 0 || p.r == 0 {
        return Err(GenError::Empty);
    }
    if p.width == 0 || p.height == 0 || p.width * p.height < 2 {
        return Err(GenError::TooSmall { width: p.width, height: p.height });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..ATTEMPTS {
        let mut plant = Plant { height: p.height, load: BTreeMap::new(), demands: Vec::new() };
        for _ in 0..p.k {
            let (s, t) = pick_endpoints(&mut rng, p).ok_or(GenError::TooSmall { width: p.width, height: p.height })?;
            let r = requests(&mut rng);
            for _ in 0..r {
                walk(&mut rng, s, t, &mut plant.load);
            }
            plant.demands.push((s, t, r));
        }
        if p.scramble {
            scramble(&mut rng, &mut plant.demands);
        }
        if let Some(file) = plant.build() {
            return Ok(file);
        }
    }
    Err(GenError::Disconnected { attempts: ATTEMPTS })
}

/// A planted grid instance with `k` demands of request `r` each.
pub fn gen_grid(p: &GridParams, seed: u64) -> Result<InstanceFile, GenError> {
    planted(p, |_| p.r, seed)
}

/// An `n x n` planted grid instance with `k` demands of request 1 or 2. All
/// terminals lie on the grid boundary, hence on the outer face, which the
/// file designates.
pub fn gen_outer_boundary(n: u32, k: u32, seed: u64) -> Result<InstanceFile, GenError> {
    let p = GridParams { width: n, height: n, k, r: 2, corners: false, scramble: true };
    planted(&p, |rng| rng.random_range(1..=2), seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::write_instance;
    use eulerflow_core::preprocess::{check_eulerian, normalize};

    #[test]
    fn smallest_grid_is_one_path() {
        let p = GridParams { width: 2, height: 2, k: 1, r: 1, corners: false, scramble: true };
        let f = gen_grid(&p, 7).unwrap();
        let d = f.instance.demands[0];
        assert_eq!(d.request, 1);
        assert!(check_eulerian(&f.instance));
        assert!(normalize(&f.instance).is_ok());
    }

    #[test]
    fn seeds_reproduce_bytes() {
        let p = GridParams { width: 4, height: 3, k: 2, r: 2, corners: false, scramble: true };
        for seed in 0..5 {
            assert_eq!(write_instance(&gen_grid(&p, seed).unwrap()), write_instance(&gen_grid(&p, seed).unwrap()));
        }
        assert_eq!(write_instance(&gen_outer_boundary(4, 2, 3).unwrap()), write_instance(&gen_outer_boundary(4, 2, 3).unwrap()));
    }

    #[test]
    fn degenerate_parameters_are_rejected() {
        let p = GridParams { width: 1, height: 1, k: 1, r: 1, corners: false, scramble: true };
        assert_eq!(gen_grid(&p, 0), Err(GenError::TooSmall { width: 1, height: 1 }));
        let p = GridParams { width: 3, height: 3, k: 0, r: 1, corners: false, scramble: true };
        assert_eq!(gen_grid(&p, 0), Err(GenError::Empty));
    }
}
