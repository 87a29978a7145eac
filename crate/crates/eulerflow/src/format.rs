//! JSON instance and solution files.
//!
//! Canonical files list vertices, arcs and demands sorted by id, one element
//! per line, so that diffs stay readable and `write(parse(s)) == s` for every
//! canonical `s`.

use std::fmt::Write as _;

use eulerflow_core::embedding::{trace_faces, EmbeddingViolation};
use eulerflow_core::preprocess::InstanceError;
use eulerflow_core::{ArcId, Dart, Demand, EmbeddedDigraph, FaceKey, Instance, Side, Solution, VertexId};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An instance together with the optional drawing data of its file.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceFile {
    pub instance: Instance,
    pub coords: Vec<Option<[f64; 2]>>,
    /// Canonical key (smallest dart) of the designated outer face.
    pub outer_face: Option<FaceKey>,
}

impl InstanceFile {
    pub fn new(instance: Instance) -> Self {
        let n = instance.graph.vertex_count();
        Self { instance, coords: vec![None; n], outer_face: None }
    }

    /// All coordinates, if every vertex has one.
    pub fn all_coords(&self) -> Option<Vec<[f64; 2]>> {
        self.coords.iter().copied().collect()
    }
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

fn invalid(path: impl Into<String>, message: impl ToString) -> FormatError {
    FormatError::Invalid { path: path.into(), message: message.to_string() }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    vertices: Vec<RawVertex>,
    arcs: Vec<RawArc>,
    demands: Vec<RawDemand>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outer_face: Option<RawDart>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVertex {
    id: u32,
    rotation: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coord: Option<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArc {
    id: u32,
    tail: u32,
    head: u32,
    capacity: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDemand {
    id: u32,
    tail: u32,
    head: u32,
    request: u32,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawSide {
    Left,
    Right,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDart {
    arc: u32,
    side: RawSide,
}

fn syntax(e: serde_json::Error) -> FormatError {
    FormatError::Syntax { line: e.line(), column: e.column(), message: e.to_string() }
}

/// Sort elements by id and check that the ids are exactly `0..len`.
fn dense<T>(what: &str, mut items: Vec<T>, id: impl Fn(&T) -> u32) -> Result<Vec<T>, FormatError> {
    items.sort_by_key(|x| id(x));
    for (i, x) in items.iter().enumerate() {
        let got = id(x) as usize;
        if got < i {
            return Err(invalid(format!("{what}[id {got}]"), "duplicate id"));
        }
        if got > i {
            return Err(invalid(format!("{what}[id {i}]"), "missing id (ids must be 0..n)"));
        }
    }
    Ok(items)
}

fn vertex_ref(path: String, id: u32, n: usize) -> Result<VertexId, FormatError> {
    if (id as usize) < n {
        Ok(VertexId(id))
    } else {
        Err(invalid(path, format!("unknown vertex {id}")))
    }
}

fn embedding_path(e: &EmbeddingViolation) -> String {
    use EmbeddingViolation::*;
    match e {
        UnknownArc { vertex, .. }
        | NotIncident { vertex, .. }
        | DuplicateInRotation { vertex, .. }
        | RotationIncomplete { vertex, .. } => format!("vertices[id {}].rotation", vertex.0),
        Disconnected { vertex } => format!("vertices[id {}]", vertex.0),
        EndpointOutOfRange { arc } | Loop { arc } => format!("arcs[id {}]", arc.0),
        _ => "vertices".to_string(),
    }
}

pub fn parse_instance(text: &str) -> Result<InstanceFile, FormatError> {
    let raw: RawInstance = serde_json::from_str(text).map_err(syntax)?;
    let vertices = dense("vertices", raw.vertices, |v| v.id)?;
    let arcs = dense("arcs", raw.arcs, |a| a.id)?;
    let demands = dense("demands", raw.demands, |d| d.id)?;
    let n = vertices.len();
    let m = arcs.len();
    let mut ends = Vec::with_capacity(m);
    for a in &arcs {
        let tail = vertex_ref(format!("arcs[id {}].tail", a.id), a.tail, n)?;
        let head = vertex_ref(format!("arcs[id {}].head", a.id), a.head, n)?;
        ends.push((tail, head));
    }
    let mut rotation = Vec::with_capacity(n);
    for v in &vertices {
        if let Some(&bad) = v.rotation.iter().find(|&&a| a as usize >= m) {
            return Err(invalid(format!("vertices[id {}].rotation", v.id), format!("unknown arc {bad}")));
        }
        rotation.push(v.rotation.iter().map(|&a| ArcId(a)).collect());
    }
    let graph = EmbeddedDigraph::new(n, ends, rotation).map_err(|e| invalid(embedding_path(&e), e))?;
    let mut ds = Vec::with_capacity(demands.len());
    for d in &demands {
        let tail = vertex_ref(format!("demands[id {}].tail", d.id), d.tail, n)?;
        let head = vertex_ref(format!("demands[id {}].head", d.id), d.head, n)?;
        ds.push(Demand { tail, head, request: d.request });
    }
    let capacities = arcs.iter().map(|a| a.capacity).collect();
    let instance = Instance::new(graph, capacities, ds).map_err(|e| {
        let path = match &e {
            InstanceError::DemandLoop { demand } => format!("demands[id {}]", demand.0),
            _ => "demands".to_string(),
        };
        invalid(path, e)
    })?;
    let outer_face = match raw.outer_face {
        None => None,
        Some(d) => {
            if d.arc as usize >= m {
                return Err(invalid("outer_face.arc", format!("unknown arc {}", d.arc)));
            }
            let side = match d.side {
                RawSide::Left => Side::Left,
                RawSide::Right => Side::Right,
            };
            let faces = trace_faces(&instance.graph);
            let f = faces.face_of(Dart::new(ArcId(d.arc), side));
            Some(faces.faces[f].key())
        }
    };
    let coords = vertices.iter().map(|v| v.coord).collect();
    Ok(InstanceFile { instance, coords, outer_face })
}

fn json<T: Serialize>(x: &T) -> String {
    serde_json::to_string(x).expect("plain data serializes")
}

fn push_list(out: &mut String, name: &str, items: &[String], last: bool) {
    if items.is_empty() {
        let _ = write!(out, "  \"{name}\": []");
    } else {
        let _ = writeln!(out, "  \"{name}\": [");
        for (i, s) in items.iter().enumerate() {
            let sep = if i + 1 < items.len() { "," } else { "" };
            let _ = writeln!(out, "    {s}{sep}");
        }
        out.push_str("  ]");
    }
    out.push_str(if last { "\n" } else { ",\n" });
}

pub fn write_instance(file: &InstanceFile) -> String {
    let inst = &file.instance;
    let g = &inst.graph;
    let vertices: Vec<String> = g
        .vertices()
        .map(|v| {
            json(&RawVertex {
                id: v.0,
                rotation: g.rotation(v).iter().map(|a| a.0).collect(),
                coord: file.coords.get(v.index()).copied().flatten(),
            })
        })
        .collect();
    let arcs: Vec<String> = g
        .arcs()
        .map(|a| json(&RawArc { id: a.0, tail: g.tail(a).0, head: g.head(a).0, capacity: inst.capacity(a) }))
        .collect();
    let demands: Vec<String> = inst
        .demands
        .iter()
        .enumerate()
        .map(|(i, d)| json(&RawDemand { id: i as u32, tail: d.tail.0, head: d.head.0, request: d.request }))
        .collect();
    let outer = file.outer_face.map(|key| {
        let faces = trace_faces(g);
        let key = faces.faces[faces.face_of(key)].key();
        let side = match key.side {
            Side::Left => RawSide::Left,
            Side::Right => RawSide::Right,
        };
        json(&RawDart { arc: key.arc.0, side })
    });
    let mut out = String::from("{\n");
    push_list(&mut out, "vertices", &vertices, false);
    push_list(&mut out, "arcs", &arcs, false);
    push_list(&mut out, "demands", &demands, outer.is_none());
    if let Some(o) = outer {
        let _ = writeln!(out, "  \"outer_face\": {o}");
    }
    out.push_str("}\n");
    out
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolution {
    demands: Vec<RawDemandPaths>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDemandPaths {
    id: u32,
    paths: Vec<Vec<u32>>,
}

pub fn parse_solution(text: &str) -> Result<Solution, FormatError> {
    let raw: RawSolution = serde_json::from_str(text).map_err(syntax)?;
    let demands = dense("demands", raw.demands, |d| d.id)?;
    let paths = demands
        .into_iter()
        .map(|d| d.paths.into_iter().map(|p| p.into_iter().map(ArcId).collect()).collect())
        .collect();
    Ok(Solution { paths })
}

pub fn write_solution(sol: &Solution) -> String {
    let items: Vec<String> = sol
        .paths
        .iter()
        .enumerate()
        .map(|(i, ps)| {
            json(&RawDemandPaths { id: i as u32, paths: ps.iter().map(|p| p.iter().map(|a| a.0).collect()).collect() })
        })
        .collect();
    let mut out = String::from("{\n");
    push_list(&mut out, "demands", &items, true);
    out.push_str("}\n");
    out
}
