//! Graphviz and SVG drawings of instances and solutions.

use std::fmt::Write as _;

use eulerflow_core::Solution;
use thiserror::Error;

use crate::format::InstanceFile;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("vertex {vertex} has no coordinates")]
pub struct MissingCoordinates {
    pub vertex: u32,
}

const PALETTE: [&str; 10] =
    ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"];

fn colour(h: usize) -> &'static str {
    PALETTE[h % PALETTE.len()]
}

/// One node per vertex and one edge per arc. With a solution, each arc also
/// gets one coloured edge per path using it; demands are drawn dashed from
/// target to source.
pub fn emit_dot(file: &InstanceFile, solution: Option<&Solution>) -> String {
    let inst = &file.instance;
    let g = &inst.graph;
    let mut out = String::from("digraph instance {\n  node [shape=circle, fontsize=10];\n");
    for v in g.vertices() {
        match file.coords.get(v.index()).copied().flatten() {
            Some([x, y]) => {
                let _ = writeln!(out, "  {} [label=\"{}\", pos=\"{x},{y}!\"];", v.0, v.0);
            }
            None => {
                let _ = writeln!(out, "  {} [label=\"{}\"];", v.0, v.0);
            }
        }
    }
    for a in g.arcs() {
        let (t, h) = g.ends(a);
        let _ = writeln!(out, "  {} -> {} [label=\"a{} c{}\", color=gray];", t.0, h.0, a.0, inst.capacity(a));
    }
    for (i, d) in inst.demands.iter().enumerate() {
        let _ = writeln!(
            out,
            "  {} -> {} [style=dashed, color=\"{}\", label=\"d{} r{}\", constraint=false];",
            d.tail.0,
            d.head.0,
            colour(i),
            i,
            d.request
        );
    }
    if let Some(sol) = solution {
        for (h, paths) in sol.paths.iter().enumerate() {
            for (k, p) in paths.iter().enumerate() {
                for &a in p {
                    let (t, hd) = g.ends(a);
                    let _ = writeln!(
                        out,
                        "  {} -> {} [color=\"{}\", penwidth=2, tooltip=\"d{h} path {k}\"];",
                        t.0,
                        hd.0,
                        colour(h)
                    );
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Straight-line drawing from the file's coordinates, solution paths as
/// coloured polylines offset slightly so that shared arcs stay visible.
pub fn emit_svg(file: &InstanceFile, solution: Option<&Solution>) -> Result<String, MissingCoordinates> {
    let g = &file.instance.graph;
    let coords: Vec<[f64; 2]> = g
        .vertices()
        .map(|v| file.coords.get(v.index()).copied().flatten().ok_or(MissingCoordinates { vertex: v.0 }))
        .collect::<Result<_, _>>()?;
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for &[x, y] in &coords {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let scale = 40.0;
    let pad = 20.0;
    // SVG's y axis points down.
    let px = |p: [f64; 2]| ((p[0] - x0) * scale + pad, (y1 - p[1]) * scale + pad);
    let (w, h) = ((x1 - x0) * scale + 2.0 * pad, (y1 - y0) * scale + 2.0 * pad);
    let mut out = String::new();
    let _ = writeln!(out, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">");
    for a in g.arcs() {
        let (t, hd) = g.ends(a);
        let ((ax, ay), (bx, by)) = (px(coords[t.index()]), px(coords[hd.index()]));
        let _ = writeln!(out, "  <line x1=\"{ax}\" y1=\"{ay}\" x2=\"{bx}\" y2=\"{by}\" stroke=\"#bbb\" stroke-width=\"1\"/>");
    }
    if let Some(sol) = solution {
        let mut lane = 0.0;
        for (hh, paths) in sol.paths.iter().enumerate() {
            for p in paths {
                let Some(&first) = p.first() else { continue };
                lane += 1.0;
                let off = (lane % 5.0 - 2.0) * 1.5;
                let mut pts = vec![px(coords[g.tail(first).index()])];
                pts.extend(p.iter().map(|&a| px(coords[g.head(a).index()])));
                let list: Vec<String> = pts.iter().map(|(x, y)| format!("{},{}", x + off, y + off)).collect();
                let _ = writeln!(
                    out,
                    "  <polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>",
                    list.join(" "),
                    colour(hh)
                );
            }
        }
    }
    for v in g.vertices() {
        let (x, y) = px(coords[v.index()]);
        let _ = writeln!(out, "  <circle cx=\"{x}\" cy=\"{y}\" r=\"4\" fill=\"black\"/>");
        let _ = writeln!(out, "  <text x=\"{}\" y=\"{}\" font-size=\"10\">{}</text>", x + 5.0, y - 5.0, v.0);
    }
    out.push_str("</svg>\n");
    Ok(out)
}
