//! `strebel report`: SVG plots of a solved run.
//!
//! - `levels.svg`: level sets of the map over the polygon model, one colour
//!   per cylinder; grey triangles straddle a vertex of the graph.
//! - `leaf_space.svg`: the target graph with edge lengths.
//! - `convergence.svg`: energy and largest move per sweep.

use std::fmt::Write as _;
use std::path::Path;

use strebel::flat_surface::{Point2, SurfaceDesc, TriSurface};
use strebel::harmonic_solver::{MapFile, PLGraphMap};
use strebel::io::{read_json, surface_hash};
use strebel::metric_graph::{GraphFile, MetricGraph};

use crate::{create_dir, write_text, CmdResult, Fail};

const PALETTE: [&str; 8] = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1", "#76b7b2", "#edc948", "#9c755f"];
const LEVELS_PER_EDGE: usize = 8;
const WIDTH: f64 = 640.0;

fn header(w: f64, h: f64, hashes: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">\n<!-- {hashes} -->\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

/// Values of the map at the three corners of `t`, developed along a single
/// graph edge; `None` if the corner images are not all on one edge.
fn corner_values(f: &PLGraphMap, t: usize) -> Option<(usize, [f64; 3])> {
    let s = f.surface();
    let g = f.graph();
    let p01 = f.dir_path(s.half_edge_dir(3 * t));
    let p02 = f.dir_path(s.half_edge_dir(3 * t + 2)).inverse(g);
    let segs = p01.segs().iter().chain(p02.segs());
    let mut edge = None;
    for sg in segs.clone() {
        if *edge.get_or_insert(sg.edge) != sg.edge {
            return None;
        }
    }
    let p0 = p01.start();
    let edge = edge.unwrap_or(p0.edge);
    let start = p01
        .segs()
        .first()
        .or(p02.segs().first())
        .map(|sg| sg.from)
        .or_else(|| g.coordinate_on(p0, edge, true))?;
    let disp = |p: &strebel::metric_graph::GraphPath| p.segs().iter().map(|sg| sg.to - sg.from).sum::<f64>();
    // only displacements matter: at a loop vertex p02 may leave from the
    // other end of the edge
    Some((edge, [start, start + disp(&p01), start + disp(&p02)]))
}

fn level_svg(f: &PLGraphMap, layout: &[[Point2; 3]], hashes: &str) -> String {
    let pts = layout.iter().flatten();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in pts {
        x0 = x0.min(p[0]);
        y0 = y0.min(p[1]);
        x1 = x1.max(p[0]);
        y1 = y1.max(p[1]);
    }
    let margin = 20.0;
    let scale = (WIDTH - 2.0 * margin) / (x1 - x0).max(y1 - y0);
    let height = (y1 - y0) * scale + 2.0 * margin;
    let map = |p: Point2| (margin + (p[0] - x0) * scale, height - margin - (p[1] - y0) * scale);
    let mut out = header(WIDTH, height, hashes);
    let mut lines = String::new();
    let g = f.graph();
    for (t, tri) in layout.iter().enumerate() {
        let c: Vec<(f64, f64)> = tri.iter().map(|&p| map(p)).collect();
        let vals = corner_values(f, t);
        let fill = vals.map_or("#cccccc", |(e, _)| PALETTE[e % PALETTE.len()]);
        let _ = writeln!(
            out,
            "<polygon points=\"{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}\" fill=\"{fill}\" fill-opacity=\"0.55\" stroke=\"#ffffff\" stroke-width=\"0.3\"/>",
            c[0].0, c[0].1, c[1].0, c[1].1, c[2].0, c[2].1
        );
        let Some((e, u)) = vals else { continue };
        let step = g.len(e) / LEVELS_PER_EDGE as f64;
        let (lo, hi) = (u[0].min(u[1]).min(u[2]), u[0].max(u[1]).max(u[2]));
        if hi - lo <= 0.0 {
            continue;
        }
        let mut k = (lo / step).ceil() as i64;
        while (k as f64) * step <= hi {
            let q = k as f64 * step;
            let mut hits = Vec::new();
            for i in 0..3 {
                let j = (i + 1) % 3;
                let (a, b) = (u[i], u[j]);
                if (a - q) * (b - q) < 0.0 || (a == q && b != q) {
                    let s = (q - a) / (b - a);
                    hits.push((c[i].0 + s * (c[j].0 - c[i].0), c[i].1 + s * (c[j].1 - c[i].1)));
                }
            }
            if hits.len() >= 2 {
                let _ = writeln!(
                    lines,
                    "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"0.8\"/>",
                    hits[0].0, hits[0].1, hits[1].0, hits[1].1
                );
            }
            k += 1;
        }
    }
    out.push_str(&lines);
    out.push_str("</svg>\n");
    out
}

fn graph_svg(g: &MetricGraph, hashes: &str) -> String {
    let (w, h) = (WIDTH, 480.0);
    let (cx, cy, r) = (w / 2.0, h / 2.0, 150.0);
    let n = g.vertex_count();
    let pos: Vec<(f64, f64)> = (0..n)
        .map(|v| {
            if n == 1 {
                return (cx, cy);
            }
            let a = std::f64::consts::TAU * v as f64 / n as f64;
            (cx + r * a.cos(), cy + r * a.sin())
        })
        .collect();
    let mut out = header(w, h, hashes);
    let mut loops = vec![0usize; n];
    let mut pairs = std::collections::HashMap::new();
    for (j, e) in g.edges().iter().enumerate() {
        let color = PALETTE[j % PALETTE.len()];
        let label = format!("e{j}: {:.4}", e.length);
        let (lx, ly);
        if e.tail == e.head {
            let k = loops[e.tail];
            loops[e.tail] += 1;
            let (vx, vy) = pos[e.tail];
            let a = std::f64::consts::TAU * (k as f64 / 4.0 + 0.125) + (vy - cy).atan2(vx - cx);
            let rr = 40.0 + 12.0 * (k / 4) as f64;
            let (ox, oy) = (vx + rr * a.cos(), vy + rr * a.sin());
            let _ = writeln!(
                out,
                "<circle cx=\"{ox:.1}\" cy=\"{oy:.1}\" r=\"{rr:.1}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"3\"/>"
            );
            (lx, ly) = (ox + rr * a.cos(), oy + rr * a.sin());
        } else {
            let key = (e.tail.min(e.head), e.tail.max(e.head));
            let k = *pairs.entry(key).and_modify(|k| *k += 1).or_insert(0usize);
            let (a, b) = (pos[e.tail], pos[e.head]);
            let (mx, my) = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
            let (dx, dy) = (b.0 - a.0, b.1 - a.1);
            let len = dx.hypot(dy).max(1.0);
            let bend = 30.0 * k as f64 * if k % 2 == 0 { 1.0 } else { -1.0 };
            let (qx, qy) = (mx - dy / len * bend, my + dx / len * bend);
            let _ = writeln!(
                out,
                "<path d=\"M {:.1} {:.1} Q {qx:.1} {qy:.1} {:.1} {:.1}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"3\"/>",
                a.0, a.1, b.0, b.1
            );
            (lx, ly) = (qx, qy);
        }
        let _ = writeln!(out, "<text x=\"{lx:.1}\" y=\"{ly:.1}\" font-family=\"sans-serif\" font-size=\"13\">{label}</text>");
    }
    for (v, (x, y)) in pos.iter().enumerate() {
        let _ = writeln!(out, "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"5\" fill=\"black\"/>");
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\">v{v} ({})</text>",
            x + 8.0,
            y - 8.0,
            g.valence(v)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// `sweep,E,max_disp` rows.
fn parse_log(text: &str) -> Vec<(f64, f64, f64)> {
    text.lines()
        .skip(1)
        .filter_map(|l| {
            let mut it = l.split(',').map(|x| x.trim().parse::<f64>());
            Some((it.next()?.ok()?, it.next()?.ok()?, it.next()?.ok()?))
        })
        .collect()
}

fn polyline(points: &[(f64, f64)], x: (f64, f64, f64, f64), y: (f64, f64, f64, f64), color: &str) -> String {
    // (data lo, data hi, pixel lo, pixel hi) per axis
    let sx = |v: f64| x.2 + (v - x.0) / (x.1 - x.0).max(f64::MIN_POSITIVE) * (x.3 - x.2);
    let sy = |v: f64| y.2 + (v - y.0) / (y.1 - y.0).max(f64::MIN_POSITIVE) * (y.3 - y.2);
    let pts: Vec<String> = points.iter().map(|&(a, b)| format!("{:.2},{:.2}", sx(a), sy(b))).collect();
    format!("<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n", pts.join(" "))
}

fn convergence_svg(rows: &[(f64, f64, f64)], hashes: &str) -> String {
    let (w, h) = (WIDTH, 420.0);
    let mut out = header(w, h, hashes);
    let last = rows.last().map_or(1.0, |r| r.0).max(1.0);
    let energy: Vec<(f64, f64)> = rows.iter().map(|r| (r.0, r.1)).collect();
    let moves: Vec<(f64, f64)> = rows.iter().skip(1).filter(|r| r.2 > 0.0).map(|r| (r.0, r.2.log10())).collect();
    let range = |v: &[(f64, f64)]| {
        let lo = v.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let hi = v.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        if lo == hi {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    };
    let panels = [("energy", &energy, 20.0, 190.0, PALETTE[0]), ("log10 largest move", &moves, 230.0, 400.0, PALETTE[3])];
    for (name, data, top, bottom, color) in panels {
        let _ = writeln!(
            out,
            "<rect x=\"60\" y=\"{top}\" width=\"{:.0}\" height=\"{:.0}\" fill=\"none\" stroke=\"#888\"/>",
            w - 80.0,
            bottom - top
        );
        if data.is_empty() {
            continue;
        }
        let (lo, hi) = range(data);
        out.push_str(&polyline(data, (0.0, last, 60.0, w - 20.0), (lo, hi, bottom, top), color));
        let _ = writeln!(
            out,
            "<text x=\"64\" y=\"{:.0}\" font-family=\"sans-serif\" font-size=\"12\">{name}: {hi:.6e} .. {lo:.6e}</text>",
            top + 14.0
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.0}\" y=\"415\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">sweep (0 .. {last})</text>",
        w - 20.0
    );
    out.push_str("</svg>\n");
    out
}

pub fn run(artifacts: &Path, out: &Path) -> CmdResult {
    let need = ["surface.json", "graph.json", "map.json"];
    if need.iter().any(|n| !artifacts.join(n).is_file()) {
        log::warn!("{}: no run artifacts (need {}); nothing to do", artifacts.display(), need.join(", "));
        eprintln!("warning: {}: no run artifacts; nothing to do", artifacts.display());
        return Ok(());
    }
    let desc: SurfaceDesc = read_json(&artifacts.join("surface.json")).map_err(crate::io_input)?;
    let surface = std::sync::Arc::new(TriSurface::build(&desc).map_err(|e| Fail::Input(e.into()))?);
    let gfile: GraphFile = read_json(&artifacts.join("graph.json")).map_err(crate::io_input)?;
    let graph = std::sync::Arc::new(MetricGraph::from_file(&gfile).map_err(|e| Fail::Input(e.into()))?);
    let mfile: MapFile = read_json(&artifacts.join("map.json")).map_err(crate::io_input)?;
    let map = PLGraphMap::from_file(surface.clone(), graph.clone(), &mfile).map_err(|e| Fail::Input(e.into()))?;
    let hashes = format!("surface {} graph {}", surface_hash(&surface), graph.content_hash());
    create_dir(out)?;
    match surface.layout() {
        Some(layout) => write_text(&out.join("levels.svg"), &level_svg(&map, layout, &hashes))?,
        None => log::warn!("surface has no layout; skipping levels.svg"),
    }
    write_text(&out.join("leaf_space.svg"), &graph_svg(&graph, &hashes))?;
    match std::fs::read_to_string(artifacts.join("log.csv")) {
        Ok(text) => write_text(&out.join("convergence.svg"), &convergence_svg(&parse_log(&text), &hashes))?,
        Err(_) => log::warn!("no log.csv; skipping convergence.svg"),
    }
    println!("wrote SVG plots to {}", out.display());
    Ok(())
}
