//! Cylinders of the vertical foliation, read off from level sets of the map.
//!
//! For a point `X` inside a T-edge, the preimage `f^-1(X)` is traced as a
//! polyline: its vertices are the crossings of `X` by the mesh-edge image
//! paths (one node per crossing, keyed by edge and crossing index), and each
//! non-singular triangle links the crossings on its sides in developed
//! order. A cylinder shows up as a single closed level loop for every level.

use thiserror::Error;

use super::quad_diff::{develop, QuadDiff};
use crate::flat_surface::{Point2, TriSurface};
use crate::foliation::{CylinderDecomposition, FoliationSpec, MeasuredCylinder, SingularVertex};
use crate::harmonic_solver::PLGraphMap;
use crate::metric_graph::{DirEdge, GraphPath};

/// Image paths shorter than this count as "no direction" in prong counts.
pub const PRONG_ZERO: f64 = 1e-10;

/// Relative spacing below which two vertex values share a level.
pub const LEVEL_MERGE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecompositionError {
    #[error("T-edge {t_edge} is not cylindrical: {reason}")]
    NonCylindrical { t_edge: usize, reason: String },
}

/// Crossings of `(edge, q)` by a path: (crossing index, fraction along the
/// path), in path order.
fn crossings(p: &GraphPath, edge: usize, q: f64) -> Vec<(usize, f64)> {
    let total = p.length();
    let mut out = Vec::new();
    let mut acc = 0.0;
    for s in p.segs() {
        if s.edge == edge {
            let (lo, hi) = if s.from < s.to { (s.from, s.to) } else { (s.to, s.from) };
            if lo < q && q < hi {
                let frac = (acc + (q - s.from).abs()) / total;
                out.push((out.len(), frac));
            }
        }
        acc += s.length();
    }
    out
}

/// Developed sub-intervals (offsets from the path start) spent inside the
/// open T-edge `edge`.
fn intervals_on(p: &GraphPath, edge: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut acc = 0.0;
    for s in p.segs() {
        let l = s.length();
        if s.edge == edge {
            out.push((acc, acc + l));
        }
        acc += l;
    }
    out
}

/// Fraction of a triangle's area where a linear function with corner
/// values `a <= b <= c` is at most `s`.
fn area_cdf(a: f64, b: f64, c: f64, s: f64) -> f64 {
    if s <= a {
        return 0.0;
    }
    if s >= c {
        return 1.0;
    }
    if s <= b {
        (s - a) * (s - a) / ((c - a) * (b - a))
    } else {
        1.0 - (c - s) * (c - s) / ((c - a) * (c - b))
    }
}

struct Level {
    q: f64,
    hits_singular: bool,
    components: usize,
    bad_degree: bool,
    phi_length: f64,
    flat_length: f64,
}

struct Tri {
    u: Option<[f64; 3]>,
    chart: [Point2; 3],
    /// Per side: image path from corner k to corner k+1, mesh edge, and
    /// whether the side runs along the mesh edge's own direction.
    sides: [(GraphPath, usize, bool); 3],
    abs_phi: f64,
}

fn order3(u: [f64; 3]) -> [usize; 3] {
    let mut idx = [0, 1, 2];
    idx.sort_by(|&a, &b| u[a].total_cmp(&u[b]).then(a.cmp(&b)));
    idx
}

/// Side index and whether it runs from `a` to `b` (else `b` to `a`).
fn side_between(a: usize, b: usize) -> (usize, bool) {
    if (a + 1) % 3 == b {
        (a, true)
    } else {
        (b, false)
    }
}

fn lerp(p: Point2, q: Point2, t: f64) -> Point2 {
    [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn trace_level(s: &TriSurface, f: &PLGraphMap, tris: &[Tri], edge: usize, q: f64) -> Level {
    let per_edge: Vec<Vec<(usize, f64)>> = f.paths().iter().map(|p| crossings(p, edge, q)).collect();
    let mut offset = Vec::with_capacity(per_edge.len() + 1);
    offset.push(0);
    for c in &per_edge {
        offset.push(offset.last().unwrap() + c.len());
    }
    let n = *offset.last().unwrap();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut degree = vec![0usize; n];
    let mut level = Level {
        q,
        hits_singular: false,
        components: 0,
        bad_degree: false,
        phi_length: 0.0,
        flat_length: 0.0,
    };
    let mut phi_parts = Vec::new();
    let mut flat_parts = Vec::new();

    for (t, tri) in tris.iter().enumerate() {
        let Some(u) = tri.u else {
            if (0..3).any(|k| !per_edge[s.triangle_edges()[t][k]].is_empty()) {
                level.hits_singular = true;
            }
            continue;
        };
        // crossings of side a->b as (node id, point in the chart)
        let side_list = |a: usize, b: usize| -> Vec<(usize, Point2)> {
            let (k, along) = side_between(a, b);
            let (_, e, fwd) = &tri.sides[k];
            let mut list: Vec<(usize, Point2)> = per_edge[*e]
                .iter()
                .map(|&(i, frac)| {
                    let t_side = if *fwd { frac } else { 1.0 - frac };
                    (offset[*e] + i, lerp(tri.chart[k], tri.chart[(k + 1) % 3], t_side))
                })
                .collect();
            // order along corner k -> k+1
            if !*fwd {
                list.reverse();
            }
            if !along {
                list.reverse();
            }
            list
        };
        let [lo, mid, hi] = order3(u);
        let long = side_list(lo, hi);
        let mut short = side_list(lo, mid);
        short.extend(side_list(mid, hi));
        if long.len() != short.len() {
            level.bad_degree = true;
            continue;
        }
        let root = tri.abs_phi.sqrt();
        for ((na, pa), (nb, pb)) in long.iter().zip(&short) {
            degree[*na] += 1;
            degree[*nb] += 1;
            let (ra, rb) = (find(&mut parent, *na), find(&mut parent, *nb));
            parent[ra] = rb;
            let len = (pa[0] - pb[0]).hypot(pa[1] - pb[1]);
            flat_parts.push(len);
            phi_parts.push(root * len);
        }
    }
    if degree.iter().any(|&d| d != 2) {
        level.bad_degree = true;
    }
    level.components = (0..n).filter(|&x| find(&mut parent, x) == x).count();
    level.phi_length = crate::exact::fsum(&phi_parts);
    level.flat_length = crate::exact::fsum(&flat_parts);
    level
}

fn phi_area(tris: &[Tri], f: &PLGraphMap, s: &TriSurface, edge: usize) -> f64 {
    let g = f.graph();
    let mut parts = Vec::new();
    for (t, tri) in tris.iter().enumerate() {
        let Some(u) = tri.u else { continue };
        let [lo, mid, hi] = order3(u);
        let (a, b, c) = (u[lo], u[mid], u[hi]);
        let frac = if c - a <= 0.0 {
            let p = f.image(s.triangles()[t][lo]);
            if p.edge == edge && g.vertex_at(p).is_none() {
                1.0
            } else {
                0.0
            }
        } else {
            let (k, along) = side_between(lo, hi);
            let p = if along { tri.sides[k].0.clone() } else { tri.sides[k].0.inverse(g) };
            intervals_on(&p, edge)
                .into_iter()
                .map(|(x, y)| area_cdf(a, b, c, a + y) - area_cdf(a, b, c, a + x))
                .sum()
        };
        parts.push(tri.abs_phi * s.triangle_area(t) * frac);
    }
    crate::exact::fsum(&parts)
}

pub fn cylinder_decomposition(
    f: &PLGraphMap,
    q: &QuadDiff,
    fol: &FoliationSpec,
) -> Result<CylinderDecomposition, DecompositionError> {
    let s = f.surface();
    let g = f.graph();
    let tris: Vec<Tri> = (0..s.triangle_count())
        .map(|t| {
            let side = |k: usize| {
                let d = s.half_edge_dir(3 * t + k);
                (f.dir_path(d), d.edge, d.forward)
            };
            Tri {
                u: q.phi[t].and_then(|_| develop(f, t)),
                chart: s.chart(t),
                sides: [side(0), side(1), side(2)],
                abs_phi: q.phi[t].map_or(0.0, |p| p.norm()),
            }
        })
        .collect();

    let mut cylinders = Vec::new();
    for (j, cyl) in fol.cylinders().iter().enumerate() {
        let h = g.len(j);
        let mut values: Vec<f64> = vec![0.0, h];
        values.extend(f.images().iter().filter(|p| p.edge == j && g.vertex_at(**p).is_none()).map(|p| p.t));
        values.sort_by(f64::total_cmp);
        // values closer than LEVEL_MERGE * h are one level; sampling between
        // them would only see round-off
        let mut gaps = Vec::new();
        for w in values.windows(2) {
            if w[1] - w[0] > LEVEL_MERGE * h {
                gaps.push(0.5 * (w[0] + w[1]));
            }
        }
        let levels: Vec<Level> = gaps.into_iter().map(|q| trace_level(s, f, &tris, j, q)).collect();
        let non_cylindrical = |reason: String| DecompositionError::NonCylindrical { t_edge: j, reason };
        let clean: Vec<&Level> = levels.iter().filter(|l| !l.hits_singular).collect();
        if clean.is_empty() {
            return Err(non_cylindrical("every level meets a singular triangle".into()));
        }
        if let Some(l) = clean.iter().find(|l| l.bad_degree) {
            return Err(non_cylindrical(format!("level {} does not close up", l.q)));
        }
        let best = clean
            .iter()
            .min_by(|a, b| (a.q - 0.5 * h).abs().total_cmp(&(b.q - 0.5 * h).abs()).then(a.q.total_cmp(&b.q)))
            .unwrap();
        if best.components != 1 {
            return Err(non_cylindrical(format!("level {} has {} components", best.q, best.components)));
        }
        // levels split into several loops next to the critical leaves
        let split: Vec<f64> = clean.iter().filter(|l| l.components != 1).map(|l| l.q).collect();
        let area = phi_area(&tris, f, s, j);
        cylinders.push(MeasuredCylinder {
            t_edge: j,
            core_label: cyl.core.label.clone(),
            height: area / best.phi_length,
            circumference: best.phi_length,
            flat_circumference: best.flat_length,
            level: best.q,
            split_levels: split,
        });
    }

    let singular_set = prongs(f)
        .into_iter()
        .enumerate()
        .filter(|&(_, k)| k >= 3)
        .map(|(vertex, prongs)| SingularVertex { vertex, prongs })
        .collect();
    Ok(CylinderDecomposition { surface_hash: fol.surface_hash().to_string(), cylinders, singular_set })
}

/// Number of level-set branches at each vertex: direction changes of the
/// image germs around the vertex link, skipping neighbours mapped to the
/// same point.
pub fn prongs(f: &PLGraphMap) -> Vec<usize> {
    let s = f.surface();
    (0..s.vertex_count())
        .map(|v| {
            let germs: Vec<DirEdge> = s
                .star(v)
                .iter()
                .filter_map(|&h| {
                    let p = f.dir_path(s.half_edge_dir(h));
                    if p.length() <= PRONG_ZERO {
                        None
                    } else {
                        Some(p.segs()[0].dir())
                    }
                })
                .collect();
            let m = germs.len();
            (0..m).filter(|&i| germs[i] != germs[(i + 1) % m]).count()
        })
        .collect()
}
