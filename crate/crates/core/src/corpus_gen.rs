//! Surfaces with known Strebel differentials, built from unit squares.
//!
//! Squares are cut into `n x n` cells, each split along its rising diagonal
//! into two right isosceles triangles. Gluings identify boundary segments of
//! the square region; points are tracked on a doubled lattice (midpoints of
//! cell sides included) so edges are told apart by their midpoints.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flat_surface::{CurveClass, SurfaceDesc, SurfaceError, TriSurface};
use crate::foliation::{make_foliation, FoliationError, FoliationSpec};
use crate::harmonic_solver::PLGraphMap;
use crate::metric_graph::{build_leaf_space, GraphEdge, GraphPath, GraphPoint, LeafSpace, MetricGraph, Seg};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CorpusError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("horizontal permutation has {0} cycles; need exactly one")]
    NotOneCylinder(usize),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Foliation(#[from] FoliationError),
}

/// Closed-form data the pipeline should reproduce.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Oracle {
    /// Hopf coefficient in every triangle chart.
    pub phi: Complex64,
    pub energy: f64,
    pub heights: Vec<f64>,
    pub circumferences: Vec<f64>,
    /// Prong counts of the singular vertices.
    pub prongs: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub surface: Arc<TriSurface>,
    pub foliation: FoliationSpec,
    pub leaf_space: LeafSpace,
    /// The horizontal projection `y`, scaled per cylinder.
    pub oracle_map: PLGraphMap,
    pub oracle: Oracle,
    /// Curves transversal to all core curves, for the height identity.
    pub test_curves: Vec<String>,
}

type Pt = (i64, i64);

/// Square region with boundary gluings, in half-unit coordinates.
struct Tiling {
    squares: Vec<Pt>,
    /// Segment `p0 -> p1` is glued to `q0 -> q1` (both in half units).
    gluings: Vec<[Pt; 4]>,
}

struct Built {
    surface: TriSurface,
    /// A plane position per vertex (unit coordinates).
    position: Vec<[f64; 2]>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Steps of a lattice polyline.
fn poly(pts: &[Pt]) -> Vec<(Pt, Pt)> {
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Builds the mesh with `n` cells per unit. Curves are closed chains of
/// lattice steps in cell units (cell sides or rising diagonals); a step may
/// start at any glued copy of the previous step's end.
fn build_tiling(t: &Tiling, n: i64, curves: &[(&str, Vec<(Pt, Pt)>)]) -> Result<Built, CorpusError> {
    // doubled lattice: 2n points per unit, n per half unit
    let mut index: HashMap<Pt, usize> = HashMap::new();
    for &(x0, y0) in &t.squares {
        for i in 0..=2 * n {
            for j in 0..=2 * n {
                let p = (2 * n * x0 + i, 2 * n * y0 + j);
                let k = index.len();
                index.entry(p).or_insert(k);
            }
        }
    }
    let mut parent: Vec<usize> = (0..index.len()).collect();
    for g in &t.gluings {
        let [p0, p1, q0, q1] = g.map(|(x, y)| (x * n, y * n));
        let steps = (p1.0 - p0.0).abs().max((p1.1 - p0.1).abs());
        let dp = ((p1.0 - p0.0) / steps, (p1.1 - p0.1) / steps);
        let dq = ((q1.0 - q0.0) / steps, (q1.1 - q0.1) / steps);
        for k in 0..=steps {
            let a = index[&(p0.0 + k * dp.0, p0.1 + k * dp.1)];
            let b = index[&(q0.0 + k * dq.0, q0.1 + k * dq.1)];
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
    }
    let mut root = |p: Pt| -> usize {
        let i = *index.get(&p).unwrap_or_else(|| panic!("lattice point {p:?} outside the region"));
        find(&mut parent, i)
    };

    let cell = 1.0 / n as f64;
    let mut vertex_id: HashMap<usize, usize> = HashMap::new();
    let mut position: Vec<[f64; 2]> = Vec::new();
    let mut edge_id: HashMap<usize, usize> = HashMap::new();
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut triangles = Vec::new();
    let mut tri_edges = Vec::new();
    let mut layout = Vec::new();
    let unit = |p: Pt| [p.0 as f64 / (2 * n) as f64, p.1 as f64 / (2 * n) as f64];

    let mut vid = |p: Pt, root: &mut dyn FnMut(Pt) -> usize, position: &mut Vec<[f64; 2]>| -> usize {
        let r = root(p);
        let next = vertex_id.len();
        *vertex_id.entry(r).or_insert_with(|| {
            position.push(unit(p));
            next
        })
    };

    for &(x0, y0) in &t.squares {
        for cj in 0..n {
            for ci in 0..n {
                let (bx, by) = (2 * (n * x0 + ci), 2 * (n * y0 + cj));
                let c00 = (bx, by);
                let c10 = (bx + 2, by);
                let c11 = (bx + 2, by + 2);
                let c01 = (bx, by + 2);
                for tri in [[c00, c10, c11], [c11, c01, c00]] {
                    let ids = tri.map(|p| vid(p, &mut root, &mut position));
                    let mut te = [0; 3];
                    for k in 0..3 {
                        let (a, b) = (tri[k], tri[(k + 1) % 3]);
                        let mid = root(((a.0 + b.0) / 2, (a.1 + b.1) / 2));
                        let diagonal = a.0 != b.0 && a.1 != b.1;
                        let next = edges.len();
                        te[k] = *edge_id.entry(mid).or_insert_with(|| {
                            let len = if diagonal { cell * 2f64.sqrt() } else { cell };
                            edges.push((ids[k], ids[(k + 1) % 3], len));
                            next
                        });
                    }
                    triangles.push(ids);
                    tri_edges.push(te);
                    layout.push(tri.map(unit));
                }
            }
        }
    }

    let mut curve_map = BTreeMap::new();
    for (label, pts) in curves {
        let mut steps = Vec::new();
        for &(p, q) in pts {
            let va = vertex_id[&root((2 * p.0, 2 * p.1))];
            let vb = vertex_id[&root((2 * q.0, 2 * q.1))];
            let e = edge_id[&root((p.0 + q.0, p.1 + q.1))];
            steps.push(vec![va, vb, e]);
        }
        curve_map.insert(label.to_string(), steps);
    }

    let desc = SurfaceDesc {
        triangles,
        edge_lengths: edges,
        triangle_edges: Some(tri_edges),
        curves: curve_map,
        layout: Some(layout),
    };
    Ok(Built { surface: TriSurface::build(&desc)?, position })
}

/// Horizontal band `[bottom, top]` in the plane model whose core curve is
/// cylinder `index` of the foliation.
#[derive(Clone, Copy, Debug)]
struct Band {
    bottom: f64,
    top: f64,
    index: usize,
}

/// The y-projection: moves every vertex from its leaf-space image to its
/// height inside its band, scaled to the prescribed height.
fn projection_map(leaf: &LeafSpace, fol: &FoliationSpec, built_pos: &[[f64; 2]], band_of: impl Fn([f64; 2]) -> (Band, f64)) -> PLGraphMap {
    let mut f = leaf.projection.clone();
    let g = leaf.graph.clone();
    for (v, &pos) in built_pos.iter().enumerate() {
        let (band, y) = band_of(pos);
        let j = band.index;
        let len = g.len(j);
        let height = band.top - band.bottom;
        let scale = fol.cylinders()[j].height / height;
        let mid = 0.5 * (band.bottom + band.top);
        let eps = 1e-12;
        let r = if y > mid + eps && y < band.top - eps {
            let d = (band.top - y) * scale;
            GraphPath::from_segs(&g, g.point(j, len), vec![Seg { edge: j, from: len, to: len - d }])
        } else if y < mid - eps && y > band.bottom + eps {
            let d = (y - band.bottom) * scale;
            GraphPath::from_segs(&g, g.point(j, 0.0), vec![Seg { edge: j, from: 0.0, to: d }])
        } else {
            continue;
        };
        f.relocate_along(v, &r);
    }
    f
}

fn torus_tiling() -> Tiling {
    Tiling {
        squares: vec![(0, 0)],
        gluings: vec![[(0, 0), (0, 2), (2, 0), (2, 2)], [(0, 0), (2, 0), (0, 2), (2, 2)]],
    }
}

/// `n x n` grid on the unit square torus with horizontal core curve
/// `core` of height `h`. Also carries `parallel` (a disjoint parallel copy),
/// `meridian`, `diagonal` and `slope2` (crossing the core twice).
pub fn square_torus(n: usize, h: f64) -> Result<Generated, CorpusError> {
    if n < 2 {
        return Err(CorpusError::Precondition(format!("square_torus needs n >= 2, got {n}")));
    }
    let ni = n as i64;
    let jc = ni / 2;
    let row = |j: i64| (0..=ni).map(|i| (i, j)).collect::<Vec<_>>();
    // alternate diagonal and vertical steps; each step starts in the square
    let mut slope2 = Vec::new();
    let mut at = (0, 0);
    for k in 0..2 * ni {
        let d = if k % 2 == 0 { (1, 1) } else { (0, 1) };
        let p = (at.0 % ni, at.1 % ni);
        slope2.push((p, (p.0 + d.0, p.1 + d.1)));
        at = (p.0 + d.0, p.1 + d.1);
    }
    let curves = vec![
        ("core", poly(&row(jc))),
        ("parallel", poly(&row((jc + 1) % ni))),
        ("meridian", poly(&(0..=ni).map(|j| (0, j)).collect::<Vec<_>>())),
        ("diagonal", poly(&(0..=ni).map(|k| (k, k)).collect::<Vec<_>>())),
        ("slope2", slope2),
    ];
    let built = build_tiling(&torus_tiling(), ni, &curves)?;
    let surface = Arc::new(built.surface);
    let foliation = make_foliation(surface.clone(), vec![surface.curve("core").unwrap().clone()], vec![h])?;
    let leaf_space = build_leaf_space(&foliation)?;
    let yc = jc as f64 / n as f64;
    let oracle_map = projection_map(&leaf_space, &foliation, &built.position, |p| {
        // band centred on the core, wrapped onto [yc - 1/2, yc + 1/2]
        let mut y = p[1];
        if y > yc + 0.5 + 1e-12 {
            y -= 1.0;
        }
        if y < yc - 0.5 - 1e-12 {
            y += 1.0;
        }
        (Band { bottom: yc - 0.5, top: yc + 0.5, index: 0 }, y)
    });
    Ok(Generated {
        surface,
        foliation,
        leaf_space,
        oracle_map,
        oracle: Oracle {
            phi: Complex64::new(-h * h, 0.0),
            energy: 0.5 * h * h,
            heights: vec![h],
            circumferences: vec![1.0],
            prongs: vec![],
        },
        test_curves: vec!["meridian".into(), "diagonal".into(), "slope2".into()],
    })
}

/// Three unit squares at (0,0), (1,0), (0,1) with translation gluings;
/// genus 2 with one cone point of angle 6 pi. Level `l` uses `2^l` cells
/// per unit. Core curves `gamma1` (y = 1/2, width 2) and `gamma2`
/// (y = 3/2, width 1), both of height 1.
pub fn l_shaped_surface(level: u32) -> Result<Generated, CorpusError> {
    if level < 1 {
        return Err(CorpusError::Precondition("l_shaped_surface needs subdivision >= 1".into()));
    }
    let n = 1i64 << level;
    let tiling = Tiling {
        squares: vec![(0, 0), (1, 0), (0, 1)],
        gluings: vec![
            // bottom of A to top of C
            [(0, 0), (2, 0), (0, 4), (2, 4)],
            // bottom of B to top of B
            [(2, 0), (4, 0), (2, 2), (4, 2)],
            // right of B to left of A
            [(4, 0), (4, 2), (0, 0), (0, 2)],
            // right of C to left of C
            [(2, 2), (2, 4), (0, 2), (0, 4)],
        ],
    };
    let h = n / 2;
    let curves = vec![
        ("gamma1", poly(&(0..=2 * n).map(|i| (i, h)).collect::<Vec<_>>())),
        ("gamma2", poly(&(0..=n).map(|i| (i, n + h)).collect::<Vec<_>>())),
        ("vertical_a", poly(&(0..=2 * n).map(|j| (h, j)).collect::<Vec<_>>())),
        ("vertical_b", poly(&(0..=n).map(|j| (n + h, j)).collect::<Vec<_>>())),
        ("diag_a", poly(&(0..=n).map(|k| (k, k)).collect::<Vec<_>>())),
    ];
    let built = build_tiling(&tiling, n, &curves)?;
    let surface = Arc::new(built.surface);
    let cores = vec![surface.curve("gamma1").unwrap().clone(), surface.curve("gamma2").unwrap().clone()];
    let foliation = make_foliation(surface.clone(), cores, vec![1.0, 1.0])?;
    let leaf_space = build_leaf_space(&foliation)?;
    let oracle_map = projection_map(&leaf_space, &foliation, &built.position, |p| {
        if p[1] <= 1.0 {
            (Band { bottom: 0.0, top: 1.0, index: 0 }, p[1])
        } else {
            (Band { bottom: 1.0, top: 2.0, index: 1 }, p[1])
        }
    });
    Ok(Generated {
        surface,
        foliation,
        leaf_space,
        oracle_map,
        oracle: Oracle {
            phi: Complex64::new(-1.0, 0.0),
            energy: 1.5,
            heights: vec![1.0, 1.0],
            circumferences: vec![2.0, 1.0],
            prongs: vec![6],
        },
        test_curves: vec!["vertical_a".into(), "vertical_b".into(), "diag_a".into()],
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum OrigamiGluing {
    /// Tops glued to bottoms by translation along `vertical_perm`.
    Translation { vertical_perm: Vec<usize> },
    /// Top and bottom of the cylinder each folded onto themselves by
    /// half-turns in an A B A B pattern (a half-translation surface whose
    /// leaf space is an interval).
    Fold,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrigamiSpec {
    pub square_count: usize,
    /// Right neighbour of each square (0-based).
    pub horizontal_perm: Vec<usize>,
    pub gluing: OrigamiGluing,
    /// Level `l`: `2^l` cells per unit.
    pub subdivision: u32,
}

#[derive(Clone, Debug)]
pub struct Origami {
    pub generated: Generated,
    /// One loop inside each singular leaf that maps to a boundary point of
    /// the leaf space, in the order of `LeafSpace::boundary_points`.
    pub alphas: Vec<CurveClass>,
}

fn cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut c = Vec::new();
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            c.push(x);
            x = perm[x];
        }
        out.push(c);
    }
    out
}

fn is_permutation(p: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    p.len() == n && p.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
}

/// One horizontal cylinder of height 1 and circumference `square_count`
/// with core curve `core` at y = 1/2.
pub fn one_cylinder_origami(spec: &OrigamiSpec) -> Result<Origami, CorpusError> {
    let m = spec.square_count;
    if m < 2 || !is_permutation(&spec.horizontal_perm, m) {
        return Err(CorpusError::Precondition("need >= 2 squares and a horizontal permutation".into()));
    }
    let fold_mode = spec.gluing == OrigamiGluing::Fold;
    if spec.subdivision < 1 || (fold_mode && spec.subdivision < 2) {
        return Err(CorpusError::Precondition("origami needs subdivision >= 1 (>= 2 when folded)".into()));
    }
    let cyc = cycles(&spec.horizontal_perm);
    if cyc.len() != 1 {
        return Err(CorpusError::NotOneCylinder(cyc.len()));
    }
    let order = &cyc[0];
    let mi = m as i64;
    let n = 1i64 << spec.subdivision;
    let squares: Vec<Pt> = (0..mi).map(|x| (x, 0)).collect();
    // right end of the row to its left end
    let mut gluings = vec![[(2 * mi, 0), (2 * mi, 2), (0, 0), (0, 2)]];
    let mut fold = false;
    match &spec.gluing {
        OrigamiGluing::Translation { vertical_perm } => {
            if !is_permutation(vertical_perm, m) {
                return Err(CorpusError::Precondition("vertical_perm is not a permutation".into()));
            }
            let pos_of = |s: usize| order.iter().position(|&x| x == s).unwrap() as i64;
            for (p, &s) in order.iter().enumerate() {
                let p = p as i64;
                let q = pos_of(vertical_perm[s]);
                gluings.push([(2 * p, 2), (2 * p + 2, 2), (2 * q, 0), (2 * q + 2, 0)]);
            }
        }
        OrigamiGluing::Fold => {
            // A = [0, a], B = [a, a + 1/2], A' = [a + 1/2, 2a + 1/2], B' = [2a + 1/2, m]
            fold = true;
            let a = mi - 1; // in half units: a = (m - 1) / 2
            let (b1, a2, b2) = (a + 1, 2 * a + 1, 2 * mi);
            for y in [0, 2] {
                gluings.push([(0, y), (a, y), (a2, y), (b1, y)]);
                gluings.push([(a, y), (b1, y), (b2, y), (a2, y)]);
            }
        }
    }
    let tiling = Tiling { squares, gluings };
    let width = mi * n;
    let column = |x: i64, up: bool| -> Vec<(Pt, Pt)> {
        let pts: Vec<Pt> = (0..=n).map(|j| (x, if up { j } else { n - j })).collect();
        poly(&pts)
    };
    let mut curves = vec![("core", poly(&(0..=width).map(|i| (i, n / 2)).collect::<Vec<_>>()))];
    if fold {
        // (m - 1)/2 units = (m - 1) n / 2 cells
        let a_cells = (mi - 1) * n / 2;
        curves.push(("alpha_bottom", poly(&(0..=a_cells).map(|i| (i, 0)).collect::<Vec<_>>())));
        curves.push(("alpha_top", poly(&(0..=a_cells).map(|i| (i, n)).collect::<Vec<_>>())));
        // up at x = 1/n, across the A fold, down at its mirror image
        let mut vertical = column(1, true);
        vertical.extend(column(width - n / 2 - 1, false));
        curves.push(("vertical", vertical));
    } else if let OrigamiGluing::Translation { vertical_perm } = &spec.gluing {
        // up through each square of the vertical cycle of order[0]
        let mut vertical = Vec::new();
        let mut s = order[0];
        loop {
            let p = order.iter().position(|&x| x == s).unwrap() as i64;
            vertical.extend(column(p * n + n / 2, true));
            s = vertical_perm[s];
            if s == order[0] {
                break;
            }
        }
        curves.push(("vertical", vertical));
    }
    let built = build_tiling(&tiling, n, &curves)?;
    let surface = Arc::new(built.surface);
    let foliation = make_foliation(surface.clone(), vec![surface.curve("core").unwrap().clone()], vec![1.0])?;
    let leaf_space = build_leaf_space(&foliation)?;
    let oracle_map = projection_map(&leaf_space, &foliation, &built.position, |p| {
        (Band { bottom: 0.0, top: 1.0, index: 0 }, p[1])
    });
    let g = &leaf_space.graph;
    let mut alphas = Vec::new();
    if fold {
        // boundary points in index order: the tail (bottom side) and head (top side)
        for v in g.boundary_points() {
            let label = if v == g.edges()[0].tail { "alpha_bottom" } else { "alpha_top" };
            alphas.push(surface.curve(label).unwrap().clone());
        }
    }
    let genus = surface.genus();
    Ok(Origami {
        generated: Generated {
            surface,
            foliation,
            leaf_space,
            oracle_map,
            oracle: Oracle {
                phi: Complex64::new(-1.0, 0.0),
                energy: 0.5 * m as f64,
                heights: vec![1.0],
                circumferences: vec![m as f64],
                prongs: if fold { vec![4, 4] } else { vec![2 + 2 * (genus.max(1) as usize - 1); usize::from(genus > 1)] },
            },
            test_curves: vec!["vertical".into()],
        },
        alphas,
    })
}

/// Regular hexagon of circumradius 1 cut into six equilateral triangles and
/// refined `level` times; returns the disk and each boundary vertex with its
/// perimeter fraction in [0, 1), counterclockwise from the corner at angle 0.
pub fn hexagon_disk(level: u32) -> (Arc<TriSurface>, Vec<(usize, f64)>) {
    let corners: Vec<[f64; 2]> = (0..6).map(|k| [(k as f64 * PI / 3.0).cos(), (k as f64 * PI / 3.0).sin()]).collect();
    let mut edge_lengths = Vec::new();
    for k in 0..6 {
        edge_lengths.push((0, k + 1, 1.0));
    }
    for k in 0..6 {
        edge_lengths.push((k + 1, (k + 1) % 6 + 1, 1.0));
    }
    let triangles: Vec<[usize; 3]> = (0..6).map(|k| [0, k + 1, (k + 1) % 6 + 1]).collect();
    let triangle_edges: Vec<[usize; 3]> = (0..6).map(|k| [k, 6 + k, (k + 1) % 6]).collect();
    let layout = (0..6).map(|k| [[0.0, 0.0], corners[k], corners[(k + 1) % 6]]).collect();
    let desc = SurfaceDesc {
        triangles,
        edge_lengths,
        triangle_edges: Some(triangle_edges),
        curves: BTreeMap::new(),
        layout: Some(layout),
    };
    let mut s = TriSurface::build_with_boundary(&desc).expect("hexagon is a valid disk");
    for _ in 0..level {
        s = s.refine();
    }
    let pos = vertex_positions(&s);
    let boundary = (0..s.vertex_count())
        .filter(|&v| s.is_boundary_vertex(v))
        .map(|v| {
            let p = pos[v];
            let tau = (0..6)
                .find_map(|k| {
                    let (a, b) = (corners[k], corners[(k + 1) % 6]);
                    let ab = [b[0] - a[0], b[1] - a[1]];
                    let ap = [p[0] - a[0], p[1] - a[1]];
                    let cross = ab[0] * ap[1] - ab[1] * ap[0];
                    let t = ab[0] * ap[0] + ab[1] * ap[1];
                    (cross.abs() < 1e-9 && t > -1e-9 && t < 1.0 - 1e-9).then_some((k as f64 + t.max(0.0)) / 6.0)
                })
                .expect("boundary vertex lies on a side");
            (v, tau)
        })
        .collect();
    (Arc::new(s), boundary)
}

/// Plane position of every vertex, read from the layout.
pub fn vertex_positions(s: &TriSurface) -> Vec<[f64; 2]> {
    let layout = s.layout().expect("generated surfaces carry a layout");
    let mut pos = vec![[f64::NAN; 2]; s.vertex_count()];
    for (t, tri) in s.triangles().iter().enumerate() {
        for k in 0..3 {
            if pos[tri[k]][0].is_nan() {
                pos[tri[k]] = layout[t][k];
            }
        }
    }
    pos
}

/// Tripod with three legs of length 1 from vertex 0; leg `k` is edge `k`.
pub fn tripod() -> Arc<MetricGraph> {
    Arc::new(
        MetricGraph::new(4, (0..3).map(|k| GraphEdge { tail: 0, head: k + 1, length: 1.0 }).collect())
            .expect("tripod"),
    )
}

/// Boundary values wrapping the hexagon around the tripod: the thirds
/// centred on corners 0, 2, 4 go to the tips (plateaus of width 1/6), with
/// linear runs down one leg and up the next in between.
pub fn tripod_boundary_value(g: &MetricGraph, tau: f64) -> GraphPoint {
    let k = (3.0 * tau).round();
    let delta = tau - k / 3.0;
    let leg = (k as usize) % 3;
    let r = if delta.abs() <= 1.0 / 12.0 { 1.0 } else { (1.0 / 6.0 - delta.abs()) * 12.0 };
    g.point(leg, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flat_surface::intersection_number;

    #[test]
    fn torus_counts() {
        let g = square_torus(4, 1.0).unwrap();
        assert_eq!(g.surface.triangle_count(), 32);
        assert_eq!(g.surface.vertex_count(), 16);
        assert!(matches!(square_torus(1, 1.0), Err(CorpusError::Precondition(_))));
        let s = &g.surface;
        let core = s.curve("core").unwrap();
        assert_eq!(intersection_number(s, core, s.curve("slope2").unwrap()).unwrap(), 2);
        assert_eq!(intersection_number(s, core, s.curve("diagonal").unwrap()).unwrap(), 1);
    }

    #[test]
    fn torus_oracle_scaling() {
        let g = square_torus(4, 2.0).unwrap();
        assert_eq!(g.oracle.phi, Complex64::new(-4.0, 0.0));
        assert_eq!(g.oracle.energy, 2.0);
    }

    #[test]
    fn l_shape_leaf_space_is_wedge_of_circles() {
        for level in 1..=2 {
            let g = l_shaped_surface(level).unwrap();
            let t = &g.leaf_space.graph;
            assert_eq!(t.vertex_count(), 1);
            assert_eq!(t.edge_count(), 2);
            assert!(t.boundary_points().is_empty());
            assert_eq!(g.surface.genus(), 2);
        }
        let g = l_shaped_surface(2).unwrap();
        // the twelve square corners make one vertex
        assert_eq!(g.surface.vertex_count(), 3 * 16 - 2);
        let big = g.surface.cone_angles().iter().filter(|a| (*a - 6.0 * PI).abs() < 1e-12).count();
        assert_eq!(big, 1);
    }

    #[test]
    fn torus_leaf_space_is_circle() {
        let g = square_torus(4, 1.0).unwrap();
        let t = &g.leaf_space.graph;
        assert_eq!((t.vertex_count(), t.edge_count()), (1, 1));
        assert_eq!(t.len(0), 1.0);
    }

    #[test]
    fn fold_origami_has_interval_leaf_space() {
        let spec = OrigamiSpec {
            square_count: 3,
            horizontal_perm: vec![1, 2, 0],
            gluing: OrigamiGluing::Fold,
            subdivision: 2,
        };
        let o = one_cylinder_origami(&spec).unwrap();
        let t = &o.generated.leaf_space.graph;
        assert_eq!(t.boundary_points().len(), 2);
        assert_eq!(t.edge_count(), 1);
        assert_eq!(o.alphas.len(), 2);
        assert_eq!(o.generated.surface.genus(), 2);
        let cones: Vec<f64> = o
            .generated
            .surface
            .cone_angles()
            .iter()
            .copied()
            .filter(|a| (a - 2.0 * PI).abs() > 1e-9)
            .collect();
        assert_eq!(cones.len(), 2);
        assert!(cones.iter().all(|a| (a - 4.0 * PI).abs() < 1e-12));
    }

    #[test]
    fn translation_origami_one_cylinder() {
        let spec = OrigamiSpec {
            square_count: 3,
            horizontal_perm: vec![1, 2, 0],
            gluing: OrigamiGluing::Translation { vertical_perm: vec![1, 0, 2] },
            subdivision: 1,
        };
        let o = one_cylinder_origami(&spec).unwrap();
        assert!(o.alphas.is_empty());
        assert!(o.generated.leaf_space.graph.boundary_points().is_empty());
        let bad = OrigamiSpec { horizontal_perm: vec![1, 0, 2], ..spec };
        assert_eq!(one_cylinder_origami(&bad).unwrap_err(), CorpusError::NotOneCylinder(2));
    }

    #[test]
    fn hexagon_boundary_parametrization() {
        let (s, bd) = hexagon_disk(2);
        assert_eq!(bd.len(), 24);
        assert!(s.has_boundary());
        let mut taus: Vec<f64> = bd.iter().map(|b| b.1).collect();
        taus.sort_by(f64::total_cmp);
        for (i, t) in taus.iter().enumerate() {
            assert!((t - i as f64 / 24.0).abs() < 1e-12);
        }
        let g = tripod();
        assert_eq!(tripod_boundary_value(&g, 0.0), g.point(0, 1.0));
        assert_eq!(tripod_boundary_value(&g, 1.0 / 6.0), g.vertex_point(0));
        assert_eq!(tripod_boundary_value(&g, 2.0 / 3.0), g.point(2, 1.0));
    }
}
