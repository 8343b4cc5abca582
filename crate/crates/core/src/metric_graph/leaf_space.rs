//! Leaf space of an all-cylinder foliation and the projection onto it.
//!
//! Cutting the surface along the core curves leaves a set of "pieces"
//! (components of triangles glued across non-curve edges). Each piece is a
//! union of singular leaves and half-cylinders and collapses to one vertex
//! of T; each core curve becomes one edge of T, from the piece on its right
//! to the piece on its left, of length the prescribed height. The projection
//! sends a core curve to the midpoint of its edge and every other vertex to
//! the vertex of its piece.

use std::collections::HashMap;
use std::sync::Arc;

use super::{GraphEdge, GraphPath, GraphPoint, MetricGraph, Seg};
use crate::flat_surface::{CurveClass, TriSurface};
use crate::foliation::{FoliationError, FoliationSpec};
use crate::harmonic_solver::PLGraphMap;

/// Combinatorics of the surface cut along a curve family.
#[derive(Clone, Debug)]
pub(crate) struct Pieces {
    pub piece_of_triangle: Vec<usize>,
    pub count: usize,
    /// Curve index per mesh vertex lying on a curve.
    pub curve_of_vertex: Vec<Option<usize>>,
    pub curve_of_edge: HashMap<usize, usize>,
    /// (right piece, left piece) per curve.
    pub sides: Vec<(usize, usize)>,
    /// Per curve vertex: (curve, star position of the outgoing curve edge,
    /// star position of the reversed incoming one).
    pub passage: HashMap<usize, (usize, usize, usize)>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

pub(crate) fn analyze_pieces(s: &TriSurface, curves: &[CurveClass]) -> Result<Pieces, FoliationError> {
    let mut curve_of_edge: HashMap<usize, usize> = HashMap::new();
    let mut curve_of_vertex: Vec<Option<usize>> = vec![None; s.vertex_count()];
    for (j, c) in curves.iter().enumerate() {
        s.validate_curve(c).map_err(FoliationError::Surface)?;
        for d in &c.edges {
            if let Some(&k) = curve_of_edge.get(&d.edge) {
                return Err(if k == j {
                    FoliationError::NotSimple(c.label.clone())
                } else {
                    FoliationError::CurvesIntersect(curves[k].label.clone(), c.label.clone())
                });
            }
            curve_of_edge.insert(d.edge, j);
        }
        for v in s.curve_vertices(c) {
            match curve_of_vertex[v] {
                Some(k) if k == j => return Err(FoliationError::NotSimple(c.label.clone())),
                Some(k) => {
                    return Err(FoliationError::CurvesIntersect(curves[k].label.clone(), c.label.clone()))
                }
                None => curve_of_vertex[v] = Some(j),
            }
        }
    }

    let nt = s.triangle_count();
    let mut parent: Vec<usize> = (0..nt).collect();
    for h in 0..3 * nt {
        if curve_of_edge.contains_key(&s.half_edge_edge(h)) {
            continue;
        }
        if let Some(t) = s.twin(h) {
            let (a, b) = (find(&mut parent, h / 3), find(&mut parent, t / 3));
            parent[a] = b;
        }
    }
    let mut label = HashMap::new();
    let mut piece_of_triangle = Vec::with_capacity(nt);
    for t in 0..nt {
        let r = find(&mut parent, t);
        let n = label.len();
        piece_of_triangle.push(*label.entry(r).or_insert(n));
    }
    let count = label.len();

    let mut sides = Vec::with_capacity(curves.len());
    let mut passage = HashMap::new();
    for (j, c) in curves.iter().enumerate() {
        let h = s.half_edge_of(c.edges[0]).expect("curve edge has a half-edge");
        let left = piece_of_triangle[h / 3];
        let right = s.twin(h).map(|t| piece_of_triangle[t / 3]).ok_or_else(|| {
            FoliationError::Surface(crate::flat_surface::SurfaceError::InvalidCurve {
                label: c.label.clone(),
                reason: "runs along the surface boundary".into(),
            })
        })?;
        sides.push((right, left));
        for (v, p_out, p_back) in s.curve_sides(c) {
            passage.insert(v, (j, p_out, p_back));
        }
    }

    // Euler characteristic per piece; curve vertices and curve edges appear
    // once on each side and cancel, so only non-curve cells are counted.
    let mut chi = vec![0i64; count];
    for t in 0..nt {
        chi[piece_of_triangle[t]] += 1;
    }
    for (e, _) in s.edges().iter().enumerate() {
        if !curve_of_edge.contains_key(&e) {
            let h = edge_half(s, e);
            chi[piece_of_triangle[h / 3]] -= 1;
        }
    }
    for v in 0..s.vertex_count() {
        if curve_of_vertex[v].is_none() {
            chi[piece_of_triangle[s.star(v)[0] / 3]] += 1;
        }
    }
    let mut bounding: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (j, &(r, l)) in sides.iter().enumerate() {
        bounding[r].push(j);
        bounding[l].push(j);
    }
    for p in 0..count {
        match (chi[p], bounding[p].as_slice()) {
            (1, [j]) => return Err(FoliationError::TrivialCurve(curves[*j].label.clone())),
            (0, [a, b]) if a != b => {
                return Err(FoliationError::DuplicateHomotopyClass(
                    curves[*a].label.clone(),
                    curves[*b].label.clone(),
                ))
            }
            _ => {}
        }
    }

    Ok(Pieces { piece_of_triangle, count, curve_of_vertex, curve_of_edge, sides, passage })
}

fn edge_half(s: &TriSurface, e: usize) -> usize {
    let m = &s.edges()[e];
    let d = crate::flat_surface::MeshDirEdge { edge: e, forward: true };
    s.half_edge_of(d).or_else(|| s.half_edge_of(d.reversed())).unwrap_or_else(|| panic!("edge {e} ({}-{}) has no side", m.v0, m.v1))
}

/// T together with the projection and the cut data it was built from.
#[derive(Clone, Debug)]
pub struct LeafSpace {
    pub graph: Arc<MetricGraph>,
    /// The projection along leaves, the solver's initial map.
    pub projection: PLGraphMap,
    /// T-vertex per triangle.
    pub piece_of_triangle: Vec<usize>,
    /// T-edge per cylinder (edge `j` for cylinder `j`).
    pub cylinder_edges: Vec<usize>,
}

impl LeafSpace {
    pub fn boundary_points(&self) -> Vec<usize> {
        self.graph.boundary_points()
    }
}

pub fn build_leaf_space(fol: &FoliationSpec) -> Result<LeafSpace, FoliationError> {
    let s = fol.surface();
    let curves: Vec<CurveClass> = fol.cylinders().iter().map(|c| c.core.clone()).collect();
    let pieces = analyze_pieces(s, &curves)?;
    let edges = fol
        .cylinders()
        .iter()
        .zip(&pieces.sides)
        .map(|(c, &(r, l))| GraphEdge { tail: r, head: l, length: c.height })
        .collect();
    let graph = Arc::new(MetricGraph::new(pieces.count, edges).expect("leaf space of a connected surface"));
    let g = &*graph;

    let images: Vec<GraphPoint> = (0..s.vertex_count())
        .map(|v| match pieces.curve_of_vertex[v] {
            Some(j) => g.point(j, 0.5 * g.len(j)),
            None => g.vertex_point(pieces.piece_of_triangle[s.star(v)[0] / 3]),
        })
        .collect();

    // segment from the midpoint of the curve's T-edge to the piece on the
    // side of the star where the mesh edge leaves
    let attach = |v: usize, h: usize| -> Option<Seg> {
        let j = pieces.curve_of_vertex[v]?;
        let (_, p_out, p_back) = pieces.passage[&v];
        let star = s.star(v);
        let p = star.iter().position(|&x| x == h).expect("half-edge in star");
        let mid = 0.5 * g.len(j);
        let to = if TriSurface::is_left(star.len(), p_out, p_back, p) { g.len(j) } else { 0.0 };
        Some(Seg { edge: j, from: mid, to })
    };

    let mut paths = Vec::with_capacity(s.edge_count());
    for (e, m) in s.edges().iter().enumerate() {
        let start = images[m.v0];
        if pieces.curve_of_edge.contains_key(&e) {
            paths.push(GraphPath::constant(start));
            continue;
        }
        let d = crate::flat_surface::MeshDirEdge { edge: e, forward: true };
        let h0 = s.half_edge_of(d).expect("closed surface");
        let h1 = s.half_edge_of(d.reversed()).expect("closed surface");
        let mut segs = Vec::new();
        segs.extend(attach(m.v0, h0));
        segs.extend(attach(m.v1, h1).map(Seg::inv));
        paths.push(GraphPath::from_segs(g, start, segs));
    }

    let projection = PLGraphMap::new(fol.surface_arc(), graph.clone(), images, paths)
        .expect("projection is a continuous map");
    Ok(LeafSpace {
        graph,
        projection,
        piece_of_triangle: pieces.piece_of_triangle,
        cylinder_edges: (0..fol.cylinders().len()).collect(),
    })
}
