//! Closed triangulated surfaces carrying a flat cone metric.
//!
//! The metric is given by one Euclidean length per mesh edge; every triangle
//! is laid out in its own chart. Triangles are stored counterclockwise and
//! mesh connectivity is kept as half-edges `3 * t + k`, running from corner
//! `k` to corner `k + 1` of triangle `t`. Edges are identified by id, not by
//! vertex pair, so multi-edges (two distinct edges joining the same pair of
//! vertices) are fine.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Point2 = [f64; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("triangle {triangle} violates the strict triangle inequality ({a}, {b}, {c})")]
    TriangleInequalityViolated { triangle: usize, a: f64, b: f64, c: f64 },
    #[error("edge between vertices {0} and {1} is not shared by exactly two triangle sides")]
    NonManifoldEdge(usize, usize),
    #[error("vertex {0} has a non-manifold neighbourhood")]
    NonManifoldVertex(usize),
    #[error("surface is disconnected")]
    Disconnected,
    #[error("triangles are not consistently oriented along edge {0}")]
    InconsistentOrientation(usize),
    #[error("edge {0} joins a vertex to itself")]
    DegenerateEdge(usize),
    #[error("edge {0} has non-positive length")]
    NonPositiveLength(usize),
    #[error("no edge length given for vertices {0} and {1}")]
    MissingEdgeLength(usize, usize),
    #[error("vertex pair {0}-{1} has several edges; give explicit triangle_edges / edge ids")]
    AmbiguousEdge(usize, usize),
    #[error("curve {label}: {reason}")]
    InvalidCurve { label: String, reason: String },
    #[error("curves {0} and {1} share a mesh edge and are not transversal")]
    NotTransversal(String, String),
    #[error("malformed surface description: {0}")]
    Malformed(String),
}

/// Edge direction on the mesh: `forward` runs from `v0` to `v1` of the edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MeshDirEdge {
    pub edge: usize,
    pub forward: bool,
}

impl MeshDirEdge {
    pub fn reversed(self) -> Self {
        Self { edge: self.edge, forward: !self.forward }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshEdge {
    pub v0: usize,
    pub v1: usize,
    pub length: f64,
}

/// A closed edge path on the mesh.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveClass {
    pub label: String,
    pub edges: Vec<MeshDirEdge>,
    /// The producer asserts minimal position against the other stored curves.
    pub transversal: bool,
}

/// File-level description of a surface. Accepts both the plain
/// `{triangles, edge_lengths, curves}` form and the extended form with
/// explicit side-to-edge assignment.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SurfaceDesc {
    pub triangles: Vec<[usize; 3]>,
    /// `[i, j, length]`; the position in the list is the edge id.
    pub edge_lengths: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triangle_edges: Option<Vec<[usize; 3]>>,
    /// Each step is `[i, j]` or `[i, j, edge_id]`.
    #[serde(default)]
    pub curves: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<Vec<[Point2; 3]>>,
}

#[derive(Clone, Debug)]
pub struct TriSurface {
    vertex_count: usize,
    triangles: Vec<[usize; 3]>,
    tri_edges: Vec<[usize; 3]>,
    edges: Vec<MeshEdge>,
    twin: Vec<Option<usize>>,
    corner_angles: Vec<[f64; 3]>,
    cone_angles: Vec<f64>,
    cotan_weights: Vec<f64>,
    areas: Vec<f64>,
    /// Outgoing half-edges of each vertex in counterclockwise order.
    star: Vec<Vec<usize>>,
    boundary_edges: Vec<bool>,
    curves: Vec<CurveClass>,
    layout: Option<Vec<[Point2; 3]>>,
}

fn triangle_ok(a: f64, b: f64, c: f64) -> bool {
    a < b + c && b < a + c && c < a + b
}

/// Interior angle opposite side `a` in a triangle with sides `a, b, c`.
fn angle_opposite(a: f64, b: f64, c: f64) -> f64 {
    let cos = ((b * b + c * c - a * a) / (2.0 * b * c)).clamp(-1.0, 1.0);
    cos.acos()
}

impl TriSurface {
    /// Builds a closed surface; every edge must be shared by two triangles.
    pub fn build(desc: &SurfaceDesc) -> Result<Self, SurfaceError> {
        Self::build_inner(desc, false)
    }

    /// Builds a surface that may have boundary edges (used for disks).
    pub fn build_with_boundary(desc: &SurfaceDesc) -> Result<Self, SurfaceError> {
        Self::build_inner(desc, true)
    }

    fn build_inner(desc: &SurfaceDesc, allow_boundary: bool) -> Result<Self, SurfaceError> {
        if desc.triangles.is_empty() {
            return Err(SurfaceError::Malformed("no triangles".into()));
        }
        let vertex_count = desc.triangles.iter().flatten().copied().max().unwrap() + 1;
        let edges: Vec<MeshEdge> = desc
            .edge_lengths
            .iter()
            .map(|&(v0, v1, length)| MeshEdge { v0, v1, length })
            .collect();
        for (i, e) in edges.iter().enumerate() {
            if e.v0 == e.v1 {
                return Err(SurfaceError::DegenerateEdge(i));
            }
            if !(e.length > 0.0) || !e.length.is_finite() {
                return Err(SurfaceError::NonPositiveLength(i));
            }
            if e.v0 >= vertex_count || e.v1 >= vertex_count {
                return Err(SurfaceError::Malformed(format!("edge {i} references a missing vertex")));
            }
        }

        let tri_edges: Vec<[usize; 3]> = match &desc.triangle_edges {
            Some(te) => {
                if te.len() != desc.triangles.len() {
                    return Err(SurfaceError::Malformed("triangle_edges length mismatch".into()));
                }
                for (t, tri) in desc.triangles.iter().enumerate() {
                    for k in 0..3 {
                        let e = edges
                            .get(te[t][k])
                            .ok_or_else(|| SurfaceError::Malformed(format!("triangle {t}: unknown edge")))?;
                        let (a, b) = (tri[k], tri[(k + 1) % 3]);
                        if !((e.v0 == a && e.v1 == b) || (e.v0 == b && e.v1 == a)) {
                            return Err(SurfaceError::Malformed(format!(
                                "triangle {t} side {k} does not match edge {}",
                                te[t][k]
                            )));
                        }
                    }
                }
                te.clone()
            }
            None => {
                let mut by_pair: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
                for (i, e) in edges.iter().enumerate() {
                    by_pair.entry((e.v0.min(e.v1), e.v0.max(e.v1))).or_default().push(i);
                }
                let mut out = Vec::with_capacity(desc.triangles.len());
                for tri in &desc.triangles {
                    let mut te = [0; 3];
                    for k in 0..3 {
                        let (a, b) = (tri[k], tri[(k + 1) % 3]);
                        let key = (a.min(b), a.max(b));
                        match by_pair.get(&key).map(|v| v.as_slice()) {
                            Some([e]) => te[k] = *e,
                            Some(_) => return Err(SurfaceError::AmbiguousEdge(a, b)),
                            None => return Err(SurfaceError::MissingEdgeLength(a, b)),
                        }
                    }
                    out.push(te);
                }
                out
            }
        };

        let nt = desc.triangles.len();
        let mut sides_of_edge: Vec<Vec<usize>> = vec![Vec::new(); edges.len()];
        for t in 0..nt {
            for k in 0..3 {
                sides_of_edge[tri_edges[t][k]].push(3 * t + k);
            }
        }
        let mut twin = vec![None; 3 * nt];
        let mut boundary_edges = vec![false; edges.len()];
        for (e, sides) in sides_of_edge.iter().enumerate() {
            match sides.as_slice() {
                [h1, h2] => {
                    let tail = |h: usize| desc.triangles[h / 3][h % 3];
                    if tail(*h1) == tail(*h2) {
                        return Err(SurfaceError::InconsistentOrientation(e));
                    }
                    twin[*h1] = Some(*h2);
                    twin[*h2] = Some(*h1);
                }
                [_] if allow_boundary => boundary_edges[e] = true,
                _ => return Err(SurfaceError::NonManifoldEdge(edges[e].v0, edges[e].v1)),
            }
        }

        let mut corner_angles = Vec::with_capacity(nt);
        let mut areas = Vec::with_capacity(nt);
        for (t, te) in tri_edges.iter().enumerate() {
            let l = [edges[te[0]].length, edges[te[1]].length, edges[te[2]].length];
            if !triangle_ok(l[0], l[1], l[2]) {
                return Err(SurfaceError::TriangleInequalityViolated {
                    triangle: t,
                    a: l[0],
                    b: l[1],
                    c: l[2],
                });
            }
            // corner k sits between sides k and k+2; side k+1 is opposite
            let ang = [
                angle_opposite(l[1], l[0], l[2]),
                angle_opposite(l[2], l[0], l[1]),
                angle_opposite(l[0], l[1], l[2]),
            ];
            corner_angles.push(ang);
            let s = 0.5 * (l[0] + l[1] + l[2]);
            areas.push((s * (s - l[0]) * (s - l[1]) * (s - l[2])).max(0.0).sqrt());
        }

        let mut cone_angles = vec![0.0; vertex_count];
        for (t, tri) in desc.triangles.iter().enumerate() {
            for k in 0..3 {
                cone_angles[tri[k]] += corner_angles[t][k];
            }
        }

        let mut cotan_weights = vec![0.0; edges.len()];
        for (t, te) in tri_edges.iter().enumerate() {
            for k in 0..3 {
                // angle opposite side k is at corner k+2
                let a = corner_angles[t][(k + 2) % 3];
                cotan_weights[te[k]] += 0.5 / a.tan();
            }
        }
        // right angles give weights of order 1e-17 either side of zero
        if cotan_weights.iter().any(|&w| w < -1e-12) {
            log::warn!("surface has negative cotangent weights; discrete maximum principle may fail");
        }

        // connectivity over triangles
        let mut seen = vec![false; nt];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(t) = queue.pop_front() {
            for k in 0..3 {
                if let Some(h) = twin[3 * t + k] {
                    if !seen[h / 3] {
                        seen[h / 3] = true;
                        queue.push_back(h / 3);
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(SurfaceError::Disconnected);
        }

        let mut surface = TriSurface {
            vertex_count,
            triangles: desc.triangles.clone(),
            tri_edges,
            edges,
            twin,
            corner_angles,
            cone_angles,
            cotan_weights,
            areas,
            star: Vec::new(),
            boundary_edges,
            curves: Vec::new(),
            layout: desc.layout.clone(),
        };
        surface.star = surface.build_stars()?;
        let mut curves = Vec::new();
        for (label, steps) in &desc.curves {
            curves.push(surface.parse_curve(label, steps)?);
        }
        surface.curves = curves;
        Ok(surface)
    }

    fn build_stars(&self) -> Result<Vec<Vec<usize>>, SurfaceError> {
        let mut corner_count = vec![0usize; self.vertex_count];
        let mut any_out = vec![usize::MAX; self.vertex_count];
        for h in 0..self.twin.len() {
            let v = self.tail(h);
            corner_count[v] += 1;
            if any_out[v] == usize::MAX {
                any_out[v] = h;
            }
        }
        let mut stars = Vec::with_capacity(self.vertex_count);
        for v in 0..self.vertex_count {
            if any_out[v] == usize::MAX {
                return Err(SurfaceError::Disconnected);
            }
            // walk clockwise to a boundary start, if any
            let mut start = any_out[v];
            let mut steps = 0;
            while let Some(prev) = self.rotate_cw(start) {
                start = prev;
                steps += 1;
                if start == any_out[v] || steps > corner_count[v] {
                    break;
                }
            }
            let mut out = vec![start];
            let mut h = start;
            while let Some(next) = self.rotate_ccw(h) {
                if next == start {
                    break;
                }
                out.push(next);
                h = next;
                if out.len() > corner_count[v] {
                    return Err(SurfaceError::NonManifoldVertex(v));
                }
            }
            let boundary_vertex = self.rotate_ccw(*out.last().unwrap()).is_none();
            // at a boundary vertex the last outgoing half-edge has no ccw
            // successor, but the final incoming boundary side adds no corner
            if out.len() != corner_count[v] && !(boundary_vertex && out.len() == corner_count[v]) {
                return Err(SurfaceError::NonManifoldVertex(v));
            }
            stars.push(out);
        }
        Ok(stars)
    }

    /// Next outgoing half-edge counterclockwise around the tail vertex.
    pub fn rotate_ccw(&self, h: usize) -> Option<usize> {
        let prev = 3 * (h / 3) + (h % 3 + 2) % 3;
        self.twin[prev]
    }

    /// Next outgoing half-edge clockwise around the tail vertex.
    pub fn rotate_cw(&self, h: usize) -> Option<usize> {
        self.twin[h].map(|t| 3 * (t / 3) + (t % 3 + 1) % 3)
    }

    fn parse_curve(&self, label: &str, steps: &[Vec<usize>]) -> Result<CurveClass, SurfaceError> {
        let bad = |reason: String| SurfaceError::InvalidCurve { label: label.to_string(), reason };
        let mut edges = Vec::with_capacity(steps.len());
        for s in steps {
            let (i, j) = match s.as_slice() {
                [i, j] | [i, j, _] => (*i, *j),
                _ => return Err(bad(format!("malformed step {s:?}"))),
            };
            let e = match s.get(2) {
                Some(&e) => e,
                None => {
                    let cands: Vec<usize> = (0..self.edges.len())
                        .filter(|&e| {
                            let m = &self.edges[e];
                            (m.v0 == i && m.v1 == j) || (m.v0 == j && m.v1 == i)
                        })
                        .collect();
                    match cands.as_slice() {
                        [e] => *e,
                        [] => return Err(bad(format!("no edge {i}-{j}"))),
                        _ => return Err(SurfaceError::AmbiguousEdge(i, j)),
                    }
                }
            };
            let m = self.edges.get(e).ok_or_else(|| bad(format!("unknown edge {e}")))?;
            let forward = if m.v0 == i && m.v1 == j {
                true
            } else if m.v0 == j && m.v1 == i {
                false
            } else {
                return Err(bad(format!("edge {e} does not join {i} and {j}")));
            };
            edges.push(MeshDirEdge { edge: e, forward });
        }
        let curve = CurveClass { label: label.to_string(), edges, transversal: true };
        self.validate_curve(&curve)?;
        Ok(curve)
    }

    /// Checks that the directed edges chain up and close.
    pub fn validate_curve(&self, c: &CurveClass) -> Result<(), SurfaceError> {
        let bad = |reason: &str| SurfaceError::InvalidCurve { label: c.label.clone(), reason: reason.into() };
        if c.edges.is_empty() {
            return Err(bad("empty edge cycle"));
        }
        for (i, d) in c.edges.iter().enumerate() {
            if d.edge >= self.edges.len() {
                return Err(bad("unknown edge"));
            }
            let next = c.edges[(i + 1) % c.edges.len()];
            if self.dir_head(*d) != self.dir_tail(next) {
                return Err(bad("consecutive edges do not share an endpoint"));
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }
    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }
    pub fn triangle_edges(&self) -> &[[usize; 3]] {
        &self.tri_edges
    }
    pub fn edges(&self) -> &[MeshEdge] {
        &self.edges
    }
    pub fn edge_length(&self, e: usize) -> f64 {
        self.edges[e].length
    }
    pub fn corner_angles(&self) -> &[[f64; 3]] {
        &self.corner_angles
    }
    pub fn cone_angles(&self) -> &[f64] {
        &self.cone_angles
    }
    pub fn cotan_weights(&self) -> &[f64] {
        &self.cotan_weights
    }
    pub fn cotan_weight(&self, e: usize) -> f64 {
        self.cotan_weights[e]
    }
    pub fn triangle_area(&self, t: usize) -> f64 {
        self.areas[t]
    }
    pub fn total_area(&self) -> f64 {
        crate::exact::fsum(&self.areas)
    }
    pub fn curves(&self) -> &[CurveClass] {
        &self.curves
    }
    pub fn curve(&self, label: &str) -> Option<&CurveClass> {
        self.curves.iter().find(|c| c.label == label)
    }
    pub fn layout(&self) -> Option<&[[Point2; 3]]> {
        self.layout.as_deref()
    }
    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.boundary_edges[e]
    }
    pub fn has_boundary(&self) -> bool {
        self.boundary_edges.iter().any(|&b| b)
    }
    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.star[v].iter().any(|&h| self.boundary_edges[self.half_edge_edge(h)])
            || self.rotate_ccw(*self.star[v].last().unwrap()).is_none()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// Genus of a closed surface, from the Euler characteristic.
    pub fn genus(&self) -> i64 {
        (2 - self.euler_characteristic()) / 2
    }

    pub fn half_edge_tail(&self, h: usize) -> usize {
        self.tail(h)
    }
    fn tail(&self, h: usize) -> usize {
        self.triangles[h / 3][h % 3]
    }
    pub fn half_edge_head(&self, h: usize) -> usize {
        self.triangles[h / 3][(h % 3 + 1) % 3]
    }
    pub fn half_edge_edge(&self, h: usize) -> usize {
        self.tri_edges[h / 3][h % 3]
    }
    pub fn twin(&self, h: usize) -> Option<usize> {
        self.twin[h]
    }
    /// Direction of the half-edge as a mesh directed edge.
    pub fn half_edge_dir(&self, h: usize) -> MeshDirEdge {
        let e = self.half_edge_edge(h);
        MeshDirEdge { edge: e, forward: self.edges[e].v0 == self.tail(h) }
    }
    /// Outgoing half-edges at `v`, counterclockwise.
    pub fn star(&self, v: usize) -> &[usize] {
        &self.star[v]
    }
    pub fn dir_tail(&self, d: MeshDirEdge) -> usize {
        let e = &self.edges[d.edge];
        if d.forward {
            e.v0
        } else {
            e.v1
        }
    }
    pub fn dir_head(&self, d: MeshDirEdge) -> usize {
        self.dir_tail(d.reversed())
    }

    /// The half-edge realizing `d` (for boundary edges only one exists).
    pub fn half_edge_of(&self, d: MeshDirEdge) -> Option<usize> {
        let tail = self.dir_tail(d);
        self.star[tail].iter().copied().find(|&h| self.half_edge_edge(h) == d.edge)
    }

    /// Corner positions of triangle `t` in its own chart: corner 0 at the
    /// origin, corner 1 on the positive real axis, corner 2 above it.
    pub fn chart(&self, t: usize) -> [Point2; 3] {
        let te = self.tri_edges[t];
        let l0 = self.edges[te[0]].length;
        let l1 = self.edges[te[1]].length;
        let l2 = self.edges[te[2]].length;
        let x = (l0 * l0 + l2 * l2 - l1 * l1) / (2.0 * l0);
        let y = (l2 * l2 - x * x).max(0.0).sqrt();
        [[0.0, 0.0], [l0, 0.0], [x, y]]
    }

    /// 1-to-4 midpoint subdivision. New vertex `V + e` is the midpoint of
    /// edge `e`; edge `e` splits into `2e` (at `v0`) and `2e + 1` (at `v1`).
    pub fn refine(&self) -> TriSurface {
        let nv = self.vertex_count;
        let ne = self.edges.len();
        let mut edges = Vec::with_capacity(2 * ne + 3 * self.triangles.len());
        for (e, m) in self.edges.iter().enumerate() {
            edges.push((m.v0, nv + e, 0.5 * m.length));
            edges.push((nv + e, m.v1, 0.5 * m.length));
        }
        let half_at = |e: usize, v: usize| -> usize {
            if self.edges[e].v0 == v {
                2 * e
            } else {
                2 * e + 1
            }
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        let mut tri_edges = Vec::with_capacity(4 * self.triangles.len());
        let mut layout = self.layout.as_ref().map(|_| Vec::new());
        for (t, tri) in self.triangles.iter().enumerate() {
            let [a, b, c] = *tri;
            let [e0, e1, e2] = self.tri_edges[t];
            let (m0, m1, m2) = (nv + e0, nv + e1, nv + e2);
            let base = 2 * ne + 3 * t;
            // interior edges: m0-m1 (parallel to side 2), m1-m2 (side 0), m2-m0 (side 1)
            let l = |e: usize| self.edges[e].length;
            edges.push((m0, m1, 0.5 * l(e2)));
            edges.push((m1, m2, 0.5 * l(e0)));
            edges.push((m2, m0, 0.5 * l(e1)));
            let (i01, i12, i20) = (base, base + 1, base + 2);
            triangles.push([a, m0, m2]);
            tri_edges.push([half_at(e0, a), i20, half_at(e2, a)]);
            triangles.push([m0, b, m1]);
            tri_edges.push([half_at(e0, b), half_at(e1, b), i01]);
            triangles.push([m2, m1, c]);
            tri_edges.push([i12, half_at(e1, c), half_at(e2, c)]);
            triangles.push([m0, m1, m2]);
            tri_edges.push([i01, i12, i20]);
            if let (Some(out), Some(old)) = (layout.as_mut(), self.layout.as_ref()) {
                let [pa, pb, pc] = old[t];
                let mid = |p: Point2, q: Point2| [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
                let (q0, q1, q2) = (mid(pa, pb), mid(pb, pc), mid(pc, pa));
                out.push([pa, q0, q2]);
                out.push([q0, pb, q1]);
                out.push([q2, q1, pc]);
                out.push([q0, q1, q2]);
            }
        }
        let curves = self
            .curves
            .iter()
            .map(|c| CurveClass {
                label: c.label.clone(),
                transversal: c.transversal,
                edges: c
                    .edges
                    .iter()
                    .flat_map(|d| {
                        let (x, y) = (2 * d.edge, 2 * d.edge + 1);
                        if d.forward {
                            [MeshDirEdge { edge: x, forward: true }, MeshDirEdge { edge: y, forward: true }]
                        } else {
                            [MeshDirEdge { edge: y, forward: false }, MeshDirEdge { edge: x, forward: false }]
                        }
                    })
                    .collect(),
            })
            .collect();
        let desc = SurfaceDesc {
            triangles,
            edge_lengths: edges,
            triangle_edges: Some(tri_edges),
            curves: BTreeMap::new(),
            layout,
        };
        let mut s = Self::build_inner(&desc, self.has_boundary()).expect("refinement of a valid surface is valid");
        s.curves = curves;
        s
    }

    /// Adds or replaces a curve after validating it.
    pub fn with_curve(mut self, curve: CurveClass) -> Result<Self, SurfaceError> {
        self.validate_curve(&curve)?;
        self.curves.retain(|c| c.label != curve.label);
        self.curves.push(curve);
        Ok(self)
    }

    /// Description that rebuilds this surface (curves included).
    pub fn to_desc(&self) -> SurfaceDesc {
        let curves = self
            .curves
            .iter()
            .map(|c| {
                let steps = c
                    .edges
                    .iter()
                    .map(|d| vec![self.dir_tail(*d), self.dir_head(*d), d.edge])
                    .collect();
                (c.label.clone(), steps)
            })
            .collect();
        SurfaceDesc {
            triangles: self.triangles.clone(),
            edge_lengths: self.edges.iter().map(|m| (m.v0, m.v1, m.length)).collect(),
            triangle_edges: Some(self.tri_edges.clone()),
            curves,
            layout: self.layout.clone(),
        }
    }

    /// Vertices visited by a curve, in order (the tail of each step).
    pub fn curve_vertices(&self, c: &CurveClass) -> Vec<usize> {
        c.edges.iter().map(|d| self.dir_tail(*d)).collect()
    }

    /// Outgoing half-edge at the tail of `d` that realizes `d`.
    fn out_half_edge(&self, d: MeshDirEdge) -> usize {
        self.half_edge_of(d).expect("directed edge has a half-edge at its tail")
    }

    /// Star positions at vertex `curve_vertices[i]` of the outgoing and the
    /// reversed incoming curve edge.
    fn passage(&self, c: &CurveClass, i: usize) -> (usize, usize, usize) {
        let n = c.edges.len();
        let out = c.edges[i];
        let inc = c.edges[(i + n - 1) % n];
        let v = self.dir_tail(out);
        let star = &self.star[v];
        let h_out = self.out_half_edge(out);
        let h_back = self.out_half_edge(inc.reversed());
        let p_out = star.iter().position(|&h| h == h_out).unwrap();
        let p_back = star.iter().position(|&h| h == h_back).unwrap();
        (v, p_out, p_back)
    }

    /// Whether star position `p` lies strictly left of the curve passing
    /// through the vertex with outgoing position `p_out` and reversed
    /// incoming position `p_back` (left = counterclockwise from `p_out`).
    pub(crate) fn is_left(len: usize, p_out: usize, p_back: usize, p: usize) -> bool {
        let rel = (p + len - p_out) % len;
        let rel_back = (p_back + len - p_out) % len;
        rel > 0 && rel < rel_back
    }

    /// For each passage of `c` through a vertex: (vertex, set of star
    /// positions strictly to the left).
    pub fn curve_sides(&self, c: &CurveClass) -> Vec<(usize, usize, usize)> {
        (0..c.edges.len()).map(|i| self.passage(c, i)).collect()
    }
}

/// Number of transverse crossings of two edge cycles in minimal position.
///
/// Crossings happen at shared vertices. At such a vertex the first curve
/// splits the star into a left and a right fan; the second curve crosses
/// when its two edges at that vertex fall in different fans. Star positions
/// are taken in the counterclockwise order of outgoing half-edges, so the
/// test does not depend on where the cyclic order starts.
pub fn intersection_number(s: &TriSurface, a: &CurveClass, b: &CurveClass) -> Result<usize, SurfaceError> {
    let a_edges: std::collections::HashSet<usize> = a.edges.iter().map(|d| d.edge).collect();
    if b.edges.iter().any(|d| a_edges.contains(&d.edge)) {
        return Err(SurfaceError::NotTransversal(a.label.clone(), b.label.clone()));
    }
    let b_pass = s.curve_sides(b);
    let mut count = 0;
    for (v, p_out, p_back) in s.curve_sides(a) {
        let len = s.star(v).len();
        for &(w, q_out, q_back) in &b_pass {
            if w != v {
                continue;
            }
            let l1 = TriSurface::is_left(len, p_out, p_back, q_out);
            let l2 = TriSurface::is_left(len, p_out, p_back, q_back);
            if l1 != l2 {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Gauss-Bonnet defect `sum_v (2 pi - cone(v)) - 2 pi chi`; zero on a valid
/// closed surface up to rounding.
pub fn gauss_bonnet_defect(s: &TriSurface) -> f64 {
    let curvature: Vec<f64> = s.cone_angles().iter().map(|a| 2.0 * PI - a).collect();
    crate::exact::fsum(&curvature) - 2.0 * PI * s.euler_characteristic() as f64
}
