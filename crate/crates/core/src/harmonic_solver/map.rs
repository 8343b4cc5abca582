use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::flat_surface::{CurveClass, MeshDirEdge, TriSurface};
use crate::metric_graph::{free_homotopy_length, DirEdge, GraphPath, GraphPoint, MetricGraph, Seg};

/// Piecewise-linear map from a triangulated surface to a metric graph,
/// with the homotopy class carried by one reduced image path per mesh edge.
#[derive(Clone, Debug)]
pub struct PLGraphMap {
    surface: Arc<TriSurface>,
    graph: Arc<MetricGraph>,
    images: Vec<GraphPoint>,
    /// Image of each mesh edge, run from `v0` to `v1`.
    paths: Vec<GraphPath>,
    /// (edge, vertex is `v0`) per mesh vertex.
    incidence: Arc<Vec<Vec<(usize, bool)>>>,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum MapError {
    #[error("expected {expected} {what}, got {got}")]
    WrongCount { what: &'static str, expected: usize, got: usize },
    #[error("image path of mesh edge {0} does not join the images of its endpoints")]
    Discontinuous(usize),
    #[error("image point {0} is off the graph")]
    BadPoint(usize),
}

/// `{"vertex_images": [[edge, t], ...], "edge_words": [[[edge, from, to], ...], ...], "graph_hash": ...}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    pub vertex_images: Vec<(usize, f64)>,
    pub edge_words: Vec<Vec<(usize, f64, f64)>>,
    pub graph_hash: String,
    pub surface_hash: String,
}

impl PLGraphMap {
    pub fn new(
        surface: Arc<TriSurface>,
        graph: Arc<MetricGraph>,
        images: Vec<GraphPoint>,
        paths: Vec<GraphPath>,
    ) -> Result<Self, MapError> {
        if images.len() != surface.vertex_count() {
            return Err(MapError::WrongCount {
                what: "vertex images",
                expected: surface.vertex_count(),
                got: images.len(),
            });
        }
        if paths.len() != surface.edge_count() {
            return Err(MapError::WrongCount {
                what: "edge paths",
                expected: surface.edge_count(),
                got: paths.len(),
            });
        }
        for (i, p) in images.iter().enumerate() {
            if p.edge >= graph.edge_count() || !(0.0..=graph.len(p.edge)).contains(&p.t) {
                return Err(MapError::BadPoint(i));
            }
        }
        let mut incidence = vec![Vec::new(); surface.vertex_count()];
        for (e, m) in surface.edges().iter().enumerate() {
            incidence[m.v0].push((e, true));
            incidence[m.v1].push((e, false));
            let p = &paths[e];
            if !graph.points_equal(p.start(), images[m.v0]) || !graph.points_equal(p.end(&graph), images[m.v1]) {
                return Err(MapError::Discontinuous(e));
            }
        }
        Ok(Self { surface, graph, images, paths, incidence: Arc::new(incidence) })
    }

    /// Map sending every vertex to `p` with trivial image paths.
    pub fn constant(surface: Arc<TriSurface>, graph: Arc<MetricGraph>, p: GraphPoint) -> Self {
        let images = vec![p; surface.vertex_count()];
        let paths = vec![GraphPath::constant(p); surface.edge_count()];
        Self::new(surface, graph, images, paths).expect("constant map is continuous")
    }

    pub fn surface(&self) -> &TriSurface {
        &self.surface
    }
    pub fn surface_arc(&self) -> Arc<TriSurface> {
        self.surface.clone()
    }
    pub fn graph(&self) -> &MetricGraph {
        &self.graph
    }
    pub fn graph_arc(&self) -> Arc<MetricGraph> {
        self.graph.clone()
    }
    pub fn image(&self, v: usize) -> GraphPoint {
        self.images[v]
    }
    pub fn images(&self) -> &[GraphPoint] {
        &self.images
    }
    /// Image of mesh edge `e` from `v0` to `v1`.
    pub fn path(&self, e: usize) -> &GraphPath {
        &self.paths[e]
    }
    pub fn paths(&self) -> &[GraphPath] {
        &self.paths
    }
    pub fn dir_path(&self, d: MeshDirEdge) -> GraphPath {
        if d.forward {
            self.paths[d.edge].clone()
        } else {
            self.paths[d.edge].inverse(&self.graph)
        }
    }

    /// Incident mesh edges of `v` with the flag "v is the edge's `v0`".
    pub fn incident(&self, v: usize) -> &[(usize, bool)] {
        &self.incidence[v]
    }

    /// Image paths leaving `v` along each incident edge, with the cotangent
    /// weight and the vertex at the far end.
    pub fn star_paths(&self, v: usize) -> Vec<(usize, f64, GraphPath)> {
        self.incidence[v]
            .iter()
            .map(|&(e, is_v0)| {
                let m = &self.surface.edges()[e];
                let w = self.surface.cotan_weight(e);
                if is_v0 {
                    (m.v1, w, self.paths[e].clone())
                } else {
                    (m.v0, w, self.paths[e].inverse(&self.graph))
                }
            })
            .collect()
    }

    /// Moves `v` along `r` (a path from its current image) and re-expresses
    /// the incident edge paths so the homotopy class is unchanged.
    pub fn relocate_along(&mut self, v: usize, r: &GraphPath) {
        let g = &*self.graph;
        debug_assert!(g.points_equal(r.start(), self.images[v]));
        if r.is_constant() {
            return;
        }
        let rinv = r.inverse(g);
        for &(e, is_v0) in self.incidence[v].iter() {
            let p = &self.paths[e];
            self.paths[e] = if is_v0 {
                rinv.concat(g, p).expect("relocation starts at the old image")
            } else {
                p.concat(g, r).expect("edge path ends at the old image")
            };
        }
        self.images[v] = r.end(g);
    }

    /// Sets image `v` and its incident paths directly (used when applying
    /// precomputed moves).
    pub(crate) fn set_vertex(&mut self, v: usize, image: GraphPoint, incident_paths: Vec<GraphPath>) {
        self.images[v] = image;
        for (&(e, _), p) in self.incidence[v].iter().zip(incident_paths) {
            self.paths[e] = p;
        }
    }

    /// Closed image path of a curve, based at the image of its first vertex.
    pub fn curve_image(&self, c: &CurveClass) -> GraphPath {
        let g = &*self.graph;
        let start = self.images[self.surface.dir_tail(c.edges[0])];
        let mut segs: Vec<Seg> = Vec::new();
        for d in &c.edges {
            segs.extend_from_slice(self.dir_path(*d).segs());
        }
        GraphPath::from_segs(g, start, segs)
    }

    /// Canonical cyclic word of the curve's image.
    pub fn curve_word(&self, c: &CurveClass) -> Vec<DirEdge> {
        self.curve_image(c).cyclic_word(&self.graph)
    }

    /// Length of the image of the stored representative, edge by edge.
    pub fn curve_pointwise_length(&self, c: &CurveClass) -> f64 {
        let parts: Vec<f64> = c.edges.iter().map(|d| self.paths[d.edge].length()).collect();
        crate::exact::fsum(&parts)
    }

    pub fn curve_free_homotopy_length(&self, c: &CurveClass) -> f64 {
        free_homotopy_length(&self.graph, &self.curve_word(c))
    }

    pub fn to_file(&self) -> MapFile {
        MapFile {
            vertex_images: self.images.iter().map(|p| (p.edge, p.t)).collect(),
            edge_words: self
                .paths
                .iter()
                .map(|p| p.segs().iter().map(|s| (s.edge, s.from, s.to)).collect())
                .collect(),
            graph_hash: self.graph.content_hash(),
            surface_hash: crate::io::surface_hash(&self.surface),
        }
    }

    pub fn from_file(surface: Arc<TriSurface>, graph: Arc<MetricGraph>, f: &MapFile) -> Result<Self, MapError> {
        let images: Vec<GraphPoint> = f.vertex_images.iter().map(|&(edge, t)| GraphPoint { edge, t }).collect();
        if images.len() != surface.vertex_count() {
            return Err(MapError::WrongCount {
                what: "vertex images",
                expected: surface.vertex_count(),
                got: images.len(),
            });
        }
        for (i, p) in images.iter().enumerate() {
            if p.edge >= graph.edge_count() {
                return Err(MapError::BadPoint(i));
            }
        }
        let paths = f
            .edge_words
            .iter()
            .zip(surface.edges())
            .map(|(w, m)| {
                let segs = w.iter().map(|&(edge, from, to)| Seg { edge, from, to }).collect();
                GraphPath::from_segs(&graph, images[m.v0], segs)
            })
            .collect();
        Self::new(surface, graph, images, paths)
    }
}
