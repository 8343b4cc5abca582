//! Dirichlet problem for a triangulated disk mapped into a tree.

use std::sync::Arc;

use super::sweep::{solve_masked, ConvergenceLog, SolveOptions};
use super::{PLGraphMap, SolverError};
use crate::flat_surface::TriSurface;
use crate::metric_graph::{DirEdge, GraphPoint, MetricGraph};

#[derive(Clone, Debug)]
pub struct DiskSolution {
    pub map: PLGraphMap,
    pub log: ConvergenceLog,
    pub boundary: Vec<usize>,
}

/// Minimizes the energy with the boundary vertices held at `boundary`
/// (pairs of vertex and image). The target must be a tree, so image paths
/// are geodesics and carry no homotopy data.
pub fn solve_disk_dirichlet(
    disk: Arc<TriSurface>,
    graph: Arc<MetricGraph>,
    boundary: &[(usize, GraphPoint)],
    tol: f64,
    max_sweeps: usize,
) -> Result<DiskSolution, SolverError> {
    if !graph.is_tree() {
        return Err(SolverError::NotSimplyConnected);
    }
    let n = disk.vertex_count();
    let mut movable = vec![true; n];
    let anchor = boundary.first().ok_or(SolverError::NoBoundary)?.1;
    let mut images = vec![anchor; n];
    for &(v, p) in boundary {
        images[v] = p;
        movable[v] = false;
    }
    if let Some(v) = (0..n).find(|&v| disk.is_boundary_vertex(v) && movable[v]) {
        return Err(SolverError::MissingBoundaryValue(v));
    }
    let paths = disk.edges().iter().map(|m| graph.tree_geodesic(images[m.v0], images[m.v1])).collect();
    let f0 = PLGraphMap::new(disk, graph, images, paths).expect("geodesic paths are continuous");
    let opts = SolveOptions { tol, max_sweeps, cap: Some(f64::INFINITY), check_homotopy: false, ..Default::default() };
    let (map, log) = solve_masked(&f0, &opts, Some(&movable))?;
    Ok(DiskSolution { map, log, boundary: boundary.iter().map(|b| b.0).collect() })
}

/// Whether `x` lies in the subtree spanned by `points`: it is one of them,
/// or they leave it in at least two directions.
pub fn in_tree_span(g: &MetricGraph, x: GraphPoint, points: &[GraphPoint]) -> bool {
    let mut first: Option<DirEdge> = None;
    for &p in points {
        let path = g.tree_geodesic(x, p);
        let Some(seg) = path.segs().first() else { return true };
        match first {
            None => first = Some(seg.dir()),
            Some(d) if d != seg.dir() => return true,
            _ => {}
        }
    }
    false
}

impl DiskSolution {
    /// Maximum principle: every interior image lies in the tree span of the
    /// boundary images.
    pub fn max_principle_holds(&self) -> bool {
        let g = self.map.graph();
        let bd: Vec<GraphPoint> = self.boundary.iter().map(|&v| self.map.image(v)).collect();
        (0..self.map.surface().vertex_count()).all(|v| in_tree_span(g, self.map.image(v), &bd))
    }
}
