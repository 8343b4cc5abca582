//! Reading input files, with hash checks between them.

use std::path::Path;
use std::sync::Arc;

use anyhow::anyhow;
use strebel::flat_surface::{SurfaceDesc, TriSurface};
use strebel::foliation::{FoliationFile, FoliationSpec};
use strebel::harmonic_solver::{MapFile, PLGraphMap};
use strebel::io::{read_json, surface_hash};
use strebel::metric_graph::MetricGraph;

use crate::{io_input, Fail};

pub fn surface(path: &Path) -> Result<Arc<TriSurface>, Fail> {
    let desc: SurfaceDesc = read_json(path).map_err(io_input)?;
    let s = TriSurface::build(&desc).map_err(|e| Fail::Input(anyhow!("{}: {e}", path.display())))?;
    Ok(Arc::new(s))
}

pub fn foliation(path: &Path, surface: Arc<TriSurface>) -> Result<(FoliationSpec, FoliationFile), Fail> {
    let file: FoliationFile = read_json(path).map_err(io_input)?;
    let fol = FoliationSpec::from_file(surface, &file).map_err(|e| Fail::Input(anyhow!("{}: {e}", path.display())))?;
    Ok((fol, file))
}

pub fn graph(path: &Path) -> Result<Arc<MetricGraph>, Fail> {
    let file = read_json(path).map_err(io_input)?;
    let g = MetricGraph::from_file(&file).map_err(|e| Fail::Input(anyhow!("{}: {e}", path.display())))?;
    Ok(Arc::new(g))
}

pub fn hash_mismatch(what: &str, path: &Path) -> Fail {
    Fail::Input(anyhow!("HashMismatch: {} was made for a different {what}", path.display()))
}

/// Reads a map and checks that it was written for `surface` and `graph`.
pub fn map(path: &Path, surface: Arc<TriSurface>, graph: Arc<MetricGraph>) -> Result<PLGraphMap, Fail> {
    let file: MapFile = read_json(path).map_err(io_input)?;
    if file.surface_hash != surface_hash(&surface) {
        return Err(hash_mismatch("surface", path));
    }
    if file.graph_hash != graph.content_hash() {
        return Err(hash_mismatch("graph", path));
    }
    PLGraphMap::from_file(surface, graph, &file).map_err(|e| Fail::Input(anyhow!("{}: {e}", path.display())))
}
