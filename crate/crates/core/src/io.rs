//! JSON file formats and content hashes.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flat_surface::{SurfaceDesc, TriSurface};
use crate::hopf::{QuadDiff, Transition};
use crate::metric_graph::hex_digest;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("{path}: {source}")]
    Write { path: String, source: std::io::Error },
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let p = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| IoError::Read { path: p.clone(), source })?;
    serde_json::from_str(&text).map_err(|source| IoError::Parse { path: p, source })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let text = serde_json::to_string_pretty(value).expect("file types serialize");
    fs::write(path, text + "\n").map_err(|source| IoError::Write { path: path.display().to_string(), source })
}

/// sha256 of the canonical JSON of the triangulation, edge lengths and
/// curves (the layout is display data and is left out).
/// sha256 of the JSON encoding of `value`.
pub fn content_hash<T: Serialize>(value: &T) -> String {
    hex_digest(&serde_json::to_vec(value).expect("value serializes"))
}

pub fn surface_hash(s: &TriSurface) -> String {
    let desc = SurfaceDesc { layout: None, ..s.to_desc() };
    content_hash(&desc)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionEntry {
    pub edge: usize,
    pub triangles: [usize; 2],
    /// `dz_a = rho dz_b` as `[re, im]`.
    pub rho: [f64; 2],
}

/// One Hopf coefficient per triangle chart (`null` where the image is
/// singular) plus the chart transitions across interior edges.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadDiffFile {
    pub surface_hash: String,
    pub phi: Vec<Option<[f64; 2]>>,
    pub transitions: Vec<TransitionEntry>,
}

impl QuadDiffFile {
    pub fn new(surface: &TriSurface, q: &QuadDiff) -> Self {
        Self {
            surface_hash: surface_hash(surface),
            phi: q.phi.iter().map(|p| p.map(|z| [z.re, z.im])).collect(),
            transitions: q
                .transitions
                .iter()
                .map(|t| TransitionEntry { edge: t.edge, triangles: [t.tri_a, t.tri_b], rho: [t.rho.re, t.rho.im] })
                .collect(),
        }
    }

    pub fn phi(&self) -> Vec<Option<Complex64>> {
        self.phi.iter().map(|p| p.map(|[re, im]| Complex64::new(re, im))).collect()
    }

    pub fn transitions(&self) -> Vec<Transition> {
        self.transitions
            .iter()
            .map(|t| Transition {
                edge: t.edge,
                tri_a: t.triangles[0],
                tri_b: t.triangles[1],
                rho: Complex64::new(t.rho[0], t.rho[1]),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus_gen;

    #[test]
    fn hash_ignores_layout_and_tracks_lengths() {
        let g = corpus_gen::square_torus(3, 1.0).unwrap();
        let s = &g.surface;
        let plain = TriSurface::build(&SurfaceDesc { layout: None, ..s.to_desc() }).unwrap();
        assert_eq!(surface_hash(s), surface_hash(&plain));
        let mut d = s.to_desc();
        d.edge_lengths[0].2 *= 1.0 + 1e-9;
        d.layout = None;
        // a slightly longer side still gives valid triangles
        let other = TriSurface::build(&d).unwrap();
        assert_ne!(surface_hash(s), surface_hash(&other));
    }
}
