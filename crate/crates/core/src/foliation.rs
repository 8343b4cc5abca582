//! Prescribed all-cylinder foliations, their comparison with measured
//! cylinder systems, and the height identity `L[a] = sum_j i(a, g_j) h_j`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flat_surface::{intersection_number, CurveClass, SurfaceError, TriSurface};
use crate::harmonic_solver::PLGraphMap;
use crate::metric_graph::leaf_space::analyze_pieces;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FoliationError {
    #[error("need one height per curve and at least one curve")]
    CountMismatch,
    #[error("curves {0} and {1} intersect")]
    CurvesIntersect(String, String),
    #[error("curves {0} and {1} are freely homotopic")]
    DuplicateHomotopyClass(String, String),
    #[error("cylinder {0} has non-positive height")]
    NonPositiveHeight(String),
    #[error("curve {0} is null-homotopic")]
    TrivialCurve(String),
    #[error("curve {0} is not simple")]
    NotSimple(String),
    #[error("unknown curve {0}")]
    UnknownCurve(String),
    #[error("foliations live on different surfaces")]
    SurfaceMismatch,
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderSpec {
    pub core: CurveClass,
    pub height: f64,
}

/// A validated admissible system of core curves with heights.
#[derive(Clone, Debug)]
pub struct FoliationSpec {
    surface: Arc<TriSurface>,
    surface_hash: String,
    cylinders: Vec<CylinderSpec>,
}

/// `{"cylinders": [{"curve": "label", "height": x}, ...]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoliationFile {
    pub cylinders: Vec<FoliationEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoliationEntry {
    pub curve: String,
    pub height: f64,
}

pub fn make_foliation(
    surface: Arc<TriSurface>,
    curves: Vec<CurveClass>,
    heights: Vec<f64>,
) -> Result<FoliationSpec, FoliationError> {
    if curves.is_empty() || curves.len() != heights.len() {
        return Err(FoliationError::CountMismatch);
    }
    for (c, &h) in curves.iter().zip(&heights) {
        if !(h > 0.0) || !h.is_finite() {
            return Err(FoliationError::NonPositiveHeight(c.label.clone()));
        }
    }
    analyze_pieces(&surface, &curves)?;
    let surface_hash = crate::io::surface_hash(&surface);
    let cylinders = curves.into_iter().zip(heights).map(|(core, height)| CylinderSpec { core, height }).collect();
    Ok(FoliationSpec { surface, surface_hash, cylinders })
}

impl FoliationSpec {
    /// Resolves curve labels against the curves stored on the surface.
    pub fn from_file(surface: Arc<TriSurface>, f: &FoliationFile) -> Result<Self, FoliationError> {
        let mut curves = Vec::new();
        let mut heights = Vec::new();
        for e in &f.cylinders {
            let c = surface.curve(&e.curve).ok_or_else(|| FoliationError::UnknownCurve(e.curve.clone()))?;
            curves.push(c.clone());
            heights.push(e.height);
        }
        make_foliation(surface, curves, heights)
    }

    pub fn to_file(&self) -> FoliationFile {
        FoliationFile {
            cylinders: self
                .cylinders
                .iter()
                .map(|c| FoliationEntry { curve: c.core.label.clone(), height: c.height })
                .collect(),
        }
    }

    pub fn surface(&self) -> &TriSurface {
        &self.surface
    }
    pub fn surface_arc(&self) -> Arc<TriSurface> {
        self.surface.clone()
    }
    pub fn surface_hash(&self) -> &str {
        &self.surface_hash
    }
    pub fn cylinders(&self) -> &[CylinderSpec] {
        &self.cylinders
    }
    pub fn labels(&self) -> Vec<String> {
        self.cylinders.iter().map(|c| c.core.label.clone()).collect()
    }
}

/// A measured cylinder of the vertical foliation of a computed differential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasuredCylinder {
    /// Edge of T the cylinder projects to; its prescribed core curve is the
    /// one that built this edge.
    pub t_edge: usize,
    pub core_label: String,
    pub height: f64,
    /// |Phi|^(1/2)-length of the sampled level loop.
    pub circumference: f64,
    /// Euclidean length of the same loop.
    pub flat_circumference: f64,
    /// Position along the T-edge of the sampled level loop.
    pub level: f64,
    /// Sampled levels whose preimage is more than one loop (only near the
    /// ends of the edge, where the mesh cannot resolve the critical leaf).
    #[serde(default)]
    pub split_levels: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularVertex {
    pub vertex: usize,
    pub prongs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderDecomposition {
    pub surface_hash: String,
    pub cylinders: Vec<MeasuredCylinder>,
    pub singular_set: Vec<SingularVertex>,
}

impl CylinderDecomposition {
    /// Sum of `prongs - 2` over singular vertices; `4g - 4` for a
    /// holomorphic differential on a closed genus-g surface.
    pub fn zero_order_sum(&self) -> i64 {
        self.singular_set.iter().map(|s| s.prongs as i64 - 2).sum()
    }
}

/// Anything that names a multiset of (core class, height).
pub trait CylinderSystem {
    fn surface_hash(&self) -> &str;
    fn classes(&self) -> Vec<(String, f64)>;
}

impl CylinderSystem for FoliationSpec {
    fn surface_hash(&self) -> &str {
        &self.surface_hash
    }
    fn classes(&self) -> Vec<(String, f64)> {
        self.cylinders.iter().map(|c| (c.core.label.clone(), c.height)).collect()
    }
}

impl CylinderSystem for CylinderDecomposition {
    fn surface_hash(&self) -> &str {
        &self.surface_hash
    }
    fn classes(&self) -> Vec<(String, f64)> {
        self.cylinders.iter().map(|c| (c.core_label.clone(), c.height)).collect()
    }
}

/// Core curves agree as multisets and heights agree within relative `tol`.
pub fn whitehead_equivalent(a: &dyn CylinderSystem, b: &dyn CylinderSystem, tol: f64) -> Result<bool, FoliationError> {
    whitehead_equivalent_above(a, b, tol, 0.0)
}

/// As [`whitehead_equivalent`], ignoring cylinders thinner than `min_height`.
pub fn whitehead_equivalent_above(
    a: &dyn CylinderSystem,
    b: &dyn CylinderSystem,
    tol: f64,
    min_height: f64,
) -> Result<bool, FoliationError> {
    if a.surface_hash() != b.surface_hash() {
        return Err(FoliationError::SurfaceMismatch);
    }
    let group = |s: &dyn CylinderSystem| {
        let mut m: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for (k, h) in s.classes() {
            if h >= min_height {
                m.entry(k).or_default().push(h);
            }
        }
        for v in m.values_mut() {
            v.sort_by(f64::total_cmp);
        }
        m
    };
    let (ga, gb) = (group(a), group(b));
    if ga.keys().ne(gb.keys()) {
        return Ok(false);
    }
    for (k, ha) in &ga {
        let hb = &gb[k];
        if ha.len() != hb.len() {
            return Ok(false);
        }
        for (x, y) in ha.iter().zip(hb) {
            if (x - y).abs() > tol * x.abs().max(y.abs()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightIdentityRow {
    pub curve: String,
    /// Length of the image of the stored representative.
    pub measured: f64,
    /// Length of the shortest loop in the image's free homotopy class.
    pub free_homotopy: f64,
    pub predicted: f64,
    pub gap: f64,
}

/// Intersection number, with a curve meeting its own class zero times.
fn crossings(s: &TriSurface, a: &CurveClass, g: &CurveClass) -> Result<usize, FoliationError> {
    let mut ea: Vec<usize> = a.edges.iter().map(|d| d.edge).collect();
    let mut eg: Vec<usize> = g.edges.iter().map(|d| d.edge).collect();
    ea.sort_unstable();
    eg.sort_unstable();
    if ea == eg {
        return Ok(0);
    }
    Ok(intersection_number(s, a, g)?)
}

pub fn verify_height_identity(
    f: &PLGraphMap,
    fol: &FoliationSpec,
    tests: &[CurveClass],
) -> Result<Vec<HeightIdentityRow>, FoliationError> {
    let s = fol.surface();
    tests
        .iter()
        .map(|a| {
            let mut predicted = 0.0;
            for c in fol.cylinders() {
                predicted += crossings(s, a, &c.core)? as f64 * c.height;
            }
            let measured = f.curve_pointwise_length(a);
            let free_homotopy = f.curve_free_homotopy_length(a);
            Ok(HeightIdentityRow {
                curve: a.label.clone(),
                measured,
                free_homotopy,
                predicted,
                gap: (measured - predicted).abs(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus_gen;

    #[test]
    fn torus_single_cylinder() {
        let g = corpus_gen::square_torus(4, 1.0).unwrap();
        assert_eq!(g.foliation.cylinders().len(), 1);
        assert!(whitehead_equivalent(&g.foliation, &g.foliation, 0.0).unwrap());
    }

    #[test]
    fn parallel_copy_is_duplicate() {
        let g = corpus_gen::square_torus(4, 1.0).unwrap();
        let s = g.foliation.surface_arc();
        let core = s.curve("core").unwrap().clone();
        let par = s.curve("parallel").unwrap().clone();
        let err = make_foliation(s, vec![core, par], vec![1.0, 1.0]).unwrap_err();
        assert!(matches!(err, FoliationError::DuplicateHomotopyClass(..)));
    }

    #[test]
    fn crossing_curves_are_rejected() {
        let g = corpus_gen::square_torus(4, 1.0).unwrap();
        let s = g.foliation.surface_arc();
        let core = s.curve("core").unwrap().clone();
        let mer = s.curve("meridian").unwrap().clone();
        let err = make_foliation(s, vec![core, mer], vec![1.0, 1.0]).unwrap_err();
        assert!(matches!(err, FoliationError::CurvesIntersect(..)));
    }

    #[test]
    fn heights_must_be_positive() {
        let g = corpus_gen::square_torus(4, 1.0).unwrap();
        let s = g.foliation.surface_arc();
        let core = s.curve("core").unwrap().clone();
        let err = make_foliation(s, vec![core], vec![0.0]).unwrap_err();
        assert_eq!(err, FoliationError::NonPositiveHeight("core".into()));
    }

    #[test]
    fn l_shape_two_cylinders() {
        let g = corpus_gen::l_shaped_surface(1).unwrap();
        assert_eq!(g.foliation.labels(), vec!["gamma1", "gamma2"]);
    }

    #[test]
    fn different_heights_are_not_equivalent() {
        let a = corpus_gen::square_torus(4, 1.0).unwrap().foliation;
        let s = a.surface_arc();
        let b = make_foliation(s.clone(), vec![s.curve("core").unwrap().clone()], vec![1.5]).unwrap();
        assert!(!whitehead_equivalent(&a, &b, 0.05).unwrap());
        assert!(whitehead_equivalent(&a, &b, 0.5).unwrap());
        let other = corpus_gen::square_torus(3, 1.0).unwrap().foliation;
        assert_eq!(whitehead_equivalent(&a, &other, 0.05), Err(FoliationError::SurfaceMismatch));
    }

    #[test]
    fn torus_height_identity_on_oracle() {
        let g = corpus_gen::square_torus(4, 1.0).unwrap();
        let s = g.foliation.surface();
        let tests = vec![s.curve("meridian").unwrap().clone(), s.curve("core").unwrap().clone()];
        let rows = verify_height_identity(&g.oracle_map, &g.foliation, &tests).unwrap();
        assert!((rows[0].measured - 1.0).abs() < 1e-12);
        assert_eq!(rows[0].predicted, 1.0);
        assert_eq!(rows[1].predicted, 0.0);
        assert!(rows[1].measured.abs() < 1e-12);
    }

    #[test]
    fn l_shape_identity_crossing_both() {
        let g = corpus_gen::l_shaped_surface(1).unwrap();
        let s = g.foliation.surface();
        let a = s.curve("vertical_a").unwrap().clone();
        let rows = verify_height_identity(&g.oracle_map, &g.foliation, &[a]).unwrap();
        assert_eq!(rows[0].predicted, 2.0);
        assert!(rows[0].gap < 1e-12);
    }
}
