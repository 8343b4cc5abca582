//! Leaf spaces with boundary: each boundary point of T gets a loop of
//! length `eps` (a thin cylinder around a curve in the singular leaf), the
//! augmented problems are solved, and the differentials are followed as
//! `eps -> 0`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::add_half_weighted_square;
use crate::exact::ExactSum;
use crate::flat_surface::CurveClass;
use crate::foliation::{make_foliation, FoliationError, FoliationSpec};
use crate::harmonic_solver::{energy, solve, ConvergenceLog, EnergyReport, PLGraphMap, SolveOptions, SolverError};
use crate::hopf::{hopf_differential, l1_norm, QuadDiff};
use crate::metric_graph::{build_leaf_space, GraphPath, GraphPoint, MetricGraph, Seg};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundaryError {
    #[error("expected {expected} loop curves/lengths (one per boundary point), got {got}")]
    WrongCount { expected: usize, got: usize },
    #[error("curve {0} does not project to its boundary point of the leaf space")]
    AlphaNotInSingularLeaf(String),
    #[error("no stored curve projects to boundary point {0} of the leaf space")]
    NoAlpha(usize),
    #[error("eps[{index}] = {eps} exceeds kappa = {kappa}")]
    NotDominated { index: usize, eps: f64, kappa: f64 },
    #[error("differentials do not settle; gaps {gaps:?}")]
    NotCauchy { gaps: Vec<f64> },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Foliation(#[from] FoliationError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// For each boundary point of the leaf space, the first stored curve that
/// projects onto it.
pub fn find_alphas(fol: &FoliationSpec) -> Result<Vec<CurveClass>, BoundaryError> {
    let leaf = build_leaf_space(fol)?;
    let g = &leaf.graph;
    leaf.boundary_points()
        .into_iter()
        .map(|b| {
            fol.surface()
                .curves()
                .iter()
                .find(|c| {
                    let img = leaf.projection.curve_image(c);
                    img.is_constant() && g.vertex_at(img.start()) == Some(b)
                })
                .cloned()
                .ok_or(BoundaryError::NoAlpha(b))
        })
        .collect()
}

/// Adds `alphas[j]` with height `eps[j]` as new cylinders. `alphas[j]` must
/// lie in the singular leaf over the `j`-th boundary point of T.
pub fn augment(fol: &FoliationSpec, alphas: &[CurveClass], eps: &[f64]) -> Result<FoliationSpec, BoundaryError> {
    let leaf = build_leaf_space(fol)?;
    let bd = leaf.boundary_points();
    for got in [alphas.len(), eps.len()] {
        if got != bd.len() {
            return Err(BoundaryError::WrongCount { expected: bd.len(), got });
        }
    }
    if bd.is_empty() {
        return Ok(fol.clone());
    }
    let g = &leaf.graph;
    for (a, &b) in alphas.iter().zip(&bd) {
        let img = leaf.projection.curve_image(a);
        if !img.is_constant() || g.vertex_at(img.start()) != Some(b) {
            return Err(BoundaryError::AlphaNotInSingularLeaf(a.label.clone()));
        }
    }
    let mut curves: Vec<CurveClass> = fol.cylinders().iter().map(|c| c.core.clone()).collect();
    let mut heights: Vec<f64> = fol.cylinders().iter().map(|c| c.height).collect();
    curves.extend(alphas.iter().cloned());
    heights.extend_from_slice(eps);
    Ok(make_foliation(fol.surface_arc(), curves, heights)?)
}

/// One solved augmented problem.
#[derive(Clone, Debug)]
pub struct EpsRun {
    pub eps: Vec<f64>,
    pub foliation: FoliationSpec,
    /// Number of original cylinders; T-edges `main..` are the loops.
    pub main: usize,
    pub map: PLGraphMap,
    pub log: ConvergenceLog,
    pub quad: QuadDiff,
    pub energy: EnergyReport,
}

impl EpsRun {
    pub fn graph(&self) -> &MetricGraph {
        self.map.graph()
    }

    /// `||Phi||_1`.
    pub fn norm(&self) -> f64 {
        l1_norm(&self.quad)
    }
}

/// Carries `f` onto `g` (same combinatorics, other edge lengths) by scaling
/// every edge affinely.
pub fn rescale_map(f: &PLGraphMap, g: Arc<MetricGraph>) -> PLGraphMap {
    let old = f.graph();
    let scale: Vec<f64> = (0..old.edge_count()).map(|e| g.len(e) / old.len(e)).collect();
    let point = |p: GraphPoint| match old.vertex_at(p) {
        Some(v) => g.vertex_point(v),
        None => g.point(p.edge, p.t * scale[p.edge]),
    };
    let images: Vec<GraphPoint> = f.images().iter().map(|&p| point(p)).collect();
    let paths = f
        .paths()
        .iter()
        .map(|p| {
            let segs = p
                .segs()
                .iter()
                .map(|s| Seg { edge: s.edge, from: s.from * scale[s.edge], to: s.to * scale[s.edge] })
                .collect();
            GraphPath::from_segs(&g, point(p.start()), segs)
        })
        .collect();
    PLGraphMap::new(f.surface_arc(), g, images, paths).expect("affine image of a continuous map")
}

/// Augments, solves (from `warm` rescaled, else from the projection) and
/// computes the differential. Fails unless the solve converged.
pub fn solve_eps(
    fol: &FoliationSpec,
    alphas: &[CurveClass],
    eps: &[f64],
    opts: &SolveOptions,
    warm: Option<&EpsRun>,
) -> Result<EpsRun, BoundaryError> {
    let aug = augment(fol, alphas, eps)?;
    let leaf = build_leaf_space(&aug)?;
    let f0 = match warm {
        Some(r) => rescale_map(&r.map, leaf.graph.clone()),
        None => leaf.projection.clone(),
    };
    let (map, log) = solve(&f0, opts)?;
    log.status()?;
    let quad = hopf_differential(&map);
    let energy = energy(&map);
    Ok(EpsRun { eps: eps.to_vec(), foliation: aug, main: fol.cylinders().len(), map, log, quad, energy })
}

/// Energy of the `kappa` solution pushed into `T_eps` by the edgewise affine
/// map that shrinks loop `j` from `kappa_j` to `eps_j`. Bounds the minimal
/// energy of the `eps` problem from above.
pub fn comparison_bound(run_kappa: &EpsRun, eps: &[f64]) -> Result<f64, BoundaryError> {
    let kappa = &run_kappa.eps;
    if eps.len() != kappa.len() {
        return Err(BoundaryError::WrongCount { expected: kappa.len(), got: eps.len() });
    }
    for (index, (&e, &k)) in eps.iter().zip(kappa).enumerate() {
        if !(e > 0.0) || e > k {
            return Err(BoundaryError::NotDominated { index, eps: e, kappa: k });
        }
    }
    let f = &run_kappa.map;
    let s = f.surface();
    let mut scale = vec![1.0; f.graph().edge_count()];
    for (j, (&e, &k)) in eps.iter().zip(kappa).enumerate() {
        scale[run_kappa.main + j] = e / k;
    }
    let mut acc = ExactSum::new();
    for (m, p) in f.paths().iter().enumerate() {
        let parts: Vec<f64> = p.segs().iter().map(|sg| sg.length() * scale[sg.edge]).collect();
        add_half_weighted_square(&mut acc, s.cotan_weight(m), &parts);
    }
    Ok(acc.value())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsLimit {
    pub quad: QuadDiff,
    /// Max per-triangle `|Phi_eps - Phi_{eps/2}|` for consecutive runs.
    pub gaps: Vec<f64>,
    pub energies: Vec<f64>,
    pub norms: Vec<f64>,
}

/// Follows the differentials along runs with `eps` halved each time and
/// returns the last one once the gaps between consecutive runs shrink.
pub fn eps_limit(runs: &[EpsRun]) -> Result<EpsLimit, BoundaryError> {
    if runs.len() < 3 {
        return Err(BoundaryError::Precondition(format!("need at least 3 runs, got {}", runs.len())));
    }
    for w in runs.windows(2) {
        if w[0].eps.len() != w[1].eps.len() || w[0].eps.iter().zip(&w[1].eps).any(|(a, b)| *b != 0.5 * a) {
            return Err(BoundaryError::Precondition("eps must be halved between consecutive runs".into()));
        }
        if w[0].map.surface_arc().triangle_count() != w[1].map.surface().triangle_count() {
            return Err(BoundaryError::Precondition("runs are on different meshes".into()));
        }
    }
    if let Some(r) = runs.iter().find(|r| !r.log.converged) {
        return Err(BoundaryError::Precondition(format!("run at eps {:?} did not converge", r.eps)));
    }
    let gaps: Vec<f64> = runs
        .windows(2)
        .map(|w| {
            w[0].quad
                .phi
                .iter()
                .zip(&w[1].quad.phi)
                .filter_map(|(a, b)| Some((a.as_ref()? - b.as_ref()?).norm()))
                .fold(0.0, f64::max)
        })
        .collect();
    if gaps.windows(2).any(|w| w[1] > w[0]) {
        return Err(BoundaryError::NotCauchy { gaps });
    }
    Ok(EpsLimit {
        quad: runs.last().unwrap().quad.clone(),
        gaps,
        energies: runs.iter().map(|r| r.energy.total).collect(),
        norms: runs.iter().map(EpsRun::norm).collect(),
    })
}
