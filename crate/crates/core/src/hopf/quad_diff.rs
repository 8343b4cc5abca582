use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::flat_surface::{Point2, TriSurface};
use crate::harmonic_solver::PLGraphMap;
use crate::par;

/// Below this, a tripod leg counts as collapsed.
pub const COLLINEAR_EPS: f64 = 1e-12;

/// Chart change across an interior edge: `dz_a = rho * dz_b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub edge: usize,
    pub tri_a: usize,
    pub tri_b: usize,
    pub rho: Complex64,
}

/// Piecewise-constant Hopf differential, one coefficient per triangle chart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadDiff {
    /// `None` on singular triangles (images span a tripod).
    pub phi: Vec<Option<Complex64>>,
    pub transitions: Vec<Transition>,
    pub areas: Vec<f64>,
}

/// Developed values of the three corner images along the geodesic they
/// span, with corner 0 at 0; `None` if the images span a tripod.
pub(crate) fn develop(f: &PLGraphMap, t: usize) -> Option<[f64; 3]> {
    let s = f.surface();
    let g = f.graph();
    let p01 = f.dir_path(s.half_edge_dir(3 * t));
    let p02 = f.dir_path(s.half_edge_dir(3 * t + 2)).inverse(g);
    let (l01, l02) = (p01.length(), p02.length());
    let c = p01.common_prefix_length(&p02);
    let (la, lb, lc) = (c, (l01 - c).max(0.0), (l02 - c).max(0.0));
    let m = la.min(lb).min(lc);
    if m > COLLINEAR_EPS {
        return None;
    }
    if la == m {
        Some([0.0, l01, -l02])
    } else {
        Some([0.0, l01, l02])
    }
}

/// Gradient of the affine interpolant of `u` over chart corners `p`.
pub(crate) fn gradient(p: &[Point2; 3], u: [f64; 3]) -> [f64; 2] {
    let gx = (u[1] - u[0]) / p[1][0];
    let gy = ((u[2] - u[0]) - gx * p[2][0]) / p[2][1];
    [gx, gy]
}

/// `4 u_z^2` for the gradient `(gx, gy)`.
pub(crate) fn phi_of_gradient(g: [f64; 2]) -> Complex64 {
    let uz = Complex64::new(g[0], -g[1]);
    uz * uz
}

fn side_vector(s: &TriSurface, h: usize) -> Complex64 {
    let c = s.chart(h / 3);
    let (a, b) = (c[h % 3], c[(h % 3 + 1) % 3]);
    Complex64::new(b[0] - a[0], b[1] - a[1])
}

pub fn transitions(s: &TriSurface) -> Vec<Transition> {
    let mut out = Vec::new();
    for h in 0..3 * s.triangle_count() {
        let Some(k) = s.twin(h) else { continue };
        if k < h {
            continue;
        }
        // the shared side runs opposite ways in the two charts
        let rho = side_vector(s, h) / -side_vector(s, k);
        let rho = rho / rho.norm();
        out.push(Transition { edge: s.half_edge_edge(h), tri_a: h / 3, tri_b: k / 3, rho });
    }
    out
}

pub fn hopf_differential(f: &PLGraphMap) -> QuadDiff {
    let s = f.surface();
    let phi = par::map_range(s.triangle_count(), |t| {
        develop(f, t).map(|u| phi_of_gradient(gradient(&s.chart(t), u)))
    });
    QuadDiff {
        phi,
        transitions: transitions(s),
        areas: (0..s.triangle_count()).map(|t| s.triangle_area(t)).collect(),
    }
}

impl QuadDiff {
    pub fn singular_triangles(&self) -> Vec<usize> {
        (0..self.phi.len()).filter(|&t| self.phi[t].is_none()).collect()
    }

    pub fn singular_area(&self) -> f64 {
        crate::exact::fsum(&self.singular_triangles().iter().map(|&t| self.areas[t]).collect::<Vec<_>>())
    }

    /// `Phi_b` expressed in chart `a`.
    pub(crate) fn transported(&self, tr: &Transition) -> Option<Complex64> {
        let pb = self.phi[tr.tri_b]?;
        let c = tr.rho.conj();
        Some(pb * c * c)
    }
}

/// Area-weighted mismatch of neighbouring coefficients across interior
/// edges, normalized by total area.
pub fn dbar_residual(q: &QuadDiff) -> f64 {
    let total = crate::exact::fsum(&q.areas);
    let terms: Vec<f64> = q
        .transitions
        .iter()
        .filter_map(|tr| {
            let pa = q.phi[tr.tri_a]?;
            let pb = q.transported(tr)?;
            Some(0.5 * (q.areas[tr.tri_a] + q.areas[tr.tri_b]) * (pa - pb).norm())
        })
        .collect();
    crate::exact::fsum(&terms) / total
}

/// `sum_t |Phi_t| area_t` over non-singular triangles.
pub fn l1_norm(q: &QuadDiff) -> f64 {
    let terms: Vec<f64> =
        q.phi.iter().zip(&q.areas).filter_map(|(p, a)| p.map(|p| p.norm() * a)).collect();
    crate::exact::fsum(&terms)
}

/// Largest `|grad u . v| / |grad u|` over non-singular triangles, where `v`
/// is the vertical direction of the neighbourhood-averaged differential.
pub fn vertical_collapse_check(f: &PLGraphMap, q: &QuadDiff) -> f64 {
    let s = f.surface();
    let mut nbrs: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); q.phi.len()];
    for tr in &q.transitions {
        nbrs[tr.tri_a].push((tr.tri_b, tr.rho));
        nbrs[tr.tri_b].push((tr.tri_a, tr.rho.conj()));
    }
    let defects = par::map_range(q.phi.len(), |t| {
        let (Some(pt), Some(u)) = (q.phi[t], develop(f, t)) else { return 0.0 };
        let g = gradient(&s.chart(t), u);
        let norm = g[0].hypot(g[1]);
        if norm == 0.0 {
            return 0.0;
        }
        let mut avg = pt * q.areas[t];
        for &(n, rho) in &nbrs[t] {
            // rho: dz_t = rho dz_n
            if let Some(pn) = q.phi[n] {
                let c = rho.conj();
                avg += pn * c * c * q.areas[n];
            }
        }
        if avg.norm() == 0.0 {
            return 0.0;
        }
        // Phi v^2 < 0 along vertical trajectories
        let psi = 0.5 * (std::f64::consts::PI - avg.arg());
        (g[0] * psi.cos() + g[1] * psi.sin()).abs() / norm
    });
    defects.into_iter().fold(0.0, f64::max)
}
