use serde::{Deserialize, Serialize};

use super::PLGraphMap;
use crate::exact::{add_half_weighted_square, fsum, ExactSum};
use crate::hopf::quad_diff::{develop, gradient};
use crate::par;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// `1/2 sum_e w_e l_e^2`, correctly rounded.
    pub total: f64,
    pub per_edge: Vec<f64>,
    /// Each triangle's share `1/4 sum_k cot(theta_k) l_k^2`.
    pub per_triangle: Vec<f64>,
    /// `1/2 |grad u|^2` on triangles whose images are collinear.
    pub per_triangle_density: Vec<Option<f64>>,
    /// Edges with non-positive cotangent weight.
    pub negative_weight_edges: Vec<usize>,
}

/// Exact energy as an error-free expansion.
pub(crate) fn exact_energy(f: &PLGraphMap) -> ExactSum {
    let s = f.surface();
    let mut acc = ExactSum::new();
    for (e, p) in f.paths().iter().enumerate() {
        add_half_weighted_square(&mut acc, s.cotan_weight(e), &p.length_parts());
    }
    acc
}

pub fn energy(f: &PLGraphMap) -> EnergyReport {
    let s = f.surface();
    let per_edge: Vec<f64> = f
        .paths()
        .iter()
        .enumerate()
        .map(|(e, p)| {
            let l = p.length();
            0.5 * s.cotan_weight(e) * l * l
        })
        .collect();
    let per_triangle = par::map_range(s.triangle_count(), |t| {
        let ang = s.corner_angles()[t];
        let terms: Vec<f64> = (0..3)
            .map(|k| {
                let l = f.path(s.triangle_edges()[t][k]).length();
                0.25 * l * l / ang[(k + 2) % 3].tan()
            })
            .collect();
        fsum(&terms)
    });
    let per_triangle_density = par::map_range(s.triangle_count(), |t| {
        develop(f, t).map(|u| {
            let g = gradient(&s.chart(t), u);
            0.5 * (g[0] * g[0] + g[1] * g[1])
        })
    });
    EnergyReport {
        total: exact_energy(f).value(),
        per_edge,
        per_triangle,
        per_triangle_density,
        negative_weight_edges: (0..s.edge_count()).filter(|&e| s.cotan_weight(e) <= 0.0).collect(),
    }
}

impl EnergyReport {
    /// Energy carried by the given triangles.
    pub fn energy_on(&self, triangles: &[usize]) -> f64 {
        fsum(&triangles.iter().map(|&t| self.per_triangle[t]).collect::<Vec<_>>())
    }
}
