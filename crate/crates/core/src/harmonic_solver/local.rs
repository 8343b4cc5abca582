//! Exact weighted Frechet mean in the universal-cover tree.
//!
//! The neighbours of a vertex are given as reduced paths `P_i` from its
//! current image. In the tree the minimizer lies in the convex hull of the
//! neighbours, which is covered by the `P_i`. Along `P_i` at distance `s`
//! the distance to neighbour `j` is `l_j - s` before the two paths split
//! (common prefix `c_ij`) and `s + l_j - 2 c_ij` after, so the objective is
//! a convex piecewise quadratic in `s` with breakpoints at the `c_ij`.

use super::SolverError;
use crate::exact::{add_half_weighted_square, ExactSum};
use crate::metric_graph::{GraphPath, MetricGraph};

#[derive(Clone, Debug)]
pub struct LocalSolution {
    /// Path from the old image to the new one.
    pub relocation: GraphPath,
    /// Neighbour paths re-based at the new image.
    pub new_paths: Vec<GraphPath>,
    /// `1/2 sum_j w_j d_j^2` at the new image.
    pub objective: f64,
    pub displacement: f64,
}

/// Minimizes `1/2 sum_j w_j d(x, y_j)^2` over points `x` of the tree,
/// moving at most `cap` from the base point.
pub fn frechet_mean(g: &MetricGraph, terms: &[(f64, GraphPath)], cap: Option<f64>) -> Result<LocalSolution, SolverError> {
    let wsum: f64 = terms.iter().map(|(w, _)| w).sum();
    if !(wsum > 0.0) {
        return Err(SolverError::NegativeWeightAmbiguity(wsum));
    }
    let base = terms[0].1.start();
    let lens: Vec<f64> = terms.iter().map(|(_, p)| p.length()).collect();
    // (decrease from the base value, distance, path); decreases are
    // integrated piece by piece so that tiny moves are compared accurately
    let mut best = (0.0, 0.0, 0usize);

    for (i, (_, pi)) in terms.iter().enumerate() {
        let reach = cap.map_or(lens[i], |c| c.min(lens[i]));
        if reach <= 0.0 {
            continue;
        }
        let common: Vec<f64> = terms
            .iter()
            .enumerate()
            .map(|(j, (_, pj))| if j == i { lens[i] } else { pi.common_prefix_length(pj) })
            .collect();
        let mut breaks: Vec<f64> = common.iter().copied().filter(|&c| c > 0.0 && c < reach).collect();
        breaks.push(0.0);
        breaks.push(reach);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let mut acc = 0.0;
        for win in breaks.windows(2) {
            let (a, b) = (win[0], win[1]);
            let mid = 0.5 * (a + b);
            // on (a, b) the derivative is wsum * s + num
            let mut num = 0.0;
            for (j, (w, _)) in terms.iter().enumerate() {
                let (off, sign) = if mid <= common[j] { (lens[j], -1.0) } else { (lens[j] - 2.0 * common[j], 1.0) };
                num += w * off * sign;
            }
            let s = (-num / wsum).clamp(a, b);
            let delta = acc + (0.5 * wsum * (s + a) + num) * (s - a);
            if delta < best.0 || (delta == best.0 && s < best.1) {
                best = (delta, s, i);
            }
            if s < b {
                // convex along the path: nothing further is lower
                break;
            }
            acc = delta;
        }
    }

    let (_, s, i) = best;
    let relocation = if s > 0.0 { terms[i].1.prefix(g, s) } else { GraphPath::constant(base) };
    let rinv = relocation.inverse(g);
    let new_paths: Vec<GraphPath> = terms
        .iter()
        .map(|(_, p)| rinv.concat(g, p).expect("relocation starts at the base"))
        .collect();
    let objective = terms.iter().zip(&new_paths).map(|((w, _), p)| 0.5 * w * p.length() * p.length()).sum();
    Ok(LocalSolution { displacement: relocation.length(), relocation, new_paths, objective })
}

/// Exact change of `1/2 sum w l^2` when the paths `old` are replaced by `new`.
pub(crate) fn exact_change(weights: &[f64], old: &[GraphPath], new: &[GraphPath]) -> ExactSum {
    let mut after = ExactSum::new();
    let mut before = ExactSum::new();
    for ((w, o), n) in weights.iter().zip(old).zip(new) {
        add_half_weighted_square(&mut after, *w, &n.length_parts());
        add_half_weighted_square(&mut before, *w, &o.length_parts());
    }
    after.sub_all(&before);
    after
}
