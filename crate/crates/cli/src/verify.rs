//! `strebel verify`: recomputes the differential of a stored map and checks
//! it against the stored one and against the identities it must satisfy.

use std::path::{Path, PathBuf};

use anyhow::anyhow;
use serde::Serialize;
use strebel::boundary_limit::{augment, find_alphas};
use strebel::foliation::{verify_height_identity, FoliationSpec, HeightIdentityRow};
use strebel::harmonic_solver::energy;
use strebel::hopf::{cylinder_decomposition, dbar_residual, hopf_differential, l1_norm, vertical_collapse_check};
use strebel::io::{read_json, surface_hash, write_json, QuadDiffFile};
use strebel::metric_graph::{build_leaf_space, MetricGraph};

use crate::{create_dir, io_input, io_output, load, CmdResult, Fail};

pub struct Inputs {
    pub map: PathBuf,
    pub quad_diff: PathBuf,
    pub surface: PathBuf,
    pub foliation: PathBuf,
    pub graph: Option<PathBuf>,
}

#[derive(Serialize)]
struct Report {
    surface_hash: String,
    graph_hash: String,
    /// Largest |Phi_file - Phi_recomputed|; infinite if singular sets differ.
    stored_phi_defect: f64,
    dbar_residual: f64,
    vertical_collapse: f64,
    l1_norm: f64,
    energy: f64,
    norm_over_2e: f64,
    height_identity: Vec<HeightIdentityRow>,
    worst_height_gap: f64,
    zero_order_sum: Option<i64>,
    expected_zero_order_sum: i64,
    decomposition_error: Option<String>,
    tol: f64,
    equiv_tol: f64,
    pass: bool,
}

/// The foliation the map was solved for: `fol` itself, or `fol` with one
/// loop cylinder per boundary point, the loop lengths read off the graph.
fn solved_foliation(fol: &FoliationSpec, graph: &MetricGraph) -> Result<FoliationSpec, Fail> {
    let main = fol.cylinders().len();
    if graph.edge_count() == main {
        return Ok(fol.clone());
    }
    let alphas = find_alphas(fol).map_err(|e| Fail::Input(e.into()))?;
    if main + alphas.len() != graph.edge_count() {
        return Err(Fail::Input(anyhow!(
            "graph has {} edges, the foliation accounts for {}",
            graph.edge_count(),
            main + alphas.len()
        )));
    }
    let eps: Vec<f64> = (main..graph.edge_count()).map(|e| graph.len(e)).collect();
    augment(fol, &alphas, &eps).map_err(|e| Fail::Input(e.into()))
}

pub fn run(inputs: &Inputs, tol: f64, equiv_tol: f64, out_dir: Option<&Path>) -> CmdResult {
    let surface = load::surface(&inputs.surface)?;
    let (fol, _) = load::foliation(&inputs.foliation, surface.clone())?;
    let graph = match &inputs.graph {
        Some(p) => load::graph(p)?,
        None => build_leaf_space(&fol).map_err(|e| Fail::Input(e.into()))?.graph,
    };
    let map = load::map(&inputs.map, surface.clone(), graph.clone())?;
    let stored: QuadDiffFile = read_json(&inputs.quad_diff).map_err(io_input)?;
    if stored.surface_hash != surface_hash(&surface) {
        return Err(load::hash_mismatch("surface", &inputs.quad_diff));
    }
    let fol = solved_foliation(&fol, &graph)?;

    let q = hopf_differential(&map);
    let stored_phi = stored.phi();
    let stored_phi_defect = if stored_phi.len() != q.phi.len() {
        f64::INFINITY
    } else {
        stored_phi
            .iter()
            .zip(&q.phi)
            .map(|(a, b)| match (a, b) {
                (Some(a), Some(b)) => (a - b).norm(),
                (None, None) => 0.0,
                _ => f64::INFINITY,
            })
            .fold(0.0, f64::max)
    };
    let e = energy(&map).total;
    let norm = l1_norm(&q);
    let cores: Vec<&str> = fol.cylinders().iter().map(|c| c.core.label.as_str()).collect();
    let tests: Vec<_> = surface.curves().iter().filter(|c| !cores.contains(&c.label.as_str())).cloned().collect();
    let rows = verify_height_identity(&map, &fol, &tests).map_err(|e| Fail::Input(e.into()))?;
    let worst = rows
        .iter()
        .map(|r| if r.predicted > 0.0 { r.gap / r.predicted } else { r.gap })
        .fold(0.0, f64::max);
    let decomposition = cylinder_decomposition(&map, &q, &fol);

    let mut report = Report {
        surface_hash: surface_hash(&surface),
        graph_hash: graph.content_hash(),
        stored_phi_defect,
        dbar_residual: dbar_residual(&q),
        vertical_collapse: vertical_collapse_check(&map, &q),
        l1_norm: norm,
        energy: e,
        norm_over_2e: norm / (2.0 * e),
        height_identity: rows,
        worst_height_gap: worst,
        zero_order_sum: decomposition.as_ref().ok().map(|d| d.zero_order_sum()),
        expected_zero_order_sum: 4 * surface.genus() - 4,
        decomposition_error: decomposition.as_ref().err().map(|e| e.to_string()),
        tol,
        equiv_tol,
        pass: false,
    };
    let defects = [report.stored_phi_defect, report.dbar_residual, report.vertical_collapse, (report.norm_over_2e - 1.0).abs()];
    report.pass = defects.iter().all(|d| *d <= tol) && worst <= equiv_tol && decomposition.is_ok();

    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    println!("{text}");
    if let Some(dir) = out_dir {
        create_dir(dir)?;
        write_json(&dir.join("verify.json"), &report).map_err(io_output)?;
    }
    if report.pass {
        Ok(())
    } else {
        Err(Fail::Equivalence(anyhow!(
            "defects above tolerance: stored Phi {:.1e}, dbar {:.1e}, collapse {:.1e}, |norm/2E - 1| {:.1e}, height gap {:.1e}{}",
            defects[0],
            defects[1],
            defects[2],
            defects[3],
            worst,
            report.decomposition_error.as_deref().map(|e| format!(", decomposition: {e}")).unwrap_or_default()
        )))
    }
}
