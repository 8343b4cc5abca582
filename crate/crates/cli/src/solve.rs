//! `strebel solve`: leaf space, energy minimization, Hopf differential,
//! cylinder decomposition and the equivalence check.

use std::path::Path;

use anyhow::anyhow;
use serde::Serialize;
use strebel::boundary_limit::{eps_limit, find_alphas, solve_eps, EpsRun};
use strebel::foliation::{whitehead_equivalent_above, CylinderDecomposition, FoliationSpec};
use strebel::harmonic_solver::{energy, solve, ConvergenceLog, PLGraphMap, SolveOptions};
use strebel::hopf::{cylinder_decomposition, dbar_residual, hopf_differential, l1_norm, QuadDiff};
use strebel::io::{content_hash, surface_hash, write_json, QuadDiffFile};

use crate::{create_dir, io_output, load, write_text, CmdResult, Fail, SolverArgs};

#[derive(Serialize)]
struct BoundarySummary {
    alphas: Vec<String>,
    eps: Vec<f64>,
    energies: Vec<f64>,
    norms: Vec<f64>,
    sweeps: Vec<usize>,
    /// Max per-triangle change of Phi between consecutive runs.
    gaps: Vec<f64>,
}

#[derive(Serialize)]
struct Summary<'a> {
    surface_hash: String,
    foliation_hash: String,
    graph_hash: String,
    config: &'a SolverArgs,
    equiv_tol: f64,
    converged: bool,
    sweeps: usize,
    energy: f64,
    l1_norm: f64,
    norm_over_2e: f64,
    dbar_residual: f64,
    prescribed_heights: Vec<f64>,
    heights: Vec<f64>,
    prongs: Vec<usize>,
    zero_order_sum: i64,
    equivalent: bool,
    boundary: Option<BoundarySummary>,
}

struct Outcome {
    map: PLGraphMap,
    log: ConvergenceLog,
    quad: QuadDiff,
    /// Foliation the final map was solved for (augmented if T has boundary).
    solved_for: FoliationSpec,
    min_height: f64,
    boundary: Option<BoundarySummary>,
}

fn opts(args: &SolverArgs) -> SolveOptions {
    SolveOptions { tol: args.tol, max_sweeps: args.max_sweeps, order: args.sweep_order(), ..Default::default() }
}

fn closed(fol: &FoliationSpec, start: Option<PLGraphMap>, args: &SolverArgs, dir: &Path) -> Result<Outcome, Fail> {
    let leaf = strebel::metric_graph::build_leaf_space(fol).map_err(|e| Fail::Input(e.into()))?;
    let f0 = start.unwrap_or(leaf.projection);
    let (map, log) = solve(&f0, &opts(args)).map_err(|e| Fail::Solver(e.into()))?;
    if let Err(e) = log.status() {
        write_text(&dir.join("log.csv"), &log.to_csv())?;
        return Err(Fail::Solver(e.into()));
    }
    let quad = hopf_differential(&map);
    Ok(Outcome { map, log, quad, solved_for: fol.clone(), min_height: 0.0, boundary: None })
}

fn with_boundary(fol: &FoliationSpec, args: &SolverArgs) -> Result<Outcome, Fail> {
    if args.eps.len() < 3 || args.eps.windows(2).any(|w| w[1] != 0.5 * w[0]) {
        return Err(Fail::Input(anyhow!("--eps needs at least 3 values, each half the previous")));
    }
    let alphas = find_alphas(fol).map_err(|e| Fail::Input(e.into()))?;
    let mut runs: Vec<EpsRun> = Vec::new();
    for &e in &args.eps {
        let run = solve_eps(fol, &alphas, &vec![e; alphas.len()], &opts(args), runs.last())
            .map_err(|err| Fail::Solver(anyhow!("eps {e}: {err}")))?;
        log::info!("eps {e}: {} sweeps, E = {}", run.log.sweeps(), run.energy.total);
        runs.push(run);
    }
    let lim = eps_limit(&runs).map_err(|e| Fail::Solver(e.into()))?;
    let sweeps = runs.iter().map(|r| r.log.sweeps()).collect();
    let last = runs.pop().expect("at least 3 runs");
    let boundary = BoundarySummary {
        alphas: alphas.iter().map(|a| a.label.clone()).collect(),
        eps: args.eps.clone(),
        energies: lim.energies,
        norms: lim.norms,
        sweeps,
        gaps: lim.gaps,
    };
    Ok(Outcome {
        min_height: 2.0 * args.eps.last().unwrap(),
        map: last.map,
        log: last.log,
        quad: lim.quad,
        solved_for: last.foliation,
        boundary: Some(boundary),
    })
}

pub fn run(
    surface_path: &Path,
    foliation_path: &Path,
    start: Option<&Path>,
    args: &SolverArgs,
    equiv_tol: f64,
    dir: &Path,
) -> CmdResult {
    let surface = load::surface(surface_path)?;
    let (fol, fol_file) = load::foliation(foliation_path, surface.clone())?;
    let leaf = strebel::metric_graph::build_leaf_space(&fol).map_err(|e| Fail::Input(e.into()))?;
    create_dir(dir)?;
    let out = if leaf.boundary_points().is_empty() {
        let start = match start {
            Some(p) => Some(load::map(p, surface.clone(), leaf.graph.clone())?),
            None => None,
        };
        closed(&fol, start, args, dir)?
    } else {
        if start.is_some() {
            return Err(Fail::Input(anyhow!("--start is not supported when the leaf space has boundary")));
        }
        with_boundary(&fol, args)?
    };

    let Outcome { map, log, quad, solved_for, min_height, boundary } = out;
    write_json(&dir.join("surface.json"), &surface.to_desc()).map_err(io_output)?;
    write_json(&dir.join("graph.json"), &map.graph().to_file()).map_err(io_output)?;
    write_json(&dir.join("map.json"), &map.to_file()).map_err(io_output)?;
    write_json(&dir.join("quad_diff.json"), &QuadDiffFile::new(&surface, &quad)).map_err(io_output)?;
    write_text(&dir.join("log.csv"), &log.to_csv())?;

    let decomposition: CylinderDecomposition =
        cylinder_decomposition(&map, &quad, &solved_for).map_err(|e| Fail::Decomposition(e.into()))?;
    write_json(&dir.join("decomposition.json"), &decomposition).map_err(io_output)?;
    let equivalent = whitehead_equivalent_above(&decomposition, &fol, equiv_tol, min_height)
        .map_err(|e| Fail::Decomposition(e.into()))?;

    let e = energy(&map).total;
    let norm = l1_norm(&quad);
    let main = fol.cylinders().len();
    let summary = Summary {
        surface_hash: surface_hash(&surface),
        foliation_hash: content_hash(&fol_file),
        graph_hash: map.graph().content_hash(),
        config: args,
        equiv_tol,
        converged: log.converged,
        sweeps: log.sweeps(),
        energy: e,
        l1_norm: norm,
        norm_over_2e: norm / (2.0 * e),
        dbar_residual: dbar_residual(&quad),
        prescribed_heights: fol.cylinders().iter().map(|c| c.height).collect(),
        heights: decomposition.cylinders.iter().take(main).map(|c| c.height).collect(),
        prongs: decomposition.singular_set.iter().map(|s| s.prongs).collect(),
        zero_order_sum: decomposition.zero_order_sum(),
        equivalent,
        boundary,
    };
    write_json(&dir.join("summary.json"), &summary).map_err(io_output)?;
    println!(
        "{} sweeps, E = {:.12}, |Phi|/2E = {:.12}, heights {:?}, equivalent {}",
        summary.sweeps, summary.energy, summary.norm_over_2e, summary.heights, equivalent
    );
    if !equivalent {
        return Err(Fail::Equivalence(anyhow!(
            "measured heights {:?} differ from the prescribed {:?} beyond {equiv_tol}",
            summary.heights,
            summary.prescribed_heights
        )));
    }
    Ok(())
}
