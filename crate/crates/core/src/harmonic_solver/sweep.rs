use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::energy::exact_energy;
use super::local::{exact_change, frechet_mean};
use super::{PLGraphMap, SolverError};
use crate::exact::ExactSum;
use crate::metric_graph::{DirEdge, GraphPath, GraphPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepOrder {
    /// Vertex index ascending; the reproducibility baseline.
    Ascending,
    /// A fresh seeded shuffle per sweep.
    SeededRandom(u64),
    /// Colour classes of the mesh graph in turn; within a class the local
    /// problems are independent and are solved in parallel.
    Colored,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_sweeps: usize,
    pub order: SweepOrder,
    /// Per-move displacement cap; `None` means half the shortest T-edge.
    pub cap: Option<f64>,
    /// Check the image words of all stored curves after every sweep.
    pub check_homotopy: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_sweeps: 10_000, order: SweepOrder::Ascending, cap: None, check_homotopy: true }
    }
}

impl SolveOptions {
    fn cap_for(&self, f: &PLGraphMap) -> f64 {
        self.cap.unwrap_or(0.5 * f.graph().min_edge_length())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceLog {
    /// Energy before the first sweep, then after each sweep.
    pub energies: Vec<f64>,
    pub max_displacements: Vec<f64>,
    /// Exact energy decrease per sweep.
    pub decreases: Vec<f64>,
    pub converged: bool,
}

impl ConvergenceLog {
    pub fn sweeps(&self) -> usize {
        self.max_displacements.len()
    }

    pub fn final_energy(&self) -> f64 {
        *self.energies.last().expect("log has the initial energy")
    }

    /// `Err(MaxSweepsExceeded)` unless the run converged.
    pub fn status(&self) -> Result<(), SolverError> {
        if self.converged {
            Ok(())
        } else {
            Err(SolverError::MaxSweepsExceeded(self.sweeps()))
        }
    }

    /// `sweep,E,max_disp` rows; sweep 0 is the initial map.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sweep,E,max_disp\n");
        for (i, e) in self.energies.iter().enumerate() {
            let d = if i == 0 { 0.0 } else { self.max_displacements[i - 1] };
            out.push_str(&format!("{i},{e:e},{d:e}\n"));
        }
        out
    }
}

/// Outcome of one sweep.
#[derive(Clone, Debug)]
pub struct SweepStats {
    pub max_displacement: f64,
    /// Exact energy change (non-positive).
    pub change: ExactSum,
    pub moved: usize,
}

struct Move {
    v: usize,
    image: GraphPoint,
    paths: Vec<GraphPath>,
    change: ExactSum,
    displacement: f64,
}

/// Solves the local problem at `v` and returns the move if it lowers the
/// exact energy.
fn propose(f: &PLGraphMap, v: usize, cap: Option<f64>) -> Result<Option<Move>, SolverError> {
    let star = f.star_paths(v);
    if star.is_empty() {
        return Ok(None);
    }
    let terms: Vec<(f64, GraphPath)> = star.iter().map(|(_, w, p)| (*w, p.clone())).collect();
    let sol = frechet_mean(f.graph(), &terms, cap)?;
    if sol.relocation.is_constant() {
        return Ok(None);
    }
    let weights: Vec<f64> = terms.iter().map(|(w, _)| *w).collect();
    let old: Vec<GraphPath> = terms.into_iter().map(|(_, p)| p).collect();
    let change = exact_change(&weights, &old, &sol.new_paths);
    if change.value() > 0.0 {
        // rounding in the new position lost more than the move gained
        return Ok(None);
    }
    let g = f.graph();
    // stored paths run v0 -> v1; star paths leave v
    let paths = f
        .incident(v)
        .iter()
        .zip(sol.new_paths)
        .map(|(&(_, is_v0), p)| if is_v0 { p } else { p.inverse(g) })
        .collect();
    Ok(Some(Move { v, image: sol.relocation.end(g), paths, change, displacement: sol.displacement }))
}

/// Replaces the image of `v` by the exact local minimizer (within `cap`).
/// Returns the new map; the energy does not increase.
pub fn relocate_vertex(f: &PLGraphMap, v: usize, cap: Option<f64>) -> Result<PLGraphMap, SolverError> {
    let mut out = f.clone();
    if let Some(m) = propose(f, v, cap)? {
        out.set_vertex(m.v, m.image, m.paths);
    }
    Ok(out)
}

/// Greedy colouring of the mesh vertex graph in index order.
pub fn color_classes(f: &PLGraphMap) -> Vec<Vec<usize>> {
    let s = f.surface();
    let n = s.vertex_count();
    let mut color = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        let used: Vec<usize> = f
            .incident(v)
            .iter()
            .map(|&(e, is_v0)| {
                let m = &s.edges()[e];
                color[if is_v0 { m.v1 } else { m.v0 }]
            })
            .collect();
        let c = (0..).find(|c| !used.contains(c)).unwrap();
        color[v] = c;
        if c == classes.len() {
            classes.push(Vec::new());
        }
        classes[c].push(v);
    }
    classes
}

fn order_for(f: &PLGraphMap, order: SweepOrder, sweep_index: usize, movable: Option<&[bool]>) -> Vec<Vec<usize>> {
    let keep = |v: &usize| movable.is_none_or(|m| m[*v]);
    match order {
        SweepOrder::Ascending => vec![(0..f.surface().vertex_count()).filter(keep).collect()],
        SweepOrder::SeededRandom(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(sweep_index as u64));
            let mut vs: Vec<usize> = (0..f.surface().vertex_count()).filter(keep).collect();
            vs.shuffle(&mut rng);
            vec![vs]
        }
        SweepOrder::Colored => color_classes(f).into_iter().map(|c| c.into_iter().filter(keep).collect()).collect(),
    }
}

/// One Gauss-Seidel pass; `movable` restricts the pass to some vertices.
pub(crate) fn sweep_masked(
    f: &mut PLGraphMap,
    order: SweepOrder,
    cap: Option<f64>,
    sweep_index: usize,
    movable: Option<&[bool]>,
    parallel: bool,
) -> Result<SweepStats, SolverError> {
    let mut stats = SweepStats { max_displacement: 0.0, change: ExactSum::new(), moved: 0 };
    let mut apply = |f: &mut PLGraphMap, m: Move| {
        stats.max_displacement = stats.max_displacement.max(m.displacement);
        stats.change.add_all(&m.change);
        stats.moved += 1;
        f.set_vertex(m.v, m.image, m.paths);
    };
    let batches = order_for(f, order, sweep_index, movable);
    if order == SweepOrder::Colored && parallel {
        for class in batches {
            let snapshot = &*f;
            let moves = crate::par::map_slice(&class, |&v| propose(snapshot, v, cap));
            for m in moves {
                if let Some(m) = m? {
                    apply(f, m);
                }
            }
        }
    } else {
        for v in batches.into_iter().flatten() {
            if let Some(m) = propose(f, v, cap)? {
                apply(f, m);
            }
        }
    }
    Ok(stats)
}

/// One pass over all vertices in `order`.
pub fn sweep(f: &mut PLGraphMap, order: SweepOrder, cap: Option<f64>) -> Result<SweepStats, SolverError> {
    sweep_masked(f, order, cap, 0, None, crate::par::ENABLED)
}

/// As [`sweep`], but never uses the thread pool.
pub fn sweep_sequential(f: &mut PLGraphMap, order: SweepOrder, cap: Option<f64>) -> Result<SweepStats, SolverError> {
    sweep_masked(f, order, cap, 0, None, false)
}

fn curve_words(f: &PLGraphMap) -> Vec<Vec<DirEdge>> {
    f.surface().curves().iter().map(|c| f.curve_word(c)).collect()
}

/// Sweeps until the largest move is below `tol` or a sweep lowers the
/// energy by less than `tol^2`. Energy monotonicity and (optionally) the
/// homotopy class of every stored curve are asserted after each sweep.
pub fn solve(f0: &PLGraphMap, opts: &SolveOptions) -> Result<(PLGraphMap, ConvergenceLog), SolverError> {
    solve_masked(f0, opts, None)
}

pub(crate) fn solve_masked(
    f0: &PLGraphMap,
    opts: &SolveOptions,
    movable: Option<&[bool]>,
) -> Result<(PLGraphMap, ConvergenceLog), SolverError> {
    let mut f = f0.clone();
    let cap = Some(opts.cap_for(&f));
    let words0 = if opts.check_homotopy { curve_words(&f) } else { Vec::new() };
    let mut log = ConvergenceLog { energies: vec![exact_energy(&f).value()], ..Default::default() };
    for k in 0..opts.max_sweeps {
        let stats = sweep_masked(&mut f, opts.order, cap, k, movable, crate::par::ENABLED)?;
        let e = exact_energy(&f).value();
        let prev = log.final_energy();
        if e > prev {
            return Err(SolverError::EnergyIncreased { sweep: k + 1, before: prev, after: e });
        }
        if opts.check_homotopy && curve_words(&f) != words0 {
            return Err(SolverError::HomotopyViolated(k + 1));
        }
        let decrease = -stats.change.value();
        log.energies.push(e);
        log.max_displacements.push(stats.max_displacement);
        log.decreases.push(decrease);
        log::debug!("sweep {}: E = {e:.17e}, max move {:.3e}", k + 1, stats.max_displacement);
        if stats.max_displacement < opts.tol || decrease < opts.tol * opts.tol {
            log.converged = true;
            break;
        }
    }
    Ok((f, log))
}
