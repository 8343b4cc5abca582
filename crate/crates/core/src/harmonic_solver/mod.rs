//! Energy minimization of piecewise-linear maps into metric graphs by exact
//! vertex-star replacement (Gauss-Seidel over vertices).

pub mod disk;
pub mod energy;
pub mod local;
pub mod map;
pub mod sweep;

use thiserror::Error;

pub use disk::{in_tree_span, solve_disk_dirichlet, DiskSolution};
pub use energy::{energy, EnergyReport};
pub use local::{frechet_mean, LocalSolution};
pub use map::{MapError, MapFile, PLGraphMap};
pub use sweep::{color_classes, relocate_vertex, solve, sweep, sweep_sequential, ConvergenceLog, SolveOptions, SweepOrder, SweepStats};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("incident weights sum to {0}; the local minimizer is not defined")]
    NegativeWeightAmbiguity(f64),
    #[error("no convergence after {0} sweeps")]
    MaxSweepsExceeded(usize),
    #[error("energy increased in sweep {sweep}: {before} -> {after}")]
    EnergyIncreased { sweep: usize, before: f64, after: f64 },
    #[error("curve image words changed in sweep {0}")]
    HomotopyViolated(usize),
    #[error("target graph is not a tree")]
    NotSimplyConnected,
    #[error("no boundary values given")]
    NoBoundary,
    #[error("boundary vertex {0} has no prescribed image")]
    MissingBoundaryValue(usize),
}
