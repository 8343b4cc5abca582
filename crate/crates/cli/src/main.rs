//! `strebel`: generate oracle surfaces, solve for the Jenkins-Strebel
//! differential of a cylinder system, verify and plot the results.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod generate;
mod load;
mod report;
mod solve;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use strebel::harmonic_solver::SweepOrder;
use strebel::io::IoError;

/// Failure class of a command; each maps to one exit code.
#[derive(Debug)]
pub enum Fail {
    /// Unreadable or inconsistent input, including hash mismatches.
    Input(anyhow::Error),
    Solver(anyhow::Error),
    Decomposition(anyhow::Error),
    /// The computed foliation is not equivalent to the prescribed one, or
    /// `verify` found defects above tolerance.
    Equivalence(anyhow::Error),
    Output(anyhow::Error),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Input(_) => 2,
            Fail::Solver(_) => 3,
            Fail::Decomposition(_) => 4,
            Fail::Equivalence(_) => 5,
            Fail::Output(_) => 1,
        }
    }

    fn message(&self) -> &anyhow::Error {
        match self {
            Fail::Input(e) | Fail::Solver(e) | Fail::Decomposition(e) | Fail::Equivalence(e) | Fail::Output(e) => e,
        }
    }
}

pub type CmdResult = Result<(), Fail>;

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Order {
    Ascending,
    Random,
    Colored,
}

/// Solver settings shared by `solve`.
#[derive(clap::Args, Debug, Clone, Serialize)]
pub struct SolverArgs {
    /// Stop when the largest vertex move falls below this.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_sweeps: usize,
    #[arg(long, value_enum, default_value_t = Order::Ascending)]
    pub order: Order,
    /// Seed for `--order random`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Loop heights for surfaces with boundary, each half the previous.
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05")]
    pub eps: Vec<f64>,
}

impl SolverArgs {
    pub fn sweep_order(&self) -> SweepOrder {
        match self.order {
            Order::Ascending => SweepOrder::Ascending,
            Order::Random => SweepOrder::SeededRandom(self.seed),
            Order::Colored => SweepOrder::Colored,
        }
    }

    fn check(&self) -> CmdResult {
        if !(self.tol > 0.0) {
            return Err(Fail::Input(anyhow::anyhow!("--tol must be positive")));
        }
        if self.eps.is_empty() || self.eps.iter().any(|e| !(*e > 0.0)) {
            return Err(Fail::Input(anyhow::anyhow!("--eps needs positive values")));
        }
        Ok(())
    }
}

#[derive(Parser)]
#[command(name = "strebel", version, about = "Jenkins-Strebel differentials from harmonic maps to graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve for the differential realizing a cylinder system.
    Solve {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long)]
        foliation: PathBuf,
        /// Start from this map file instead of the leaf-space projection.
        #[arg(long)]
        start: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
        /// Relative height tolerance for the equivalence check.
        #[arg(long, default_value_t = 0.05)]
        equiv_tol: f64,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Check the identities a solved map and its differential must satisfy.
    Verify {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        quad_diff: PathBuf,
        #[arg(long)]
        surface: PathBuf,
        #[arg(long)]
        foliation: PathBuf,
        /// Target graph; defaults to the leaf space of the foliation.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Bound on the pointwise defects.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Relative bound on the height-identity gaps.
        #[arg(long, default_value_t = 0.05)]
        equiv_tol: f64,
        /// Also write the report here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Draw SVG plots from a `solve` output directory.
    Report {
        #[arg(long)]
        artifacts: PathBuf,
        /// Defaults to the artifacts directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Square torus of side 1 cut into `n x n` cells, one cylinder.
    GenTorus {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        height: f64,
        #[arg(long, default_value = "torus")]
        out_dir: PathBuf,
    },
    /// Genus-2 L-shaped surface made of three unit squares, two cylinders.
    GenLshape {
        /// Cells per unit square side are `2^refine`.
        #[arg(long, default_value_t = 2)]
        refine: u32,
        #[arg(long, default_value = "lshape")]
        out_dir: PathBuf,
    },
    /// One-cylinder origami.
    GenOrigami {
        /// Right neighbour of each square, e.g. "1,2,0".
        #[arg(long, value_delimiter = ',', required = true)]
        perm: Vec<usize>,
        /// Square above each square; omit for the fold gluing (surface with
        /// boundary).
        #[arg(long, value_delimiter = ',')]
        vertical: Option<Vec<usize>>,
        /// Cells per square side.
        #[arg(long, default_value_t = 2)]
        refine: u32,
        #[arg(long, default_value = "origami")]
        out_dir: PathBuf,
    },
}

pub fn io_input(e: IoError) -> Fail {
    Fail::Input(e.into())
}

pub fn io_output(e: IoError) -> Fail {
    Fail::Output(e.into())
}

pub fn create_dir(dir: &Path) -> CmdResult {
    std::fs::create_dir_all(dir).map_err(|e| Fail::Output(anyhow::anyhow!("{}: {e}", dir.display())))
}

pub fn write_text(path: &Path, text: &str) -> CmdResult {
    std::fs::write(path, text).map_err(|e| Fail::Output(anyhow::anyhow!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> CmdResult {
    match cli.cmd {
        Cmd::Solve { surface, foliation, start, solver, equiv_tol, out_dir } => {
            solver.check()?;
            solve::run(&surface, &foliation, start.as_deref(), &solver, equiv_tol, &out_dir)
        }
        Cmd::Verify { map, quad_diff, surface, foliation, graph, tol, equiv_tol, out_dir } => verify::run(
            &verify::Inputs { map, quad_diff, surface, foliation, graph },
            tol,
            equiv_tol,
            out_dir.as_deref(),
        ),
        Cmd::Report { artifacts, out_dir } => report::run(&artifacts, out_dir.as_deref().unwrap_or(&artifacts)),
        Cmd::GenTorus { n, height, out_dir } => generate::torus(n, height, &out_dir),
        Cmd::GenLshape { refine, out_dir } => generate::lshape(refine, &out_dir),
        Cmd::GenOrigami { perm, vertical, refine, out_dir } => generate::origami(perm, vertical, refine, &out_dir),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.message());
            ExitCode::from(f.code())
        }
    }
}
