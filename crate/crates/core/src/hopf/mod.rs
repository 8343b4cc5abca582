//! Hopf differential of a map to a metric graph and the foliation it
//! defines.

pub mod decomposition;
pub mod quad_diff;

pub use decomposition::{cylinder_decomposition, prongs, DecompositionError};
pub use quad_diff::{dbar_residual, hopf_differential, l1_norm, transitions, vertical_collapse_check, QuadDiff, Transition};
