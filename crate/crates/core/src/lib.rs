//! Jenkins-Strebel differentials on flat surfaces, computed as Hopf
//! differentials of energy-minimizing maps into the leaf space of a
//! prescribed cylinder system.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary_limit;
pub mod corpus_gen;
pub mod exact;
pub mod flat_surface;
pub mod foliation;
pub mod harmonic_solver;
pub mod hopf;
pub mod io;
pub mod metric_graph;
mod par;

pub use par::ENABLED as PARALLEL;
