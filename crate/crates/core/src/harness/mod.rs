//! Experiment runners and the command-line front end.

pub mod cli;
pub mod convergence;
pub mod output;
pub mod properties;
pub mod uniform;

pub use convergence::{run_convergence_study, ConvergenceReport, ConvergenceSettings};
pub use properties::{run_property_checks, PropertyReport};
