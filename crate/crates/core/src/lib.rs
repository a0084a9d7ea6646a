//! Optimal constant trading strategies for power utility maximization in
//! one-dimensional exponential Lévy models.
//!
//! The stock is `S = S0 * E(L)` where `L` has triplet `(b, c, F)` with a
//! finite-activity jump measure made of finitely many atoms. The crate
//! computes the continuous-time optimum (constrained to `[0, 1]` or
//! unconstrained), the N-period optimum, and simulates coupled wealth paths
//! to measure how the discrete problem approaches the continuous one.

pub mod discrete;
pub mod error;
pub mod harness;
pub mod model;
pub mod objective;
pub mod optimizer;
mod parallel;
pub mod wealth_sim;

pub use discrete::{
    discrete_value_function, eval_gn, eval_gn_prime, optimal_discrete, sample_log_increment,
    GnMethod, GnValue, McConfig, QuadConfig,
};
pub use error::{Error, Result};
pub use model::{
    admissible_set, cumulant_exponent, log_triplet, validate_model, AdmissibleInterval, JumpAtom,
    LevyTriplet, LogTriplet, MarketModel, ModelConfig, PowerUtility, ValidationReport,
};
pub use objective::{continuous_value, eval_g, eval_g_prime, ObjectiveValue};
pub use optimizer::{maximize_concave_1d, optimal_continuous, Boundary, Constraint, OptResult};
pub use wealth_sim::{l2_terminal_gap, simulate_coupled_terminals, CoupledSummary, L2Gaps};
