//! Centralized (single-player) best-arm identification baselines.
//!
//! Two classical algorithms live here:
//!
//! * [`successive_elimination`] — fixed-confidence sampling with a shrinking
//!   confidence radius, optionally capped at a pull budget. The collaborative
//!   engine runs it per agent during preparation rounds, and
//!   [`se_cost_bound`] evaluates the deterministic cost function that its
//!   pull count tracks up to a constant.
//! * [`successive_rejects`] — fixed-budget phase elimination; the experiment
//!   harness uses it as the centralized baseline when measuring collaborative
//!   speedups, with [`sr_error_bound`] as the matching theoretical error
//!   curve.

mod se;
mod sr;

pub use se::{
    confidence_radius, se_cost_bound, successive_elimination, successive_elimination_observed,
    CostFunctionEstimate, EpochView, SeResult,
};
pub use sr::{log_bar, sr_error_bound, sr_phase_targets, successive_rejects, SrOutcome};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CentralizedError {
    #[error("the active arm set is empty")]
    EmptyArmSet,
    #[error("confidence level delta must lie in (0, 1), got {delta}")]
    InvalidDelta { delta: f64 },
    #[error("arm {arm} appears twice in the active set")]
    DuplicateArm { arm: usize },
    #[error("arm {arm} is out of range for an instance with {arms} arms")]
    ArmOutOfRange { arm: usize, arms: usize },
    #[error("budget {budget} cannot cover one pull of each of {arms} arms")]
    BudgetBelowArmCount { budget: u64, arms: usize },
}
