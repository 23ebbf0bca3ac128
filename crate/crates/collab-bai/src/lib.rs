//! Round-limited collaborative best-arm identification: protocols,
//! centralized baselines, instance generators, and a Monte-Carlo experiment
//! harness.
//!
//! The library models a team of agents pulling arms of a shared Bernoulli
//! bandit under two coupled budgets — wall-clock pulls (each round costs its
//! slowest agent) and synchronized communication rounds — and asks how much
//! faster a team can identify the best arm than a single centralized
//! sampler with the same total budget.  The interesting regime is very few
//! rounds: every extra barrier buys a polynomial improvement in the horizon
//! needed for a target error.
//!
//! The main entry points:
//!
//! * [`instance`] builds validated Bernoulli instances, including the
//!   one-spike and pyramid families the protocols are stress-tested on;
//! * [`collab`] runs the collaborative protocols and records full pull
//!   ledgers ([`collab::Transcript`]) with audit-grade cost accounting;
//! * [`centralized`] provides the single-player baselines (successive
//!   elimination and successive rejects) the speedups are measured against;
//! * [`experiments`] estimates error rates, searches for minimal sufficient
//!   horizons, and writes the CSV artifacts the command-line tool plots;
//! * [`rng`] pins down the seeding discipline that makes every run — and
//!   every Monte-Carlo the harness performs — exactly reproducible.
//!
//! The most common types are re-exported at the crate root.

pub mod centralized;
pub mod collab;
pub mod experiments;
pub mod instance;
pub mod rng;

pub use centralized::{
    successive_elimination, successive_rejects, CentralizedError, SeResult, SrOutcome,
};
pub use collab::{run, CollabConfig, CollabError, Outcome, RunOptions, Transcript, Variant};
pub use experiments::{
    estimate_error, exact_error_oracle, min_time_for_error, signid_run, speedup_table, AlgoConfig,
    ErrorEstimate, ExperimentError, MinTimeResult, OracleError, SearchOptions, SpeedupRow,
};
pub use instance::{Instance, InstanceError, PyramidParams};
pub use rng::SeededRng;
