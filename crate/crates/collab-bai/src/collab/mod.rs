//! Round-limited collaborative best-arm identification.
//!
//! `agents` identical workers share one bandit instance and must agree on the
//! best arm within a fixed number of communication rounds and a shared time
//! budget.  Time is wall-clock for the slowest worker: every communication
//! step is a barrier, and a round's cost is the maximum pull count any single
//! agent spent in it.  The protocol family implemented here trades rounds for
//! time — one extra synchronization can shave a polynomial factor off the
//! horizon needed to reach a target error.
//!
//! Four variants share the same engine:
//!
//! * [`Variant::Basic`] — the fixed-time protocol: distribute survivors,
//!   estimate, broadcast, eliminate, `rounds` times over.
//! * [`Variant::ImprovedRRounds`] — same loop, but the first round replaces
//!   per-agent elimination runs with replicated voting so the whole protocol
//!   fits in `rounds` total rounds instead of `rounds + 1`.
//! * [`Variant::RandomThreshold`] — the fixed-time protocol with a randomized
//!   first-round pull cap, which breaks the adversarial alignment that can
//!   pin the basic variant to one wrong arm.
//! * [`Variant::Meta`] — a restarting wrapper that runs the randomized
//!   variant at geometrically shrinking horizons and takes a 90% plurality
//!   vote per level, converting the randomized guarantee into a fixed answer.
//!
//! Every run can retain a [`Transcript`] — the full per-agent pull ledger and
//! per-round elimination report — and the cost accounting in
//! [`transcript_cost`] is the single source of truth for "rounds used" and
//! "time used" in the outcome.

mod config;
mod engine;
mod meta;
mod transcript;

pub use config::{CollabConfig, CollabError, RunOptions, TauChoice, Variant};
pub use engine::{
    elimination_radius, run, run_fixed_time, run_fixed_time_r_rounds, run_randomized_threshold,
    Outcome,
};
pub use meta::{meta_schedule, plurality_winner, run_meta, MetaLevel, MetaReport};
pub use transcript::{transcript_cost, AgentRound, RoundReport, Transcript, TranscriptError};
