//! Sign identification via the two-arm reduction.
//!
//! Deciding the sign of δ for a single arm with mean 1/2 + δ reduces to
//! best-arm identification between that arm and a reference arm pinned at
//! exactly 1/2: the unknown arm wins iff δ > 0.  The collaborative
//! protocol is run on that two-arm instance and a trial fails when the
//! returned arm encodes the wrong sign — or when the protocol abstains,
//! which never counts as a correct answer.

use crate::collab::{CollabConfig, Variant};
use crate::instance::Instance;
use crate::rng::SeededRng;

use super::{estimate_error, AlgoConfig, ErrorEstimate, ExperimentError};

/// Estimate the sign-decision error at one configuration.
///
/// Arm 0 is the reference (mean exactly 1/2) and arm 1 carries the
/// unknown mean 1/2 + `delta`, so `delta > 0` makes arm 1 the correct
/// answer and `delta < 0` makes arm 0 correct.  `delta` must be nonzero
/// and within ±1/2 to keep the unknown mean a probability.
pub fn signid_run(
    delta: f64,
    agents: u32,
    horizon: u64,
    rounds: u32,
    trials: u64,
    root: &SeededRng,
) -> Result<ErrorEstimate, ExperimentError> {
    if !(delta != 0.0 && delta.abs() <= 0.5) {
        return Err(ExperimentError::SignDelta(delta));
    }
    let instance = Instance::from_means(vec![0.5, 0.5 + delta])?;
    let algo = AlgoConfig::Collab(CollabConfig {
        agents,
        horizon,
        rounds,
        variant: Variant::Basic,
    });
    estimate_error(&algo, &instance, trials, root)
}
