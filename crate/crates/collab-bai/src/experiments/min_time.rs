//! Search for the smallest horizon meeting a target error.
//!
//! The searched quantity is empirical, so the procedure leans on the
//! premise that error is (noisily) non-increasing in the budget: double up
//! from the floor until a probe is accepted, then bisect down to the
//! smallest accepted budget.  Every probe draws its trials from a seed
//! stream keyed by the probed horizon itself, so the estimate at a given
//! horizon does not depend on the path the search took to reach it — a
//! replayed search probes different points only if its inputs changed.

use crate::instance::Instance;
use crate::rng::{stream, SeededRng};

use super::{estimate_error_at, hoeffding_halfwidth, AlgoConfig, ErrorEstimate, ExperimentError};

/// Knobs of the bracket-and-bisect search.
#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Smallest horizon the search may probe.
    pub floor: u64,
    /// Largest horizon the doubling phase may probe before giving up.
    pub ceiling: u64,
    /// Allowed excess of a probe's CI upper bound over the target.  `None`
    /// uses the probe's own halfwidth, which reduces acceptance to
    /// `rate ≤ target`.
    pub slack: Option<f64>,
    /// Confidence level of the per-probe intervals.
    pub confidence: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            floor: 1,
            ceiling: 1 << 26,
            slack: None,
            confidence: super::DEFAULT_CONFIDENCE,
        }
    }
}

/// One probed horizon with its estimate and verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchProbe {
    pub horizon: u64,
    pub estimate: ErrorEstimate,
    pub accepted: bool,
}

/// Outcome of a successful search.
#[derive(Clone, Debug, PartialEq)]
pub struct MinTimeResult {
    /// Smallest probed horizon that was accepted.
    pub horizon: u64,
    /// Largest probed horizon below [`MinTimeResult::horizon`] that was
    /// rejected — `None` when the floor itself was accepted.  Together with
    /// `horizon` this brackets where the true threshold can lie.
    pub bracket_low: Option<u64>,
    /// Every probe, in the order the search made them.
    pub probes: Vec<SearchProbe>,
}

impl MinTimeResult {
    /// Conservative bounds on the true threshold, read off the probe
    /// intervals alone.
    ///
    /// The first value is the largest probed horizon whose interval sits
    /// entirely above `target` — assuming error is non-increasing in the
    /// budget, the true threshold must be larger.  The second is the
    /// smallest probed horizon whose interval sits entirely at or below
    /// `target` — the true threshold can be at most that.  `None` means
    /// the trace cannot bound that side; with few trials the intervals
    /// are wide and one or both sides often stay open.  These bounds are
    /// deliberately much wider than the accept/reject bracket, which
    /// tracks the point estimate's noise rather than the estimand's.
    pub fn confident_bounds(&self, target: f64) -> (Option<u64>, Option<u64>) {
        let low = self
            .probes
            .iter()
            .filter(|p| p.estimate.ci_low > target)
            .map(|p| p.horizon)
            .max();
        let high = self
            .probes
            .iter()
            .filter(|p| p.estimate.ci_high <= target)
            .map(|p| p.horizon)
            .min();
        (low, high)
    }
}

/// Find the smallest horizon at which `algo_at` meets `target` error.
///
/// `algo_at` maps a candidate horizon to the algorithm configuration to
/// probe (the budget field for centralized baselines, the horizon field for
/// collaborative runs).  A probe is accepted when its rate is at most
/// `target` *and* its CI upper bound is at most `target` + slack.
pub fn min_time_for_error(
    algo_at: impl Fn(u64) -> AlgoConfig,
    instance: &Instance,
    target: f64,
    trials: u64,
    root: &SeededRng,
    options: &SearchOptions,
) -> Result<MinTimeResult, ExperimentError> {
    if !(target > 0.0 && target < 1.0) {
        return Err(ExperimentError::Target(target));
    }
    if options.floor == 0 || options.floor > options.ceiling {
        return Err(ExperimentError::Bracket {
            floor: options.floor,
            ceiling: options.ceiling,
        });
    }
    let slack = options
        .slack
        .unwrap_or_else(|| hoeffding_halfwidth(trials.max(1), options.confidence));
    let mut probes = Vec::new();
    let mut probe = |horizon: u64| -> Result<bool, ExperimentError> {
        let estimate = estimate_error_at(
            &algo_at(horizon),
            instance,
            trials,
            &root.child(stream::PROBE).child(horizon),
            options.confidence,
        )?;
        let accepted = estimate.rate <= target && estimate.ci_high <= target + slack;
        probes.push(SearchProbe {
            horizon,
            estimate,
            accepted,
        });
        Ok(accepted)
    };

    // Doubling phase: find some accepted horizon.
    let mut low: Option<u64> = None;
    let mut candidate = options.floor;
    let mut high = loop {
        if probe(candidate)? {
            break candidate;
        }
        low = Some(candidate);
        match candidate.checked_mul(2) {
            Some(next) if next <= options.ceiling => candidate = next,
            _ => {
                return Err(ExperimentError::NotFound {
                    ceiling: options.ceiling,
                })
            }
        }
    };

    // Bisection phase: shrink down to the smallest accepted probe.
    while let Some(rejected) = low {
        if high - rejected <= 1 {
            break;
        }
        let mid = rejected + (high - rejected) / 2;
        if probe(mid)? {
            high = mid;
        } else {
            low = Some(mid);
        }
    }

    Ok(MinTimeResult {
        horizon: high,
        bracket_low: low,
        probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collab::{CollabConfig, Variant};

    fn basic_at(agents: u32, rounds: u32) -> impl Fn(u64) -> AlgoConfig {
        move |horizon| {
            AlgoConfig::Collab(CollabConfig {
                agents,
                horizon,
                rounds,
                variant: Variant::Basic,
            })
        }
    }

    #[test]
    fn deterministic_instance_pins_the_exact_threshold() {
        // With means [1, 0] the estimates are exact, so a run succeeds iff
        // the round-1 radius 2·sqrt(2·ln 800 / T) drops below the gap 1 —
        // i.e. iff T > 8·ln 800 ≈ 53.48.  The search must land on 54.
        let instance = Instance::from_means(vec![1.0, 0.0]).unwrap();
        let result = min_time_for_error(
            basic_at(2, 2),
            &instance,
            0.1,
            40,
            &SeededRng::new(7),
            &SearchOptions::default(),
        )
        .unwrap();
        assert_eq!(result.horizon, 54);
        assert_eq!(result.bracket_low, Some(53));
        // The trace is a step function: everything below 54 rejected at
        // rate 1, everything at or above accepted at rate 0.
        for probe in &result.probes {
            if probe.horizon < 54 {
                assert!(!probe.accepted);
                assert_eq!(probe.estimate.rate, 1.0);
            } else {
                assert!(probe.accepted);
                assert_eq!(probe.estimate.rate, 0.0);
            }
        }
        // Probe CIs at 40 trials span ±0.257, so rejected probes (rate 1)
        // bound the threshold from below while no accepted probe's whole
        // interval fits under 0.1.
        assert_eq!(result.confident_bounds(0.1), (Some(53), None));
        assert_eq!(result.confident_bounds(0.5), (Some(53), Some(54)));
    }

    #[test]
    fn vacuous_targets_accept_the_floor() {
        let instance = Instance::from_means(vec![1.0, 0.0]).unwrap();
        let result = min_time_for_error(
            basic_at(2, 2),
            &instance,
            0.99,
            40,
            &SeededRng::new(7),
            &SearchOptions {
                floor: 60,
                ..SearchOptions::default()
            },
        )
        .unwrap();
        assert_eq!(result.horizon, 60);
        assert_eq!(result.bracket_low, None);
        assert_eq!(result.probes.len(), 1);
    }

    #[test]
    fn search_stops_at_the_ceiling() {
        // Three arms with a microscopic gap cannot reach 0.1% error by
        // horizon 64; the search must report the ceiling it gave up at.
        let instance = Instance::one_spike(3, 0.05, 0).unwrap();
        let err = min_time_for_error(
            basic_at(2, 2),
            &instance,
            0.001,
            50,
            &SeededRng::new(5),
            &SearchOptions {
                floor: 1,
                ceiling: 64,
                ..SearchOptions::default()
            },
        )
        .unwrap_err();
        assert_eq!(err, ExperimentError::NotFound { ceiling: 64 });
    }

    #[test]
    fn noisy_search_traces_stay_consistent() {
        // Across the whole trace, any accepted probe's rate must be within
        // combined CI widths of any rejected probe's rate — otherwise the
        // search contradicted its own monotonicity premise.
        let instance = Instance::one_spike(5, 0.2, 0).unwrap();
        let result = min_time_for_error(
            |budget| AlgoConfig::SuccessiveRejects { budget },
            &instance,
            0.2,
            300,
            &SeededRng::new(13),
            &SearchOptions {
                floor: 5,
                ..SearchOptions::default()
            },
        )
        .unwrap();
        assert!(result.horizon >= 5);
        for accepted in result.probes.iter().filter(|p| p.accepted) {
            for rejected in result.probes.iter().filter(|p| !p.accepted) {
                assert!(
                    accepted.estimate.rate
                        <= rejected.estimate.rate
                            + accepted.estimate.halfwidth()
                            + rejected.estimate.halfwidth(),
                    "accepted {:?} vs rejected {:?}",
                    accepted,
                    rejected
                );
            }
        }
        // Replaying the search reproduces it probe for probe.
        let again = min_time_for_error(
            |budget| AlgoConfig::SuccessiveRejects { budget },
            &instance,
            0.2,
            300,
            &SeededRng::new(13),
            &SearchOptions {
                floor: 5,
                ..SearchOptions::default()
            },
        )
        .unwrap();
        assert_eq!(result, again);
    }

    #[test]
    fn rejects_bad_targets_and_brackets() {
        let instance = Instance::from_means(vec![1.0, 0.0]).unwrap();
        assert_eq!(
            min_time_for_error(
                basic_at(2, 2),
                &instance,
                0.0,
                10,
                &SeededRng::new(0),
                &SearchOptions::default(),
            )
            .unwrap_err(),
            ExperimentError::Target(0.0)
        );
        assert_eq!(
            min_time_for_error(
                basic_at(2, 2),
                &instance,
                0.1,
                10,
                &SeededRng::new(0),
                &SearchOptions {
                    floor: 100,
                    ceiling: 50,
                    ..SearchOptions::default()
                },
            )
            .unwrap_err(),
            ExperimentError::Bracket {
                floor: 100,
                ceiling: 50
            }
        );
    }

    #[test]
    fn rejects_budget_inversion_stays_below_the_bound_inversion() {
        // one-spike(8, 0.2): hardness H = 175.  Inverting the closed-form
        // error bound n²·exp(−W/(2·ln̄(n)·H)) at 0.1 gives W ≈ 5016; the
        // bound is loose, so the measured threshold must sit at or below
        // it, not near it.
        let instance = Instance::one_spike(8, 0.2, 0).unwrap();
        let hardness = instance.hardness();
        let log_bar = crate::centralized::log_bar(8);
        let bound_inverted = 2.0 * log_bar * hardness * (64.0f64 / 0.1).ln();
        assert!((5_015.0..5_016.0).contains(&bound_inverted));

        let result = min_time_for_error(
            |budget| AlgoConfig::SuccessiveRejects { budget },
            &instance,
            0.1,
            400,
            &SeededRng::new(29),
            &SearchOptions {
                floor: 8,
                ..SearchOptions::default()
            },
        )
        .unwrap();
        assert!(
            (result.horizon as f64) <= bound_inverted,
            "measured threshold {} above the inverted bound {bound_inverted}",
            result.horizon
        );
    }
}
