//! Monte-Carlo error estimation over independent seed streams.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::centralized::{successive_elimination, successive_rejects};
use crate::collab::{run, CollabConfig, RunOptions};
use crate::instance::Instance;
use crate::rng::{stream, SeededRng};

use super::{ErrorEstimate, ExperimentError, DEFAULT_CONFIDENCE};

/// A fully specified algorithm the harness can run repeatedly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum AlgoConfig {
    /// One of the collaborative protocol variants.
    Collab(CollabConfig),
    /// Centralized successive elimination at fixed confidence, optionally
    /// capped.
    SuccessiveElimination { delta: f64, cap: Option<u64> },
    /// Centralized successive rejects at a fixed pull budget.
    SuccessiveRejects { budget: u64 },
    /// Two-arm fixed schedule: pull arm 0 `pulls[0]` times and arm 1
    /// `pulls[1]` times, answer the larger empirical mean, ties to arm 0.
    /// Exists so Monte-Carlo results can be validated against
    /// [`exact_error_oracle`](super::exact_error_oracle).
    FixedSchedule { pulls: [u64; 2] },
}

impl AlgoConfig {
    /// Stable label used in CSV output.
    pub fn label(&self) -> &'static str {
        match self {
            AlgoConfig::Collab(cfg) => cfg.variant.label(),
            AlgoConfig::SuccessiveElimination { .. } => "successive-elimination",
            AlgoConfig::SuccessiveRejects { .. } => "successive-rejects",
            AlgoConfig::FixedSchedule { .. } => "fixed-schedule",
        }
    }

    /// Run the algorithm once from `root` and report whether it named the
    /// best arm (`⊥` and wrong answers are both `false`).
    pub fn run_once(&self, instance: &Instance, root: &SeededRng) -> Result<bool, ExperimentError> {
        let best = instance.best();
        match *self {
            AlgoConfig::Collab(ref cfg) => {
                let outcome = run(instance, cfg, root, &RunOptions::default())?;
                Ok(outcome.result == Some(best))
            }
            AlgoConfig::SuccessiveElimination { delta, cap } => {
                let arms: Vec<usize> = (0..instance.arms()).collect();
                let result = successive_elimination(instance, &arms, delta, cap, &mut root.rng())?;
                Ok(result.arm() == Some(best))
            }
            AlgoConfig::SuccessiveRejects { budget } => {
                let outcome = successive_rejects(instance, budget, &mut root.rng())?;
                Ok(outcome.arm == best)
            }
            AlgoConfig::FixedSchedule { pulls } => {
                if instance.arms() != 2 {
                    return Err(ExperimentError::FixedScheduleArms {
                        arms: instance.arms(),
                    });
                }
                if pulls.contains(&0) {
                    return Err(ExperimentError::FixedScheduleZero);
                }
                let mut rng = root.rng();
                let first = instance.pull_count(0, pulls[0], &mut rng);
                let second = instance.pull_count(1, pulls[1], &mut rng);
                // Compare s₁/n₁ with s₂/n₂ by cross-multiplication so ties
                // are exact; ties go to arm 0.
                let decision = usize::from(
                    u128::from(second) * u128::from(pulls[0])
                        > u128::from(first) * u128::from(pulls[1]),
                );
                Ok(decision == best)
            }
        }
    }
}

/// Estimate the failure rate of an arbitrary success predicate over
/// `trials` independent seed streams (`root.child(TRIAL).child(i)`).
///
/// Trials run in parallel; the aggregation is a count, so the estimate is
/// identical for any worker count.
pub fn estimate_error_with<F>(
    run_once: F,
    trials: u64,
    root: &SeededRng,
    confidence: f64,
) -> Result<ErrorEstimate, ExperimentError>
where
    F: Fn(&SeededRng) -> Result<bool, ExperimentError> + Sync,
{
    if trials == 0 {
        return Err(ExperimentError::ZeroTrials);
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(ExperimentError::Confidence(confidence));
    }
    let trial_root = root.child(stream::TRIAL);
    let failures = (0..trials)
        .into_par_iter()
        .map(|trial| run_once(&trial_root.child(trial)).map(|success| u64::from(!success)))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    ErrorEstimate::new(trials, failures, confidence)
}

/// [`estimate_error_with`] for a configured algorithm at an explicit
/// confidence level.
pub fn estimate_error_at(
    algo: &AlgoConfig,
    instance: &Instance,
    trials: u64,
    root: &SeededRng,
    confidence: f64,
) -> Result<ErrorEstimate, ExperimentError> {
    estimate_error_with(
        |trial_root| algo.run_once(instance, trial_root),
        trials,
        root,
        confidence,
    )
}

/// Estimate an algorithm's failure rate at the default 99% confidence.
pub fn estimate_error(
    algo: &AlgoConfig,
    instance: &Instance,
    trials: u64,
    root: &SeededRng,
) -> Result<ErrorEstimate, ExperimentError> {
    estimate_error_at(algo, instance, trials, root, DEFAULT_CONFIDENCE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collab::Variant;
    use rand::Rng;

    #[test]
    fn degenerate_policies_pin_the_rate() {
        let root = SeededRng::new(5);
        let oracle = estimate_error_with(|_| Ok(true), 500, &root, 0.99).unwrap();
        assert_eq!(oracle.failures, 0);
        assert_eq!(oracle.rate, 0.0);

        let abstainer = estimate_error_with(|_| Ok(false), 500, &root, 0.99).unwrap();
        assert_eq!(abstainer.failures, 500);
        assert_eq!(abstainer.rate, 1.0);
    }

    #[test]
    fn estimates_are_reproducible_and_trial_streams_disjoint() {
        // A predicate that just reads one random bit: rerunning must give
        // the identical count, and the count must look like 500 independent
        // coins rather than one repeated coin.
        let root = SeededRng::new(9);
        let coin = |trial_root: &SeededRng| Ok(trial_root.rng().random::<f64>() < 0.5);
        let first = estimate_error_with(coin, 500, &root, 0.99).unwrap();
        let second = estimate_error_with(coin, 500, &root, 0.99).unwrap();
        assert_eq!(first, second);
        assert!(first.failures > 150 && first.failures < 350, "{first:?}");
    }

    #[test]
    fn capped_elimination_meets_its_confidence_contract() {
        let instance = Instance::from_means(vec![0.6, 0.4]).unwrap();
        let algo = AlgoConfig::SuccessiveElimination {
            delta: 0.05,
            cap: None,
        };
        let estimate = estimate_error(&algo, &instance, 2_000, &SeededRng::new(31)).unwrap();
        assert!(
            estimate.rate <= 0.05 + estimate.halfwidth(),
            "rate {} exceeds the declared failure probability",
            estimate.rate
        );
    }

    #[test]
    fn collab_runs_feed_the_estimator() {
        let instance = Instance::from_means(vec![1.0, 0.0]).unwrap();
        // Deterministic rewards and a radius below the gap: every trial
        // succeeds.
        let algo = AlgoConfig::Collab(CollabConfig {
            agents: 2,
            horizon: 200,
            rounds: 2,
            variant: Variant::Basic,
        });
        let estimate = estimate_error(&algo, &instance, 64, &SeededRng::new(2)).unwrap();
        assert_eq!(estimate.failures, 0);

        // Round budget zero: every trial abstains, and abstention is
        // failure.
        let starved = AlgoConfig::Collab(CollabConfig {
            agents: 2,
            horizon: 3,
            rounds: 2,
            variant: Variant::Basic,
        });
        let estimate = estimate_error(&starved, &instance, 64, &SeededRng::new(2)).unwrap();
        assert_eq!(estimate.rate, 1.0);
    }

    #[test]
    fn fixed_schedule_validates_and_decides_by_mean() {
        let lopsided = Instance::from_means(vec![1.0, 0.0]).unwrap();
        let algo = AlgoConfig::FixedSchedule { pulls: [1, 1] };
        let estimate = estimate_error(&algo, &lopsided, 100, &SeededRng::new(8)).unwrap();
        assert_eq!(estimate.failures, 0);

        // Unequal pull counts: the comparison is of means, not sums.  Arm 0
        // at mean 1.0 always shows mean 1.0 from a single pull; arm 1 can
        // at most tie, and ties go to arm 0.
        let unequal = AlgoConfig::FixedSchedule { pulls: [1, 8] };
        let estimate = estimate_error(&unequal, &lopsided, 100, &SeededRng::new(8)).unwrap();
        assert_eq!(estimate.failures, 0);

        let three = Instance::from_means(vec![0.5, 0.4, 0.3]).unwrap();
        assert_eq!(
            estimate_error(&algo, &three, 10, &SeededRng::new(8)),
            Err(ExperimentError::FixedScheduleArms { arms: 3 })
        );
        let zero = AlgoConfig::FixedSchedule { pulls: [0, 4] };
        assert_eq!(
            estimate_error(&zero, &lopsided, 10, &SeededRng::new(8)),
            Err(ExperimentError::FixedScheduleZero)
        );
    }

    #[test]
    fn labels_are_stable() {
        assert_eq!(
            AlgoConfig::SuccessiveRejects { budget: 10 }.label(),
            "successive-rejects"
        );
        assert_eq!(
            AlgoConfig::SuccessiveElimination {
                delta: 0.1,
                cap: None
            }
            .label(),
            "successive-elimination"
        );
        assert_eq!(
            AlgoConfig::Collab(CollabConfig {
                agents: 1,
                horizon: 10,
                rounds: 1,
                variant: Variant::Meta,
            })
            .label(),
            "meta"
        );
        assert_eq!(
            AlgoConfig::FixedSchedule { pulls: [2, 2] }.label(),
            "fixed-schedule"
        );
    }
}
