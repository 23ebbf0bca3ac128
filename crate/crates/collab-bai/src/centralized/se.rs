//! Successive elimination and its deterministic cost function.

use rand::Rng;

use super::CentralizedError;
use crate::instance::Instance;

/// Result of a successive-elimination run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeResult {
    /// The active set shrank to a single arm.
    BestArm {
        arm: usize,
        pulls_used: u64,
        sum_rewards: u64,
    },
    /// The pull cap would have been exceeded by the next epoch.
    BudgetExhausted { pulls_used: u64, sum_rewards: u64 },
}

impl SeResult {
    pub fn arm(&self) -> Option<usize> {
        match *self {
            SeResult::BestArm { arm, .. } => Some(arm),
            SeResult::BudgetExhausted { .. } => None,
        }
    }

    pub fn pulls_used(&self) -> u64 {
        match *self {
            SeResult::BestArm { pulls_used, .. } | SeResult::BudgetExhausted { pulls_used, .. } => {
                pulls_used
            }
        }
    }

    /// Total reward collected across all pulls of the run.
    pub fn sum_rewards(&self) -> u64 {
        match *self {
            SeResult::BestArm { sum_rewards, .. }
            | SeResult::BudgetExhausted { sum_rewards, .. } => sum_rewards,
        }
    }
}

/// Anytime confidence radius r(t) = sqrt(ln(4·n·t²/δ) / (2t)) for `n` arms
/// after `t` pulls per arm.
///
/// The union bound behind it covers all arms and all epochs, which is where
/// the t² inside the logarithm comes from; `n` is the size of the arm set the
/// run started with and stays fixed while arms are eliminated.
pub fn confidence_radius(t: u64, delta: f64, arms: usize) -> f64 {
    let t = t as f64;
    ((4.0 * arms as f64 * t * t / delta).ln() / (2.0 * t)).sqrt()
}

/// One elimination epoch as seen by the diagnostic observer of
/// [`successive_elimination_observed`].
pub struct EpochView<'a> {
    /// Pulls per arm so far (epoch index), 1-based.
    pub t: u64,
    /// Confidence radius r(t) for this epoch.
    pub radius: f64,
    /// Arms that were active when the epoch started.
    pub active: &'a [usize],
    /// Reward sums aligned with `active`.
    pub sums: &'a [u64],
    /// Arms eliminated at the end of this epoch.
    pub eliminated: &'a [usize],
}

/// Fixed-confidence successive elimination over `arms` (a subset of the
/// instance), stopped early when the next epoch would push the total pull
/// count past `cap`.
///
/// Every active arm is pulled once per epoch; an arm is eliminated when its
/// empirical mean falls more than `2·r(t)` below the best empirical mean.
/// Eliminations happen strictly outside one radius of the leader, so with
/// probability `1 − delta` the surviving arm is the best of `arms`.
///
/// Without a cap the run only terminates once a single arm remains; if
/// `arms` contains means that tie at the subset maximum, supply a cap.
pub fn successive_elimination(
    instance: &Instance,
    arms: &[usize],
    delta: f64,
    cap: Option<u64>,
    rng: &mut impl Rng,
) -> Result<SeResult, CentralizedError> {
    successive_elimination_observed(instance, arms, delta, cap, rng, |_| {})
}

/// [`successive_elimination`] with a per-epoch observer, used by tests to
/// check the elimination rule against the recorded epochs.
pub fn successive_elimination_observed(
    instance: &Instance,
    arms: &[usize],
    delta: f64,
    cap: Option<u64>,
    rng: &mut impl Rng,
    mut observer: impl FnMut(&EpochView<'_>),
) -> Result<SeResult, CentralizedError> {
    if arms.is_empty() {
        return Err(CentralizedError::EmptyArmSet);
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(CentralizedError::InvalidDelta { delta });
    }
    let mut active: Vec<usize> = arms.to_vec();
    active.sort_unstable();
    for pair in active.windows(2) {
        if pair[0] == pair[1] {
            return Err(CentralizedError::DuplicateArm { arm: pair[0] });
        }
    }
    if let Some(&arm) = active.iter().find(|&&a| a >= instance.arms()) {
        return Err(CentralizedError::ArmOutOfRange {
            arm,
            arms: instance.arms(),
        });
    }

    let initial_arms = active.len();
    if initial_arms == 1 {
        return Ok(SeResult::BestArm {
            arm: active[0],
            pulls_used: 0,
            sum_rewards: 0,
        });
    }

    let mut sums: Vec<u64> = vec![0; initial_arms];
    let mut pulls_used: u64 = 0;
    let mut sum_rewards: u64 = 0;
    let mut t: u64 = 0;
    let mut eliminated: Vec<usize> = Vec::new();
    loop {
        if let Some(cap) = cap {
            if pulls_used + active.len() as u64 > cap {
                return Ok(SeResult::BudgetExhausted {
                    pulls_used,
                    sum_rewards,
                });
            }
        }
        t += 1;
        for (i, &arm) in active.iter().enumerate() {
            let reward = instance.pull(arm, rng) as u64;
            sums[i] += reward;
            sum_rewards += reward;
        }
        pulls_used += active.len() as u64;

        let radius = confidence_radius(t, delta, initial_arms);
        // All active arms hold exactly t pulls, so empirical means compare as
        // integer reward sums: mean gap > 2r(t) iff sum gap > 2·r(t)·t.
        let max_sum = *sums[..active.len()].iter().max().expect("non-empty");
        let threshold = 2.0 * radius * t as f64;
        eliminated.clear();
        let mut keep_sums: Vec<u64> = Vec::with_capacity(active.len());
        let mut keep: Vec<usize> = Vec::with_capacity(active.len());
        for (i, &arm) in active.iter().enumerate() {
            if (max_sum - sums[i]) as f64 > threshold {
                eliminated.push(arm);
            } else {
                keep.push(arm);
                keep_sums.push(sums[i]);
            }
        }
        observer(&EpochView {
            t,
            radius,
            active: &active,
            sums: &sums[..active.len()],
            eliminated: &eliminated,
        });
        active = keep;
        sums = keep_sums;
        if active.len() == 1 {
            return Ok(SeResult::BestArm {
                arm: active[0],
                pulls_used,
                sum_rewards,
            });
        }
    }
}

/// The deterministic cost function tracked by successive elimination: for
/// each suboptimal arm the first epoch at which the radius test separates it
/// from the best arm, summed over arms.
#[derive(Clone, Debug, PartialEq)]
pub struct CostFunctionEstimate {
    pub delta: f64,
    /// Separating epoch per arm; `None` for the best arm.
    pub per_arm: Vec<Option<u64>>,
    /// Sum of all separating epochs — the cost function value.
    pub total: u64,
}

/// Evaluates the cost function for `instance` at confidence `delta`: the sum
/// over suboptimal arms of `min { t : 2·r(t) < Δ_i }`.
///
/// Monotone in the inverse gaps: widening any gap can only lower the value.
/// Successive elimination's realized pull count lands between this value and
/// a constant multiple of it with probability `1 − delta`.
pub fn se_cost_bound(
    instance: &Instance,
    delta: f64,
) -> Result<CostFunctionEstimate, CentralizedError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(CentralizedError::InvalidDelta { delta });
    }
    let arms = instance.arms();
    let mut per_arm: Vec<Option<u64>> = vec![None; arms];
    let mut total: u64 = 0;
    for (arm, slot) in per_arm.iter_mut().enumerate() {
        if arm == instance.best() {
            continue;
        }
        let gap = instance.gap(arm).expect("suboptimal arm");
        let t = separating_epoch(gap, delta, arms);
        *slot = Some(t);
        total += t;
    }
    Ok(CostFunctionEstimate {
        delta,
        per_arm,
        total,
    })
}

/// First epoch t with 2·r(t, δ, n) < gap; the condition is monotone in t.
fn separating_epoch(gap: f64, delta: f64, arms: usize) -> u64 {
    let separated = |t: u64| 2.0 * confidence_radius(t, delta, arms) < gap;
    let mut hi: u64 = 1;
    while !separated(hi) {
        if hi >= 1 << 62 {
            return hi; // saturate on absurdly small gaps
        }
        hi *= 2;
    }
    let mut lo = hi / 2; // lo == 0 when hi == 1; both mean "no smaller epoch"
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if separated(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
