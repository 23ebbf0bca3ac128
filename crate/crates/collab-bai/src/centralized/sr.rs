//! Successive rejects: fixed-budget best-arm identification.

use rand::Rng;

use super::CentralizedError;
use crate::instance::Instance;

/// The normalization ln̄(n) = 1/2 + Σ_{i=2}^{n} 1/i behind the phase budgets.
pub fn log_bar(arms: usize) -> f64 {
    0.5 + (2..=arms).map(|i| 1.0 / i as f64).sum::<f64>()
}

/// Cumulative per-arm pull targets n_k for phases k = 1..n−1 of a run with
/// `arms` arms and `budget` total pulls:
///
/// n_k = ⌊(budget − n) / (ln̄(n)·(n + 1 − k))⌋ + 1.
///
/// Every arm surviving into phase k has been pulled exactly n_k times by the
/// end of that phase, and the induced total never exceeds the budget (the
/// n = 2 case degenerates to ⌊budget/2⌋ pulls per arm).
pub fn sr_phase_targets(arms: usize, budget: u64) -> Vec<u64> {
    debug_assert!(arms >= 2);
    let spread = (budget - arms as u64) as f64;
    let bar = log_bar(arms);
    (1..arms)
        .map(|k| (spread / (bar * (arms + 1 - k) as f64)).floor() as u64 + 1)
        .collect()
}

/// Outcome of a successive-rejects run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SrOutcome {
    /// The surviving arm.
    pub arm: usize,
    /// Total pulls spent; at most the budget.
    pub pulls_used: u64,
    /// Arms in rejection order (n − 1 entries).
    pub rejected: Vec<usize>,
}

/// Runs successive rejects with `budget` total pulls: n − 1 phases, each
/// pulling every surviving arm up to the phase target and then rejecting the
/// empirically worst survivor (sum ties reject the highest index, so the
/// lowest index wins).
pub fn successive_rejects(
    instance: &Instance,
    budget: u64,
    rng: &mut impl Rng,
) -> Result<SrOutcome, CentralizedError> {
    let arms = instance.arms();
    if budget < arms as u64 {
        return Err(CentralizedError::BudgetBelowArmCount { budget, arms });
    }
    if arms == 1 {
        return Ok(SrOutcome {
            arm: 0,
            pulls_used: 0,
            rejected: Vec::new(),
        });
    }

    let targets = sr_phase_targets(arms, budget);
    let mut active: Vec<usize> = (0..arms).collect();
    let mut sums: Vec<u64> = vec![0; arms];
    let mut pulled: u64 = 0; // pulls per surviving arm so far
    let mut pulls_used: u64 = 0;
    let mut rejected: Vec<usize> = Vec::with_capacity(arms - 1);
    for &target in &targets {
        let extra = target - pulled;
        if extra > 0 {
            for &arm in &active {
                sums[arm] += instance.pull_count(arm, extra, rng);
            }
            pulls_used += extra * active.len() as u64;
            pulled = target;
        }
        // Equal pull counts let reward sums stand in for empirical means.
        let worst_pos = active
            .iter()
            .enumerate()
            .min_by_key(|&(_, &arm)| (sums[arm], std::cmp::Reverse(arm)))
            .map(|(pos, _)| pos)
            .expect("non-empty");
        rejected.push(active.swap_remove(worst_pos));
    }
    debug_assert_eq!(active.len(), 1);
    Ok(SrOutcome {
        arm: active[0],
        pulls_used,
        rejected,
    })
}

/// Theoretical error curve of successive rejects on an instance with `arms`
/// arms and hardness `h`: arms² · exp(−budget / (2·ln̄(arms)·h)).
pub fn sr_error_bound(arms: usize, budget: u64, hardness: f64) -> f64 {
    debug_assert!(arms >= 2 && hardness > 0.0);
    let n = arms as f64;
    n * n * (-(budget as f64) / (2.0 * log_bar(arms) * hardness)).exp()
}
