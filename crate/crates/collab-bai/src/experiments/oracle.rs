//! Exact error probabilities for tiny fixed-schedule policies.
//!
//! A fixed schedule on two Bernoulli arms has a closed-form error: sum the
//! product of the two binomial success-count distributions over every pair
//! of counts where the empirical means pick the wrong arm.  With the total
//! pull budget capped at 24 the sum has at most 13 × 13 terms and every
//! binomial coefficient is exactly representable, so the result is good to
//! near machine precision — precise enough to calibrate the Monte-Carlo
//! harness against, which is the point of having it.

use thiserror::Error;

use crate::instance::Instance;

/// Why an exact error computation was refused.
#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("exact error is only computed for two arms, got {arms}")]
    NotTwoArms { arms: usize },
    #[error("both arms need at least one pull")]
    ZeroSchedule,
    #[error("schedule total {total} exceeds the exact-computation cap of 24")]
    ScheduleTooLarge { total: u64 },
}

/// Success-count distribution of `n` Bernoulli(p) pulls.
fn binomial_pmf(n: u64, p: f64) -> Vec<f64> {
    let n = usize::try_from(n).expect("schedules are capped well below usize::MAX");
    let q = 1.0 - p;
    let mut coeff = 1.0f64;
    (0..=n)
        .map(|k| {
            if k > 0 {
                coeff *= (n - k + 1) as f64 / k as f64;
            }
            coeff * p.powi(k as i32) * q.powi((n - k) as i32)
        })
        .collect()
}

/// Exact misidentification probability of pulling arm 0 `pulls[0]` times,
/// arm 1 `pulls[1]` times, and picking the larger empirical mean (ties go
/// to arm 0).  The decision rule matches the Monte-Carlo fixed-schedule
/// policy exactly, so the two may be compared without modeling error.
pub fn exact_error_oracle(instance: &Instance, pulls: [u64; 2]) -> Result<f64, OracleError> {
    if instance.arms() != 2 {
        return Err(OracleError::NotTwoArms {
            arms: instance.arms(),
        });
    }
    if pulls[0] == 0 || pulls[1] == 0 {
        return Err(OracleError::ZeroSchedule);
    }
    let total = pulls[0] + pulls[1];
    if total > 24 {
        return Err(OracleError::ScheduleTooLarge { total });
    }
    let pmf_first = binomial_pmf(pulls[0], instance.mean(0));
    let pmf_second = binomial_pmf(pulls[1], instance.mean(1));
    let best = instance.best();
    let mut error = 0.0;
    for (first, &weight_first) in pmf_first.iter().enumerate() {
        for (second, &weight_second) in pmf_second.iter().enumerate() {
            // Arm 1 wins on strictly larger empirical mean:
            // second/pulls[1] > first/pulls[0], cross-multiplied.
            let decision = usize::from(second as u64 * pulls[0] > first as u64 * pulls[1]);
            if decision != best {
                error += weight_first * weight_second;
            }
        }
    }
    Ok(error)
}
