//! Bandit instances: Bernoulli arm sets with a unique best arm.
//!
//! An [`Instance`] is a vector of means in `[0, 1]` whose maximum is attained
//! exactly once. All algorithms in this crate consume instances through
//! [`Instance::pull`] (one Bernoulli reward) or [`Instance::pull_count`]
//! (a batched Binomial draw of many pulls from one arm), so reward generation
//! is reproducible down to the stream id.
//!
//! Generator families:
//! * [`Instance::one_spike`] — one arm at 1/2, the rest at 1/2 − Δ.
//! * [`Instance::pyramid`] — means drawn i.i.d. from a geometric level
//!   distribution (see [`LevelDistribution`]), re-drawn while the maximum is
//!   tied.
//! * [`Instance::sign_identification`] — the single-arm instance whose mean is
//!   1/2 + δ; deciding sign(δ) is the hard two-point testing problem the
//!   collaborative lower bounds are built on.
//! * [`Instance::from_means`] — explicit means, validated.
//!
//! Serialized form is `{"means": [...], "best": k}` with `best` a 0-based
//! index; deserialization re-validates every invariant and rejects a `best`
//! that does not point at the unique maximum.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rng::SeededRng;

/// Bound on tie re-draws in [`Instance::pyramid`] before giving up.
pub const PYRAMID_TIE_RETRIES: u32 = 100;

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("an instance needs at least one arm")]
    Empty,
    #[error("mean {value} at index {index} lies outside [0, 1]")]
    MeanOutOfRange { index: usize, value: f64 },
    #[error("arms {first} and {second} tie for the maximum mean")]
    TiedMaximum { first: usize, second: usize },
    #[error("declared best index {given} does not match the maximum at index {actual}")]
    BestMismatch { given: usize, actual: usize },
    #[error("the gap of the best arm (index {index}) is undefined")]
    GapOfBest { index: usize },
    #[error("arm index {arm} is out of range for {arms} arms")]
    ArmOutOfRange { arm: usize, arms: usize },
    #[error("one-spike gap must lie strictly inside (0, 1/2), got {delta}")]
    SpikeDelta { delta: f64 },
    #[error("a one-spike instance needs at least two arms, got {arms}")]
    SpikeArms { arms: usize },
    #[error("best-arm position {position} is out of range for {arms} arms")]
    SpikePosition { position: usize, arms: usize },
    #[error("sign-identification delta must be nonzero and lie in [-1/2, 1/2], got {delta}")]
    SignDelta { delta: f64 },
    #[error("pyramid base must be at least 2, got {base}")]
    PyramidBase { base: u64 },
    #[error("pyramid level count must be at least 2, got {levels}")]
    PyramidLevels { levels: u32 },
    #[error("a pyramid instance needs at least one arm")]
    PyramidArms,
    #[error("pyramid draw still had a tied maximum after {retries} re-draws")]
    PyramidTies { retries: u32 },
}

/// A Bernoulli bandit instance with a unique best arm.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    means: Vec<f64>,
    best: usize,
}

impl Instance {
    /// Builds an instance from explicit means, validating range and the
    /// unique-maximum requirement.
    pub fn from_means(means: Vec<f64>) -> Result<Self, InstanceError> {
        if means.is_empty() {
            return Err(InstanceError::Empty);
        }
        for (index, &value) in means.iter().enumerate() {
            // NaN fails the containment check and is rejected here as well.
            if !(0.0..=1.0).contains(&value) {
                return Err(InstanceError::MeanOutOfRange { index, value });
            }
        }
        let best = means
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .expect("non-empty");
        if let Some(second) = means
            .iter()
            .enumerate()
            .position(|(i, &m)| i != best && m == means[best])
        {
            let (first, second) = (best.min(second), best.max(second));
            return Err(InstanceError::TiedMaximum { first, second });
        }
        Ok(Self { means, best })
    }

    /// One arm at 1/2 (at `best_at`), the remaining `arms − 1` at 1/2 − Δ.
    pub fn one_spike(arms: usize, delta: f64, best_at: usize) -> Result<Self, InstanceError> {
        if arms < 2 {
            return Err(InstanceError::SpikeArms { arms });
        }
        if !(delta > 0.0 && delta < 0.5) {
            return Err(InstanceError::SpikeDelta { delta });
        }
        if best_at >= arms {
            return Err(InstanceError::SpikePosition {
                position: best_at,
                arms,
            });
        }
        let mut means = vec![0.5 - delta; arms];
        means[best_at] = 0.5;
        Ok(Self {
            means,
            best: best_at,
        })
    }

    /// The single-arm instance with mean 1/2 + δ, δ ∈ [−1/2, 1/2] \ {0}.
    pub fn sign_identification(delta: f64) -> Result<Self, InstanceError> {
        if delta == 0.0 || !(-0.5..=0.5).contains(&delta) {
            return Err(InstanceError::SignDelta { delta });
        }
        Ok(Self {
            means: vec![0.5 + delta],
            best: 0,
        })
    }

    /// Draws `params.arms` means i.i.d. from the pyramid level distribution,
    /// re-drawing the whole instance (at most [`PYRAMID_TIE_RETRIES`] times)
    /// while the maximum mean is attained more than once.
    ///
    /// Note that a unique maximum gets *unlikely* when the expected number of
    /// arms on the top occupied level is large; the classical coupling
    /// `arms = ` [`coupled_arm_count`]`(base, levels)` puts one arm on the top
    /// level in expectation and keeps the re-draw loop short.
    pub fn pyramid(params: &PyramidParams, seed: &SeededRng) -> Result<Self, InstanceError> {
        let dist = LevelDistribution::new(params.base, params.levels)?;
        if params.arms == 0 {
            return Err(InstanceError::PyramidArms);
        }
        let mut rng = seed.rng();
        for _ in 0..PYRAMID_TIE_RETRIES {
            let means: Vec<f64> = (0..params.arms)
                .map(|_| dist.level_mean(dist.sample_level(&mut rng)))
                .collect();
            match Self::from_means(means) {
                Ok(instance) => return Ok(instance),
                Err(InstanceError::TiedMaximum { .. }) => continue,
                Err(other) => return Err(other),
            }
        }
        Err(InstanceError::PyramidTies {
            retries: PYRAMID_TIE_RETRIES,
        })
    }

    pub fn arms(&self) -> usize {
        self.means.len()
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn mean(&self, arm: usize) -> f64 {
        self.means[arm]
    }

    /// Index of the unique best arm.
    pub fn best(&self) -> usize {
        self.best
    }

    /// Suboptimality gap Δ_i = μ* − μ_i; undefined for the best arm itself.
    pub fn gap(&self, arm: usize) -> Result<f64, InstanceError> {
        if arm >= self.means.len() {
            return Err(InstanceError::ArmOutOfRange {
                arm,
                arms: self.means.len(),
            });
        }
        if arm == self.best {
            return Err(InstanceError::GapOfBest { index: arm });
        }
        Ok(self.means[self.best] - self.means[arm])
    }

    /// Hardness H = Σ_{i ≠ best} Δ_i⁻²; zero for a single-arm instance.
    pub fn hardness(&self) -> f64 {
        let top = self.means[self.best];
        self.means
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != self.best)
            .map(|(_, &m)| {
                let gap = top - m;
                1.0 / (gap * gap)
            })
            .sum()
    }

    /// One Bernoulli reward from `arm`. Panics if `arm` is out of range.
    #[inline]
    pub fn pull(&self, arm: usize, rng: &mut impl Rng) -> bool {
        rng.random::<f64>() < self.means[arm]
    }

    /// Total reward of `count` pulls of `arm`, drawn as one Binomial sample.
    ///
    /// Distribution-equivalent to summing `count` calls of [`Instance::pull`]
    /// but consumes the stream differently, so the two must not be mixed when
    /// reproducing a recorded trace.
    pub fn pull_count(&self, arm: usize, count: u64, rng: &mut impl Rng) -> u64 {
        let p = self.means[arm];
        if count == 0 {
            return 0;
        }
        if p <= 0.0 {
            return 0;
        }
        if p >= 1.0 {
            return count;
        }
        Binomial::new(count, p)
            .expect("mean validated on construction")
            .sample(rng)
    }

    #[doc(hidden)]
    pub fn arm_out_of_range(&self, arm: usize) -> bool {
        arm >= self.means.len()
    }
}

impl Serialize for Instance {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw<'a> {
            means: &'a [f64],
            best: usize,
        }
        Raw {
            means: &self.means,
            best: self.best,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Instance {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            means: Vec<f64>,
            best: usize,
        }
        let raw = Raw::deserialize(deserializer)?;
        let instance = Instance::from_means(raw.means).map_err(D::Error::custom)?;
        if raw.best != instance.best {
            return Err(D::Error::custom(InstanceError::BestMismatch {
                given: raw.best,
                actual: instance.best,
            }));
        }
        Ok(instance)
    }
}

/// Parameters of the pyramid generator: means take the value 1/2 − B^{−ℓ}
/// for a level ℓ ∈ {1, …, L} drawn from [`LevelDistribution`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PyramidParams {
    /// Geometric base B ≥ 2.
    pub base: u64,
    /// Level count L ≥ 2.
    pub levels: u32,
    /// Number of arms to draw.
    pub arms: usize,
}

/// The level law behind pyramid instances: Pr[ℓ] ∝ B^{−2ℓ} for ℓ = 1..L, so
/// higher (better) levels are quadratically rarer than they are close to 1/2.
#[derive(Clone, Debug)]
pub struct LevelDistribution {
    base: u64,
    probs: Vec<f64>,
    means: Vec<f64>,
    lambda: f64,
}

impl LevelDistribution {
    pub fn new(base: u64, levels: u32) -> Result<Self, InstanceError> {
        if base < 2 {
            return Err(InstanceError::PyramidBase { base });
        }
        if levels < 2 {
            return Err(InstanceError::PyramidLevels { levels });
        }
        let b = base as f64;
        let weights: Vec<f64> = (1..=levels).map(|l| b.powi(-2 * l as i32)).collect();
        let total: f64 = weights.iter().sum();
        let lambda = 1.0 / total;
        let probs = weights.iter().map(|w| w * lambda).collect();
        let means = (1..=levels).map(|l| 0.5 - b.powi(-(l as i32))).collect();
        Ok(Self {
            base,
            probs,
            means,
            lambda,
        })
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn levels(&self) -> u32 {
        self.probs.len() as u32
    }

    /// Normalizing constant λ₁ with Pr[ℓ] = λ₁·B^{−2ℓ}.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Pr[level = ℓ] for a 1-based level.
    pub fn prob(&self, level: u32) -> f64 {
        self.probs[(level - 1) as usize]
    }

    /// Arm mean of a 1-based level: 1/2 − B^{−ℓ}.
    pub fn level_mean(&self, level: u32) -> f64 {
        self.means[(level - 1) as usize]
    }

    /// Draws a 1-based level.
    pub fn sample_level(&self, rng: &mut impl Rng) -> u32 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return (i + 1) as u32;
            }
        }
        self.probs.len() as u32
    }
}

/// The arm count that puts one arm on the top pyramid level in expectation:
/// Σ_{j=0}^{L−1} B^{2j} = (B^{2L} − 1)/(B² − 1). `None` on overflow.
pub fn coupled_arm_count(base: u64, levels: u32) -> Option<u64> {
    let mut total: u64 = 0;
    let mut term: u64 = 1;
    let sq = base.checked_mul(base)?;
    for j in 0..levels {
        total = total.checked_add(term)?;
        if j + 1 < levels {
            term = term.checked_mul(sq)?;
        }
    }
    Some(total)
}
