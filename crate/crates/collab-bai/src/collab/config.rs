//! Run configuration shared by all protocol variants.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which member of the protocol family to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Fixed-time protocol: `rounds` estimate/broadcast/eliminate iterations,
    /// costing `rounds + 1` rounds of communication in total.
    Basic,
    /// First round replaced by replicated voting; finishes in `rounds` total
    /// rounds.  Requires `rounds >= 2`.
    ImprovedRRounds,
    /// Basic protocol with a per-agent randomized pull cap in the first
    /// round's elimination phase.
    RandomThreshold,
    /// Plurality vote over many small [`Variant::RandomThreshold`] runs.
    Meta,
}

impl Variant {
    /// Stable lowercase label used in CSV output and CLI arguments.
    pub fn label(self) -> &'static str {
        match self {
            Variant::Basic => "basic",
            Variant::ImprovedRRounds => "improved-r-rounds",
            Variant::RandomThreshold => "random-threshold",
            Variant::Meta => "meta",
        }
    }
}

/// Parameters of a collaborative run.
///
/// `rounds` is the protocol's `R` parameter: the number of
/// estimate/broadcast/eliminate iterations for [`Variant::Basic`] and
/// [`Variant::RandomThreshold`] (which therefore use `rounds + 1` rounds of
/// communication in total), and the total round count for
/// [`Variant::ImprovedRRounds`].  [`Variant::Meta`] passes it through to its
/// sub-runs unchanged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollabConfig {
    pub agents: u32,
    pub horizon: u64,
    pub rounds: u32,
    pub variant: Variant,
}

impl CollabConfig {
    pub fn validate(&self) -> Result<(), CollabError> {
        if self.agents == 0 {
            return Err(CollabError::FieldTooSmall {
                field: "agents",
                min: 1,
                got: 0,
            });
        }
        if self.horizon == 0 {
            return Err(CollabError::FieldTooSmall {
                field: "horizon",
                min: 1,
                got: 0,
            });
        }
        let min_rounds = match self.variant {
            // With a single total round there is no communication step left
            // for the vote to land in.
            Variant::ImprovedRRounds => 2,
            _ => 1,
        };
        if u64::from(self.rounds) < min_rounds {
            return Err(CollabError::FieldTooSmall {
                field: "rounds",
                min: min_rounds,
                got: u64::from(self.rounds),
            });
        }
        Ok(())
    }

    /// Per-agent pull budget of one learning phase: `⌊horizon / (2·rounds)⌋`.
    ///
    /// Zero is legal — the run then performs no pulls and no eliminations,
    /// answering `None` unless the instance has a single arm.
    pub fn round_budget(&self) -> u64 {
        self.horizon / (2 * u64::from(self.rounds))
    }
}

/// First-round pull-cap choice of the randomized-threshold variant.
///
/// The cap is drawn uniformly from `{⌊horizon/200⌋, ⌊horizon/2⌋}`,
/// independently per agent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TauChoice {
    /// Cap at `⌊horizon/200⌋`.
    Small,
    /// Cap at `⌊horizon/2⌋` — the same cap the basic variant always uses.
    Half,
}

impl TauChoice {
    pub fn draw(rng: &mut impl rand::Rng) -> Self {
        if rng.random::<bool>() {
            TauChoice::Half
        } else {
            TauChoice::Small
        }
    }

    pub fn cap(self, horizon: u64) -> u64 {
        match self {
            TauChoice::Small => horizon / 200,
            TauChoice::Half => horizon / 2,
        }
    }
}

/// Per-run switches that do not change the protocol's statistical behaviour.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Keep the full pull/broadcast ledger on the outcome.  Off by default:
    /// Monte-Carlo loops only need the answer and the cost totals.
    pub retain_transcript: bool,
    /// Force every agent's first-round cap in the randomized-threshold
    /// variant instead of drawing it.  Ignored by the other variants.  With
    /// [`TauChoice::Half`] the variant reproduces the basic protocol's
    /// transcript exactly (the cap streams are never consumed when forced).
    pub force_tau: Option<TauChoice>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CollabError {
    #[error("{field} must be at least {min}, got {got}")]
    FieldTooSmall {
        field: &'static str,
        min: u64,
        got: u64,
    },
    #[error("entry point for {expected:?} was handed a {got:?} config")]
    VariantMismatch { expected: Variant, got: Variant },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    #[test]
    fn validation_catches_zero_fields() {
        let mut cfg = CollabConfig {
            agents: 2,
            horizon: 100,
            rounds: 1,
            variant: Variant::Basic,
        };
        assert!(cfg.validate().is_ok());
        cfg.agents = 0;
        assert!(matches!(
            cfg.validate(),
            Err(CollabError::FieldTooSmall {
                field: "agents",
                ..
            })
        ));
        cfg.agents = 2;
        cfg.horizon = 0;
        assert!(matches!(
            cfg.validate(),
            Err(CollabError::FieldTooSmall {
                field: "horizon",
                ..
            })
        ));
        cfg.horizon = 100;
        cfg.rounds = 0;
        assert!(matches!(
            cfg.validate(),
            Err(CollabError::FieldTooSmall {
                field: "rounds",
                ..
            })
        ));
    }

    #[test]
    fn improved_variant_needs_two_rounds() {
        let cfg = CollabConfig {
            agents: 4,
            horizon: 100,
            rounds: 1,
            variant: Variant::ImprovedRRounds,
        };
        assert_eq!(
            cfg.validate(),
            Err(CollabError::FieldTooSmall {
                field: "rounds",
                min: 2,
                got: 1,
            })
        );
    }

    #[test]
    fn round_budget_floors() {
        let cfg = CollabConfig {
            agents: 2,
            horizon: 41,
            rounds: 2,
            variant: Variant::Basic,
        };
        assert_eq!(cfg.round_budget(), 10);
        let tiny = CollabConfig { horizon: 3, ..cfg };
        assert_eq!(tiny.round_budget(), 0);
    }

    #[test]
    fn tau_caps_and_draw_frequency() {
        assert_eq!(TauChoice::Small.cap(1_000), 5);
        assert_eq!(TauChoice::Half.cap(1_000), 500);
        assert_eq!(TauChoice::Small.cap(199), 0);

        let mut rng = SeededRng::new(7).rng();
        let draws = 10_000;
        let small = (0..draws)
            .filter(|_| TauChoice::draw(&mut rng) == TauChoice::Small)
            .count();
        let freq = small as f64 / draws as f64;
        assert!((freq - 0.5).abs() < 0.03, "small-cap frequency {freq}");
    }

    #[test]
    fn variant_labels_are_stable() {
        assert_eq!(Variant::Basic.label(), "basic");
        assert_eq!(Variant::ImprovedRRounds.label(), "improved-r-rounds");
        assert_eq!(Variant::RandomThreshold.label(), "random-threshold");
        assert_eq!(Variant::Meta.label(), "meta");
    }
}
