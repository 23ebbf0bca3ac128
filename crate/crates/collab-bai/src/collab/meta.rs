//! Plurality voting over shrinking-horizon randomized runs.
//!
//! The randomized-threshold protocol only guarantees a *constant* success
//! probability on hard instances.  The meta wrapper amplifies it without
//! extra rounds: level `s` runs `10^s` independent copies at the reduced
//! horizon `⌊horizon·(6/π²)/(s²·10^s)⌋`, stops adding levels once that
//! horizon drops below `2·rounds` (no per-round budget left), and trusts the
//! *deepest* level in which some arm won more than 90% of its copies.  The
//! `6/π²` factor makes the scheduled pull budgets a convergent series, so
//! the whole tower fits inside the original horizon; all copies share the
//! protocol's round barriers, so the round budget is paid once, not per
//! copy.
//!
//! The schedule evaluates `6/π²` through a fixed truncated rational,
//! `6079271018540266 / 10^16`, so every level horizon is an exact integer
//! computation and the budget inequality `Σ 10^s·h_s ≤ horizon` holds in
//! `u128` arithmetic on every run — not merely up to rounding.  The
//! truncation is below the true constant, so level horizons can only err
//! one short of the real-valued floor, never over it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::instance::Instance;
use crate::rng::{stream, SeededRng};

use super::config::{CollabConfig, CollabError, RunOptions, Variant};
use super::engine::{run_protocol, Outcome, Style};
use super::transcript::{AgentRound, Transcript};

/// Numerator of the truncated rational standing in for `6/π²`.
const BASEL_NUM: u128 = 6_079_271_018_540_266;
/// Denominator of the truncated rational: `10^16`.
const BASEL_DEN: u128 = 10_000_000_000_000_000;

/// One planned level of the tower: `runs` copies at horizon `horizon`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetaLevelPlan {
    pub s: u32,
    pub horizon: u64,
    pub runs: u64,
}

/// One executed level, with its vote outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetaLevel {
    pub s: u32,
    pub horizon: u64,
    pub runs: u64,
    /// Arm that won more than 90% of the level's copies, if any did.
    pub winner: Option<usize>,
    /// Copy count of the most frequent arm (0 when every copy answered ⊥).
    pub winner_count: u64,
}

/// Per-level details of a meta run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetaReport {
    pub levels: Vec<MetaLevel>,
    /// `Σ runs·horizon` over the levels — the pull budget the schedule
    /// committed to, never exceeding the configured horizon.
    pub scheduled_budget: u128,
}

/// Plan the tower of levels for a given horizon and round parameter.
///
/// Level `s` gets horizon `⌊horizon·(6/π²) / (s²·10^s)⌋` and `10^s` runs;
/// planning stops at the first level whose horizon falls below `2·rounds`.
pub fn meta_schedule(horizon: u64, rounds: u32) -> Vec<MetaLevelPlan> {
    let floor = 2 * u64::from(rounds);
    let mut plans = Vec::new();
    let mut runs: u64 = 10;
    for s in 1u32.. {
        let denom = BASEL_DEN * u128::from(s) * u128::from(s) * u128::from(runs);
        let level_horizon = (u128::from(horizon) * BASEL_NUM / denom) as u64;
        if level_horizon < floor {
            break;
        }
        plans.push(MetaLevelPlan {
            s,
            horizon: level_horizon,
            runs,
        });
        match runs.checked_mul(10) {
            Some(next) => runs = next,
            None => break,
        }
    }
    plans
}

/// The level's winner under the strict 90% plurality rule, decided in exact
/// integer arithmetic: arm `i` wins iff `10·count_i > 9·runs`.  Copies that
/// answered `⊥` count toward `runs` but toward no arm.
pub fn plurality_winner(counts: &BTreeMap<usize, u64>, runs: u64) -> Option<(usize, u64)> {
    let mut best: Option<(usize, u64)> = None;
    for (&arm, &count) in counts {
        if best.is_none_or(|(_, top)| count > top) {
            best = Some((arm, count));
        }
    }
    best.filter(|&(_, count)| 10 * count > 9 * runs)
}

/// Run the full tower and vote.
///
/// Copies are independent (each gets its own child seed keyed by level and
/// copy index) but share round barriers, so their pull ledgers merge into a
/// single transcript per (round, agent) slot and the round cost is paid
/// once.  The answer is the winner of the deepest decided level, `⊥` when no
/// level decides.
pub fn run_meta(
    instance: &Instance,
    cfg: &CollabConfig,
    root: &SeededRng,
    opts: &RunOptions,
) -> Result<Outcome, CollabError> {
    cfg.validate()?;
    if cfg.variant != Variant::Meta {
        return Err(CollabError::VariantMismatch {
            expected: Variant::Meta,
            got: cfg.variant,
        });
    }
    let plans = meta_schedule(cfg.horizon, cfg.rounds);
    let sub_cfg = CollabConfig {
        variant: Variant::RandomThreshold,
        ..*cfg
    };
    let mut merged: BTreeMap<(u32, u32), (u64, u64)> = BTreeMap::new();
    let mut levels = Vec::with_capacity(plans.len());
    let mut scheduled: u128 = 0;
    for plan in &plans {
        scheduled += u128::from(plan.runs) * u128::from(plan.horizon);
        let level_cfg = CollabConfig {
            horizon: plan.horizon,
            ..sub_cfg
        };
        let level_root = root.child(stream::META).child(u64::from(plan.s));
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        for copy in 0..plan.runs {
            let (result, transcript) = run_protocol(
                instance,
                &level_cfg,
                level_cfg.rounds,
                Style::RandomThreshold { force: None },
                &level_root.child(copy),
            );
            for record in &transcript.agent_rounds {
                let slot = merged.entry((record.round, record.agent)).or_insert((0, 0));
                slot.0 += record.pulls;
                slot.1 += record.sum_rewards;
            }
            if let Some(arm) = result {
                *counts.entry(arm).or_insert(0) += 1;
            }
        }
        let vote = plurality_winner(&counts, plan.runs);
        levels.push(MetaLevel {
            s: plan.s,
            horizon: plan.horizon,
            runs: plan.runs,
            winner: vote.map(|(arm, _)| arm),
            winner_count: vote.map_or(0, |(_, count)| count),
        });
    }
    let result = levels.iter().rev().find_map(|level| level.winner);
    let transcript = Transcript {
        comm_steps: if plans.is_empty() { 0 } else { cfg.rounds },
        agent_rounds: merged
            .into_iter()
            .map(|((round, agent), (pulls, sum_rewards))| AgentRound {
                round,
                agent,
                arm: None,
                pulls,
                sum_rewards,
                broadcast_arm: None,
                broadcast_mean: None,
            })
            .collect(),
        round_reports: Vec::new(),
    };
    let (rounds_used, time_used) = transcript.cost();
    Ok(Outcome {
        result,
        rounds_used,
        time_used,
        transcript: opts.retain_transcript.then_some(transcript),
        meta: Some(MetaReport {
            levels,
            scheduled_budget: scheduled,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn schedule_matches_hand_computed_tower() {
        assert_eq!(
            meta_schedule(1_000_000, 1),
            vec![
                MetaLevelPlan {
                    s: 1,
                    horizon: 60_792,
                    runs: 10
                },
                MetaLevelPlan {
                    s: 2,
                    horizon: 1_519,
                    runs: 100
                },
                MetaLevelPlan {
                    s: 3,
                    horizon: 67,
                    runs: 1_000
                },
                MetaLevelPlan {
                    s: 4,
                    horizon: 3,
                    runs: 10_000
                },
            ]
        );
        // A larger round parameter trims the tail: horizon 3 < 2·2.
        assert_eq!(meta_schedule(1_000_000, 2).len(), 3);
        // Horizons too small to fund even one level plan nothing.
        assert_eq!(meta_schedule(10, 1), vec![]);
    }

    #[test]
    fn plurality_rule_is_a_strict_ninety_percent_cut() {
        let counts = |pairs: &[(usize, u64)]| pairs.iter().copied().collect::<BTreeMap<_, _>>();
        assert_eq!(plurality_winner(&counts(&[(2, 91)]), 100), Some((2, 91)));
        // Exactly 90% fails the strict inequality.
        assert_eq!(plurality_winner(&counts(&[(2, 90)]), 100), None);
        assert_eq!(plurality_winner(&counts(&[(0, 55), (1, 45)]), 100), None);
        assert_eq!(plurality_winner(&counts(&[]), 10), None);
        // All copies agreeing always wins.
        assert_eq!(plurality_winner(&counts(&[(7, 10)]), 10), Some((7, 10)));
    }

    proptest! {
        #[test]
        fn scheduled_budget_never_exceeds_the_horizon(
            horizon in 1u64..=1_000_000_000_000,
            rounds in 1u32..=8,
        ) {
            let plans = meta_schedule(horizon, rounds);
            let total: u128 = plans
                .iter()
                .map(|p| u128::from(p.runs) * u128::from(p.horizon))
                .sum();
            prop_assert!(total <= u128::from(horizon));
            for pair in plans.windows(2) {
                prop_assert_eq!(pair[1].s, pair[0].s + 1);
                prop_assert!(pair[1].horizon <= pair[0].horizon);
            }
            for plan in &plans {
                prop_assert!(plan.horizon >= 2 * u64::from(rounds));
            }
        }
    }

    #[test]
    fn empty_schedule_answers_bottom_for_free() {
        let instance = Instance::from_means(vec![0.9, 0.1]).unwrap();
        let cfg = CollabConfig {
            agents: 2,
            horizon: 10,
            rounds: 1,
            variant: Variant::Meta,
        };
        let out = run_meta(
            &instance,
            &cfg,
            &SeededRng::new(4),
            &RunOptions {
                retain_transcript: true,
                force_tau: None,
            },
        )
        .unwrap();
        assert_eq!(out.result, None);
        assert_eq!(out.rounds_used, 1);
        assert_eq!(out.time_used, 0);
        let report = out.meta.unwrap();
        assert!(report.levels.is_empty());
        assert_eq!(report.scheduled_budget, 0);
        assert_eq!(out.transcript.unwrap(), Transcript::default());
    }

    #[test]
    fn easy_instance_decides_at_the_first_level() {
        // horizon 20000 funds levels (1215×10, 30×100).  The first level's
        // copies have generous budgets and all pick arm 0; the second
        // level's 30-pull copies mostly answer ⊥ and stay undecided, so the
        // deepest decided level is level 1.
        let instance = Instance::from_means(vec![0.9, 0.1]).unwrap();
        let cfg = CollabConfig {
            agents: 4,
            horizon: 20_000,
            rounds: 2,
            variant: Variant::Meta,
        };
        let out = run_meta(&instance, &cfg, &SeededRng::new(12), &RunOptions::default()).unwrap();
        assert_eq!(out.result, Some(0));
        assert_eq!(out.rounds_used, 3);
        assert!(out.time_used <= cfg.horizon);
        let report = out.meta.unwrap();
        assert_eq!(report.levels.len(), 2);
        assert_eq!(report.levels[0].horizon, 1_215);
        assert_eq!(report.levels[0].winner, Some(0));
        assert!(10 * report.levels[0].winner_count > 9 * 10);
        assert_eq!(report.scheduled_budget, 10 * 1_215 + 100 * 30);
    }

    #[test]
    fn meta_runs_are_reproducible() {
        let instance = Instance::one_spike(3, 0.3, 1).unwrap();
        let cfg = CollabConfig {
            agents: 2,
            horizon: 5_000,
            rounds: 2,
            variant: Variant::Meta,
        };
        let opts = RunOptions {
            retain_transcript: true,
            force_tau: None,
        };
        let first = run_meta(&instance, &cfg, &SeededRng::new(77), &opts).unwrap();
        let second = run_meta(&instance, &cfg, &SeededRng::new(77), &opts).unwrap();
        assert_eq!(first, second);
    }
}
