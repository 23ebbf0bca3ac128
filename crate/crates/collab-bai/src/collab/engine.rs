//! The iteration engine shared by the fixed-time protocol variants.
//!
//! All three non-meta variants run the same skeleton and differ in exactly
//! two switches: how the first iteration assigns candidates when more arms
//! than agents survive, and which pull cap the per-agent elimination runs
//! use.  Keeping one engine means the equivalences the family is designed
//! around — forcing the randomized cap to `horizon/2` reproduces the basic
//! variant pull for pull, and the r-rounds variant's later iterations match
//! the basic ones — hold by construction and are asserted on transcripts in
//! tests rather than argued informally.
//!
//! One iteration, in protocol order:
//!
//! 1. **prepare** — if more candidates than agents survive, candidates are
//!    scattered randomly and each agent whittles its bundle down to one arm
//!    with a capped elimination run (`⊥` if the cap strikes first); otherwise
//!    the workforce is split over the candidates, remainder to the
//!    lowest-indexed ones.
//! 2. **estimate** — every agent holding an arm pulls it
//!    `⌊horizon/(2·rounds)⌋` times.
//! 3. **communicate** — a synchronized broadcast of `(arm, estimate)` pairs;
//!    this is the round barrier.
//! 4. **eliminate** — per-arm estimates are averaged over their holders and
//!    any arm sitting a full [`elimination_radius`] below the leader is
//!    dropped.
//!
//! A run answers the sole survivor of the final iteration, or `⊥` (`None`).

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use rand::Rng;

use crate::centralized::successive_elimination;
use crate::instance::Instance;
use crate::rng::{stream, SeededRng};

use super::config::{CollabConfig, CollabError, RunOptions, TauChoice, Variant};
use super::meta::{run_meta, MetaReport};
use super::transcript::{AgentRound, RoundReport, Transcript};

/// Failure probability handed to each per-agent elimination run in the
/// preparation phase.
const PREP_DELTA: f64 = 0.01;

/// Result of one collaborative run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    /// Identified arm, or `None` for the protocol's `⊥` answer.
    pub result: Option<usize>,
    /// Rounds spanned: always communication steps + 1.
    pub rounds_used: u32,
    /// Wall-clock pull cost: in every round the slowest agent pays.
    pub time_used: u64,
    /// Full ledger, when requested via [`RunOptions::retain_transcript`].
    pub transcript: Option<Transcript>,
    /// Per-level detail for [`Variant::Meta`] runs, `None` otherwise.
    pub meta: Option<MetaReport>,
}

/// Threshold below which an arm is eliminated relative to the leader:
/// `2·sqrt(rounds·ln(200·agents·rounds) / (max{1, agents/prev_size}·horizon))`
/// where `prev_size` is the survivor count *entering* the round.  The
/// `agents/prev_size` factor credits the variance reduction from averaging
/// several agents' estimates of the same arm.
pub fn elimination_radius(agents: u32, rounds: u32, horizon: u64, prev_size: usize) -> f64 {
    debug_assert!(agents >= 1 && rounds >= 1 && horizon >= 1 && prev_size >= 1);
    let agents = f64::from(agents);
    let rounds = f64::from(rounds);
    let replication = (agents / prev_size as f64).max(1.0);
    2.0 * ((rounds * (200.0 * agents * rounds).ln()) / (replication * horizon as f64)).sqrt()
}

/// First-iteration behaviour selector.
#[derive(Clone, Copy)]
pub(super) enum Style {
    Basic,
    Improved,
    RandomThreshold { force: Option<TauChoice> },
}

/// Run `iterations` estimate/broadcast/eliminate iterations and return the
/// answer plus the full ledger.  `cfg.rounds` stays the protocol's `R`
/// parameter for budgets and radii even when `iterations` differs from it
/// (the r-rounds variant folds its vote round into the same count).
pub(super) fn run_protocol(
    instance: &Instance,
    cfg: &CollabConfig,
    iterations: u32,
    style: Style,
    root: &SeededRng,
) -> (Option<usize>, Transcript) {
    let k = cfg.agents as usize;
    let learn = cfg.round_budget();
    let mut agent_rngs: Vec<ChaCha8Rng> = (0..k)
        .map(|agent| root.child(stream::AGENT).child(agent as u64).rng())
        .collect();
    let mut survivors: Vec<usize> = (0..instance.arms()).collect();
    let mut transcript = Transcript::default();

    for iter in 1..=iterations {
        let prev = survivors;
        let prev_len = prev.len();

        // --- prepare -----------------------------------------------------
        let mut declared: Vec<Option<usize>> = vec![None; k];
        let mut prep_pulls = vec![0u64; k];
        let mut prep_rewards = vec![0u64; k];

        let replicated_first = matches!(style, Style::Improved)
            && iter == 1
            && prev_len as f64
                > (k as f64).powf((f64::from(cfg.rounds) - 1.0) / f64::from(cfg.rounds));

        if replicated_first {
            // Hand every candidate to `copies` distinct agents chosen with
            // shared randomness; the vote threshold below keeps only arms
            // that enough of those elimination runs converged on.
            let copies = (100.0 * (k as f64).powf(1.0 / f64::from(cfg.rounds))).floor() as usize;
            let copies = copies.clamp(1, k);
            let mut assign_rng = root.child(stream::ASSIGN).child(u64::from(iter)).rng();
            let mut bundles: Vec<Vec<usize>> = vec![Vec::new(); k];
            for &arm in &prev {
                for agent in rand::seq::index::sample(&mut assign_rng, k, copies) {
                    bundles[agent].push(arm);
                }
            }
            let cap = cfg.horizon / 2;
            run_prep(
                instance,
                &bundles,
                |_| cap,
                &mut agent_rngs,
                &mut declared,
                &mut prep_pulls,
                &mut prep_rewards,
            );
        } else if prev_len > k {
            let mut assign_rng = root.child(stream::ASSIGN).child(u64::from(iter)).rng();
            let mut bundles: Vec<Vec<usize>> = vec![Vec::new(); k];
            for &arm in &prev {
                bundles[assign_rng.random_range(0..k)].push(arm);
            }
            run_prep(
                instance,
                &bundles,
                |agent| match style {
                    // The randomized cap applies to the opening iteration
                    // only; later iterations cannot reach this branch anyway
                    // because a broadcast narrows the candidates to at most
                    // one arm per agent.
                    Style::RandomThreshold { force } if iter == 1 => {
                        let choice = force.unwrap_or_else(|| {
                            let mut tau_rng = root.child(stream::TAU).child(agent as u64).rng();
                            TauChoice::draw(&mut tau_rng)
                        });
                        choice.cap(cfg.horizon)
                    }
                    _ => cfg.horizon / 2,
                },
                &mut agent_rngs,
                &mut declared,
                &mut prep_pulls,
                &mut prep_rewards,
            );
        } else if let Some(base) = k.checked_div(prev_len) {
            // Fewer candidates than agents: split the workforce evenly, the
            // remainder going to the lowest-indexed candidates.  An empty
            // candidate set (every agent declared ⊥ earlier) skips the
            // split — nobody has anything left to work on.
            let extra = k % prev_len;
            let mut agent = 0;
            for (slot, &arm) in prev.iter().enumerate() {
                for _ in 0..base + usize::from(slot < extra) {
                    declared[agent] = Some(arm);
                    agent += 1;
                }
            }
            debug_assert_eq!(agent, k);
        }

        // --- estimate ----------------------------------------------------
        let mut estimates: Vec<Option<f64>> = vec![None; k];
        let mut learn_rewards = vec![0u64; k];
        if learn > 0 {
            for agent in 0..k {
                if let Some(arm) = declared[agent] {
                    let successes = instance.pull_count(arm, learn, &mut agent_rngs[agent]);
                    learn_rewards[agent] = successes;
                    estimates[agent] = Some(successes as f64 / learn as f64);
                }
            }
        }

        // --- communicate -------------------------------------------------
        for agent in 0..k {
            let worked = declared[agent].is_some();
            transcript.agent_rounds.push(AgentRound {
                round: iter,
                agent: agent as u32,
                arm: declared[agent],
                pulls: prep_pulls[agent] + if worked { learn } else { 0 },
                sum_rewards: prep_rewards[agent] + learn_rewards[agent],
                broadcast_arm: declared[agent],
                broadcast_mean: estimates[agent],
            });
        }
        transcript.comm_steps += 1;

        let mut candidate: Vec<usize> = declared.iter().flatten().copied().collect();
        candidate.sort_unstable();
        candidate.dedup();
        if replicated_first {
            let threshold = (k as f64).powf(1.0 / f64::from(cfg.rounds));
            candidate.retain(|&arm| {
                let votes = declared.iter().filter(|d| **d == Some(arm)).count();
                votes as f64 >= threshold
            });
        }

        // --- eliminate ---------------------------------------------------
        let (radius, next) = if learn == 0 || candidate.is_empty() {
            // No estimates were formed, so nothing can be compared; the
            // candidate set passes through untouched.
            (None, candidate.clone())
        } else {
            let radius = elimination_radius(cfg.agents, cfg.rounds, cfg.horizon, prev_len);
            let qhat: Vec<f64> = candidate
                .iter()
                .map(|&arm| {
                    let mut sum = 0.0;
                    let mut holders = 0u32;
                    for agent in 0..k {
                        if declared[agent] == Some(arm) {
                            sum += estimates[agent]
                                .expect("every holder formed an estimate when learn > 0");
                            holders += 1;
                        }
                    }
                    sum / f64::from(holders)
                })
                .collect();
            let leader = qhat.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let next: Vec<usize> = candidate
                .iter()
                .zip(&qhat)
                .filter(|&(_, &q)| leader < q + radius)
                .map(|(&arm, _)| arm)
                .collect();
            (Some(radius), next)
        };
        transcript.round_reports.push(RoundReport {
            round: iter,
            radius,
            candidate_set: candidate,
            survivor_set: next.clone(),
        });
        survivors = next;
    }

    let result = match survivors.as_slice() {
        [only] => Some(*only),
        _ => None,
    };
    (result, transcript)
}

/// Run the capped per-agent elimination passes of a preparation phase.
fn run_prep(
    instance: &Instance,
    bundles: &[Vec<usize>],
    cap: impl Fn(usize) -> u64,
    agent_rngs: &mut [ChaCha8Rng],
    declared: &mut [Option<usize>],
    pulls: &mut [u64],
    rewards: &mut [u64],
) {
    for (agent, bundle) in bundles.iter().enumerate() {
        if bundle.is_empty() {
            continue;
        }
        let result = successive_elimination(
            instance,
            bundle,
            PREP_DELTA,
            Some(cap(agent)),
            &mut agent_rngs[agent],
        )
        .expect("engine-built arm bundles are valid");
        declared[agent] = result.arm();
        pulls[agent] = result.pulls_used();
        rewards[agent] = result.sum_rewards();
    }
}

fn expect_variant(cfg: &CollabConfig, expected: Variant) -> Result<(), CollabError> {
    cfg.validate()?;
    if cfg.variant != expected {
        return Err(CollabError::VariantMismatch {
            expected,
            got: cfg.variant,
        });
    }
    Ok(())
}

fn finish(result: Option<usize>, transcript: Transcript, opts: &RunOptions) -> Outcome {
    let (rounds_used, time_used) = transcript.cost();
    Outcome {
        result,
        rounds_used,
        time_used,
        transcript: opts.retain_transcript.then_some(transcript),
        meta: None,
    }
}

/// The basic fixed-time protocol: `cfg.rounds` iterations, `cfg.rounds + 1`
/// rounds of communication in total.
pub fn run_fixed_time(
    instance: &Instance,
    cfg: &CollabConfig,
    root: &SeededRng,
    opts: &RunOptions,
) -> Result<Outcome, CollabError> {
    expect_variant(cfg, Variant::Basic)?;
    let (result, transcript) = run_protocol(instance, cfg, cfg.rounds, Style::Basic, root);
    Ok(finish(result, transcript, opts))
}

/// The `R`-total-rounds variant: the opening iteration is replaced by
/// replicated voting whenever the arm count exceeds
/// `agents^((rounds−1)/rounds)`, and only `cfg.rounds − 1` iterations run, so
/// the whole protocol fits in `cfg.rounds` rounds.
pub fn run_fixed_time_r_rounds(
    instance: &Instance,
    cfg: &CollabConfig,
    root: &SeededRng,
    opts: &RunOptions,
) -> Result<Outcome, CollabError> {
    expect_variant(cfg, Variant::ImprovedRRounds)?;
    if instance.arms() == 1 {
        // Nothing to identify; answer without spending a single pull or
        // communication step.
        return Ok(finish(Some(0), Transcript::default(), opts));
    }
    let (result, transcript) = run_protocol(instance, cfg, cfg.rounds - 1, Style::Improved, root);
    Ok(finish(result, transcript, opts))
}

/// The basic protocol with a randomized first-iteration pull cap, drawn
/// uniformly from `{⌊horizon/200⌋, ⌊horizon/2⌋}` independently per agent.
/// The randomization defeats instances tuned to make one specific wrong arm
/// survive the deterministic cap.
pub fn run_randomized_threshold(
    instance: &Instance,
    cfg: &CollabConfig,
    root: &SeededRng,
    opts: &RunOptions,
) -> Result<Outcome, CollabError> {
    expect_variant(cfg, Variant::RandomThreshold)?;
    let (result, transcript) = run_protocol(
        instance,
        cfg,
        cfg.rounds,
        Style::RandomThreshold {
            force: opts.force_tau,
        },
        root,
    );
    Ok(finish(result, transcript, opts))
}

/// Dispatch on `cfg.variant`.
pub fn run(
    instance: &Instance,
    cfg: &CollabConfig,
    root: &SeededRng,
    opts: &RunOptions,
) -> Result<Outcome, CollabError> {
    match cfg.variant {
        Variant::Basic => run_fixed_time(instance, cfg, root, opts),
        Variant::ImprovedRRounds => run_fixed_time_r_rounds(instance, cfg, root, opts),
        Variant::RandomThreshold => run_randomized_threshold(instance, cfg, root, opts),
        Variant::Meta => run_meta(instance, cfg, root, opts),
    }
}
