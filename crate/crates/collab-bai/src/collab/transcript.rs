//! Pull ledgers and the cost accounting derived from them.
//!
//! A transcript is the ground truth of what a run did: one record per
//! (round, agent) pair that pulled or broadcast anything, plus one elimination
//! report per communication step.  "Rounds used" and "time used" on an
//! [`Outcome`](super::Outcome) are always computed from the transcript via
//! [`transcript_cost`], never tracked separately — so a budget check against
//! the transcript is a check against what actually happened.
//!
//! The cost model: a run with `c` communication steps spans `c + 1` rounds
//! (work before the first barrier, work between consecutive barriers, work
//! after the last one).  Each round costs the *maximum* pull count over
//! agents — the barrier waits for the slowest worker — and runs in which
//! some round has no records at all still pay zero for it, not nothing:
//! rounds are wall-clock slots, not line items.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One agent's activity in one round: pulls performed and the message posted
/// at the barrier that closes the round (if any closes it).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentRound {
    /// 1-based round index.
    pub round: u32,
    pub agent: u32,
    /// The candidate arm the agent worked on, `None` when it held `⊥`.
    pub arm: Option<usize>,
    /// Pulls performed this round (elimination phase + estimation phase).
    pub pulls: u64,
    /// Total reward over those pulls.
    pub sum_rewards: u64,
    /// Arm broadcast at the closing barrier, `None` for `⊥`.
    pub broadcast_arm: Option<usize>,
    /// Estimate broadcast alongside the arm, when one was formed.
    pub broadcast_mean: Option<f64>,
}

/// What the shared elimination step at the end of a round decided.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundReport {
    /// 1-based round the report closes.
    pub round: u32,
    /// Elimination radius applied, `None` when the round had no estimates to
    /// eliminate with (zero per-round budget).
    pub radius: Option<f64>,
    /// Arms that reached the barrier as somebody's broadcast candidate.
    pub candidate_set: Vec<usize>,
    /// Candidates that survived the elimination test.
    pub survivor_set: Vec<usize>,
}

/// Full ledger of one run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    /// Number of synchronized communication steps the run performed.
    pub comm_steps: u32,
    pub agent_rounds: Vec<AgentRound>,
    pub round_reports: Vec<RoundReport>,
}

impl Transcript {
    /// Cost of a transcript built by the engine.  Engine transcripts are
    /// well-formed by construction; malformed external input should go
    /// through [`transcript_cost`] instead.
    pub fn cost(&self) -> (u32, u64) {
        transcript_cost(self).expect("engine-built transcripts are well-formed")
    }

    /// One JSON object per agent-round record, in ledger order, newline
    /// terminated.  Field names match [`AgentRound`].
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for record in &self.agent_rounds {
            out.push_str(&serde_json::to_string(record).expect("agent-round records serialize"));
            out.push('\n');
        }
        out
    }

    /// Parse records written by [`Transcript::to_jsonl`].
    pub fn agent_rounds_from_jsonl(text: &str) -> Result<Vec<AgentRound>, serde_json::Error> {
        text.lines()
            .filter(|line| !line.trim().is_empty())
            .map(serde_json::from_str)
            .collect()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TranscriptError {
    #[error("agent-round records use 1-based rounds; found round 0 for agent {agent}")]
    ZeroRound { agent: u32 },
    #[error("duplicate record for round {round}, agent {agent}")]
    DuplicateAgentRound { round: u32, agent: u32 },
    #[error(
        "round {round} exceeds the {rounds} rounds implied by {comm_steps} communication steps"
    )]
    RoundOutOfRange {
        round: u32,
        rounds: u32,
        comm_steps: u32,
    },
    #[error("record for round {round}, agent {agent} reports more reward than pulls")]
    RewardsExceedPulls { round: u32, agent: u32 },
    #[error("report for round {round} does not close any of the {comm_steps} communication steps")]
    ReportOutOfRange { round: u32, comm_steps: u32 },
}

/// Validate a transcript and return its `(rounds, time)` cost.
///
/// * `rounds` is `comm_steps + 1` regardless of how records cluster;
/// * `time` is the sum over rounds of the maximum per-agent pull count.
///
/// An empty transcript is a legal degenerate run and costs `(1, 0)`.
pub fn transcript_cost(transcript: &Transcript) -> Result<(u32, u64), TranscriptError> {
    let rounds = transcript.comm_steps + 1;
    let mut per_round_max: BTreeMap<u32, u64> = BTreeMap::new();
    let mut seen: std::collections::BTreeSet<(u32, u32)> = std::collections::BTreeSet::new();
    for record in &transcript.agent_rounds {
        if record.round == 0 {
            return Err(TranscriptError::ZeroRound {
                agent: record.agent,
            });
        }
        if record.round > rounds {
            return Err(TranscriptError::RoundOutOfRange {
                round: record.round,
                rounds,
                comm_steps: transcript.comm_steps,
            });
        }
        if !seen.insert((record.round, record.agent)) {
            return Err(TranscriptError::DuplicateAgentRound {
                round: record.round,
                agent: record.agent,
            });
        }
        if record.sum_rewards > record.pulls {
            return Err(TranscriptError::RewardsExceedPulls {
                round: record.round,
                agent: record.agent,
            });
        }
        let slot = per_round_max.entry(record.round).or_insert(0);
        *slot = (*slot).max(record.pulls);
    }
    for report in &transcript.round_reports {
        if report.round == 0 || report.round > transcript.comm_steps {
            return Err(TranscriptError::ReportOutOfRange {
                round: report.round,
                comm_steps: transcript.comm_steps,
            });
        }
    }
    let time = per_round_max.values().sum();
    Ok((rounds, time))
}
