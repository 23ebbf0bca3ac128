//! The flag surface.
//!
//! Flags deliberately reuse the notation the rest of the project speaks:
//! `--K` for the team size, `--T` for the time horizon (or pull budget,
//! for the centralized baselines), `--R` for communication rounds.  Every
//! experiment flag is optional here; resolution against the configuration
//! file and the built-in defaults happens in [`crate::settings`], so this
//! module stays purely declarative.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use collab_bai::Variant;

#[derive(Debug, Parser)]
#[command(
    name = "collab-bai",
    version,
    about = "Simulate round-limited collaborative best-arm identification and measure its speedup",
    arg_required_else_help = true
)]
pub struct Cli {
    /// Print every configuration key with its default value, then exit.
    #[arg(long)]
    pub show_config: bool,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write an instance JSON file for one of the built-in families.
    Gen(GenArgs),
    /// Estimate one algorithm's error rate on one instance.
    Run(RunArgs),
    /// Build a rounds-versus-speedup table against the centralized baseline.
    Sweep(SweepArgs),
    /// Estimate the error of sign identification (a two-arm gap of `delta`).
    Signid(SignidArgs),
    /// Print the exact error probability of a two-arm fixed pull schedule.
    Oracle(OracleArgs),
    /// Emit a plotting script for a previously written CSV.
    Plot(PlotArgs),
    /// Re-execute a run from its metadata and reproduce its artifacts.
    Replay(ReplayArgs),
}

/// Flags shared by every artifact-writing command.
#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Flat `key = value` file supplying values for flags left unset.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Directory the artifacts are written into (created if missing).
    #[arg(short, long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// File the instance JSON is written to.
    #[arg(short, long, value_name = "FILE", global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub family: GenFamily,
}

#[derive(Debug, Subcommand)]
pub enum GenFamily {
    /// One arm `delta` above an otherwise flat field.
    OneSpike {
        /// Number of arms.
        #[arg(long)]
        n: usize,
        /// Gap between the spike and every other arm.
        #[arg(long)]
        delta: f64,
        /// Index carrying the spike.
        #[arg(long, default_value_t = 0)]
        best_at: usize,
    },
    /// A geometric ladder of gaps: level `l` sits `base^-l` below the top.
    Pyramid {
        /// Gap ratio between consecutive levels.
        #[arg(long)]
        base: u64,
        /// Number of levels below the top arm.
        #[arg(long)]
        levels: u32,
        /// Total arm count; defaults to the coupled count for (base, levels).
        #[arg(long)]
        arms: Option<usize>,
        /// Seed for sampling the level of each arm.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// The sign problem's single arm, biased to 0.5 + delta.  (The `signid`
    /// command runs its two-arm reduction against a reference at 0.5.)
    Signid {
        /// Signed bias of the arm; the task is to identify its sign.
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
    },
    /// Arbitrary means given inline.
    Custom {
        /// Comma-separated arm means, e.g. `0.6,0.4,0.4`.
        #[arg(long)]
        means: String,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Inline comma-separated arm means, e.g. `0.6,0.4`.
    #[arg(long, value_name = "LIST")]
    pub means: Option<String>,

    /// Instance JSON file (e.g. written by `gen`).
    #[arg(long, value_name = "FILE")]
    pub instance: Option<PathBuf>,

    /// Algorithm to run.
    #[arg(long, value_enum, value_name = "NAME")]
    pub variant: Option<CliVariant>,

    /// Team size.
    #[arg(long = "K", value_name = "K")]
    pub agents: Option<u32>,

    /// Time horizon; for `sr` the pull budget, for `se` a cap (0 = uncapped).
    #[arg(long = "T", value_name = "T")]
    pub horizon: Option<u64>,

    /// Communication rounds.
    #[arg(long = "R", value_name = "R")]
    pub rounds: Option<u32>,

    /// Monte-Carlo trials.
    #[arg(long)]
    pub trials: Option<u64>,

    /// Root seed; omitted = drawn from entropy and recorded in the metadata.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Elimination confidence for `--variant se`.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,

    /// Also export the first trial's pull ledger as `transcript.jsonl`
    /// (collaborative variants only).
    #[arg(long)]
    pub transcript: bool,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Inline comma-separated arm means.
    #[arg(long, value_name = "LIST")]
    pub means: Option<String>,

    /// Instance JSON file (e.g. written by `gen`).
    #[arg(long, value_name = "FILE")]
    pub instance: Option<PathBuf>,

    /// Team size shared by every row.
    #[arg(long = "K", value_name = "K")]
    pub agents: Option<u32>,

    /// Comma-separated list of total round counts, e.g. `1,2,3`.
    #[arg(long = "R", value_name = "LIST")]
    pub rounds: Option<String>,

    /// Error rate both the team and the baseline must reach.
    #[arg(long)]
    pub target_err: Option<f64>,

    /// Monte-Carlo trials per probed horizon.
    #[arg(long)]
    pub trials: Option<u64>,

    /// Root seed; omitted = drawn from entropy and recorded in the metadata.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Smallest horizon the threshold search may probe.
    #[arg(long)]
    pub floor: Option<u64>,

    /// Largest horizon the threshold search may probe.
    #[arg(long)]
    pub ceiling: Option<u64>,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SignidArgs {
    /// Signed gap of arm 1 over arm 0 (required; nonzero, |delta| <= 1/2).
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,

    /// Team size.
    #[arg(long = "K", value_name = "K")]
    pub agents: Option<u32>,

    /// Time horizon.
    #[arg(long = "T", value_name = "T")]
    pub horizon: Option<u64>,

    /// Communication rounds.
    #[arg(long = "R", value_name = "R")]
    pub rounds: Option<u32>,

    /// Monte-Carlo trials.
    #[arg(long)]
    pub trials: Option<u64>,

    /// Root seed; omitted = drawn from entropy and recorded in the metadata.
    #[arg(long)]
    pub seed: Option<u64>,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Comma-separated means of the two arms.
    #[arg(long, value_name = "LIST")]
    pub means: String,

    /// Comma-separated pull counts for the two arms (total at most 24).
    #[arg(long, value_name = "LIST")]
    pub pulls: String,

    /// Also cross-check with a Monte-Carlo estimate at this many trials.
    #[arg(long)]
    pub trials: Option<u64>,

    /// Seed for the cross-check.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// CSV file the script will read.
    #[arg(long, value_name = "FILE")]
    pub csv: PathBuf,

    /// Table layout the CSV must carry.
    #[arg(long, value_enum)]
    pub kind: PlotKind,

    /// File the script is written to.
    #[arg(short, long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, Eq, PartialEq, ValueEnum)]
pub enum PlotKind {
    /// Error rate against horizon, one line per variant.
    Errors,
    /// Speedup against round count.
    Speedup,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// `metadata.json` of a previous run.
    #[arg(long, value_name = "FILE")]
    pub metadata: PathBuf,

    /// Directory the reproduced artifacts are written into.
    #[arg(short, long, value_name = "DIR")]
    pub out: PathBuf,
}

// ---------------------------------------------------------------------------
// Algorithm selection
// ---------------------------------------------------------------------------

/// Everything `run` can execute: the four collaborative protocol variants
/// plus the two centralized baselines.
#[derive(Clone, Copy, Debug, Eq, PartialEq, ValueEnum)]
pub enum CliVariant {
    /// Fixed-time collaborative elimination.
    Basic,
    /// Heavier replication squeezed into one fewer communication step.
    ImprovedRRounds,
    /// A randomized elimination bar, robust to adversarial horizons.
    RandomThreshold,
    /// Exponent-ladder wrapper that hedges over unknown hardness.
    Meta,
    /// Centralized successive elimination; `--delta` sets its confidence,
    /// `--T` caps its pulls (0 = uncapped).
    Se,
    /// Centralized successive rejects; `--T` is its pull budget.
    Sr,
}

impl CliVariant {
    /// The collaborative protocol this selects, if it is one.
    pub fn collab(self) -> Option<Variant> {
        match self {
            CliVariant::Basic => Some(Variant::Basic),
            CliVariant::ImprovedRRounds => Some(Variant::ImprovedRRounds),
            CliVariant::RandomThreshold => Some(Variant::RandomThreshold),
            CliVariant::Meta => Some(Variant::Meta),
            CliVariant::Se | CliVariant::Sr => None,
        }
    }
}

/// Configuration files spell variants exactly like the command line does.
impl FromStr for CliVariant {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        match text {
            "basic" => Ok(CliVariant::Basic),
            "improved-r-rounds" => Ok(CliVariant::ImprovedRRounds),
            "random-threshold" => Ok(CliVariant::RandomThreshold),
            "meta" => Ok(CliVariant::Meta),
            "se" => Ok(CliVariant::Se),
            "sr" => Ok(CliVariant::Sr),
            other => Err(format!(
                "unknown variant `{other}` (expected basic, improved-r-rounds, \
                 random-threshold, meta, se, or sr)"
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn the_flag_surface_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn variant_names_round_trip_between_flag_and_config_spellings() {
        for name in [
            "basic",
            "improved-r-rounds",
            "random-threshold",
            "meta",
            "se",
            "sr",
        ] {
            let parsed: CliVariant = name.parse().unwrap();
            let clap_parsed = <CliVariant as ValueEnum>::from_str(name, false).unwrap();
            assert_eq!(parsed, clap_parsed);
        }
        assert!("Basic".parse::<CliVariant>().is_err());
    }

    #[test]
    fn collab_mapping_covers_exactly_the_protocol_variants() {
        assert_eq!(CliVariant::Basic.collab(), Some(Variant::Basic));
        assert_eq!(CliVariant::Meta.collab(), Some(Variant::Meta));
        assert_eq!(CliVariant::Se.collab(), None);
        assert_eq!(CliVariant::Sr.collab(), None);
    }
}
