//! Spec execution: the one place artifacts are produced.
//!
//! Both the experiment commands and `replay` funnel into [`execute`], so a
//! replayed metadata file cannot drift from a fresh invocation — they share
//! every code path that touches bytes.  All randomness descends from the
//! spec's recorded seed, CSV emission goes through the library's writers,
//! and the metadata is serialized from structs with a fixed field order.
//! Anything written here must stay a pure function of the [`RunSpec`].

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};

use collab_bai::experiments::{write_errors_csv, write_speedup_csv, ErrorsCsvRow, SpeedupCsvRow};
use collab_bai::rng::stream;
use collab_bai::{
    estimate_error, signid_run, speedup_table, AlgoConfig, ErrorEstimate, Instance, RunOptions,
    SearchOptions, SeededRng,
};

use crate::plot;
use crate::runspec::{Metadata, RunSpec};

/// File name of the error-rate table.
pub const ERRORS_CSV: &str = "errors.csv";

/// File name of the speedup table.
pub const SPEEDUP_CSV: &str = "speedup.csv";

/// File name of the exported pull ledger.
pub const TRANSCRIPT_JSONL: &str = "transcript.jsonl";

/// File name of the metadata wrapper.
pub const METADATA_JSON: &str = "metadata.json";

/// Execute `spec` into `out_dir`, creating it if needed.
pub fn execute(spec: &RunSpec, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
    match spec {
        RunSpec::Run {
            instance,
            algo,
            trials,
            seed,
            transcript,
        } => execute_run(spec, out_dir, instance, algo, *trials, *seed, *transcript),
        RunSpec::Sweep {
            instance,
            agents,
            rounds,
            target_err,
            trials,
            seed,
            floor,
            ceiling,
        } => execute_sweep(
            spec,
            out_dir,
            instance,
            *agents,
            rounds,
            *target_err,
            *trials,
            *seed,
            *floor,
            *ceiling,
        ),
        RunSpec::Signid {
            delta,
            agents,
            horizon,
            rounds,
            trials,
            seed,
        } => execute_signid(
            spec, out_dir, *delta, *agents, *horizon, *rounds, *trials, *seed,
        ),
    }
}

fn execute_run(
    spec: &RunSpec,
    out_dir: &Path,
    instance: &Instance,
    algo: &AlgoConfig,
    trials: u64,
    seed: u64,
    transcript: bool,
) -> Result<()> {
    let root = SeededRng::new(seed);
    let estimate = estimate_error(algo, instance, trials, &root)?;

    let (variant, agents, horizon, rounds) = table_columns(algo);
    let row = ErrorsCsvRow {
        variant: variant.clone(),
        agents,
        horizon,
        rounds,
        trials: estimate.trials,
        failures: estimate.failures,
        rate: estimate.rate,
        ci_low: estimate.ci_low,
        ci_high: estimate.ci_high,
        seed,
    };
    let mut outputs = Vec::new();
    write_file_with(out_dir, ERRORS_CSV, &mut outputs, |file| {
        write_errors_csv(file, &[row]).map_err(Into::into)
    })?;

    if transcript {
        let ledger = first_trial_transcript(instance, algo, &root)?;
        write_text(out_dir, TRANSCRIPT_JSONL, &ledger, &mut outputs)?;
    }

    write_text(
        out_dir,
        plot::ERRORS_SCRIPT,
        &plot::errors_script(ERRORS_CSV),
        &mut outputs,
    )?;
    write_metadata(spec, out_dir, outputs)?;

    print_estimate(&variant, instance, &estimate);
    println!("artifacts in {}", out_dir.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn execute_sweep(
    spec: &RunSpec,
    out_dir: &Path,
    instance: &Instance,
    agents: u32,
    rounds: &[u32],
    target_err: f64,
    trials: u64,
    seed: u64,
    floor: u64,
    ceiling: u64,
) -> Result<()> {
    let search = SearchOptions {
        floor,
        ceiling,
        ..SearchOptions::default()
    };
    let table = speedup_table(
        instance,
        agents,
        rounds,
        target_err,
        trials,
        &SeededRng::new(seed),
        &search,
    )?;

    let rows: Vec<SpeedupCsvRow> = table
        .iter()
        .map(|row| SpeedupCsvRow {
            agents: row.agents,
            rounds: row.rounds,
            target_err: row.target_err,
            t_star: row.t_star,
            baseline_t: row.baseline_t,
            speedup: row.speedup,
            seed,
        })
        .collect();
    let mut outputs = Vec::new();
    write_file_with(out_dir, SPEEDUP_CSV, &mut outputs, |file| {
        write_speedup_csv(file, &rows).map_err(Into::into)
    })?;
    write_text(
        out_dir,
        plot::SPEEDUP_SCRIPT,
        &plot::speedup_script(SPEEDUP_CSV),
        &mut outputs,
    )?;
    write_metadata(spec, out_dir, outputs)?;

    for row in &table {
        println!(
            "R={}: T*={} vs baseline_T={} -> speedup {:.3}",
            row.rounds, row.t_star, row.baseline_t, row.speedup
        );
    }
    println!("artifacts in {}", out_dir.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn execute_signid(
    spec: &RunSpec,
    out_dir: &Path,
    delta: f64,
    agents: u32,
    horizon: u64,
    rounds: u32,
    trials: u64,
    seed: u64,
) -> Result<()> {
    let estimate = signid_run(
        delta,
        agents,
        horizon,
        rounds,
        trials,
        &SeededRng::new(seed),
    )?;
    let row = ErrorsCsvRow {
        variant: "signid".to_string(),
        agents,
        horizon,
        rounds,
        trials: estimate.trials,
        failures: estimate.failures,
        rate: estimate.rate,
        ci_low: estimate.ci_low,
        ci_high: estimate.ci_high,
        seed,
    };
    let mut outputs = Vec::new();
    write_file_with(out_dir, ERRORS_CSV, &mut outputs, |file| {
        write_errors_csv(file, &[row]).map_err(Into::into)
    })?;
    write_text(
        out_dir,
        plot::ERRORS_SCRIPT,
        &plot::errors_script(ERRORS_CSV),
        &mut outputs,
    )?;
    write_metadata(spec, out_dir, outputs)?;

    println!(
        "signid delta={delta}: error {} = {}/{} (CI [{}, {}])",
        estimate.rate, estimate.failures, estimate.trials, estimate.ci_low, estimate.ci_high
    );
    println!("artifacts in {}", out_dir.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// Pieces
// ---------------------------------------------------------------------------

/// The `(variant, K, T, R)` columns an algorithm occupies in an errors
/// table.  The centralized baselines run single-player, so K and R pin to 1
/// and T carries their pull budget (0 when elimination runs uncapped).
fn table_columns(algo: &AlgoConfig) -> (String, u32, u64, u32) {
    match algo {
        AlgoConfig::Collab(cfg) => (
            cfg.variant.label().to_string(),
            cfg.agents,
            cfg.horizon,
            cfg.rounds,
        ),
        AlgoConfig::SuccessiveElimination { cap, .. } => {
            ("successive-elimination".to_string(), 1, cap.unwrap_or(0), 1)
        }
        AlgoConfig::SuccessiveRejects { budget } => {
            ("successive-rejects".to_string(), 1, *budget, 1)
        }
        AlgoConfig::FixedSchedule { pulls } => {
            ("fixed-schedule".to_string(), 1, pulls[0] + pulls[1], 1)
        }
    }
}

/// Re-run trial 0 with the ledger retained and serialize it.  Uses the same
/// stream the estimate drew for that trial, so the export is the run it
/// reports, not a lookalike.
fn first_trial_transcript(
    instance: &Instance,
    algo: &AlgoConfig,
    root: &SeededRng,
) -> Result<String> {
    let AlgoConfig::Collab(cfg) = algo else {
        return Err(anyhow!(
            "the transcript export needs a collaborative algorithm"
        ));
    };
    let options = RunOptions {
        retain_transcript: true,
        force_tau: None,
    };
    let outcome = collab_bai::run(instance, cfg, &root.child(stream::TRIAL).child(0), &options)?;
    let ledger = outcome
        .transcript
        .ok_or_else(|| anyhow!("the engine did not retain a transcript despite being asked"))?;
    Ok(ledger.to_jsonl())
}

fn write_metadata(spec: &RunSpec, out_dir: &Path, outputs: Vec<String>) -> Result<()> {
    let metadata = Metadata::new(spec.clone(), outputs);
    let path = out_dir.join(METADATA_JSON);
    fs::write(&path, metadata.to_json()).with_context(|| format!("cannot write {}", path.display()))
}

/// Create `name` under `dir` through a writer callback and record it.
fn write_file_with(
    dir: &Path,
    name: &str,
    outputs: &mut Vec<String>,
    fill: impl FnOnce(&mut fs::File) -> Result<()>,
) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut file =
        fs::File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
    fill(&mut file).with_context(|| format!("cannot write {}", path.display()))?;
    outputs.push(name.to_string());
    Ok(path)
}

fn write_text(dir: &Path, name: &str, text: &str, outputs: &mut Vec<String>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
    outputs.push(name.to_string());
    Ok(())
}

fn print_estimate(variant: &str, instance: &Instance, estimate: &ErrorEstimate) {
    println!(
        "{variant} on {} arms: error {} = {}/{} (CI [{}, {}])",
        instance.arms(),
        estimate.rate,
        estimate.failures,
        estimate.trials,
        estimate.ci_low,
        estimate.ci_high
    );
}
