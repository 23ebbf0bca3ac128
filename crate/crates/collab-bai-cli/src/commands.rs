//! Command handlers: flags in, spec out, execute.
//!
//! Each experiment handler does exactly three things: resolve its
//! parameters through the configuration layers, validate them into a
//! [`RunSpec`], and hand that spec to [`crate::exec`].  Keeping the
//! handlers free of experiment logic is what makes `replay` trustworthy —
//! it skips straight to the third step with a recorded spec.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use collab_bai::instance::{coupled_arm_count, PyramidParams};
use collab_bai::{
    estimate_error, exact_error_oracle, AlgoConfig, CollabConfig, Instance, SeededRng,
};

use crate::args::{
    CliVariant, GenArgs, GenFamily, OracleArgs, PlotArgs, ReplayArgs, RunArgs, SignidArgs,
    SweepArgs,
};
use crate::error::usage;
use crate::exec;
use crate::plot;
use crate::runspec::{Metadata, RunSpec};
use crate::settings::{resolve, resolve_opt, resolve_switch, FileConfig};

// ---------------------------------------------------------------------------
// Experiment commands
// ---------------------------------------------------------------------------

pub fn run(args: RunArgs) -> Result<()> {
    let file = load_config(args.output.config.as_deref())?;
    let variant = resolve(args.variant, &file, "variant", CliVariant::Basic)?;
    let agents = resolve(args.agents, &file, "K", 4u32)?;
    let horizon = resolve(args.horizon, &file, "T", 1000u64)?;
    let rounds = resolve(args.rounds, &file, "R", 1u32)?;
    let trials = resolve(args.trials, &file, "trials", 100u64)?;
    let seed = resolve_seed(args.seed, &file)?;
    let transcript = resolve_switch(args.transcript, &file, "transcript")?;
    let instance = resolve_instance(args.means.as_deref(), args.instance.as_deref(), &file)?;

    let algo = match variant.collab() {
        Some(protocol) => AlgoConfig::Collab(CollabConfig {
            agents,
            horizon,
            rounds,
            variant: protocol,
        }),
        None if variant == CliVariant::Se => {
            let delta = resolve(args.delta, &file, "delta", 0.05f64)?;
            AlgoConfig::SuccessiveElimination {
                delta,
                cap: (horizon > 0).then_some(horizon),
            }
        }
        None => AlgoConfig::SuccessiveRejects { budget: horizon },
    };
    if transcript && !matches!(algo, AlgoConfig::Collab(_)) {
        return Err(usage(
            "--transcript requires a collaborative --variant \
             (basic, improved-r-rounds, random-threshold, meta)",
        ));
    }

    let spec = RunSpec::Run {
        instance,
        algo,
        trials,
        seed,
        transcript,
    };
    exec::execute(&spec, &args.output.out)
}

pub fn sweep(args: SweepArgs) -> Result<()> {
    let file = load_config(args.output.config.as_deref())?;
    let agents = resolve(args.agents, &file, "K", 4u32)?;
    let rounds_text = resolve(args.rounds, &file, "R", "1,2,3".to_string())?;
    let rounds = parse_u32_list(&rounds_text, "--R")?;
    if rounds.is_empty() {
        return Err(usage("--R needs at least one round count"));
    }
    if rounds.contains(&0) {
        return Err(usage("--R round counts must be at least 1"));
    }
    let target_err = resolve(args.target_err, &file, "target-err", 0.1f64)?;
    let trials = resolve(args.trials, &file, "trials", 300u64)?;
    let seed = resolve_seed(args.seed, &file)?;
    let floor = resolve(args.floor, &file, "floor", 1u64)?;
    let ceiling = resolve(args.ceiling, &file, "ceiling", 1u64 << 26)?;
    let instance = resolve_instance(args.means.as_deref(), args.instance.as_deref(), &file)?;

    let spec = RunSpec::Sweep {
        instance,
        agents,
        rounds,
        target_err,
        trials,
        seed,
        floor,
        ceiling,
    };
    exec::execute(&spec, &args.output.out)
}

pub fn signid(args: SignidArgs) -> Result<()> {
    let file = load_config(args.output.config.as_deref())?;
    let delta = resolve_opt(args.delta, &file, "delta")?
        .ok_or_else(|| usage("--delta is required: the signed gap of the sign instance"))?;
    let agents = resolve(args.agents, &file, "K", 4u32)?;
    let horizon = resolve(args.horizon, &file, "T", 1000u64)?;
    let rounds = resolve(args.rounds, &file, "R", 1u32)?;
    let trials = resolve(args.trials, &file, "trials", 100u64)?;
    let seed = resolve_seed(args.seed, &file)?;

    let spec = RunSpec::Signid {
        delta,
        agents,
        horizon,
        rounds,
        trials,
        seed,
    };
    exec::execute(&spec, &args.output.out)
}

// ---------------------------------------------------------------------------
// Pure commands
// ---------------------------------------------------------------------------

pub fn gen(args: GenArgs) -> Result<()> {
    let out = args
        .out
        .ok_or_else(|| usage("--out is required: where to write the instance JSON"))?;
    let instance = match args.family {
        GenFamily::OneSpike { n, delta, best_at } => Instance::one_spike(n, delta, best_at)
            .map_err(|e| usage(format!("cannot build a one-spike instance: {e}")))?,
        GenFamily::Pyramid {
            base,
            levels,
            arms,
            seed,
        } => {
            let arms = match arms {
                Some(arms) => arms,
                None => coupled_arm_count(base, levels)
                    .and_then(|n| usize::try_from(n).ok())
                    .ok_or_else(|| {
                        usage(format!(
                            "the coupled arm count for base {base} with {levels} levels \
                             overflows; give --arms explicitly"
                        ))
                    })?,
            };
            let params = PyramidParams { base, levels, arms };
            Instance::pyramid(&params, &SeededRng::new(seed))
                .map_err(|e| usage(format!("cannot build a pyramid instance: {e}")))?
        }
        GenFamily::Signid { delta } => Instance::sign_identification(delta)
            .map_err(|e| usage(format!("cannot build a sign instance: {e}")))?,
        GenFamily::Custom { means } => {
            let means = parse_f64_list(&means, "--means")?;
            Instance::from_means(means).map_err(|e| usage(format!("--means is invalid: {e}")))?
        }
    };

    let mut text = serde_json::to_string_pretty(&instance).expect("instances always serialize");
    text.push('\n');
    fs::write(&out, text).with_context(|| format!("cannot write {}", out.display()))?;
    println!(
        "wrote {} (arms: {}, best: {})",
        out.display(),
        instance.arms(),
        instance.best()
    );
    Ok(())
}

pub fn oracle(args: OracleArgs) -> Result<()> {
    let means = parse_f64_list(&args.means, "--means")?;
    if means.len() != 2 {
        return Err(usage(format!(
            "--means needs exactly two arms, got {}",
            means.len()
        )));
    }
    let instance =
        Instance::from_means(means).map_err(|e| usage(format!("--means is invalid: {e}")))?;
    let pulls = parse_u64_list(&args.pulls, "--pulls")?;
    let [first, second]: [u64; 2] = pulls
        .try_into()
        .map_err(|_| usage("--pulls needs exactly two counts"))?;
    let exact = exact_error_oracle(&instance, [first, second])
        .map_err(|e| usage(format!("--pulls is invalid: {e}")))?;
    println!("exact error probability: {exact}");

    if let Some(trials) = args.trials {
        let seed = args.seed.unwrap_or_else(rand::random);
        let algo = AlgoConfig::FixedSchedule {
            pulls: [first, second],
        };
        let estimate = estimate_error(&algo, &instance, trials, &SeededRng::new(seed))?;
        println!(
            "monte-carlo at {} trials (seed {seed}): {} in [{}, {}]",
            estimate.trials, estimate.rate, estimate.ci_low, estimate.ci_high
        );
        let inside = estimate.ci_low <= exact && exact <= estimate.ci_high;
        println!(
            "exact value inside the {:.0}% interval: {}",
            estimate.confidence * 100.0,
            if inside { "yes" } else { "no" }
        );
    }
    Ok(())
}

pub fn plot(args: PlotArgs) -> Result<()> {
    plot::validate_header(&args.csv, args.kind)?;
    let csv_ref = script_csv_reference(&args.csv, &args.out)?;
    let script = match args.kind {
        crate::args::PlotKind::Errors => plot::errors_script(&csv_ref),
        crate::args::PlotKind::Speedup => plot::speedup_script(&csv_ref),
    };
    fs::write(&args.out, script).with_context(|| format!("cannot write {}", args.out.display()))?;
    println!("wrote {}", args.out.display());
    Ok(())
}

pub fn replay(args: ReplayArgs) -> Result<()> {
    let text = fs::read_to_string(&args.metadata)
        .with_context(|| format!("cannot read {}", args.metadata.display()))?;
    let metadata: Metadata = serde_json::from_str(&text)
        .with_context(|| format!("{} is not a metadata file", args.metadata.display()))?;
    let recomputed = metadata.spec.content_hash();
    if recomputed != metadata.content_hash {
        anyhow::bail!(
            "{} fails its integrity check: the file declares {} but the embedded \
             spec hashes to {recomputed}",
            args.metadata.display(),
            metadata.content_hash
        );
    }
    exec::execute(&metadata.spec, &args.out)
}

// ---------------------------------------------------------------------------
// Shared resolution helpers
// ---------------------------------------------------------------------------

fn load_config(path: Option<&Path>) -> Result<FileConfig> {
    match path {
        Some(path) => FileConfig::load(path),
        None => Ok(FileConfig::empty()),
    }
}

/// A missing seed is drawn from entropy here, so the spec — and therefore
/// the metadata — always carries a concrete, replayable value.
fn resolve_seed(flag: Option<u64>, file: &FileConfig) -> Result<u64> {
    Ok(resolve_opt(flag, file, "seed")?.unwrap_or_else(rand::random))
}

/// Pick the instance source.  Flags outrank the file as a level: if either
/// flag is given the file's entries are ignored entirely.
fn resolve_instance(
    means: Option<&str>,
    instance: Option<&Path>,
    file: &FileConfig,
) -> Result<Instance> {
    match (means, instance) {
        (Some(_), Some(_)) => Err(usage("--means conflicts with --instance; give exactly one")),
        (Some(means), None) => instance_from_means(means, "--means"),
        (None, Some(path)) => read_instance_file(path),
        (None, None) => match (file.get("means"), file.get("instance")) {
            (Some(_), Some(_)) => Err(usage(
                "configuration keys `means` and `instance` conflict; set exactly one",
            )),
            (Some(means), None) => instance_from_means(means, "configuration key `means`"),
            (None, Some(path)) => read_instance_file(Path::new(path)),
            (None, None) => Err(usage(
                "an instance source is required: --means or --instance (or the \
                 matching configuration key)",
            )),
        },
    }
}

fn instance_from_means(text: &str, what: &str) -> Result<Instance> {
    let means = parse_f64_list(text, what)?;
    Instance::from_means(means).map_err(|e| usage(format!("{what} is invalid: {e}")))
}

fn read_instance_file(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read instance file {}", path.display()))?;
    serde_json::from_str(&text)
        .with_context(|| format!("{} is not a valid instance file", path.display()))
}

fn parse_f64_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|part| {
            part.trim().parse::<f64>().map_err(|_| {
                usage(format!(
                    "{what} expects comma-separated numbers, got `{text}`"
                ))
            })
        })
        .collect()
}

fn parse_u64_list(text: &str, what: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(|part| {
            part.trim().parse::<u64>().map_err(|_| {
                usage(format!(
                    "{what} expects comma-separated integers, got `{text}`"
                ))
            })
        })
        .collect()
}

fn parse_u32_list(text: &str, what: &str) -> Result<Vec<u32>> {
    text.split(',')
        .map(|part| {
            part.trim().parse::<u32>().map_err(|_| {
                usage(format!(
                    "{what} expects comma-separated integers, got `{text}`"
                ))
            })
        })
        .collect()
}

/// How the emitted script should refer to the CSV: by bare name when the
/// two end up siblings (the portable, replay-stable case), by absolute
/// path otherwise.
fn script_csv_reference(csv: &Path, script_out: &Path) -> Result<String> {
    let csv_abs =
        fs::canonicalize(csv).with_context(|| format!("cannot resolve {}", csv.display()))?;
    let script_dir = script_out.parent().filter(|p| !p.as_os_str().is_empty());
    let siblings = match script_dir {
        Some(dir) => fs::canonicalize(dir)
            .map(|dir| csv_abs.parent() == Some(dir.as_path()))
            .unwrap_or(false),
        // An empty parent means the script lands in the working directory.
        None => csv_abs.parent() == fs::canonicalize(".").ok().as_deref(),
    };
    let reference: PathBuf = if siblings {
        csv_abs
            .file_name()
            .map(PathBuf::from)
            .unwrap_or_else(|| csv_abs.clone())
    } else {
        csv_abs
    };
    Ok(reference.to_string_lossy().into_owned())
}
