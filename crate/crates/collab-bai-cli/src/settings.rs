//! Layered configuration.
//!
//! Every experiment parameter can come from three places, in strictly
//! decreasing precedence: an explicit flag, a `--config` file, and the
//! built-in default.  Config files are deliberately flat — one `key = value`
//! per line, `#` for comments — so they can be written by shell scripts
//! without a serializer.  Unknown or duplicated keys are rejected rather
//! than ignored: a typo that silently falls back to a default is the most
//! expensive kind of mistake in a long Monte-Carlo run.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::{Context, Result};

use crate::error::usage;

/// One documented configuration key.
pub struct KeySpec {
    pub key: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

/// Every key a config file may set.  `--show-config` prints this table.
pub const KEYS: [KeySpec; 13] = [
    KeySpec {
        key: "variant",
        default: "basic",
        help: "algorithm for run: basic | improved-r-rounds | random-threshold | meta | se | sr",
    },
    KeySpec {
        key: "K",
        default: "4",
        help: "team size",
    },
    KeySpec {
        key: "T",
        default: "1000",
        help: "time horizon; pull budget for sr; pull cap for se (0 = uncapped)",
    },
    KeySpec {
        key: "R",
        default: "1",
        help: "communication rounds; for sweep a comma list of round counts (default 1,2,3)",
    },
    KeySpec {
        key: "trials",
        default: "100",
        help: "Monte-Carlo trials (sweep probes default to 300)",
    },
    KeySpec {
        key: "seed",
        default: "(entropy)",
        help: "root seed; drawn fresh and recorded in the metadata when unset",
    },
    KeySpec {
        key: "delta",
        default: "0.05",
        help: "confidence for se; for signid the sign gap (required there)",
    },
    KeySpec {
        key: "target-err",
        default: "0.1",
        help: "error rate both sides of a sweep must reach",
    },
    KeySpec {
        key: "floor",
        default: "1",
        help: "smallest horizon the sweep search probes",
    },
    KeySpec {
        key: "ceiling",
        default: "67108864",
        help: "largest horizon the sweep search probes",
    },
    KeySpec {
        key: "transcript",
        default: "false",
        help: "also export trial 0's pull ledger (collaborative run only)",
    },
    KeySpec {
        key: "means",
        default: "(unset)",
        help: "inline comma-separated arm means",
    },
    KeySpec {
        key: "instance",
        default: "(unset)",
        help: "path to an instance JSON file",
    },
];

/// Print the key table to stdout.
pub fn print_defaults() {
    println!("configuration keys (precedence: flags > --config file > defaults)");
    println!();
    let width = KEYS.iter().map(|k| k.key.len()).max().unwrap_or(0);
    let default_width = KEYS.iter().map(|k| k.default.len()).max().unwrap_or(0);
    for spec in &KEYS {
        println!(
            "  {:width$}  {:default_width$}  {}",
            spec.key, spec.default, spec.help
        );
    }
    println!();
    println!("config files hold one `key = value` per line; `#` starts a comment.");
}

/// A parsed `--config` file (possibly empty when none was given).
#[derive(Debug, Default)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    /// An empty layer: every lookup falls through to the default.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Parse `path`.  I/O failures are runtime errors; a malformed line,
    /// an unknown key, or a duplicated key is a usage error naming the spot.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let mut values = BTreeMap::new();
        for (index, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(usage(format!(
                    "{} line {}: expected `key = value`, got `{line}`",
                    path.display(),
                    index + 1
                )));
            };
            let key = key.trim();
            let value = value.trim();
            if !KEYS.iter().any(|spec| spec.key == key) {
                return Err(usage(format!(
                    "{} line {}: unknown configuration key `{key}` (see --show-config)",
                    path.display(),
                    index + 1
                )));
            }
            if values.insert(key.to_string(), value.to_string()).is_some() {
                return Err(usage(format!(
                    "{} line {}: configuration key `{key}` is set twice",
                    path.display(),
                    index + 1
                )));
            }
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

// ---------------------------------------------------------------------------
// Resolution
// ---------------------------------------------------------------------------

/// Flag, else config value, else default.
pub fn resolve<T>(flag: Option<T>, file: &FileConfig, key: &str, default: T) -> Result<T>
where
    T: FromStr,
    T::Err: fmt::Display,
{
    Ok(resolve_opt(flag, file, key)?.unwrap_or(default))
}

/// Flag, else config value, else nothing.  Parse failures in the file are
/// usage errors naming the key.
pub fn resolve_opt<T>(flag: Option<T>, file: &FileConfig, key: &str) -> Result<Option<T>>
where
    T: FromStr,
    T::Err: fmt::Display,
{
    if flag.is_some() {
        return Ok(flag);
    }
    match file.get(key) {
        Some(raw) => raw.parse().map(Some).map_err(|e| {
            usage(format!(
                "configuration key `{key}` has invalid value `{raw}`: {e}"
            ))
        }),
        None => Ok(None),
    }
}

/// Boolean keys: a present flag turns the switch on; otherwise the config
/// file decides; otherwise off.
pub fn resolve_switch(flag: bool, file: &FileConfig, key: &str) -> Result<bool> {
    if flag {
        return Ok(true);
    }
    resolve(None, file, key, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::UsageError;
    use std::io::Write;

    fn write_config(text: &str) -> tempfile::NamedTempFile {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(text.as_bytes()).unwrap();
        file
    }

    #[test]
    fn flags_beat_file_values_beat_defaults() {
        let file = write_config("trials = 50\nT=200\n");
        let cfg = FileConfig::load(file.path()).unwrap();
        assert_eq!(resolve(Some(80u64), &cfg, "trials", 100).unwrap(), 80);
        assert_eq!(resolve(None::<u64>, &cfg, "trials", 100).unwrap(), 50);
        assert_eq!(resolve(None::<u64>, &cfg, "T", 1000).unwrap(), 200);
        assert_eq!(resolve(None::<u32>, &cfg, "R", 1).unwrap(), 1);
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let file = write_config("# a comment\n\n  seed = 7\n");
        let cfg = FileConfig::load(file.path()).unwrap();
        assert_eq!(cfg.get("seed"), Some("7"));
    }

    #[test]
    fn unknown_keys_are_usage_errors_naming_the_line() {
        let file = write_config("horizon = 10\n");
        let err = FileConfig::load(file.path()).unwrap_err();
        assert!(err.downcast_ref::<UsageError>().is_some());
        assert!(err.to_string().contains("`horizon`"));
        assert!(err.to_string().contains("line 1"));
    }

    #[test]
    fn malformed_and_duplicated_lines_are_rejected() {
        let file = write_config("just words\n");
        assert!(FileConfig::load(file.path()).is_err());

        let file = write_config("T = 1\nT = 2\n");
        let err = FileConfig::load(file.path()).unwrap_err();
        assert!(err.to_string().contains("set twice"));
    }

    #[test]
    fn bad_values_name_the_key_they_came_from() {
        let file = write_config("trials = soon\n");
        let cfg = FileConfig::load(file.path()).unwrap();
        let err = resolve(None::<u64>, &cfg, "trials", 100).unwrap_err();
        assert!(err.downcast_ref::<UsageError>().is_some());
        assert!(err.to_string().contains("`trials`"));
    }

    #[test]
    fn switches_turn_on_from_either_layer_only() {
        let file = write_config("transcript = true\n");
        let cfg = FileConfig::load(file.path()).unwrap();
        assert!(resolve_switch(false, &cfg, "transcript").unwrap());
        assert!(resolve_switch(true, &FileConfig::empty(), "transcript").unwrap());
        assert!(!resolve_switch(false, &FileConfig::empty(), "transcript").unwrap());
    }

    #[test]
    fn every_documented_key_is_unique() {
        let mut names: Vec<_> = KEYS.iter().map(|spec| spec.key).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), KEYS.len());
    }
}
