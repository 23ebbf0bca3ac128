//! Plot-script emission.
//!
//! The binary never draws anything itself; it writes a small, self-contained
//! Python script next to each CSV so the figures can be regenerated (or
//! restyled) without rerunning the simulation.  Scripts resolve their CSV
//! relative to their own directory, read it with the standard-library `csv`
//! module, and only import matplotlib after confirming there is data — an
//! empty table degrades to a note on stdout instead of a stack trace.
//!
//! Emission validates the CSV's header first: pointing the errors template
//! at a speedup table (or at a truncated file) is a structural mistake the
//! script could only report later and worse.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

use collab_bai::experiments::{ERRORS_HEADER, SPEEDUP_HEADER};

use crate::args::PlotKind;

/// File name of the script written next to an errors table.
pub const ERRORS_SCRIPT: &str = "plot_errors.py";

/// File name of the script written next to a speedup table.
pub const SPEEDUP_SCRIPT: &str = "plot_speedup.py";

/// The exact comma-joined header line a CSV of `kind` must start with.
pub fn expected_header(kind: PlotKind) -> String {
    match kind {
        PlotKind::Errors => ERRORS_HEADER.join(","),
        PlotKind::Speedup => SPEEDUP_HEADER.join(","),
    }
}

/// Check that `csv` starts with the header `kind` requires.
pub fn validate_header(csv: &Path, kind: PlotKind) -> Result<()> {
    let text = fs::read_to_string(csv).with_context(|| format!("cannot read {}", csv.display()))?;
    let found = text.lines().next().unwrap_or("").trim_end_matches('\r');
    let expected = expected_header(kind);
    if found != expected {
        bail!(
            "{} does not carry the expected columns\n  expected: {expected}\n  found:    {found}",
            csv.display()
        );
    }
    Ok(())
}

/// The script for an errors table that lives at `csv_ref` relative to the
/// script's own directory (absolute paths pass through unchanged).
pub fn errors_script(csv_ref: &str) -> String {
    ERRORS_TEMPLATE.replace("__CSV__", &python_string(csv_ref))
}

/// The script for a speedup table; same path convention.
pub fn speedup_script(csv_ref: &str) -> String {
    SPEEDUP_TEMPLATE.replace("__CSV__", &python_string(csv_ref))
}

/// A Python string literal for `text` (JSON string syntax is a subset).
fn python_string(text: &str) -> String {
    serde_json::to_string(text).expect("strings always serialize")
}

const ERRORS_TEMPLATE: &str = r#"#!/usr/bin/env python3
"""Plot error rate against time horizon, one line per algorithm variant.

The CSV location is resolved relative to this script's directory.  Columns
must be exactly: variant,K,T,R,trials,failures,rate,ci_low,ci_high,seed.
"""
import csv
import os
import sys

CSV = __CSV__
EXPECTED = "variant,K,T,R,trials,failures,rate,ci_low,ci_high,seed"


def main():
    path = CSV
    if not os.path.isabs(path):
        path = os.path.join(os.path.dirname(os.path.abspath(__file__)), path)
    with open(path, newline="") as handle:
        header = handle.readline().rstrip("\r\n")
        if header != EXPECTED:
            sys.exit(f"unexpected columns in {path}: {header!r}")
        rows = list(csv.DictReader(handle, fieldnames=EXPECTED.split(",")))
    if not rows:
        print(f"no data rows in {path}; nothing to plot")
        return

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    by_variant = {}
    for row in rows:
        by_variant.setdefault(row["variant"], []).append(row)

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for variant in sorted(by_variant):
        group = sorted(by_variant[variant], key=lambda r: int(r["T"]))
        horizons = [int(r["T"]) for r in group]
        rates = [float(r["rate"]) for r in group]
        below = [float(r["rate"]) - float(r["ci_low"]) for r in group]
        above = [float(r["ci_high"]) - float(r["rate"]) for r in group]
        ax.errorbar(
            horizons,
            rates,
            yerr=[below, above],
            marker="o",
            capsize=3,
            label=variant,
        )
    ax.set_xlabel("time horizon T")
    ax.set_ylabel("error rate")
    ax.set_ylim(bottom=0.0)
    ax.legend()
    fig.tight_layout()
    out = os.path.join(os.path.dirname(os.path.abspath(__file__)), "errors.png")
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
"#;

const SPEEDUP_TEMPLATE: &str = r#"#!/usr/bin/env python3
"""Plot speedup over the centralized baseline against the round budget.

The CSV location is resolved relative to this script's directory.  Columns
must be exactly: K,R,target_err,T_star,baseline_T,speedup,seed.
"""
import csv
import os
import sys

CSV = __CSV__
EXPECTED = "K,R,target_err,T_star,baseline_T,speedup,seed"


def main():
    path = CSV
    if not os.path.isabs(path):
        path = os.path.join(os.path.dirname(os.path.abspath(__file__)), path)
    with open(path, newline="") as handle:
        header = handle.readline().rstrip("\r\n")
        if header != EXPECTED:
            sys.exit(f"unexpected columns in {path}: {header!r}")
        rows = list(csv.DictReader(handle, fieldnames=EXPECTED.split(",")))
    if not rows:
        print(f"no data rows in {path}; nothing to plot")
        return

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows.sort(key=lambda r: int(r["R"]))
    rounds = [int(r["R"]) for r in rows]
    speedups = [float(r["speedup"]) for r in rows]

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.plot(rounds, speedups, marker="o")
    ax.axhline(1.0, linestyle="--", linewidth=1.0, color="gray")
    ax.set_xticks(rounds)
    ax.set_xlabel("total rounds R")
    ax.set_ylabel("speedup over the rejects baseline")
    first = rows[0]
    ax.set_title(
        f"K={first['K']}, target error {first['target_err']}, "
        f"baseline_T={first['baseline_T']}"
    )
    fig.tight_layout()
    out = os.path.join(os.path.dirname(os.path.abspath(__file__)), "speedup.png")
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
"#;

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn headers_validate_against_the_matching_kind_only() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(
            file,
            "variant,K,T,R,trials,failures,rate,ci_low,ci_high,seed"
        )
        .unwrap();
        assert!(validate_header(file.path(), PlotKind::Errors).is_ok());
        let err = validate_header(file.path(), PlotKind::Speedup).unwrap_err();
        assert!(err.to_string().contains("expected: K,R,target_err"));
    }

    #[test]
    fn a_truncated_file_fails_validation() {
        let file = tempfile::NamedTempFile::new().unwrap();
        assert!(validate_header(file.path(), PlotKind::Errors).is_err());
    }

    #[test]
    fn scripts_embed_the_csv_reference_and_keep_their_empty_guard() {
        let script = errors_script("errors.csv");
        assert!(script.contains("CSV = \"errors.csv\""));
        assert!(script.contains("nothing to plot"));
        assert!(script.contains("import matplotlib"));

        let script = speedup_script("tables/speedup.csv");
        assert!(script.contains("CSV = \"tables/speedup.csv\""));
        assert!(script.contains("nothing to plot"));
    }

    #[test]
    fn awkward_path_characters_are_escaped_into_the_literal() {
        let script = errors_script("odd \"name\".csv");
        assert!(script.contains(r#"CSV = "odd \"name\".csv""#));
    }
}
