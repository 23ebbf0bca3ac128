//! The binary's end-to-end determinism gate.
//!
//! Gate 9 of the project's acceptance suite (gates 1–8 live in the library
//! crate): replaying any run from nothing but its `metadata.json` must
//! reproduce every artifact byte for byte — CSV tables, transcripts, plot
//! scripts, and the metadata itself.  The gate drives the compiled binary
//! over all three artifact-writing commands and prints the same
//! `ACCEPTANCE <n> <name>: PASS|FAIL (<measurements>)` line the library
//! gates do.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;

use tempfile::TempDir;

fn run_cli(args: &[&str]) {
    let output = Command::new(env!("CARGO_BIN_EXE_collab-bai"))
        .args(args)
        .output()
        .expect("the binary spawns");
    assert!(
        output.status.success(),
        "command {:?} failed\nstdout: {}\nstderr: {}",
        args,
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

/// Every regular file directly under `dir`, name → bytes.
fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for entry in fs::read_dir(dir).expect("the artifact directory exists") {
        let entry = entry.unwrap();
        if entry.file_type().unwrap().is_file() {
            files.insert(
                entry.file_name().to_string_lossy().into_owned(),
                fs::read(entry.path()).unwrap(),
            );
        }
    }
    files
}

#[test]
fn gate_09_replay_from_metadata_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let scenarios: [(&str, Vec<&str>); 3] = [
        (
            "run",
            vec![
                "run",
                "--means",
                "0.7,0.3,0.3",
                "--variant",
                "random-threshold",
                "--K",
                "3",
                "--T",
                "300",
                "--R",
                "2",
                "--trials",
                "150",
                "--seed",
                "11",
                "--transcript",
            ],
        ),
        (
            "sweep",
            vec![
                "sweep",
                "--means",
                "0.85,0.15",
                "--K",
                "4",
                "--R",
                "1,2",
                "--target-err",
                "0.15",
                "--trials",
                "60",
                "--seed",
                "5",
            ],
        ),
        (
            "signid",
            vec![
                "signid", "--delta", "-0.3", "--K", "4", "--T", "400", "--R", "2", "--trials",
                "120", "--seed", "9",
            ],
        ),
    ];

    let mut artifact_count = 0usize;
    let mut all_identical = true;
    let mut notes = Vec::new();
    for (name, base_args) in &scenarios {
        let original = dir.path().join(format!("{name}-original"));
        let replayed = dir.path().join(format!("{name}-replayed"));

        let mut args = base_args.clone();
        let original_str = original.to_str().unwrap().to_owned();
        args.extend_from_slice(&["-o", &original_str]);
        run_cli(&args);

        let metadata = original.join("metadata.json");
        run_cli(&[
            "replay",
            "--metadata",
            metadata.to_str().unwrap(),
            "-o",
            replayed.to_str().unwrap(),
        ]);

        let first = snapshot(&original);
        let second = snapshot(&replayed);
        artifact_count += first.len();
        let identical = first == second;
        all_identical &= identical;
        notes.push(format!(
            "{name}: {} files {}",
            first.len(),
            if identical { "identical" } else { "DIVERGED" }
        ));
        if !identical {
            let first_names: Vec<_> = first.keys().collect();
            let second_names: Vec<_> = second.keys().collect();
            notes.push(format!(
                "  original {first_names:?} vs replay {second_names:?}"
            ));
        }
    }

    let details = format!(
        "{} artifacts across run/sweep/signid; {}",
        artifact_count,
        notes.join("; ")
    );
    let word = if all_identical { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE 9 metadata replay byte-identity: {word} ({details})");
    assert!(all_identical, "acceptance gate 9: {details}");
}

/// A hand-edited spec must be refused, or the determinism statement above
/// would be unverifiable in the field.
#[test]
fn tampered_metadata_is_rejected() {
    let dir = TempDir::new().unwrap();
    let original = dir.path().join("original");
    run_cli(&[
        "run",
        "--means",
        "0.7,0.3",
        "--trials",
        "10",
        "--seed",
        "2",
        "-o",
        original.to_str().unwrap(),
    ]);

    let metadata_path = original.join("metadata.json");
    let tampered = fs::read_to_string(&metadata_path)
        .unwrap()
        .replace("\"seed\": 2", "\"seed\": 3");
    fs::write(&metadata_path, tampered).unwrap();

    let output = Command::new(env!("CARGO_BIN_EXE_collab-bai"))
        .args([
            "replay",
            "--metadata",
            metadata_path.to_str().unwrap(),
            "-o",
            dir.path().join("replayed").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(
        output.status.code(),
        Some(1),
        "tampering is a runtime failure"
    );
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains("integrity"),
        "the refusal names the integrity check: {stderr}"
    );
}
