//! End-to-end tests of the command line: run -> analyze -> plot on a small
//! sweep, validation, exit codes and byte-level determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qdkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn write_smoke_config(path: &Path) {
    fs::write(
        path,
        r#"
sigma_values = [0.1, 0.4]
resolutions = [[3, 3], [5, 5]]
mutation_types = ["all", "some"]
runs_per_combination = 2
eval_budget = 150
master_seed = 21
init_pop = 30

[[tasks]]
kind = "arc"
label = "arc"

[[tasks]]
kind = "crawler"
label = "crawler"

[tasks.morphology]
control_period = 1.0
groups = [
    { kind = "mirror_pair", left = 0, right = 1 },
    { kind = "mirror_pair", left = 2, right = 3 },
]
"#,
    )
    .unwrap();
}

#[test]
fn validate_accepts_the_shipped_preset_config() {
    let preset = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/presets/desk.toml");
    let out = qdkit(&["validate", "-c", preset.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn validate_rejects_bad_config_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "sigma_values = []\n").unwrap();
    let out = qdkit(&["validate", "-c", bad.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn unknown_flags_are_rejected() {
    let out = qdkit(&["run", "--definitely-not-a-flag"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn analyze_on_empty_directory_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let out = qdkit(&[
        "analyze",
        "-i",
        empty.to_str().unwrap(),
        "-o",
        dir.path().join("rep").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("no run records found"), "{stderr}");
}

#[test]
fn analyze_rejects_unknown_parameter() {
    let dir = tempfile::tempdir().unwrap();
    let out = qdkit(&[
        "analyze",
        "-i",
        dir.path().to_str().unwrap(),
        "-p",
        "colour",
        "-o",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn run_analyze_plot_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("smoke.toml");
    write_smoke_config(&config);
    let runs = dir.path().join("runs");
    let report_a = dir.path().join("report_a");
    let report_b = dir.path().join("report_b");

    let out = qdkit(&[
        "run",
        "-c",
        config.to_str().unwrap(),
        "-o",
        runs.to_str().unwrap(),
        "--jobs",
        "2",
    ]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let run_files = fs::read_dir(&runs).unwrap().count();
    assert_eq!(run_files, 2 * 2 * 2 * 2 * 2);

    for report in [&report_a, &report_b] {
        let out = qdkit(&[
            "analyze",
            "-i",
            runs.to_str().unwrap(),
            "-o",
            report.to_str().unwrap(),
            "--boot",
            "1000",
            "--seed",
            "5",
        ]);
        assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }

    for name in [
        "effects_sigma.txt",
        "effects_sigma.csv",
        "effects_resolution.txt",
        "effects_resolution.csv",
        "effects_mutation.txt",
        "effects_mutation.csv",
        "finals.csv",
    ] {
        let a = fs::read(report_a.join(name)).unwrap();
        let b = fs::read(report_b.join(name)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "analysis output {name} must be deterministic");
    }
    let table = fs::read_to_string(report_a.join("effects_sigma.txt")).unwrap();
    assert!(table.contains("\u{b1}"), "{table}");
    assert!(table.contains("order:"), "{table}");

    let svg = dir.path().join("plot.svg");
    let out = qdkit(&[
        "plot",
        "-i",
        runs.to_str().unwrap(),
        "-g",
        "sigma",
        "-o",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let svg_text = fs::read_to_string(&svg).unwrap();
    assert!(svg_text.starts_with("<svg"));
    assert!(svg_text.contains("polyline"));
    assert!(svg_text.contains("polygon"));
}

#[test]
fn reruns_reproduce_identical_record_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("smoke.toml");
    write_smoke_config(&config);
    let runs_a = dir.path().join("a");
    let runs_b = dir.path().join("b");
    for (runs, jobs) in [(&runs_a, "2"), (&runs_b, "1")] {
        let out = qdkit(&[
            "run",
            "-c",
            config.to_str().unwrap(),
            "-o",
            runs.to_str().unwrap(),
            "--jobs",
            jobs,
        ]);
        assert_eq!(exit_code(&out), 0);
    }
    let mut names: Vec<String> = fs::read_dir(&runs_a)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert!(!names.is_empty());
    for name in names {
        let a = fs::read(runs_a.join(&name)).unwrap();
        let b = fs::read(runs_b.join(&name)).unwrap();
        assert_eq!(a, b, "record {name} must not depend on worker count");
    }
}

#[test]
fn seed_flag_overrides_master_seed() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("smoke.toml");
    write_smoke_config(&config);
    let runs_a = dir.path().join("a");
    let runs_b = dir.path().join("b");
    for (runs, seed) in [(&runs_a, "21"), (&runs_b, "99")] {
        let out = qdkit(&[
            "run",
            "-c",
            config.to_str().unwrap(),
            "-o",
            runs.to_str().unwrap(),
            "--seed",
            seed,
        ]);
        assert_eq!(exit_code(&out), 0);
    }
    // Seed 21 equals the configured master seed; seed 99 must differ.
    let name = "c00000_r000.csv";
    let a = fs::read(runs_a.join(name)).unwrap();
    let b = fs::read(runs_b.join(name)).unwrap();
    assert_ne!(a, b);
}
