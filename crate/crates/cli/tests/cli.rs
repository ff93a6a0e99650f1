use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SCENARIO: &str = r#"
name = "cli-smoke"
master_seed = 7
horizon_orbits = 0.2

[environment]
mean_motion_n = 0.00113

[target]
shape = "sphere"
radius = 5.0

[poi_layout]
kind = "fibonacci_sphere"
count = 40
importance = 1.0
prior_variance = 1e8

[[agents]]
id = 0
orbit = { radial_amplitude = 10.0, cross_track_amplitude = 15.0 }

[[agents]]
id = 1
orbit = { radial_amplitude = 10.0, cross_track_amplitude = 15.0, phase = 3.0 }

[[faults]]
target_agent = 1
kind = "actuator-pointing"
onset_time = 30.0
magnitude = 0.5
"#;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_swarm-fdi"));
    cmd.env_remove("SWARM_FDI_OUT");
    cmd
}

fn write_scenario(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("scenario.toml");
    fs::write(&path, text).unwrap();
    path
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn validate_accepts_good_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), SCENARIO);
    let out = bin().arg("validate").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).contains("cli-smoke"));
}

#[test]
fn validate_rejects_with_exit_one_and_paths() {
    let dir = tempfile::tempdir().unwrap();
    let bad = SCENARIO
        .replace("mean_motion_n = 0.00113", "mean_motion_n = -1.0")
        .replace("target_agent = 1", "target_agent = 5");
    let path = write_scenario(dir.path(), &bad);
    let out = bin().arg("validate").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("environment.mean_motion_n"), "{err}");
    assert!(err.contains("faults[0].target_agent"), "{err}");

    let missing = bin()
        .arg("validate")
        .arg(dir.path().join("nope.toml"))
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn run_writes_telemetry_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), SCENARIO);
    let out_dir = dir.path().join("out");
    let out = bin()
        .arg("run")
        .arg(&path)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    for file in [
        "manifest.json",
        "states.csv",
        "fdi.csv",
        "global.csv",
        "agent_costs.csv",
        "fusion.csv",
        "fault_reports.jsonl",
        "prediction.csv",
        "nominal.csv",
        "plot_cost.csv",
        "plot_fault_signal.csv",
        "plot_threshold_agent_1.csv",
    ] {
        assert!(out_dir.join(file).is_file(), "missing {file}");
    }
    let manifest = fs::read_to_string(out_dir.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"master_seed\": 7"), "{manifest}");
}

#[test]
fn seed_override_and_env_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), SCENARIO);
    let out_dir = dir.path().join("env-out");
    let out = bin()
        .arg("run")
        .arg(&path)
        .arg("--seed")
        .arg("99")
        .env("SWARM_FDI_OUT", &out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let manifest = fs::read_to_string(out_dir.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"master_seed\": 99"));
}

#[test]
fn predict_and_plots_verbs() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), SCENARIO);
    let pred_dir = dir.path().join("pred");
    let out = bin()
        .arg("predict")
        .arg(&path)
        .arg("--out")
        .arg(&pred_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(pred_dir.join("prediction.csv").is_file());
    assert!(!pred_dir.join("fdi.csv").exists());

    let run_dir = dir.path().join("run");
    bin()
        .arg("run")
        .arg(&path)
        .arg("--out")
        .arg(&run_dir)
        .output()
        .unwrap();
    let original = fs::read(run_dir.join("plot_cost.csv")).unwrap();
    fs::remove_file(run_dir.join("plot_cost.csv")).unwrap();
    let out = bin().arg("plots").arg(&run_dir).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(fs::read(run_dir.join("plot_cost.csv")).unwrap(), original);

    let out = bin()
        .arg("plots")
        .arg(dir.path().join("missing"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runtime_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), SCENARIO);
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = bin()
        .arg("run")
        .arg(&path)
        .arg("--out")
        .arg(&blocker)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn missing_output_dir_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), SCENARIO);
    let out = bin().arg("run").arg(&path).output().unwrap();
    assert!(!out.status.success());
}
