use std::path::Path;
use std::process::{Command, Output};

fn emlab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emlab"))
        .args(args)
        .current_dir(cwd)
        .env_remove("EMLAB_OUTPUT_DIR")
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn stderr_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().rev().find(|l| l.starts_with('{')).unwrap_or_else(|| panic!("no json in {text}"));
    serde_json::from_str(line).unwrap()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()).collect()
}

#[test]
fn unknown_key_exits_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "[grid]\npoints = 16\nbox_lenght = 3.0\n").unwrap();
    let out = emlab(&["simulate", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "schema");
    assert_eq!(err["key"], "grid.box_lenght");
}

#[test]
fn bad_values_exit_2_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    for (set, key) in [
        ("physical.c_s=1.5", "physical.c_s"),
        ("grid.points=7", "grid.points"),
        ("grid.points=\"many\"", "grid.points"),
        ("integrator.dt=-1", "integrator.dt"),
        ("data.band=0.9", "data.band"),
    ] {
        let out = emlab(&["simulate", "--set", set], dir.path());
        assert_eq!(out.status.code(), Some(2), "{set}");
        assert_eq!(stderr_json(&out)["key"], key, "{set}");
    }
    let out = emlab(&["simulate", "--set", "nonsense"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_for_another_experiment_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "experiment = \"resonances\"\n").unwrap();
    let out = emlab(&["phase-bound", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["key"], "experiment");
}

#[test]
fn missing_config_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = emlab(&["resonances", "--config", "absent.toml"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "io");
}

#[test]
fn phase_bound_defaults_emit_one_passing_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = emlab(&["phase-bound", "--set", "output_dir=\"pb\""], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.path().join("pb/phase_bound.csv");
    let header = csv::Reader::from_path(&csv).unwrap().headers().unwrap().clone();
    assert_eq!(header.iter().collect::<Vec<_>>(), ["c_s", "c_r", "c0", "min_phi", "bound", "pass"]);
    let rows = rows(&csv);
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][5], "true");
    let m = manifest(&dir.path().join("pb"));
    assert_eq!(m["status"], "completed");
    assert_eq!(m["experiment"], "phase-bound");
    assert!(m["version"].as_str().unwrap().starts_with('v'));
    assert!(m["config"].as_str().unwrap().contains("c_s = 0.5"));
}

#[test]
fn output_dir_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_emlab"))
        .args(["resonances"])
        .current_dir(dir.path())
        .env("EMLAB_OUTPUT_DIR", "from-env")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("from-env/resonance_points.csv").exists());

    let out = emlab(&["resonances"], dir.path());
    assert!(out.status.success());
    assert!(dir.path().join("emlab-output/resonance_summary.csv").exists());
}

#[test]
fn simulate_to_time_zero_writes_one_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let out = emlab(
        &["simulate", "--set", "integrator.t_end=0", "--set", "grid.points=8", "--set", "output_dir=\"z\""],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let snaps: Vec<_> = std::fs::read_dir(dir.path().join("z/snapshots")).unwrap().collect();
    assert_eq!(snaps.len(), 1);
    assert!(dir.path().join("z/snapshots/step_000000.emlab").exists());
    assert_eq!(rows(&dir.path().join("z/norms.csv")).len(), 1);
    assert_eq!(manifest(&dir.path().join("z"))["status"], "completed");
}

#[test]
fn blow_up_exits_3_and_records_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let out = emlab(
        &[
            "simulate",
            "--set",
            "grid.points=8",
            "--set",
            "grid.box_length=6.283",
            "--set",
            "data.amplitude=5",
            "--set",
            "integrator.dt=1.5",
            "--set",
            "integrator.t_end=60",
            "--set",
            "output_dir=\"d\"",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "diverged");
    assert!(err["time"].as_f64().unwrap() < 60.0);
    let m = manifest(&dir.path().join("d"));
    assert_eq!(m["status"], "diverged");
    let outputs: Vec<String> = serde_json::from_value(m["outputs"].clone()).unwrap();
    let last = outputs.iter().rfind(|o| o.starts_with("snapshots/")).unwrap();
    let snap = emlab_harness::read_snapshot(&dir.path().join("d").join(last)).unwrap();
    assert_eq!(snap.time, err["time"].as_f64().unwrap());
}
