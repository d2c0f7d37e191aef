use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn stdp(args: &[&str], envs: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_stdp"));
    cmd.args(args).env_remove("STDP_OUT_DIR");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn help_exits_zero() {
    let o = stdp(&["--help"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    for sub in ["window", "freq", "triplet", "quad", "six", "bcm", "fit", "mc"] {
        assert!(text.contains(sub), "{sub} missing from help");
    }
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = stdp(&["window", "--bogus"], &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_config_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "version = 1\n[window]\ndt_msec = [10]\n").unwrap();
    let out = dir.path().join("out");
    let o = stdp(
        &[
            "window",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("dt_msec"), "{}", stderr(&o));
}

#[test]
fn wrong_schema_version_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("v2.toml");
    std::fs::write(&cfg, "version = 2\n").unwrap();
    let o = stdp(&["window", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("version"), "{}", stderr(&o));
}

#[test]
fn fit_needs_a_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let o = stdp(&["fit", "--out", dir.path().to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(1));
    let o = stdp(
        &[
            "fit",
            "--dataset",
            "/nonexistent/data.csv",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn malformed_dataset_line_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("toy.csv");
    std::fs::write(
        &ds,
        "protocol,a_ms,b_ms,rho_hz,reps,dw_exp,sem\npairing,10,,1,60,0.2,0.05\npairing,x,,1,60,0.2,0.05\n",
    )
    .unwrap();
    let o = stdp(
        &[
            "fit",
            "--dataset",
            ds.to_str().unwrap(),
            "--out",
            dir.path().join("o").to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn out_dir_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixtures().join("smoke.toml");
    let o = stdp(
        &["window", "--config", cfg.to_str().unwrap()],
        &[("STDP_OUT_DIR", dir.path())],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("window.csv").exists());
    assert!(dir.path().join("window_manifest.json").exists());

    // --out wins over the environment
    let other = tempfile::tempdir().unwrap();
    let o = stdp(
        &[
            "window",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            other.path().to_str().unwrap(),
        ],
        &[("STDP_OUT_DIR", dir.path())],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(other.path().join("window.csv").exists());
}

#[test]
fn manifest_lists_outputs_with_digests() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixtures().join("smoke.toml");
    let ds = fixtures().join("synthetic-hippocampal.csv");
    let o = stdp(
        &[
            "fit",
            "--config",
            cfg.to_str().unwrap(),
            "--dataset",
            ds.to_str().unwrap(),
            "--seed",
            "3",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("fit_manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "fit");
    assert_eq!(m["seed"], 3);
    let outputs = m["outputs"].as_array().unwrap();
    assert!(outputs.iter().any(|f| f["file"] == "fit_report.json"));
    for f in outputs {
        let bytes = std::fs::read(dir.path().join(f["file"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"], stdp_cli::output::sha256_hex(&bytes));
    }
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("fit_report.json")).unwrap()).unwrap();
    assert!(report["nmse"].as_f64().unwrap() < 1e-6);
}
