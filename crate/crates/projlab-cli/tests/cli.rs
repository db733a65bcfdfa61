//! Black-box tests of the projlab binary: exit codes, output formats,
//! config merging, and run-to-run determinism of the data surface.

use std::path::Path;
use std::process::{Command, Output};

fn projlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_projlab"))
        .args(args)
        .env_remove("PROJLAB_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn help_exits_zero() {
    let out = projlab(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("compute"));
    assert!(text.contains("verify"));
}

#[test]
fn usage_errors_exit_two() {
    let out = projlab(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));

    let out = projlab(&["compute"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("projlab:"), "stderr: {err}");
    assert!(err.contains("missing --quantity"), "stderr: {err}");

    let out = projlab(&["compute", "--quantity", "no-such-thing"]);
    assert_eq!(out.status.code(), Some(2));

    let out = projlab(&["verify", "--suite", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("only \"core\""));
}

#[test]
fn compute_rw_emits_json_object() {
    let out = projlab(&["compute", "--quantity", "rw", "--n", "2", "--m", "2"]);
    let v = stdout_json(&out);
    assert_eq!(v["quantity"], "rw");
    assert_eq!(v["provenance"], "Cor. RW");
    assert_eq!(v["params"]["n"], 2);
    assert_eq!(v["params"]["m"], 2);
    let value = v["value"].as_f64().unwrap();
    assert!((value - 1.5).abs() < 1e-9, "value {value}");
}

#[test]
fn compute_kappa_text_contains_label() {
    let out = projlab(&["compute", "--quantity", "kappa", "--format", "text"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("kappa"));
    assert!(text.contains("Eq. (kappa)"));
}

#[test]
fn out_flag_writes_file_and_keeps_stdout_empty() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("row.json");
    let out = projlab(&[
        "compute",
        "--quantity",
        "lebesgue",
        "--m",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["quantity"], "lebesgue");
    assert!(v["value"].as_f64().unwrap() > 1.0);
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("projlab.conf");
    std::fs::write(&path, "# defaults\nquantity = rw\nn = 2\nm = 2\nformat = json\n").unwrap();
    path
}

#[test]
fn config_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let out = projlab(&["compute", "--config", cfg.to_str().unwrap()]);
    let v = stdout_json(&out);
    assert_eq!(v["params"]["m"], 2);
    assert!((v["value"].as_f64().unwrap() - 1.5).abs() < 1e-9);

    let out = projlab(&["compute", "--config", cfg.to_str().unwrap(), "--m", "4"]);
    let v = stdout_json(&out);
    assert_eq!(v["params"]["m"], 4);
    assert!((v["value"].as_f64().unwrap() - 1.5).abs() > 1e-3);
}

#[test]
fn config_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.conf");
    std::fs::write(&path, "quantit = rw\n").unwrap();
    let out = projlab(&["compute", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown config key"));
}

#[test]
fn sweep_emits_fixed_csv_header() {
    let out = projlab(&["sweep", "--quantity", "lebesgue", "--m", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "quantity,params,value,stderr,lower_bound,upper_bound,provenance"
    );
    let data: Vec<&str> = lines.collect();
    assert_eq!(data.len(), 5, "m = 0..=4 gives five rows");
    assert!(data[0].starts_with("lebesgue,"));
    assert!(data[0].contains("\"Sec. 2.4\""));
}

#[test]
fn table_renders_aligned_text() {
    let out = projlab(&["table", "--quantity", "boolean-limits", "--d", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("QUANTITY"));
    assert!(text.contains("boolean-limit"));
    assert_eq!(text.lines().filter(|l| l.contains("Thm limit bool homog")).count(), 3);
}

#[test]
fn workers_env_is_used_and_flag_wins() {
    let run = |extra: &[&str], env_workers: Option<&str>| -> serde_json::Value {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_projlab"));
        cmd.args([
            "compute",
            "--quantity",
            "torus-exp-sum",
            "--index-set",
            "full:1",
            "--n",
            "2",
            "--samples",
            "2000",
        ]);
        cmd.args(extra);
        match env_workers {
            Some(w) => cmd.env("PROJLAB_WORKERS", w),
            None => cmd.env_remove("PROJLAB_WORKERS"),
        };
        let out = cmd.output().expect("binary runs");
        stdout_json(&out)
    };
    let v = run(&[], Some("3"));
    assert_eq!(v["params"]["workers"], 3);
    let v = run(&["--workers", "2"], Some("3"));
    assert_eq!(v["params"]["workers"], 2);
    let v = run(&[], None);
    assert_eq!(v["params"]["workers"], 1);
}

#[test]
fn monte_carlo_output_is_deterministic_per_seed() {
    let args = [
        "compute",
        "--quantity",
        "torus-exp-sum",
        "--index-set",
        "full:2",
        "--n",
        "2",
        "--samples",
        "5000",
        "--seed",
        "42",
        "--workers",
        "4",
    ];
    let a = projlab(&args);
    let b = projlab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let mut shifted = args;
    shifted[10] = "43";
    let c = projlab(&shifted);
    assert_ne!(a.stdout, c.stdout, "different seeds must move the estimate");
}
