use std::path::Path;
use std::process::Command;

fn fwlab(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fwlab")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let (code, _, err) = fwlab(&["bogus"]);
    assert_eq!(code, 64);
    assert!(err.contains("Usage"), "{err}");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(fwlab(&["verify-norms", "--frobnicate"]).0, 64);
    assert_eq!(fwlab(&[]).0, 64);
}

#[test]
fn help_exits_cleanly() {
    let (code, out, _) = fwlab(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("verify-norms"));
}

#[test]
fn config_errors_exit_64() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[grid]\nM = 4\n").unwrap();
    let out = dir.path().join("out");
    let (code, _, err) = fwlab(&["verify-norms", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 64, "{err}");
    assert!(err.contains("unknown field"), "{err}");

    std::fs::write(&cfg, "experiment = \"residuals\"\n[family]\ndelta = 1.2\n").unwrap();
    let (code, _, err) = fwlab(&["residuals", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 64, "{err}");
    assert!(err.contains("delta"), "{err}");

    let (code, _, _) = fwlab(&["verify-norms", "--config", "/nonexistent/cfg.toml"]);
    assert_eq!(code, 64);
}

#[test]
fn quick_verify_norms_passes_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("results");
    let (code, stdout, err) = fwlab(&["verify-norms", "--quick", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{stdout}\n{err}");
    assert!(stdout.contains("overall: PASS"));
    let exp = out.join("verify-norms");
    for f in ["packet_ratio.csv", "packet_ratio_cos.dat", "config_echo.toml", "verdicts.json"] {
        assert!(exp.join(f).exists(), "missing {f}");
    }
    let summary = read_json(&out.join("verdicts.json"));
    assert_eq!(summary["status"], "pass");
    assert_eq!(summary["experiments"][0]["experiment"], "verify-norms");
}

#[test]
fn rerun_from_echo_reproduces_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a");
    let (code, _, _) = fwlab(&["verify-norms", "--quick", "--seed", "11", "--out", first.to_str().unwrap()]);
    assert_eq!(code, 0);
    let echo = first.join("verify-norms/config_echo.toml");
    let second = dir.path().join("b");
    let (code, _, err) = fwlab(&["verify-norms", "--config", echo.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");

    let a = read_json(&first.join("verify-norms/verdicts.json"));
    let b = read_json(&second.join("verify-norms/verdicts.json"));
    let (va, vb) = (a["verdicts"].as_array().unwrap(), b["verdicts"].as_array().unwrap());
    assert_eq!(va.len(), vb.len());
    for (x, y) in va.iter().zip(vb) {
        assert_eq!(x["claim"], y["claim"]);
        for (k, v) in x["measured"].as_object().unwrap() {
            let (p, q) = (v.as_f64().unwrap(), y["measured"][k].as_f64().unwrap());
            assert!((p - q).abs() <= 1e-12 * p.abs().max(1.0), "{k}: {p} vs {q}");
        }
    }
}

#[test]
fn failing_experiment_exits_1() {
    // the residual F-slope window is not met; the exit code must report it
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    let (code, stdout, _) = fwlab(&["residuals", "--quick", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 1, "{stdout}");
    assert!(out.join("residuals/residuals.csv").exists());
}
