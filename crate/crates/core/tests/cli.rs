use std::path::Path;
use std::process::{Command, Output};

use bgk_ndg::harness::output::{read_profile, read_table};

fn bgk(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bgk-ndg"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn run_writes_profile_conservation_and_probe() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("res");
    let o = bgk(
        &["run", "--case", "sod", "--nx", "10", "--nv", "20", "--tend", "0.005", "--out", out.to_str().unwrap()],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let listed: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(listed.len(), 3, "{listed:?}");

    let p = read_profile(&out.join("sod_profile.csv")).unwrap();
    assert_eq!(p.len(), 30);
    assert!(p.rho.iter().all(|r| *r > 0.0));
    let (h, rows) = read_table(&out.join("sod_conservation.csv")).unwrap();
    assert_eq!(h, ["t", "c0", "c1", "c2"]);
    assert!((rows.last().unwrap()[0] - 0.005).abs() < 1e-12);
    let (h, rows) = read_table(&out.join("sod_probe.csv")).unwrap();
    assert_eq!(h, ["v", "f", "g"]);
    assert_eq!(rows.len(), 20);
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "case = smooth\nnx = 6\nnv = 12\ntend = 0.002\nprobe = none\nq = 2\n").unwrap();
    let o = bgk(&["run", "--config", cfg.to_str().unwrap(), "--nx", "5"], dir.path());
    assert!(o.status.success(), "{}", stdout(&o));
    let p = read_profile(&dir.path().join("smooth_profile.csv")).unwrap();
    assert_eq!(p.len(), 10);
    assert!(!dir.path().join("smooth_probe.csv").exists());
}

#[test]
fn errors_are_one_json_line() {
    let dir = tempfile::tempdir().unwrap();
    for (args, kind) in [
        (vec!["run", "--case", "sod", "--nx", "zero"], "config"),
        (vec!["run", "--case", "atlantis"], "invalid-argument"),
        (vec!["study", "sweep"], "invalid-argument"),
        (vec!["study", "convergence", "--values", "10,30"], "invalid-argument"),
    ] {
        let o = bgk(&args, dir.path());
        assert!(!o.status.success());
        let text = stdout(&o);
        let v: serde_json::Value = serde_json::from_str(text.trim()).unwrap_or_else(|_| panic!("{text}"));
        assert_eq!(v["error"], kind, "{args:?}");
        assert!(v["message"].as_str().is_some_and(|m| !m.is_empty()));
    }
}

#[test]
fn convergence_study_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = bgk(
        &["study", "convergence", "--values", "8,16,32", "--q", "2", "--nv", "16", "--eps", "1e-2"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "nx,rho_error,rho_order,g_error,g_order");
    let last: Vec<f64> = lines.last().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(last[0], 16.0);
    assert!((last[2] - 2.0).abs() < 0.5, "order {}", last[2]);
}

#[test]
fn cases_lists_every_case() {
    let dir = tempfile::tempdir().unwrap();
    let o = bgk(&["cases"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    for name in bgk_ndg::harness::cases::CASE_NAMES {
        assert!(text.lines().any(|l| l.starts_with(&format!("{name}:"))), "{name}");
    }
}
