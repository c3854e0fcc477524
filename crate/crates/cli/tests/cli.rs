use std::path::Path;
use std::process::{Command, Output};

fn metastab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metastab")).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn steady_writes_profile_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pos.csv");
    let o = metastab(&["steady", "--eps", "0.01", "--kind", "pos", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("x,u,du\n0,0,"));
    assert_eq!(text.lines().count(), 802);
    let summary = json(&dir.path().join("pos.json"));
    assert_eq!(summary["config"]["eps"], 0.01);
    assert!(summary["alpha_star"].as_f64().unwrap() > 0.9);
}

#[test]
fn too_viscous_exits_with_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pos.csv");
    let o = metastab(&["steady", "--eps", "0.5", "--kind", "pos", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("needs eps below"), "{}", stderr(&o));
    let diag = json(&dir.path().join("diagnostic.json"));
    assert_eq!(diag["detail"]["epsilon"], 0.5);
}

#[test]
fn unknown_model_is_a_validation_error() {
    let o = metastab(&["steady", "--eps", "0.01", "--h", "cubic"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("const, gauss, mullins"));
    let o = metastab(&["steady", "--kind", "pos"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--eps is required"));
}

#[test]
fn config_file_supplies_missing_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("lalpha.csv");
    std::fs::write(&cfg, format!("eps = 0.5\nh = mullins\nalpha_steps = 5\nout = {}\n", out.display())).unwrap();
    // the flag wins over the config value
    let o = metastab(&["--config", cfg.to_str().unwrap(), "shoot", "--eps", "0.06"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next(), Some("alpha,L,outcome"));
    assert_eq!(text.lines().count(), 6);
    let summary = json(&dir.path().join("lalpha.json"));
    assert_eq!(summary["config"]["eps"], 0.06);
    assert_eq!(summary["config"]["h"], "mullins");
}

#[test]
fn evolve_reports_metastable_time() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = metastab(&[
        "evolve", "--u0", "cubic:0.45", "--eps", "0.006", "--t-end", "1e6", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary = json(&out.join("summary.json"));
    let t = summary["metastable_t"].as_f64().unwrap();
    assert!(t > 1e4 && t < 1e6, "T = {t}");
    assert!(out.join("snapshots.csv").is_file() && out.join("zeros.csv").is_file());
}

#[test]
fn hyper_writes_limit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h");
    let o = metastab(&["hyper", "--u0", "cubic-neg:0.3", "--t-end", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary = json(&out.join("summary.json"));
    assert_eq!(summary["limit"], "NegLine");
    assert!(std::fs::read_to_string(out.join("limit.csv")).unwrap().starts_with("x,u,du\n"));
}

#[test]
fn repro_lists_outputs_in_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = metastab(&["--jobs", "1", "repro", "--test", "steady", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let manifest = json(&dir.path().join("manifest.json"));
    for a in manifest["artifacts"].as_array().unwrap() {
        assert!(dir.path().join(a["path"].as_str().unwrap()).is_file());
    }
    let o = metastab(&["repro", "--test", "5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn every_subcommand_documents_its_flags() {
    for (cmd, flags) in [
        ("steady", &["--eps", "--ell", "--h", "--f", "--kind", "--n-cells", "--out"][..]),
        ("shoot", &["--alpha-min", "--alpha-max", "--alpha-steps"][..]),
        ("evolve", &["--u0", "--t-end", "--steady-tol", "--out"][..]),
        ("hyper", &["--cfl", "--n-cells", "--t-end", "--out"][..]),
        ("repro", &["--test", "--out", "--include-slow", "--config", "--log-level", "--jobs"][..]),
    ] {
        let o = metastab(&[cmd, "--help"]);
        let text = String::from_utf8_lossy(&o.stdout);
        for f in flags {
            assert!(text.contains(f), "{cmd} --help lacks {f}");
        }
    }
}
