use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_levy-liouville"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn report(dir: &Path, command: &str) -> Value {
    let text = std::fs::read_to_string(dir.join(format!("{command}.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn brownian_motion_verdict_holds() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["verdict", "--config", corpus("bm.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path(), "verdict");
    assert_eq!(r["result"]["verdict"], "holds");
    assert_eq!(r["status"], "conclusive");
}

#[test]
fn poisson_verdict_fails_with_two_pi() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["verdict", "--config", corpus("poisson1.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path(), "verdict");
    assert_eq!(r["result"]["verdict"], "fails");
    assert_eq!(r["result"]["witness"]["kind"], "trig");
    let g = r["result"]["witness"]["vector"][0].as_f64().unwrap();
    assert!((g - std::f64::consts::TAU).abs() < 1e-8, "{g}");
    assert!(String::from_utf8_lossy(&out.stdout).contains("6.283185307"));
}

#[test]
fn drifted_brownian_motion_has_an_exponential_witness() {
    let dir = TempDir::new().unwrap();
    let cfg = corpus("bm_drift1.json");
    let out = run(dir.path(), &["strong-verdict", "--config", cfg.to_str().unwrap(), "--growth", "exp:3", "--paths", "20000"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path(), "strong-verdict");
    assert_eq!(r["result"]["verdict"], "fails");
    assert_eq!(r["result"]["witness"]["kind"], "exponential");
    assert!((r["result"]["witness"]["vector"][0].as_f64().unwrap() + 2.0).abs() < 1e-10);
    assert_eq!(r["config"]["growth"], "exp:3");
}

#[test]
fn strong_verdict_needs_a_growth_bound_and_a_bare_triplet() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["strong-verdict", "--config", corpus("bm.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(dir.path(), "strong-verdict")["status"], "error");

    let cfg = corpus("subordinated_bm.json");
    let out = run(dir.path(), &["strong-verdict", "--config", cfg.to_str().unwrap(), "--growth", "const:1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(dir.path(), "strong-verdict")["error"]["pointer"], "/subordinator");

    let out = run(dir.path(), &["strong-verdict", "--config", corpus("bm.json").to_str().unwrap(), "--growth", "quadratic"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(dir.path(), "strong-verdict")["error"]["pointer"], "/growth");
}

#[test]
fn schema_errors_name_the_offending_pointer() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (r#"{"triplet":{"dim":1,"drift":[0],"gaussian":[[1]]},"tims":[1,2]}"#, "/tims"),
        (r#"{"triplet":{"dim":1,"drift":["a"],"gaussian":[[1]]}}"#, "/triplet/drift/0"),
        (r#"{"triplet":{"dim":1,"drift":[0],"gaussian":[[1]],"jumps":[{"type":"stable","alpha":2.5,"scale":1}]}}"#, "/triplet/jumps/0/alpha"),
        (r#"{"triplet":{"dim":2,"drift":[0],"gaussian":[[1,0],[0,1]]}}"#, "/triplet/drift"),
        (r#"{"triplet":{"dim":1,"drift":[0],"gaussian":[[-1]]}}"#, "/triplet/gaussian"),
        (r#"{"triplet":{"dim":1,"drift":[0],"gaussian":[[1]]},"points":[[1,2]]}"#, "/points/0"),
    ];
    for (text, pointer) in cases {
        let cfg = write_config(dir.path(), "bad.json", text);
        let out = run(dir.path(), &["verdict", "--config", cfg.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1), "{text}");
        let r = report(dir.path(), "verdict");
        assert_eq!(r["error"]["pointer"], pointer, "{text}: {r}");
        assert!(String::from_utf8_lossy(&out.stderr).contains(pointer));
    }
}

#[test]
fn missing_config_and_bad_flags_are_errors() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run(dir.path(), &["zeroset"]).status.code(), Some(1));
    assert_eq!(report(dir.path(), "zeroset")["status"], "error");
    assert_eq!(run(dir.path(), &["zeroset", "--grid", "many"]).status.code(), Some(1));
}

#[test]
fn inconclusive_outcomes_exit_with_two() {
    let dir = TempDir::new().unwrap();
    // the grid cannot resolve 2ℤ inside the default box
    let w = corpus("weierstrass.json");
    let out = run(dir.path(), &["zeroset", "--config", w.to_str().unwrap(), "--grid", "9"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(dir.path(), "zeroset")["status"], "inconclusive");

    let irrational = r#"{"triplet":{"dim":1,"drift":[0],"gaussian":[[0]],
        "jumps":[{"type":"atoms","atoms":[{"location":[1],"mass":1},{"location":[1.4142135623730951],"mass":1}]}]}}"#;
    let cfg = write_config(dir.path(), "irr.json", irrational);
    let out = run(dir.path(), &["duality", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(dir.path(), "duality");
    assert_eq!(r["result"]["outcome"], "inconclusive");
    assert!(r["result"]["exact_path"].is_string());
}

#[test]
fn reports_are_reproducible_and_ignore_workers() {
    let cfg = corpus("bm_drift1.json");
    let mut texts = Vec::new();
    for workers in ["1", "4", "8", "4"] {
        let dir = TempDir::new().unwrap();
        let out = run(
            dir.path(),
            &["strong-verdict", "--config", cfg.to_str().unwrap(), "--paths", "20000", "--seed", "17", "--workers", workers],
        );
        assert_eq!(out.status.code(), Some(0));
        let out = run(dir.path(), &["simulate", "--config", cfg.to_str().unwrap(), "--paths", "5000", "--seed", "17", "--workers", workers]);
        assert_eq!(out.status.code(), Some(0));
        let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap();
        texts.push((read("strong-verdict.json"), read("simulate.json"), read("simulate.csv")));
    }
    assert!(texts.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn reports_embed_version_and_resolved_defaults() {
    let dir = TempDir::new().unwrap();
    run(dir.path(), &["verdict", "--config", corpus("poisson1.json").to_str().unwrap()]);
    let r = report(dir.path(), "verdict");
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    let c = &r["config"];
    assert_eq!(c["times"], serde_json::json!([1.0, std::f64::consts::SQRT_2]));
    assert!(c["search"]["box_halfwidth"].as_f64().unwrap() > 0.0);
    assert_eq!(c["search"]["tol"], 1e-6);
    assert_eq!(c["monte_carlo"]["paths"], 100000);
    assert!(c["monte_carlo"].get("workers").is_none());
    assert_eq!(c["triplet"]["dim"], 1);
}

#[test]
fn simulate_writes_one_row_per_path() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["simulate", "--config", corpus("poisson1.json").to_str().unwrap(), "--paths", "250"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("simulate.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "path,x0");
    assert_eq!(lines.len(), 251);
    // Poisson δ₁ endpoints are nonnegative integers
    for l in &lines[1..] {
        let v: f64 = l.split(',').nth(1).unwrap().parse().unwrap();
        assert!(v >= 0.0 && v.fract() == 0.0, "{l}");
    }
}

#[test]
fn symbol_and_harmonic_checks_write_csv() {
    let dir = TempDir::new().unwrap();
    let text = r#"{"triplet":{"dim":1,"drift":[0],"gaussian":[[0]],"jumps":[{"type":"atoms","atoms":[{"location":[1],"mass":1}]}]},
        "points":[[1],[3.141592653589793]],
        "strip_points":[{"xi":[0],"eta":[0.5]}],
        "candidate":{"kind":"trig","gamma":[6.283185307179586]}}"#;
    let cfg = write_config(dir.path(), "p.json", text);
    assert_eq!(run(dir.path(), &["symbol", "--config", cfg.to_str().unwrap()]).status.code(), Some(0));
    let r = report(dir.path(), "symbol");
    // ψ(π) = 1 − e^{iπ} = 2
    assert!((r["result"]["values"][1]["re"].as_f64().unwrap() - 2.0).abs() < 1e-15);
    // ψ(−i·0.5) = 1 − e^{0.5}
    assert!((r["result"]["strip"][0]["re"].as_f64().unwrap() - (1.0 - 0.5f64.exp())).abs() < 1e-14);
    let csv = std::fs::read_to_string(dir.path().join("symbol.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);

    assert_eq!(run(dir.path(), &["check-harmonic", "--config", cfg.to_str().unwrap()]).status.code(), Some(0));
    let r = report(dir.path(), "check-harmonic");
    assert_eq!(r["result"]["report"]["harmonic"], true);
    let csv = std::fs::read_to_string(dir.path().join("check-harmonic.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("x0,f,ptf_re,ptf_im"));
    assert_eq!(csv.lines().count(), 17);
}

#[test]
fn exponential_candidate_is_checked_by_monte_carlo() {
    let dir = TempDir::new().unwrap();
    let text = r#"{"triplet":{"dim":1,"drift":[1],"gaussian":[[1]]},"candidate":{"kind":"exponential","eta":[-2]}}"#;
    let cfg = write_config(dir.path(), "e.json", text);
    let out = run(dir.path(), &["check-harmonic", "--config", cfg.to_str().unwrap(), "--paths", "200000"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(dir.path(), "check-harmonic")["result"]["report"]["harmonic"], true);

    let text = r#"{"triplet":{"dim":1,"drift":[1],"gaussian":[[1]]},"candidate":{"kind":"exponential","eta":[-1]}}"#;
    let cfg = write_config(dir.path(), "e.json", text);
    run(dir.path(), &["check-harmonic", "--config", cfg.to_str().unwrap(), "--paths", "200000"]);
    assert_eq!(report(dir.path(), "check-harmonic")["result"]["report"]["harmonic"], false);
}

#[test]
fn validate_and_subordinate_commands() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["validate", "--config", corpus("stable_half.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path(), "validate");
    assert_eq!(r["result"]["report"]["ok"], true);
    assert_eq!(r["result"]["smoothness_order"], "0");

    let out = run(dir.path(), &["subordinate", "--config", corpus("subordinated_bm.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path(), "subordinate");
    assert_eq!(r["result"]["verdicts_agree"], true);
    assert_eq!(r["result"]["bernstein"]["kind"], "power");

    let out = run(dir.path(), &["subordinate", "--config", corpus("bm.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn duality_on_the_planar_degenerate_case() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["duality", "--config", corpus("planar_degenerate.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path(), "duality");
    assert_eq!(r["result"]["outcome"], "equal");
    assert_eq!(r["result"]["zero_set"]["subspace_basis"].as_array().unwrap().len(), 1);
}

#[test]
fn bundled_corpus_passes() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["examples"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(!stdout.contains("FAIL"));
    for name in ["bm", "bm_drift1", "poisson1", "atoms_2_3", "weierstrass", "planar_degenerate", "stable_half", "subordinated_bm"] {
        assert!(stdout.contains(name), "{name} missing");
    }
    let r = report(dir.path(), "examples");
    assert_eq!(r["status"], "pass");
}
