use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn crossgram(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crossgram")).args(args).output().expect("spawn crossgram")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_reports_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = crossgram(&["run", "--order-dim", "16", "--orders", "1..16", "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for m in ["sylvester", "empirical-linear", "empirical"] {
        let csv = fs::read_to_string(out.join(m).join("errors.csv")).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("n,l1_rel,l2_rel,linf_rel,h2_rel,hinf_rel,unstable"));
        assert_eq!(lines.count(), 16);
    }
    for stem in ["fig_l1", "fig_l2", "fig_linf", "fig_h2", "fig_hinf"] {
        assert!(out.join("plot").join(format!("{stem}.dat")).exists());
        assert!(out.join("plot").join(format!("{stem}.svg")).exists());
    }
    for f in ["A.csv", "B.csv", "C.csv", "lambda.csv", "U.csv", "spec.json"] {
        assert!(out.join("system").join(f).exists(), "{f}");
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"spec":{"N":30,"M":1,"a":0.1,"b":10.0,"seed":4},"orders":"1..5","gramians":["sylvester"]}"#)
        .unwrap();
    let out = dir.path().join("o");
    let o = crossgram(&[
        "run",
        "--config",
        path(&cfg),
        "--order-dim",
        "12",
        "--dt",
        "0.02",
        "--tmax",
        "0.5",
        "--noise-seed",
        "9",
        "--projection",
        "svd-approx",
        "--out",
        path(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let written: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("config.json")).unwrap()).unwrap();
    assert_eq!(written["spec"]["N"], 12);
    assert_eq!(written["spec"]["seed"], 4);
    assert_eq!(written["grid"]["step"], 0.02);
    assert_eq!(written["grid"]["count"], 25);
    assert_eq!(written["noise_seed"], 9);
    assert_eq!(written["projection"], "svd-approx");
    assert_eq!(written["orders"], "1..5");
    assert!(!out.join("empirical").exists());
}

#[test]
fn generate_then_sweep_then_plot() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("sys");
    let o = crossgram(&["generate", "--order-dim", "10", "--seed", "2", "--a", "0.5", "--b", "5", "--out", path(&sys)]);
    assert!(o.status.success());
    let spec: serde_json::Value = serde_json::from_str(&fs::read_to_string(sys.join("spec.json")).unwrap()).unwrap();
    assert_eq!((spec["N"].as_u64(), spec["seed"].as_u64(), spec["a"].as_f64()), (Some(10), Some(2), Some(0.5)));

    let run = dir.path().join("sweep");
    let o =
        crossgram(&["sweep", path(&sys), "--orders", "1..10", "--gramian", "sylvester,empirical", "--out", path(&run)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!run.join("empirical-linear").exists());

    let plots = dir.path().join("plots");
    let o = crossgram(&["plot", path(&run), "--out", path(&plots)]);
    assert!(o.status.success());
    let table = fs::read_to_string(plots.join("fig_l2.dat")).unwrap();
    assert_eq!(table.lines().next(), Some("# n sylvester empirical"));
    assert_eq!(table.lines().count(), 11);
}

#[test]
fn plot_without_reports_warns_and_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let o = crossgram(&["plot", path(dir.path())]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    assert!(!dir.path().join("plot").exists());
}

#[test]
fn repeated_runs_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = crossgram(&["run", "--order-dim", "20", "--orders", "1..20", "--out", path(out)]);
        assert!(o.status.success());
    }
    for f in ["input.csv", "fom_output.csv", "sylvester/errors.csv", "empirical/errors.csv", "empirical/gramian.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["run", "--a", "20", "--b", "10"],
        vec!["run", "--order-dim", "10", "--orders", "1..20"],
        vec!["run", "--gramian", "bogus"],
        vec!["run", "--orders", "0..3"],
    ] {
        let mut args = args.clone();
        let out = dir.path().join("x");
        args.extend(["--out", path(&out)]);
        assert_eq!(crossgram(&args).status.code(), Some(2), "{args:?}");
    }
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"unknown_field": 1}"#).unwrap();
    assert_eq!(crossgram(&["run", "--config", path(&cfg)]).status.code(), Some(2));
}

#[test]
fn io_errors_exit_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let o = crossgram(&["sweep", path(&dir.path().join("missing")), "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("A.csv"));
    assert_eq!(crossgram(&["run", "--config", path(&dir.path().join("none.json"))]).status.code(), Some(4));
}

#[test]
fn numerical_failures_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("sys");
    fs::create_dir_all(&sys).unwrap();
    fs::write(sys.join("A.csv"), "1000\n").unwrap();
    fs::write(sys.join("B.csv"), "1\n").unwrap();
    fs::write(sys.join("C.csv"), "1\n").unwrap();
    let o = crossgram(&["sweep", path(&sys), "--orders", "1", "--out", path(&dir.path().join("o"))]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("simulate full model"));
}
