//! Runs the `fts` binary end to end on the bundled fixtures.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fts_cli::fixtures::{epoch_range, YUGOSLAVIA};
use fts_core::{fit, FitConfig, LoadConfig, SeriesKind};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn fts(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fts")).args(args).env_remove("FTS_SEED").output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = fts(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn keys(text: &str) -> HashMap<String, String> {
    text.lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn num(map: &HashMap<String, String>, k: &str) -> f64 {
    map[k].parse().unwrap_or_else(|_| panic!("{k} = {}", map[k]))
}

fn peru_report(dir: &Path) -> PathBuf {
    let path = dir.join("peru.rep");
    ok(&["fit", fixture("peru_synthetic.csv").to_str().unwrap(), "--out", path.to_str().unwrap()]);
    path
}

#[test]
fn peru_fixture_recovers_tc_and_gamma() {
    let r = keys(&ok(&["fit", fixture("peru_synthetic.csv").to_str().unwrap()]));
    assert!((num(&r, "param.tc") - 1991.29).abs() < 1e-6);
    let alpha = num(&r, "param.alpha");
    assert!(((2.0 + alpha) / (1.0 + alpha) - 1.78).abs() < 0.01);
    assert_eq!(num(&r, "derived.gamma"), fts_core::alpha_to_gamma(alpha).unwrap());
    assert_eq!(r["derived.tc_calendar"], "1991.29");
}

#[test]
fn exact_line_has_zero_chi() {
    let r = keys(&ok(&["fit", fixture("exact_line.csv").to_str().unwrap(), "--kind", "index", "--model", "linear"]));
    assert_eq!(num(&r, "chi"), 0.0);
}

#[test]
fn window_is_applied_and_recorded() {
    let r = keys(&ok(&[
        "fit",
        fixture("germany_synthetic.csv").to_str().unwrap(),
        "--kind",
        "index",
        "--window",
        "1921-05:1923-11",
    ]));
    assert_eq!(r["window.from"], "1921:05");
    assert_eq!(r["window.to"], "1923:11");
    assert_eq!(num(&r, "n_points"), 31.0);
    assert_eq!(r["derived.tc_calendar"], "1924:01:05");
}

#[test]
fn exit_codes() {
    assert_eq!(fts(&["fit", "/nonexistent.csv"]).status.code(), Some(2));
    assert_eq!(fts(&["fit"]).status.code(), Some(2));
    assert_eq!(fts(&["fit", fixture("peru_synthetic.csv").to_str().unwrap(), "--window", "junk"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "date,value\n2000,0.1\n2001,abc\n").unwrap();
    let out = fts(&["fit", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let rep = peru_report(dir.path());
    let out = fts(&["predict", "--report", rep.to_str().unwrap(), "--at", "1992"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("beyond singularity"));
}

#[test]
fn zero_error_gives_zero_spread() {
    let r = keys(&ok(&["mc", fixture("peru_synthetic.csv").to_str().unwrap(), "--di", "0", "--m", "10"]));
    for p in ["tc", "alpha", "c0", "p0"] {
        assert_eq!(num(&r, &format!("mc.{p}.std")), 0.0);
    }
    assert_eq!(r["mc.accepted"], "true");
}

#[test]
fn seeded_runs_are_byte_identical() {
    let f = fixture("peru_synthetic.csv");
    let base = ["mc", f.to_str().unwrap(), "--m", "60", "--seed", "42"];
    let a = fts(&base);
    let b = fts(&base);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let w1 = fts(&[&base[..], &["--workers", "1"]].concat());
    let w3 = fts(&[&base[..], &["--workers", "3"]].concat());
    assert_eq!(a.stdout, w1.stdout);
    assert_eq!(a.stdout, w3.stdout);

    let env = Command::new(env!("CARGO_BIN_EXE_fts"))
        .args(["mc", f.to_str().unwrap(), "--m", "60"])
        .env("FTS_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(a.stdout, env.stdout);
    let flag_wins = Command::new(env!("CARGO_BIN_EXE_fts"))
        .args(base)
        .env("FTS_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(a.stdout, flag_wins.stdout);
}

#[test]
fn histogram_counts_all_generations() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.csv");
    ok(&["mc", fixture("peru_synthetic.csv").to_str().unwrap(), "--m", "50", "--bins", "7", "--histogram", h.to_str().unwrap()]);
    let text = std::fs::read_to_string(h).unwrap();
    let counts: usize = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(text.lines().count(), 8);
    assert_eq!(counts, 50);
}

fn curve(args: &[&str]) -> Vec<(f64, f64)> {
    ok(args)
        .lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect()
}

#[test]
fn rate_curve_is_derivative_of_log_price() {
    let dir = tempfile::tempdir().unwrap();
    let rep = peru_report(dir.path());
    let rep = rep.to_str().unwrap();
    let common = ["curve", "--report", rep, "--from", "1975", "--to", "1985", "--points", "1001"];
    let p = curve(&[&common[..], &["--quantity", "logp"]].concat());
    let r = curve(&[&common[..], &["--quantity", "rate"]].concat());
    let h = p[1].0 - p[0].0;
    for k in 1..p.len() - 1 {
        let fd = (p[k + 1].1 - p[k - 1].1) / (2.0 * h);
        assert!((fd - r[k].1).abs() < 1e-5, "t = {}: {fd} vs {}", p[k].0, r[k].1);
    }
}

#[test]
fn curve_stays_below_tc() {
    let pts = curve(&["curve", "--tc", "10", "--alpha", "0.5", "--c0", "0.1", "--p0", "0", "--t0", "0", "--to", "12", "--points", "13"]);
    assert_eq!(pts.len(), 10);
    assert!(pts.iter().all(|(t, _)| *t < 10.0));
    let ab = curve(&["curve", "--tc", "10", "--alpha", "1", "--b", "2", "--before-tc", "5", "--quantity", "doubling", "--points", "5"]);
    assert_eq!(ab.len(), 5);
    assert!(ab.windows(2).all(|w| w[1].1 < w[0].1));
    assert!((ab[0].1 - std::f64::consts::LN_2 * 25.0 / 2.0).abs() < 1e-12);
}

#[test]
fn flat_linear_curve() {
    let pts = curve(&["curve", "--c0", "0", "--p0", "1.5", "--t0", "0", "--to", "10", "--points", "11"]);
    assert_eq!(pts.len(), 11);
    assert!(pts.iter().all(|(_, v)| *v == 1.5));
}

#[test]
fn predict_at_t0_is_exp_p0() {
    let dir = tempfile::tempdir().unwrap();
    let rep = peru_report(dir.path());
    let r = keys(&std::fs::read_to_string(&rep).unwrap());
    let out = keys(&ok(&["predict", "--report", rep.to_str().unwrap(), "--at", "1969"]));
    assert_eq!(num(&out, "price"), num(&r, "param.p0").exp());
}

#[test]
fn predict_mid_series_matches_generator() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("yu.rep");
    ok(&["fit", fixture("yugoslavia_synthetic.csv").to_str().unwrap(), "--kind", "index", "--out", rep.to_str().unwrap()]);
    let idx = YUGOSLAVIA.index();
    let epochs = epoch_range(YUGOSLAVIA.first, YUGOSLAVIA.last);
    for k in [5, 18, 30] {
        let e = epochs[k];
        let at = format!("{}-{:02}", e.year, e.month.unwrap());
        let out = keys(&ok(&["predict", "--report", rep.to_str().unwrap(), "--at", &at]));
        let want = idx.values()[k];
        assert!(((num(&out, "price") - want) / want).abs() < 1e-6, "{at}");
    }
}

#[test]
fn reloaded_report_predicts_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let rep = peru_report(dir.path());
    let cfg = LoadConfig { kind: SeriesKind::Rate, ..Default::default() };
    let series = fts_core::load_series(fixture("peru_synthetic.csv"), &cfg).unwrap();
    let direct = fit(&series.to_index(), &FitConfig::default()).unwrap();
    for t in ["1970.25", "1984", "1991.2"] {
        let out = keys(&ok(&["predict", "--report", rep.to_str().unwrap(), "--at", t]));
        let want = direct.params.eval(t.parse().unwrap()).unwrap();
        assert_eq!(num(&out, "log_price").to_bits(), want.to_bits(), "{t}");
    }
}
