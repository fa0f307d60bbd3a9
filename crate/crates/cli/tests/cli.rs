//! End-to-end checks of the `multicurve` binary: exit codes, flags and
//! output schemas.

use std::process::{Command, Output};

use multicurve::bundled::{reference_curves, published_params};
use multicurve::calibration::ModelVariant;
use multicurve::pricing::{build_schedule, swaption_price};
use multicurve::Tenor;

fn run_cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multicurve")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(run_cli(&["price", "--tenor", "2"]).status.code(), Some(1));
    assert_eq!(run_cli(&["bogus"]).status.code(), Some(1));
    assert_eq!(run_cli(&["price", "--variant", "x", "--expiry", "1", "--tenor", "1"]).status.code(), Some(1));
    assert_eq!(run_cli(&["--help"]).status.code(), Some(0));
}

#[test]
fn data_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.csv");
    std::fs::write(&bad, "date,kind,tenor,rate\n2011-01-01,zero,,abc\n").unwrap();
    let r = run_cli(&["curves", "--curves", bad.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).starts_with("error:"));
    let missing = tmp.path().join("none");
    let r = run_cli(&["report", "--runs", missing.to_str().unwrap(), "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn simulate_exit_codes() {
    let ok = run_cli(&["simulate", "--paths", "5000", "--maturities", "2,5"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let control = run_cli(&["simulate", "--paths", "5000", "--maturities", "5,10", "--negative-control"]);
    assert_eq!(control.status.code(), Some(0), "{}", String::from_utf8_lossy(&control.stderr));
    let weak = run_cli(&["simulate", "--paths", "5000", "--maturities", "2", "--negative-control", "1e-6", "--threshold", "1e9"]);
    assert_eq!(weak.status.code(), Some(3));
}

#[test]
fn price_matches_library() {
    let r = run_cli(&["price", "--variant", "mmg", "--expiry", "3", "--tenor", "4"]);
    assert!(r.status.success());
    let text = String::from_utf8(r.stdout).unwrap();
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').filter_map(|v| v.parse().ok()).collect();
    let sch = build_schedule(3.0, 4, Tenor::M6, Tenor::Y1).unwrap();
    let lib = swaption_price(&published_params(ModelVariant::Mmg), &reference_curves(), &sch, None).unwrap();
    assert_eq!(row[row.len() - 2], lib.price);
}

#[test]
fn curves_lists_pillars_and_requested_samples() {
    let all = run_cli(&["curves"]);
    assert!(all.status.success());
    let text = stdout(&all);
    let discount: Vec<&str> = text.lines().skip(2).take_while(|l| !l.starts_with('#')).collect();
    assert_eq!(discount.len(), 30);
    assert!(discount[0].starts_with("2010-08-13,"));

    let some = run_cli(&["curves", "--sample-dates", "2015-08-12,2020-08-12"]);
    let text = stdout(&some);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "date,t,zero_rate,discount,inst_forward,ois_3M,ois_6M,fwd_3M,fwd_6M");
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("2020-08-12,"));

    assert_eq!(run_cli(&["curves", "--curves", "/nonexistent/curves.csv"]).status.code(), Some(2));
    assert_eq!(run_cli(&["curves", "--sample-dates", "2015-13-01"]).status.code(), Some(1));
}

#[test]
fn eta_is_ignored_for_nested_variants() {
    let o = run_cli(&["price", "--variant", "g2pp", "--eta", "0.1,0.2", "--expiry", "2", "--tenor", "2"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("eta is ignored"));
    let plain = run_cli(&["price", "--variant", "g2pp", "--expiry", "2", "--tenor", "2"]);
    assert_eq!(o.stdout, plain.stdout);
    assert!(!stderr(&plain).contains("eta"));
}

#[test]
fn zero_volatility_checks_pass() {
    let tmp = tempfile::tempdir().unwrap();
    let params = tmp.path().join("flat.toml");
    std::fs::write(
        &params,
        "n = 2\nlambda = [0.01, 1.0]\nh = [0.0, 0.0]\neta = [0.0, 0.0]\nrho = [1.0, -0.5, 1.0]\nbeta0 = 1.0\nbeta1 = 0.5\nbeta2 = 1.0\n",
    )
    .unwrap();
    let o = run_cli(&["simulate", "--params", params.to_str().unwrap(), "--paths", "1000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn zero_iterations_return_best_start() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = run_cli(&["calibrate", "--variant", "mmg", "--max-iters", "0", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let starts = std::fs::read_to_string(out.join("starts.csv")).unwrap();
    let best = starts
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .fold(f64::INFINITY, f64::min);
    let result = std::fs::read_to_string(out.join("calibration_result.csv")).unwrap();
    let chi2: f64 = result.lines().find_map(|l| l.strip_prefix("chi2,")).unwrap().parse().unwrap();
    assert_eq!(chi2, best);
    for name in ["params.toml", "residuals.csv", "residuals_grid.csv", "trace.csv", "manifest.json"] {
        assert!(out.join(name).exists(), "{name}");
    }
}

#[test]
fn report_layouts() {
    let tmp = tempfile::tempdir().unwrap();
    let p = |n: &str| tmp.path().join(n).to_str().unwrap().to_string();
    for v in ["g2pp", "wg2pp"] {
        let o = run_cli(&["calibrate", "--variant", v, "--max-iters", "5", "--out", &p(v)]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let o = run_cli(&["report", "--runs", &p("g2pp"), &p("wg2pp"), "--out", &p("rep")]);
    assert!(o.status.success(), "{}", stderr(&o));

    let surface = |v: &str| std::fs::read_to_string(tmp.path().join("rep").join(format!("vol_surface_{v}.csv"))).unwrap();
    let g = surface("g2pp");
    assert!(g.starts_with("expiry_years,tenor_years,vol_3m,vol_6m,split_bps\n"));
    assert_eq!(g.lines().count(), 1 + 144);
    for line in g.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[2], f[3]);
        assert_eq!(f[4], "0");
    }
    let w = surface("wg2pp");
    let split_10y: Vec<f64> =
        w.lines().skip(1).map(|l| l.split(',').collect::<Vec<_>>()).filter(|f| f[1] == "10").map(|f| f[4].parse().unwrap()).collect();
    assert!(split_10y.iter().all(|s: &f64| s.abs() > 0.0));

    let heat = std::fs::read_to_string(tmp.path().join("rep").join("residual_heatmap_wg2pp.csv")).unwrap();
    assert_eq!(heat.lines().count(), 13);
    let summary = std::fs::read_to_string(tmp.path().join("rep").join("chi2_summary.csv")).unwrap();
    assert!(summary.starts_with("variant,chi2,normalized_chi2,rms_vol_error_bps\ng2pp,"));
    assert!(summary.lines().nth(1).unwrap().split(',').nth(2) == Some("1"));
}
