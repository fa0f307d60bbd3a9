use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use multicurve::calibration::{calibrate, residual_report, CalibrationConfig, CalibrationProblem, CalibrationResult, ModelVariant};
use multicurve::pricing::parse_swaptions;
use multicurve::{bundled, WgParams};

use super::{create_dir, load_curves, read_text};
use crate::error::{CliError, CliResult};
use crate::manifest::{ConfigDigest, RunManifest};
use crate::CurveArgs;

pub const RESULT_FILE: &str = "calibration_result.csv";
pub const PARAMS_FILE: &str = "params.toml";

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub input: CurveArgs,

    /// Swaption quotes CSV; the bundled ATM premium grid when omitted.
    #[arg(long)]
    pub swaptions: Option<PathBuf>,

    /// Calibration config (TOML). Command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Model variant: wg2pp, mmg or g2pp.
    #[arg(long)]
    pub variant: Option<String>,

    #[arg(long)]
    pub max_iters: Option<usize>,

    /// Seed for random starts.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,

    /// Earlier run whose chi2 normalizes this one.
    #[arg(long)]
    pub baseline: Option<PathBuf>,

    /// Earlier run whose parameters are tried as an extra first start.
    #[arg(long)]
    pub warm_start: Option<PathBuf>,
}

/// Reads the `chi2` entry of a run directory's result file.
pub fn read_chi2(dir: &Path) -> CliResult<f64> {
    let text = read_text(&dir.join(RESULT_FILE))?;
    text.lines()
        .filter_map(|l| l.split_once(','))
        .find(|(k, _)| *k == "chi2")
        .and_then(|(_, v)| v.trim().parse().ok())
        .ok_or_else(|| CliError::data(format!("{}: no chi2 entry", dir.join(RESULT_FILE).display())))
}

/// Reads the variant name recorded in a run directory.
pub fn read_variant(dir: &Path) -> CliResult<ModelVariant> {
    let text = read_text(&dir.join(RESULT_FILE))?;
    text.lines()
        .filter_map(|l| l.split_once(','))
        .find(|(k, _)| *k == "variant")
        .and_then(|(_, v)| v.trim().parse().ok())
        .ok_or_else(|| CliError::data(format!("{}: no variant entry", dir.join(RESULT_FILE).display())))
}

pub fn run(args: CalibrateArgs) -> CliResult<()> {
    let mut digest = ConfigDigest::new("calibrate");
    let mut inputs = Vec::new();

    let mut config = match &args.config {
        Some(p) => {
            let text = read_text(p)?;
            digest.add("config", text.as_bytes());
            inputs.push(p.display().to_string());
            CalibrationConfig::from_toml_str(&text).map_err(|e| CliError::data(format!("{}: {e}", p.display())))?
        }
        None => CalibrationConfig::new(ModelVariant::Wg2pp),
    };
    if let Some(v) = &args.variant {
        config.variant = v.parse().map_err(|e: multicurve::Error| CliError::usage(e.to_string()))?;
    }
    if let Some(n) = args.max_iters {
        config.max_iters = n;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    digest.add("effective_config", config.to_toml_string().as_bytes());

    let loaded = load_curves(&args.input, &mut digest)?;
    inputs.push(loaded.label.clone());
    let (quote_text, quote_label) = match &args.swaptions {
        Some(p) => (read_text(p)?, p.display().to_string()),
        None => (bundled::REFERENCE_SWAPTIONS_CSV.to_string(), "<bundled:reference_swaptions.csv>".to_string()),
    };
    digest.add("swaptions", quote_text.as_bytes());
    inputs.push(quote_label.clone());
    let quotes = parse_swaptions(&quote_text).map_err(|e| CliError::data(format!("{quote_label}: {e}")))?;

    let space = config.space().map_err(|e| CliError::data(e.to_string()))?;
    let mut prob = CalibrationProblem::new(config.variant, &loaded.set, &quotes, config.settings())?.with_space(space)?;
    if let Some(dir) = &args.warm_start {
        let text = read_text(&dir.join(PARAMS_FILE))?;
        digest.add("warm_start", text.as_bytes());
        inputs.push(dir.join(PARAMS_FILE).display().to_string());
        let p = WgParams::from_toml_str(&text)?;
        prob = prob.with_start_params(&p)?;
    }
    let baseline = match &args.baseline {
        Some(dir) => {
            inputs.push(dir.join(RESULT_FILE).display().to_string());
            Some(read_chi2(dir)?)
        }
        None => None,
    };

    create_dir(&args.out)?;
    let mut result = match calibrate(&prob) {
        Ok(r) => r,
        Err(e) => {
            let _ = fs::write(args.out.join("diagnostics.txt"), format!("{e}\n"));
            return Err(e.into());
        }
    };
    if let Some(b) = baseline {
        result.normalize_against(b);
    }
    write_outputs(&args.out, &prob, &result)?;

    RunManifest {
        command: "calibrate".into(),
        inputs,
        config_digest: digest.finish(),
        seed: Some(config.seed),
        output_dir: args.out.display().to_string(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
    }
    .write(&args.out)?;
    eprintln!(
        "{}: chi2 = {:.6e}{}",
        result.variant,
        result.chi2,
        result.normalized_chi2.map_or(String::new(), |n| format!(" ({:.1}% of baseline)", 100.0 * n))
    );
    Ok(())
}

fn write_outputs(dir: &Path, prob: &CalibrationProblem, r: &CalibrationResult) -> CliResult<()> {
    let mut s = String::from("key,value\n");
    writeln!(s, "variant,{}", r.variant).unwrap();
    writeln!(s, "chi2,{}", r.chi2).unwrap();
    writeln!(s, "normalized_chi2,{}", super::fmt_opt(r.normalized_chi2)).unwrap();
    writeln!(s, "best_start,{}", r.best_start).unwrap();
    for (n, v) in r.names.iter().zip(&r.theta) {
        writeln!(s, "theta.{n},{v}").unwrap();
    }
    let p = &r.params;
    for i in 0..p.factors() {
        writeln!(s, "lambda{},{}", i + 1, p.lambda()[i]).unwrap();
        writeln!(s, "h{},{}", i + 1, p.h()[i]).unwrap();
        writeln!(s, "eta{},{}", i + 1, p.eta()[i]).unwrap();
    }
    writeln!(s, "rho12,{}", p.rho(0, 1)).unwrap();
    let b = p.beta();
    writeln!(s, "beta0,{}\nbeta1,{}\nbeta2,{}", b[0], b[1], b[2]).unwrap();
    write_file(dir, RESULT_FILE, s.as_bytes())?;
    write_file(dir, PARAMS_FILE, p.to_toml_string().as_bytes())?;

    let grid = residual_report(prob, r);
    let mut buf = Vec::new();
    grid.write_csv(&mut buf)?;
    write_file(dir, "residuals.csv", &buf)?;
    buf.clear();
    grid.write_matrix(&mut buf)?;
    write_file(dir, "residuals_grid.csv", &buf)?;

    let mut t = String::from("iteration,objective,damping\n");
    for e in &r.trace {
        writeln!(t, "{},{},{}", e.iteration, e.objective, e.damping).unwrap();
    }
    write_file(dir, "trace.csv", t.as_bytes())?;

    let mut st = String::from("start_index,objective,iterations,evaluations,converged,failed_cells\n");
    for o in &r.starts {
        writeln!(st, "{},{},{},{},{},{}", o.start_index, o.objective, o.iterations, o.evaluations, o.converged, o.failed_cells.len())
            .unwrap();
    }
    write_file(dir, "starts.csv", st.as_bytes())
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> CliResult<()> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}
