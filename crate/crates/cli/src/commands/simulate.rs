use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::Args;
use multicurve::bundled::published_params;
use multicurve::calibration::ModelVariant;
use multicurve::montecarlo::{grid_through, run_checks, simulate, write_terminal_states, CheckSpec, Measure, PathConfig, Scheme};
use multicurve::{Tenor, WgParams};

use super::{create_dir, load_curves, read_text};
use crate::commands::price::effective_params;
use crate::error::{CliError, CliResult};
use crate::manifest::{ConfigDigest, RunManifest};
use crate::CurveArgs;

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub input: CurveArgs,

    /// Parameter file (TOML); the published parameters of `--variant` when omitted.
    #[arg(long)]
    pub params: Option<PathBuf>,

    /// Model variant: wg2pp, mmg or g2pp.
    #[arg(long, default_value = "wg2pp")]
    pub variant: String,

    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,

    #[arg(long, default_value_t = 20100812)]
    pub seed: u64,

    /// Comma-separated maturities in years.
    #[arg(long, value_delimiter = ',', default_value = "1,2,5,10")]
    pub maturities: Vec<f64>,

    /// Comma-separated Libor tenors.
    #[arg(long, value_delimiter = ',', default_value = "3M,6M")]
    pub tenors: Vec<String>,

    /// Pair every path with its antithetic mirror.
    #[arg(long)]
    pub antithetic: bool,

    /// Use Euler stepping instead of exact Gaussian transitions.
    #[arg(long)]
    pub euler: bool,

    /// Largest time step in years.
    #[arg(long, default_value_t = 1.0 / 12.0)]
    pub max_step: f64,

    /// Scale h by this factor and drop the measure change; the run is
    /// expected to fail.
    #[arg(long, num_args = 0..=1, default_missing_value = "5")]
    pub negative_control: Option<f64>,

    /// Largest |z| accepted by a check.
    #[arg(long, default_value_t = 3.0)]
    pub threshold: f64,

    /// Output directory for checks.csv and the manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Write risk-neutral states at the last maturity to this binary file.
    #[arg(long)]
    pub dump_states: Option<PathBuf>,
}

pub fn run(args: SimulateArgs) -> CliResult<()> {
    let variant: ModelVariant = args.variant.parse().map_err(|e: multicurve::Error| CliError::usage(e.to_string()))?;
    let tenors = args
        .tenors
        .iter()
        .map(|s| s.trim().parse::<Tenor>().map_err(|e| CliError::usage(format!("--tenors: {e}"))))
        .collect::<CliResult<Vec<_>>>()?;
    if args.paths == 0 || args.maturities.iter().any(|&t| !(t > 0.0)) || !(args.max_step > 0.0) {
        return Err(CliError::usage("--paths, --maturities and --max-step must be positive"));
    }
    let mut digest = ConfigDigest::new("simulate");
    let loaded = load_curves(&args.input, &mut digest)?;
    let mut inputs = vec![loaded.label.clone()];
    let params = match &args.params {
        Some(p) => {
            let text = read_text(p)?;
            digest.add("params", text.as_bytes());
            inputs.push(p.display().to_string());
            WgParams::from_toml_str(&text)?
        }
        None => published_params(variant),
    };
    let params = effective_params(params, variant, None)?;
    let curves = variant.curves(&loaded.set)?;
    let spec = CheckSpec {
        maturities: args.maturities.clone(),
        tenors,
        paths: args.paths,
        seed: args.seed,
        antithetic: args.antithetic,
        max_step: args.max_step,
        scheme: if args.euler { Scheme::Euler } else { Scheme::Exact },
        negative_control: args.negative_control,
    };
    digest.add("spec", serde_json::to_string(&spec).expect("spec serialises").as_bytes());

    let reports = run_checks(&params, &curves, &spec)?;
    let mut csv = String::from("check,estimate,std_error,expected,z,pass\n");
    for r in &reports {
        writeln!(csv, "{},{},{},{},{},{}", r.name, r.estimate, r.std_error, r.expected, r.z, r.passes(args.threshold)).unwrap();
    }

    if let Some(path) = &args.dump_states {
        let horizon = args.maturities.iter().cloned().fold(0.0, f64::max);
        let cfg = PathConfig::new(args.paths, grid_through(&[horizon], args.max_step), Measure::RiskNeutral, args.seed)
            .with_antithetic(args.antithetic)
            .with_scheme(spec.scheme)
            .with_observe(vec![horizon]);
        let set = simulate(&params, &cfg)?;
        let f = File::create(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        write_terminal_states(&set, BufWriter::new(f))?;
    }

    match &args.out {
        Some(dir) => {
            create_dir(dir)?;
            super::emit(Some(&dir.join("checks.csv")), csv.as_bytes())?;
            RunManifest {
                command: "simulate".into(),
                inputs,
                config_digest: digest.finish(),
                seed: Some(args.seed),
                output_dir: dir.display().to_string(),
                tool_version: env!("CARGO_PKG_VERSION").into(),
            }
            .write(dir)?;
        }
        None => super::emit(None, csv.as_bytes())?,
    }

    let failing: Vec<&str> = reports.iter().filter(|r| !r.passes(args.threshold)).map(|r| r.name.as_str()).collect();
    match (args.negative_control, failing.is_empty()) {
        (None, true) => Ok(()),
        (None, false) => Err(CliError::numerical(format!("martingale checks failed: {}", failing.join(", ")))),
        (Some(_), false) => {
            eprintln!("negative control detected drift in: {}", failing.join(", "));
            Ok(())
        }
        (Some(_), true) => Err(CliError::numerical("negative control passed every check; the test has no power")),
    }
}
