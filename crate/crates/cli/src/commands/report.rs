use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::Args;
use multicurve::bundled::GRID_YEARS;
use multicurve::calibration::{vol_surface_report, write_vol_surface, ModelVariant, ResidualGrid};
use multicurve::WgParams;

use super::calibrate::{read_chi2, read_variant, PARAMS_FILE};
use super::{create_dir, fmt_opt, load_curves, read_text};
use crate::error::{CliError, CliResult};
use crate::manifest::{ConfigDigest, RunManifest};
use crate::CurveArgs;

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub input: CurveArgs,

    /// Calibration output directories.
    #[arg(long, num_args = 1.., required = true)]
    pub runs: Vec<PathBuf>,

    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

struct Run {
    variant: ModelVariant,
    chi2: f64,
    params: WgParams,
    residuals: ResidualGrid,
}

pub fn run(args: ReportArgs) -> CliResult<()> {
    let mut digest = ConfigDigest::new("report");
    let loaded = load_curves(&args.input, &mut digest)?;
    let mut inputs = vec![loaded.label.clone()];

    let mut runs = Vec::new();
    for dir in &args.runs {
        if !dir.is_dir() {
            return Err(CliError::data(format!("{}: not a run directory", dir.display())));
        }
        let params_text = read_text(&dir.join(PARAMS_FILE))?;
        digest.add("params", params_text.as_bytes());
        let residuals =
            ResidualGrid::load(dir.join("residuals.csv")).map_err(|e| CliError::data(format!("{}: {e}", dir.display())))?;
        runs.push(Run {
            variant: read_variant(dir)?,
            chi2: read_chi2(dir)?,
            params: WgParams::from_toml_str(&params_text).map_err(|e| CliError::data(format!("{}: {e}", dir.display())))?,
            residuals,
        });
        inputs.push(dir.display().to_string());
    }

    create_dir(&args.out)?;
    let expiries: Vec<f64> = GRID_YEARS.iter().map(|&y| y as f64).collect();
    for r in &runs {
        let name = r.variant.name();
        let points = vol_surface_report(&r.params, &loaded.set, r.variant, &expiries, &GRID_YEARS)?;
        let mut buf = Vec::new();
        write_vol_surface(&points, &mut buf)?;
        write(&args.out, &format!("vol_surface_{name}.csv"), &buf)?;
        buf.clear();
        r.residuals.write_matrix(&mut buf)?;
        write(&args.out, &format!("residual_heatmap_{name}.csv"), &buf)?;
    }

    let baseline = runs.iter().find(|r| r.variant == ModelVariant::G2pp).map(|r| r.chi2);
    let mut s = String::from("variant,chi2,normalized_chi2,rms_vol_error_bps\n");
    for r in &runs {
        writeln!(
            s,
            "{},{},{},{}",
            r.variant,
            r.chi2,
            fmt_opt(baseline.map(|b| r.chi2 / b)),
            fmt_opt(r.residuals.rms_bps(|_| true))
        )
        .unwrap();
    }
    write(&args.out, "chi2_summary.csv", s.as_bytes())?;

    RunManifest {
        command: "report".into(),
        inputs,
        config_digest: digest.finish(),
        seed: None,
        output_dir: args.out.display().to_string(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
    }
    .write(&args.out)
}

fn write(dir: &std::path::Path, name: &str, bytes: &[u8]) -> CliResult<()> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}
