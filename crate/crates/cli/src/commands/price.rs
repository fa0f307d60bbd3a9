use std::path::PathBuf;

use clap::Args;
use multicurve::bundled::published_params;
use multicurve::calibration::ModelVariant;
use multicurve::pricing::{build_schedule, implied_black_vol, swaption_price};
use multicurve::{Tenor, WgParams};

use super::{emit, fmt_opt, load_curves, read_text};
use crate::error::{CliError, CliResult};
use crate::manifest::ConfigDigest;
use crate::CurveArgs;

#[derive(Debug, Args)]
pub struct PriceArgs {
    #[command(flatten)]
    pub input: CurveArgs,

    /// Parameter file (TOML); the published parameters of `--variant` when omitted.
    #[arg(long)]
    pub params: Option<PathBuf>,

    /// Model variant: wg2pp, mmg or g2pp.
    #[arg(long, default_value = "wg2pp")]
    pub variant: String,

    /// Option expiry (swap start) in years.
    #[arg(long)]
    pub expiry: f64,

    /// Underlying swap length in whole years.
    #[arg(long)]
    pub tenor: u32,

    /// Floating-leg tenor; 3M for one-year swaps and 6M otherwise by default.
    #[arg(long)]
    pub float_tenor: Option<String>,

    /// Strike; at-the-money when omitted.
    #[arg(long)]
    pub strike: Option<f64>,

    /// Tenor dampings `eta1,eta2` overriding the parameter file.
    #[arg(long, value_delimiter = ',')]
    pub eta: Option<Vec<f64>>,

    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Applies `eta` overrides and the variant's restriction, warning when
/// dampings are dropped.
pub fn effective_params(mut p: WgParams, variant: ModelVariant, eta: Option<&[f64]>) -> CliResult<WgParams> {
    if let Some(eta) = eta {
        if eta.len() != p.factors() {
            return Err(CliError::usage(format!("--eta needs {} values", p.factors())));
        }
        let mut f = p.to_file();
        f.eta = eta.to_vec();
        p = f.into_params()?;
    }
    if !variant.has_eta() && p.eta().iter().any(|&e| e != 0.0) {
        eprintln!("warning: eta is ignored for variant {variant}; using eta = 0");
        p = p.without_eta();
    }
    Ok(p)
}

pub fn run(args: PriceArgs) -> CliResult<()> {
    let variant: ModelVariant = args.variant.parse().map_err(|e: multicurve::Error| CliError::usage(e.to_string()))?;
    let loaded = load_curves(&args.input, &mut ConfigDigest::new("price"))?;
    let params = match &args.params {
        Some(path) => WgParams::from_toml_str(&read_text(path)?)?,
        None => published_params(variant),
    };
    let params = effective_params(params, variant, args.eta.as_deref())?;
    let float_tenor: Tenor = match &args.float_tenor {
        Some(s) => s.parse().map_err(|e: multicurve::Error| CliError::usage(format!("--float-tenor: {e}")))?,
        None if args.tenor == 1 => Tenor::M3,
        None => Tenor::M6,
    };
    if !(args.expiry > 0.0) || args.tenor == 0 {
        return Err(CliError::usage("--expiry and --tenor must be positive"));
    }
    let curves = variant.curves(&loaded.set)?;
    let sch = build_schedule(args.expiry, args.tenor, variant.pricing_tenor(float_tenor), Tenor::Y1)?;
    let a = swaption_price(&params, &curves, &sch, args.strike)?;
    let vol = implied_black_vol(a.price, a.par_rate, a.strike, 0.0, a.annuity, a.expiry).ok();
    let text = format!(
        "expiry_years,tenor_years,float_tenor,strike,annuity,par_rate,shift,gamma,price,implied_vol\n{},{},{},{},{},{},{},{},{},{}\n",
        args.expiry, args.tenor, float_tenor, a.strike, a.annuity, a.par_rate, a.shift, a.gamma, a.price, fmt_opt(vol)
    );
    emit(args.out.as_ref(), text.as_bytes())
}
