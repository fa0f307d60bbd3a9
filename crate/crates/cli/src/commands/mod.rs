pub mod calibrate;
pub mod curves;
pub mod price;
pub mod report;
pub mod simulate;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use multicurve::bundled;
use multicurve::marketdata::parse_curves;
use multicurve::{CurveSet, MarketDate};

use crate::error::{CliError, CliResult};
use crate::manifest::ConfigDigest;
use crate::CurveArgs;

/// Loaded curve set plus what identifies it in a manifest.
pub struct LoadedCurves {
    pub set: CurveSet,
    pub label: String,
}

pub fn load_curves(args: &CurveArgs, digest: &mut ConfigDigest) -> CliResult<LoadedCurves> {
    let anchor = match &args.anchor {
        Some(a) => Some(a.parse::<MarketDate>().map_err(|e| CliError::usage(format!("--anchor: {e}")))?),
        None => None,
    };
    let (text, label) = match &args.curves {
        Some(p) => (read_text(p)?, p.display().to_string()),
        None => (bundled::REFERENCE_CURVES_CSV.to_string(), "<bundled:reference_curves.csv>".to_string()),
    };
    digest.add("curves", text.as_bytes());
    if let Some(a) = anchor {
        digest.add("anchor", a.to_string().as_bytes());
    }
    let set = parse_curves(&text, anchor).map_err(|e| CliError::data(format!("{label}: {e}")))?;
    Ok(LoadedCurves { set, label })
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

pub fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::data(format!("{}: {e}", dir.display())))
}

/// Writes `bytes` to `path`, or to standard output when `path` is `None`.
pub fn emit(path: Option<&PathBuf>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::data(format!("{}: {e}", p.display()))),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}
