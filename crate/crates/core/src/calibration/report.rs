use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::optimizer::CalibrationResult;
use super::problem::CalibrationProblem;
use super::variant::ModelVariant;
use crate::error::{Error, Result};
use crate::hjm::{QScale, WgParams};
use crate::marketdata::{CurveSet, Tenor};
use crate::pricing::{build_schedule, implied_black_vol, FrozenSwap, SwaptionPricer, SwaptionQuote};

/// Market and model figures for one quote cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualCell {
    pub expiry: f64,
    pub tenor_years: u32,
    pub float_tenor: Tenor,
    pub market_premium: f64,
    pub model_premium: f64,
    pub market_vol: Option<f64>,
    pub model_vol: Option<f64>,
    /// Market minus model lognormal implied vol, in basis points.
    pub vol_error_bps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ResidualGrid {
    pub cells: Vec<ResidualCell>,
}

const RESIDUAL_HEADER: &str =
    "expiry_years,tenor_years,float_tenor,market_premium,model_premium,market_vol,model_vol,vol_error_bps";

/// Lognormal ATM implied vol (no shift) of a premium on a frozen swap.
fn lognormal_vol(frozen: &FrozenSwap, premium: f64) -> Option<f64> {
    implied_black_vol(premium, frozen.par_rate, frozen.par_rate, 0.0, frozen.annuity, frozen.expiry()).ok()
}

/// Per-cell implied-vol errors of a fitted result, in quote order.
pub fn residual_report(prob: &CalibrationProblem, res: &CalibrationResult) -> ResidualGrid {
    residual_report_params(prob, &res.params)
}

pub fn residual_report_params(prob: &CalibrationProblem, p: &WgParams) -> ResidualGrid {
    let prices = prob.model_prices(p);
    let cells = prob
        .cells()
        .iter()
        .zip(prices)
        .map(|(c, m)| {
            let model = m.unwrap_or(f64::NAN);
            let market_vol = lognormal_vol(&c.frozen, c.target);
            let model_vol = if model.is_finite() { lognormal_vol(&c.frozen, model) } else { None };
            ResidualCell {
                expiry: c.quote.expiry,
                tenor_years: c.quote.tenor_years,
                float_tenor: c.quote.float_tenor,
                market_premium: c.target,
                model_premium: model,
                market_vol,
                model_vol,
                vol_error_bps: market_vol.zip(model_vol).map(|(a, b)| (a - b) * 1e4),
            }
        })
        .collect();
    ResidualGrid { cells }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

fn parse_opt(s: &str, row: usize) -> Result<Option<f64>> {
    if s == "NA" {
        Ok(None)
    } else {
        s.parse().map(Some).map_err(|_| Error::parse(row, format!("invalid number '{s}'")))
    }
}

impl ResidualGrid {
    /// Long format, one row per cell; `NA` marks unavailable vols.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{RESIDUAL_HEADER}")?;
        for c in &self.cells {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                c.expiry,
                c.tenor_years,
                c.float_tenor,
                c.market_premium,
                c.model_premium,
                opt(c.market_vol),
                opt(c.model_vol),
                opt(c.vol_error_bps)
            )?;
        }
        Ok(())
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == RESIDUAL_HEADER => {}
            _ => return Err(Error::parse(1, format!("expected header {RESIDUAL_HEADER}"))),
        }
        let mut cells = Vec::new();
        for (i, line) in lines {
            let row = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 8 {
                return Err(Error::parse(row, format!("expected 8 fields, found {}", f.len())));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| Error::parse(row, format!("invalid number '{s}'")));
            cells.push(ResidualCell {
                expiry: num(f[0])?,
                tenor_years: f[1].parse().map_err(|_| Error::parse(row, format!("invalid tenor '{}'", f[1])))?,
                float_tenor: f[2].parse().map_err(|_| Error::parse(row, format!("invalid float tenor '{}'", f[2])))?,
                market_premium: num(f[3])?,
                model_premium: num(f[4])?,
                market_vol: parse_opt(f[5], row)?,
                model_vol: parse_opt(f[6], row)?,
                vol_error_bps: parse_opt(f[7], row)?,
            });
        }
        Ok(Self { cells })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_csv(&std::fs::read_to_string(path)?)
    }

    /// Heat-map layout: one row per expiry, one column per tenor, entries
    /// are vol errors in bps (`NA` when unavailable, empty when absent).
    pub fn write_matrix<W: Write>(&self, mut out: W) -> Result<()> {
        let mut expiries: Vec<f64> = self.cells.iter().map(|c| c.expiry).collect();
        expiries.sort_by(f64::total_cmp);
        expiries.dedup();
        let mut tenors: Vec<u32> = self.cells.iter().map(|c| c.tenor_years).collect();
        tenors.sort_unstable();
        tenors.dedup();
        write!(out, "expiry_years")?;
        for t in &tenors {
            write!(out, ",{t}")?;
        }
        writeln!(out)?;
        for e in &expiries {
            write!(out, "{e}")?;
            for t in &tenors {
                let cell = self.cells.iter().find(|c| c.expiry == *e && c.tenor_years == *t);
                match cell {
                    Some(c) => write!(out, ",{}", opt(c.vol_error_bps))?,
                    None => write!(out, ",")?,
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// Root mean square vol error (bps) over available cells matching `filter`.
    pub fn rms_bps(&self, filter: impl Fn(&ResidualCell) -> bool) -> Option<f64> {
        let v: Vec<f64> = self.cells.iter().filter(|c| filter(c)).filter_map(|c| c.vol_error_bps).collect();
        if v.is_empty() {
            None
        } else {
            Some((v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt())
        }
    }
}

/// Model implied vols of 3M- and 6M-indexed ATM swaptions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolSurfacePoint {
    pub expiry: f64,
    pub tenor_years: u32,
    pub vol_3m: Option<f64>,
    pub vol_6m: Option<f64>,
}

impl VolSurfacePoint {
    /// `|vol_3m - vol_6m|` when both are available.
    pub fn split(&self) -> Option<f64> {
        self.vol_3m.zip(self.vol_6m).map(|(a, b)| (a - b).abs())
    }
}

/// Implied lognormal vols of the model on a grid of expiries and tenors,
/// once with a 3M and once with a 6M floating leg, priced on the variant's
/// curves.
pub fn vol_surface_report(
    p: &WgParams,
    market: &CurveSet,
    variant: ModelVariant,
    expiries: &[f64],
    tenors: &[u32],
) -> Result<Vec<VolSurfacePoint>> {
    let curves = variant.curves(market)?;
    let mut pricer = SwaptionPricer::new(p, &curves);
    let mut out = Vec::with_capacity(expiries.len() * tenors.len());
    for &e in expiries {
        for &t in tenors {
            let mut vol = |tenor: Tenor| -> Result<Option<f64>> {
                let sch = build_schedule(e, t, variant.pricing_tenor(tenor), Tenor::Y1)?;
                let a = pricer.price(&sch, None)?;
                Ok(implied_black_vol(a.price, a.par_rate, a.par_rate, 0.0, a.annuity, e).ok())
            };
            out.push(VolSurfacePoint { expiry: e, tenor_years: t, vol_3m: vol(Tenor::M3)?, vol_6m: vol(Tenor::M6)? });
        }
    }
    Ok(out)
}

pub fn write_vol_surface<W: Write>(points: &[VolSurfacePoint], mut out: W) -> Result<()> {
    writeln!(out, "expiry_years,tenor_years,vol_3m,vol_6m,split_bps")?;
    for v in points {
        writeln!(
            out,
            "{},{},{},{},{}",
            v.expiry,
            v.tenor_years,
            opt(v.vol_3m),
            opt(v.vol_6m),
            opt(v.split().map(|s| s * 1e4))
        )?;
    }
    Ok(())
}

/// Rescales `qhat` on the maturity bucket spanned by one ATM swaption so
/// that the model reprices `quote` exactly. The bucket covers the float
/// payment maturities of that swap for its tenor only; the returned
/// parameters carry the new scale ahead of any existing ones.
pub fn exact_fit_q_scale(p: &WgParams, market: &CurveSet, variant: ModelVariant, quote: &SwaptionQuote, premium: f64) -> Result<WgParams> {
    let curves = variant.curves(market)?;
    let tenor = variant.pricing_tenor(quote.float_tenor);
    let sch = build_schedule(quote.expiry, quote.tenor_years, tenor, Tenor::Y1)?;
    let with_factor = |factor: f64| {
        let mut scales = vec![QScale { t_min: sch.start(), t_max: sch.end() + 1e-9, tenor_months: tenor.months(), factor }];
        scales.extend(p.q_scales().iter().cloned());
        p.clone().with_q_scales(scales)
    };
    let unit = with_factor(1.0);
    let frozen = FrozenSwap::new(&curves, &sch, unit.shift_rule())?;
    let base = SwaptionPricer::new(&unit, &curves).price_frozen(&frozen, None)?;
    if !(base.gamma > 0.0) {
        return Err(Error::Inversion("zero model volatility cannot be rescaled".into()));
    }
    // Shifted-Black total volatility reproducing the premium; gamma is
    // linear in the bucket's qhat.
    let target = implied_black_vol(premium, frozen.par_rate, frozen.par_rate, frozen.shift, frozen.annuity, 1.0)?;
    Ok(with_factor(target / base.gamma))
}
