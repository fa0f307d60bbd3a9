use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::math::{norm_cdf, norm_pdf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum OptionSide {
    #[default]
    Payer,
    Receiver,
}

/// Shifted Black formula with `gamma` the total standard deviation of
/// `ln(S + shift)` up to expiry.
pub fn black_price(forward: f64, strike: f64, shift: f64, gamma: f64, annuity: f64, side: OptionSide) -> Result<f64> {
    let f = forward + shift;
    let k = strike + shift;
    if !(f > 0.0) || !(k > 0.0) {
        return Err(Error::domain(format!("shifted forward {f} and strike {k} must be positive")));
    }
    if !(gamma >= 0.0) {
        return Err(Error::domain(format!("total volatility {gamma} is negative")));
    }
    let payer = if gamma == 0.0 {
        (forward - strike).max(0.0)
    } else {
        let d1 = (f / k).ln() / gamma + 0.5 * gamma;
        let d2 = d1 - gamma;
        f * norm_cdf(d1) - k * norm_cdf(d2)
    };
    Ok(annuity
        * match side {
            OptionSide::Payer => payer,
            // parity: payer - receiver = F - K
            OptionSide::Receiver => {
                if gamma == 0.0 {
                    (strike - forward).max(0.0)
                } else {
                    let d1 = (f / k).ln() / gamma + 0.5 * gamma;
                    let d2 = d1 - gamma;
                    k * norm_cdf(-d2) - f * norm_cdf(-d1)
                }
            }
        })
}

/// Annualised Black volatility `sigma` with `gamma = sigma sqrt(expiry)`
/// reproducing a payer price.
pub fn implied_black_vol(price: f64, forward: f64, strike: f64, shift: f64, annuity: f64, expiry: f64) -> Result<f64> {
    if !(expiry > 0.0) || !(annuity > 0.0) {
        return Err(Error::Inversion(format!("expiry {expiry} and annuity {annuity} must be positive")));
    }
    let f = forward + shift;
    let k = strike + shift;
    if !(f > 0.0) || !(k > 0.0) {
        return Err(Error::Inversion(format!("shifted forward {f} and strike {k} must be positive")));
    }
    let target = price / annuity;
    let lower = (forward - strike).max(0.0);
    let upper = f;
    let tol = 1e-10 / annuity;
    if !target.is_finite() || target < lower - tol || target >= upper {
        return Err(Error::Inversion(format!(
            "price {price} outside no-arbitrage bounds [{}, {})",
            lower * annuity,
            upper * annuity
        )));
    }
    if target <= lower + 1e-14 {
        return Ok(0.0);
    }
    let value = |g: f64| black_price(forward, strike, shift, g, 1.0, OptionSide::Payer).expect("checked inputs");

    // Bracket the root, then Newton steps that fall outside the bracket
    // are replaced by bisection.
    let mut lo = 0.0;
    let mut hi = 1.0;
    while value(hi) < target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::Inversion("total volatility bracket exceeded".into()));
        }
    }
    // Starting point from the ATM identity price = f (2 Phi(g/2) - 1).
    let atm = Normal::standard().inverse_cdf(0.5 * (target / f + 1.0).min(1.0 - 1e-16));
    let mut g = (2.0 * atm).clamp(lo, hi);
    if !(g > lo && g < hi) {
        g = 0.5 * (lo + hi);
    }
    for _ in 0..200 {
        let diff = value(g) - target;
        if diff.abs() <= tol {
            return Ok(g / expiry.sqrt());
        }
        if diff > 0.0 {
            hi = g;
        } else {
            lo = g;
        }
        let d1 = (f / k).ln() / g + 0.5 * g;
        let vega = f * norm_pdf(d1);
        let next = g - diff / vega;
        g = if vega > 0.0 && next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        if hi - lo < 1e-16 {
            return Ok(g / expiry.sqrt());
        }
    }
    Err(Error::Inversion("implied volatility did not converge".into()))
}
