use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hjm::{ShiftRule, VolKernel, WgParams};
use crate::marketdata::{CurveSet, Tenor};

use super::black::{black_price, OptionSide};
use super::schedule::{build_schedule, SwapSchedule};
use super::swap::{annuity, delta_weights, par_swap_rate, swap_shift_psi};

/// Everything the analytic pricer computes for one swaption.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwaptionAnalytics {
    pub expiry: f64,
    pub annuity: f64,
    pub par_rate: f64,
    pub shift: f64,
    pub weights: Vec<f64>,
    pub gamma: f64,
    pub strike: f64,
    pub price: f64,
}

/// `h_i h_j rho_ij int_0^{T_a} eps^2(u) e^{-(lambda_i + lambda_j)(T_a - u)} du`
/// by Gauss-Legendre quadrature.
fn expiry_covariance(p: &WgParams, expiry: f64) -> Vec<f64> {
    let k = VolKernel::new(p);
    let n = p.factors();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let rate = p.lambda()[i] + p.lambda()[j];
            let v = p.h()[i] * p.h()[j] * p.rho(i, j) * k.variance_integral_quadrature(rate, expiry);
            out[i * n + j] = v;
            out[j * n + i] = v;
        }
    }
    out
}

/// Loadings `D_i = sum_k delta_k q_i(T_k, x) G0_i(T_a, T_{k-1}, T_k)`.
fn loadings(p: &WgParams, sch: &SwapSchedule, weights: &[f64]) -> Vec<f64> {
    let k = VolKernel::new(p);
    let n = p.factors();
    let x = sch.float_tenor().years();
    let ta = sch.start();
    let mut d = vec![0.0; n];
    let mut g = vec![0.0; n];
    for ((t0, t1), w) in sch.float_periods_iter().zip(weights) {
        k.g_tenor_into(ta, t0, t1, t1, x, &mut g);
        for (di, gi) in d.iter_mut().zip(&g) {
            *di += w * gi;
        }
    }
    d
}

fn gamma_from(d: &[f64], cov: &[f64]) -> f64 {
    let n = d.len();
    let mut v = 0.0;
    for i in 0..n {
        for j in 0..n {
            v += d[i] * d[j] * cov[i * n + j];
        }
    }
    v.max(0.0).sqrt()
}

/// Total standard deviation of `ln(S + psi)` up to the swap start.
pub fn swap_vol_gamma(p: &WgParams, cs: &CurveSet, sch: &SwapSchedule) -> Result<f64> {
    if !(sch.start() > 0.0) {
        return Err(Error::domain(format!("swaption expiry {} must be positive", sch.start())));
    }
    let w = delta_weights(cs, sch, p.shift_rule())?;
    Ok(gamma_from(&loadings(p, sch, &w), &expiry_covariance(p, sch.start())))
}

/// Curve-dependent parts of a swaption that do not depend on the
/// volatility parameters: annuity, par rate, shift and frozen weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrozenSwap {
    pub schedule: SwapSchedule,
    pub annuity: f64,
    pub par_rate: f64,
    pub shift: f64,
    pub weights: Vec<f64>,
}

impl FrozenSwap {
    pub fn new(cs: &CurveSet, sch: &SwapSchedule, shift: &ShiftRule) -> Result<Self> {
        if !(sch.start() > 0.0) {
            return Err(Error::domain(format!("swaption expiry {} must be positive", sch.start())));
        }
        Ok(Self {
            schedule: sch.clone(),
            annuity: annuity(cs, sch)?,
            par_rate: par_swap_rate(cs, sch)?,
            shift: swap_shift_psi(cs, sch, shift)?,
            weights: delta_weights(cs, sch, shift)?,
        })
    }

    pub fn expiry(&self) -> f64 {
        self.schedule.start()
    }

    fn analytics(&self, p: &WgParams, strike: Option<f64>, cov: &[f64]) -> Result<SwaptionAnalytics> {
        let gamma = gamma_from(&loadings(p, &self.schedule, &self.weights), cov);
        let k = strike.unwrap_or(self.par_rate);
        let price = black_price(self.par_rate, k, self.shift, gamma, self.annuity, OptionSide::Payer)?;
        Ok(SwaptionAnalytics {
            expiry: self.expiry(),
            annuity: self.annuity,
            par_rate: self.par_rate,
            shift: self.shift,
            weights: self.weights.clone(),
            gamma,
            strike: k,
            price,
        })
    }
}

/// Payer swaption on `sch` struck at `strike` (ATM when `None`).
pub fn swaption_price(p: &WgParams, cs: &CurveSet, sch: &SwapSchedule, strike: Option<f64>) -> Result<SwaptionAnalytics> {
    if !(sch.start() > 0.0) {
        return Err(Error::domain(format!("swaption expiry {} must be positive", sch.start())));
    }
    FrozenSwap::new(cs, sch, p.shift_rule())?.analytics(p, strike, &expiry_covariance(p, sch.start()))
}

/// Prices many swaptions sharing a parameter set, reusing the expiry
/// covariance across cells with the same expiry.
#[derive(Debug)]
pub struct SwaptionPricer<'a> {
    params: &'a WgParams,
    curves: &'a CurveSet,
    cache: Vec<(f64, Vec<f64>)>,
}

impl<'a> SwaptionPricer<'a> {
    pub fn new(params: &'a WgParams, curves: &'a CurveSet) -> Self {
        Self { params, curves, cache: Vec::new() }
    }

    fn covariance(&mut self, expiry: f64) {
        if !self.cache.iter().any(|(t, _)| *t == expiry) {
            self.cache.push((expiry, expiry_covariance(self.params, expiry)));
        }
    }

    pub fn price(&mut self, sch: &SwapSchedule, strike: Option<f64>) -> Result<SwaptionAnalytics> {
        let frozen = FrozenSwap::new(self.curves, sch, self.params.shift_rule())?;
        self.price_frozen(&frozen, strike)
    }

    /// Prices with precomputed curve quantities; `frozen` must have been
    /// built with this pricer's shift rule and curves.
    pub fn price_frozen(&mut self, frozen: &FrozenSwap, strike: Option<f64>) -> Result<SwaptionAnalytics> {
        let p = self.params;
        self.covariance(frozen.expiry());
        let cov = &self.cache.iter().find(|(t, _)| *t == frozen.expiry()).expect("cached").1;
        frozen.analytics(p, strike, cov)
    }

    /// ATM payer with annual fixed leg.
    pub fn price_atm(&mut self, expiry: f64, tenor_years: u32, float_tenor: Tenor) -> Result<SwaptionAnalytics> {
        let sch = build_schedule(expiry, tenor_years, float_tenor, Tenor::Y1)?;
        self.price(&sch, None)
    }
}
