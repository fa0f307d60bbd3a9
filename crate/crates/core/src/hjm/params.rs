use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::marketdata::Tenor;
use crate::math::cholesky_psd;

const TENOR_MATCH: f64 = 1e-9;

/// Piecewise-constant override of the Libor shift for one tenor and a
/// maturity bucket `[t_min, t_max)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftOverride {
    pub t_min: f64,
    pub t_max: f64,
    pub tenor_months: u32,
    pub value: f64,
}

/// Shift rule `kappa(T, x)`: `1/x` unless an override bucket matches.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ShiftRule {
    pub overrides: Vec<ShiftOverride>,
}

impl ShiftRule {
    pub fn inverse_tenor() -> Self {
        Self::default()
    }

    pub fn kappa(&self, maturity: f64, x: f64) -> f64 {
        self.overrides
            .iter()
            .find(|o| {
                (Tenor::from_months(o.tenor_months).map(|t| t.years()).unwrap_or(f64::NAN) - x).abs()
                    < TENOR_MATCH
                    && maturity >= o.t_min
                    && maturity < o.t_max
            })
            .map(|o| o.value)
            .unwrap_or(1.0 / x)
    }
}

/// Multiplier on `qhat(T, x)` for one tenor and maturity bucket
/// `[t_min, t_max)`; the exact-fit hook writes these.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QScale {
    pub t_min: f64,
    pub t_max: f64,
    pub tenor_months: u32,
    pub factor: f64,
}

/// Weighted-Gaussian (WGn++) model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct WgParams {
    lambda: Vec<f64>,
    h: Vec<f64>,
    eta: Vec<f64>,
    rho: Vec<f64>,
    rho_sqrt: Vec<f64>,
    beta: [f64; 3],
    shift: ShiftRule,
    q_scales: Vec<QScale>,
}

impl WgParams {
    /// `rho` is the full `n x n` correlation matrix in row-major order.
    pub fn new(lambda: Vec<f64>, h: Vec<f64>, eta: Vec<f64>, rho: Vec<f64>, beta: [f64; 3]) -> Result<Self> {
        let n = lambda.len();
        if n == 0 {
            return Err(Error::InvalidParams("need at least one factor".into()));
        }
        if h.len() != n || eta.len() != n || rho.len() != n * n {
            return Err(Error::InvalidParams(format!(
                "dimension mismatch: {n} factors, {} h, {} eta, {} rho entries",
                h.len(),
                eta.len(),
                rho.len()
            )));
        }
        let all_finite = lambda.iter().chain(&h).chain(&eta).chain(&rho).chain(&beta).all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if let Some(l) = lambda.iter().find(|&&l| l < 0.0) {
            return Err(Error::InvalidParams(format!("mean reversion {l} is negative")));
        }
        if let Some(v) = h.iter().find(|&&v| v < 0.0) {
            return Err(Error::InvalidParams(format!("volatility scale {v} is negative")));
        }
        if beta.iter().any(|&b| b <= 0.0) {
            return Err(Error::InvalidParams(format!("beta parameters must be positive, got {beta:?}")));
        }
        for i in 0..n {
            if (rho[i * n + i] - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParams("correlation diagonal must be 1".into()));
            }
            for j in 0..i {
                let v = rho[i * n + j];
                if (v - rho[j * n + i]).abs() > 1e-12 || v.abs() > 1.0 {
                    return Err(Error::InvalidParams(format!("bad correlation entry ({i},{j}) = {v}")));
                }
            }
        }
        let rho_sqrt = cholesky_psd(&rho, n)
            .ok_or_else(|| Error::InvalidParams("correlation matrix is not positive semidefinite".into()))?;
        Ok(Self {
            lambda,
            h,
            eta,
            rho,
            rho_sqrt,
            beta,
            shift: ShiftRule::default(),
            q_scales: Vec::new(),
        })
    }

    /// Two-factor parameterization in the order used for calibration reports.
    #[allow(clippy::too_many_arguments)]
    pub fn two_factor(
        lambda: [f64; 2],
        h: [f64; 2],
        eta: [f64; 2],
        rho12: f64,
        beta0: f64,
        beta1: f64,
        beta2: f64,
    ) -> Result<Self> {
        Self::new(
            lambda.to_vec(),
            h.to_vec(),
            eta.to_vec(),
            vec![1.0, rho12, rho12, 1.0],
            [beta0, beta1, beta2],
        )
    }

    pub fn with_shift_rule(mut self, shift: ShiftRule) -> Self {
        self.shift = shift;
        self
    }

    pub fn with_q_scales(mut self, q_scales: Vec<QScale>) -> Self {
        self.q_scales = q_scales;
        self
    }

    pub fn factors(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn rho(&self, i: usize, j: usize) -> f64 {
        self.rho[i * self.factors() + j]
    }

    /// Lower-triangular `R` with `R R^T = rho`, row-major.
    pub fn rho_sqrt(&self) -> &[f64] {
        &self.rho_sqrt
    }

    pub fn beta(&self) -> [f64; 3] {
        self.beta
    }

    pub fn shift_rule(&self) -> &ShiftRule {
        &self.shift
    }

    pub fn q_scales(&self) -> &[QScale] {
        &self.q_scales
    }

    /// Whether mean reversions are strictly increasing.
    pub fn is_ordered(&self) -> bool {
        self.lambda.windows(2).all(|w| w[0] < w[1])
    }

    pub fn kappa(&self, maturity: f64, x: f64) -> f64 {
        self.shift.kappa(maturity, x)
    }

    /// Scalar multiplier `qhat` scale for `(T, x)`; 1 unless overridden.
    pub fn q_scale(&self, maturity: f64, x: f64) -> f64 {
        self.q_scales
            .iter()
            .find(|q| {
                (q.tenor_months as f64 / 12.0 - x).abs() < TENOR_MATCH
                    && maturity >= q.t_min
                    && maturity < q.t_max
            })
            .map(|q| q.factor)
            .unwrap_or(1.0)
    }

    /// Copy with every `h_i` multiplied by `factor`.
    pub fn scaled_h(&self, factor: f64) -> Self {
        let mut p = self.clone();
        p.h.iter_mut().for_each(|v| *v *= factor);
        p
    }

    /// Copy with all tenor dampings set to zero.
    pub fn without_eta(&self) -> Self {
        let mut p = self.clone();
        p.eta.iter_mut().for_each(|v| *v = 0.0);
        p
    }

    pub fn to_file(&self) -> ParamsFile {
        let n = self.factors();
        let mut rho = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in 0..=i {
                rho.push(self.rho(i, j));
            }
        }
        ParamsFile {
            n,
            lambda: self.lambda.clone(),
            h: self.h.clone(),
            eta: self.eta.clone(),
            rho,
            beta0: self.beta[0],
            beta1: self.beta[1],
            beta2: self.beta[2],
            shift_rule: "inverse_tenor".into(),
            shift_override: self.shift.overrides.clone(),
            q_scale: self.q_scales.clone(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ParamsFile =
            toml::from_str(text).map_err(|e| Error::InvalidParams(format!("parameter file: {e}")))?;
        file.into_params()
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.to_file()).expect("parameter file serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }
}

/// On-disk parameter file (TOML). `rho` lists the lower triangle row-major,
/// diagonal included.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamsFile {
    pub n: usize,
    pub lambda: Vec<f64>,
    pub h: Vec<f64>,
    #[serde(default)]
    pub eta: Vec<f64>,
    pub rho: Vec<f64>,
    pub beta0: f64,
    pub beta1: f64,
    pub beta2: f64,
    #[serde(default = "default_shift_rule")]
    pub shift_rule: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shift_override: Vec<ShiftOverride>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub q_scale: Vec<QScale>,
}

fn default_shift_rule() -> String {
    "inverse_tenor".into()
}

impl ParamsFile {
    pub fn into_params(self) -> Result<WgParams> {
        let n = self.n;
        if self.rho.len() != n * (n + 1) / 2 {
            return Err(Error::InvalidParams(format!(
                "rho needs {} lower-triangle entries, got {}",
                n * (n + 1) / 2,
                self.rho.len()
            )));
        }
        let mut rho = vec![0.0; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in 0..=i {
                rho[i * n + j] = self.rho[k];
                rho[j * n + i] = self.rho[k];
                k += 1;
            }
        }
        let eta = if self.eta.is_empty() { vec![0.0; n] } else { self.eta };
        if self.shift_rule != "inverse_tenor" {
            return Err(Error::InvalidParams(format!(
                "unknown shift_rule '{}' (only inverse_tenor with optional overrides)",
                self.shift_rule
            )));
        }
        if self.lambda.len() != n {
            return Err(Error::InvalidParams(format!("n = {n} but {} lambdas", self.lambda.len())));
        }
        Ok(WgParams::new(self.lambda, self.h, eta, rho, [self.beta0, self.beta1, self.beta2])?
            .with_shift_rule(ShiftRule {
                overrides: self.shift_override,
            })
            .with_q_scales(self.q_scale))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wg() -> WgParams {
        WgParams::two_factor([0.0073, 4.7344], [0.0059, 0.0411], [0.1581, 0.8894], -0.8577, 1.3160, 1.3327, 0.5900)
            .unwrap()
    }

    #[test]
    fn pseudo_square_root_reproduces_rho() {
        let p = wg();
        let r = p.rho_sqrt();
        let n = 2;
        for i in 0..n {
            for j in 0..n {
                let v: f64 = (0..n).map(|k| r[i * n + k] * r[j * n + k]).sum();
                assert!((v - p.rho(i, j)).abs() < 1e-12);
            }
        }
        assert_eq!(r[1], 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(WgParams::two_factor([-0.1, 1.0], [0.01, 0.01], [0.0; 2], 0.0, 1.0, 1.0, 1.0).is_err());
        assert!(WgParams::two_factor([0.1, 1.0], [0.01, 0.01], [0.0; 2], 1.5, 1.0, 1.0, 1.0).is_err());
        assert!(WgParams::two_factor([0.1, 1.0], [0.01, 0.01], [0.0; 2], 0.2, 0.0, 1.0, 1.0).is_err());
        assert!(WgParams::new(vec![0.1], vec![0.01, 0.02], vec![0.0], vec![1.0], [1.0; 3]).is_err());
    }

    #[test]
    fn default_shift_is_inverse_tenor() {
        let p = wg();
        assert_eq!(p.kappa(3.0, 0.25), 4.0);
        let x = 1e-3;
        assert!((x * p.kappa(1.0, x) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shift_override_applies_in_bucket_only() {
        let rule = ShiftRule {
            overrides: vec![ShiftOverride {
                t_min: 1.0,
                t_max: 2.0,
                tenor_months: 6,
                value: 0.05,
            }],
        };
        assert_eq!(rule.kappa(1.5, 0.5), 0.05);
        assert_eq!(rule.kappa(2.5, 0.5), 2.0);
        assert_eq!(rule.kappa(1.5, 0.25), 4.0);
    }

    #[test]
    fn toml_round_trip() {
        let p = wg().with_q_scales(vec![QScale {
            t_min: 1.0,
            t_max: 2.0,
            tenor_months: 3,
            factor: 1.1,
        }]);
        let text = p.to_toml_string();
        let back = WgParams::from_toml_str(&text).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn ordering_flag() {
        assert!(wg().is_ordered());
        let p = WgParams::two_factor([1.0, 0.5], [0.01, 0.01], [0.0; 2], 0.0, 1.0, 1.0, 1.0).unwrap();
        assert!(!p.is_ordered());
    }
}
