use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::config::{Measure, PathConfig, Scheme};
use crate::error::Result;
use crate::hjm::{bond_price, evolve_y, HjmState, VolKernel, WgParams};
use crate::marketdata::CurveSet;
use crate::math::{cholesky_psd, GaussLegendre};

/// Paths per independent RNG stream.
pub const BLOCK_SIZE: usize = 1024;

/// Conditional Gaussian transition of `X` over one step:
/// `X_b = decay * X_a + mean + factor * xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepMoments {
    pub decay: Vec<f64>,
    pub mean: Vec<f64>,
    /// Row-major `n x n` covariance.
    pub cov: Vec<f64>,
    /// Square root of `cov` (row-major).
    pub factor: Vec<f64>,
    /// Whether negative eigenvalues had to be floored at zero.
    pub floored: bool,
}

/// Drift of `X_i` at time `s` excluding the mean-reversion term.
fn drift(p: &WgParams, measure: Measure, s: f64) -> Vec<f64> {
    let n = p.factors();
    let y = evolve_y(p, s);
    let mut mu: Vec<f64> = (0..n).map(|i| (0..n).map(|k| y[i * n + k]).sum()).collect();
    if let Measure::Forward(t) = measure {
        let k = VolKernel::new(p);
        let e = k.epsilon(s);
        let mut g0 = vec![0.0; n];
        k.g0_into(s, s, t, &mut g0);
        for (i, m) in mu.iter_mut().enumerate() {
            for (kk, g) in g0.iter().enumerate() {
                *m -= p.h()[i] * p.h()[kk] * p.rho(i, kk) * e * e * g;
            }
        }
    }
    mu
}

/// Square root of a symmetric matrix; negative eigenvalues are floored at
/// zero when a Cholesky factorisation fails.
fn matrix_sqrt(m: &[f64], n: usize) -> (Vec<f64>, bool) {
    if let Some(l) = cholesky_psd(m, n) {
        return (l, false);
    }
    let eig = SymmetricEigen::new(DMatrix::from_row_slice(n, n, m));
    let mut f = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            f[i * n + k] = eig.eigenvectors[(i, k)] * eig.eigenvalues[k].max(0.0).sqrt();
        }
    }
    (f, true)
}

/// Exact transition moments of `X` over `[a, b]` under `measure`.
pub fn exact_step_moments(p: &WgParams, measure: Measure, a: f64, b: f64) -> StepMoments {
    let n = p.factors();
    let decay: Vec<f64> = p.lambda().iter().map(|l| (-l * (b - a)).exp()).collect();
    let mut mean = vec![0.0; n];
    let panels = ((b - a) / 0.5).ceil().max(1.0) as usize;
    let rule = GaussLegendre::n64();
    for k in 0..panels {
        let lo = a + (b - a) * k as f64 / panels as f64;
        let hi = if k + 1 == panels { b } else { a + (b - a) * (k + 1) as f64 / panels as f64 };
        for (s, w) in rule.mapped(lo, hi) {
            let mu = drift(p, measure, s);
            for i in 0..n {
                mean[i] += w * (-p.lambda()[i] * (b - s)).exp() * mu[i];
            }
        }
    }
    let cov = VolKernel::new(p).covariance(a, b);
    let (factor, floored) = matrix_sqrt(&cov, n);
    StepMoments { decay, mean, cov, factor, floored }
}

/// Euler transition over `[a, b]` with coefficients frozen at `a`.
fn euler_step_moments(p: &WgParams, measure: Measure, a: f64, b: f64) -> StepMoments {
    let n = p.factors();
    let dt = b - a;
    let decay: Vec<f64> = p.lambda().iter().map(|l| 1.0 - l * dt).collect();
    let mean: Vec<f64> = drift(p, measure, a).iter().map(|m| m * dt).collect();
    let e = VolKernel::new(p).epsilon(a);
    let mut factor = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            factor[i * n + k] = p.h()[i] * e * dt.sqrt() * p.rho_sqrt()[i * n + k];
        }
    }
    let mut cov = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            cov[i * n + j] = (0..n).map(|k| factor[i * n + k] * factor[j * n + k]).sum();
        }
    }
    StepMoments { decay, mean, cov, factor, floored: false }
}

/// Simulated states at the observation times.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSet {
    factors: usize,
    paths: usize,
    measure: Measure,
    antithetic: bool,
    times: Vec<f64>,
    /// Deterministic `Y` per observation time.
    y: Vec<Vec<f64>>,
    /// `[path][obs][factor]`
    x: Vec<f64>,
    /// Trapezoid integral of `sum_i X_i` from 0, `[path][obs]`.
    int_x: Vec<f64>,
    warnings: Vec<String>,
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl PathSet {
    pub fn paths(&self) -> usize {
        self.paths
    }

    pub fn factors(&self) -> usize {
        self.factors
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn time_index(&self, t: f64) -> Option<usize> {
        self.times.iter().position(|&s| (s - t).abs() <= 1e-12)
    }

    pub fn y(&self, obs: usize) -> &[f64] {
        &self.y[obs]
    }

    pub fn x(&self, path: usize, obs: usize) -> &[f64] {
        let n = self.factors;
        let o = (path * self.times.len() + obs) * n;
        &self.x[o..o + n]
    }

    pub fn state(&self, path: usize, obs: usize) -> HjmState {
        HjmState { t: self.times[obs], x: self.x(path, obs).to_vec(), y: self.y[obs].clone() }
    }

    /// `-int_0^t r(s) ds` with the exact initial-curve part and a trapezoid
    /// integral of the factors.
    pub fn log_discount(&self, cs: &CurveSet, path: usize, obs: usize) -> Result<f64> {
        Ok(cs.discount().log_discount(self.times[obs])? - self.int_x[path * self.times.len() + obs])
    }

    /// Weight turning a payoff paid at observation time `obs` into its
    /// time-0 value: `exp(-int r)` under the risk-neutral measure and
    /// `P0(T) / P_t(T)` under the `T`-forward measure.
    pub fn deflator(&self, p: &WgParams, cs: &CurveSet, path: usize, obs: usize) -> Result<f64> {
        match self.measure {
            Measure::RiskNeutral => Ok(self.log_discount(cs, path, obs)?.exp()),
            Measure::Forward(t) => {
                let pt = bond_price(p, &self.state(path, obs), cs.discount(), t)?;
                Ok(cs.discount().discount(t)? / pt)
            }
        }
    }

    /// Mean and standard error of per-path values; antithetic pairs are
    /// averaged before the variance is taken.
    pub fn estimate(&self, values: &[f64]) -> Estimate {
        let samples: Vec<f64> = if self.antithetic {
            values.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect()
        } else {
            values.to_vec()
        };
        let m = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / m;
        let var = samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0).max(1.0);
        Estimate { mean, std_error: (var / m).sqrt() }
    }

    /// Per-path values of `f(path)`, evaluated in parallel in path order.
    pub fn map_paths<F>(&self, f: F) -> Result<Vec<f64>>
    where
        F: Fn(usize) -> Result<f64> + Sync + Send,
    {
        (0..self.paths).into_par_iter().map(f).collect()
    }
}

/// Simulates `cfg.paths` paths of the state under `cfg.measure`.
///
/// Paths are split into blocks of [`BLOCK_SIZE`]; block `b` draws from the
/// ChaCha8 stream `b` of `cfg.seed`, so output does not depend on the
/// number of worker threads.
pub fn simulate(p: &WgParams, cfg: &PathConfig) -> Result<PathSet> {
    cfg.validate()?;
    let n = p.factors();
    let steps: Vec<StepMoments> = cfg
        .times
        .windows(2)
        .map(|w| match cfg.scheme {
            Scheme::Exact => exact_step_moments(p, cfg.measure, w[0], w[1]),
            Scheme::Euler => euler_step_moments(p, cfg.measure, w[0], w[1]),
        })
        .collect();
    let warnings: Vec<String> = steps
        .iter()
        .zip(cfg.times.windows(2))
        .filter(|(s, _)| s.floored)
        .map(|(_, w)| format!("step [{}, {}]: covariance not positive semidefinite, eigenvalues floored at 0", w[0], w[1]))
        .collect();
    let obs = cfg.observed_indices();
    let n_obs = obs.len();
    let mut is_obs = vec![usize::MAX; cfg.times.len()];
    for (o, &i) in obs.iter().enumerate() {
        is_obs[i] = o;
    }

    let blocks = cfg.paths.div_ceil(BLOCK_SIZE);
    let results: Vec<(Vec<f64>, Vec<f64>)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = BLOCK_SIZE.min(cfg.paths - b * BLOCK_SIZE);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(b as u64);
            let mut xs = vec![0.0; count * n_obs * n];
            let mut ints = vec![0.0; count * n_obs];
            let mut xi = vec![0.0; n * steps.len()];
            for path in 0..count {
                if !cfg.antithetic || path % 2 == 0 {
                    for v in xi.iter_mut() {
                        *v = rng.sample(StandardNormal);
                    }
                } else {
                    for v in xi.iter_mut() {
                        *v = -*v;
                    }
                }
                let mut x = vec![0.0; n];
                let mut integral = 0.0;
                for (k, st) in steps.iter().enumerate() {
                    let dt = cfg.times[k + 1] - cfg.times[k];
                    let before: f64 = x.iter().sum();
                    let z = &xi[k * n..(k + 1) * n];
                    let mut next = vec![0.0; n];
                    for i in 0..n {
                        let mut v = st.decay[i] * x[i] + st.mean[i];
                        for j in 0..n {
                            v += st.factor[i * n + j] * z[j];
                        }
                        next[i] = v;
                    }
                    x = next;
                    integral += 0.5 * (before + x.iter().sum::<f64>()) * dt;
                    let o = is_obs[k + 1];
                    if o != usize::MAX {
                        xs[(path * n_obs + o) * n..(path * n_obs + o + 1) * n].copy_from_slice(&x);
                        ints[path * n_obs + o] = integral;
                    }
                }
            }
            (xs, ints)
        })
        .collect();

    let mut x = Vec::with_capacity(cfg.paths * n_obs * n);
    let mut int_x = Vec::with_capacity(cfg.paths * n_obs);
    for (xs, ints) in results {
        x.extend(xs);
        int_x.extend(ints);
    }
    let times: Vec<f64> = obs.iter().map(|&i| cfg.times[i]).collect();
    let y = times.iter().map(|&t| evolve_y(p, t)).collect();
    Ok(PathSet {
        factors: n,
        paths: cfg.paths,
        measure: cfg.measure,
        antithetic: cfg.antithetic,
        times,
        y,
        x,
        int_x,
        warnings,
    })
}
