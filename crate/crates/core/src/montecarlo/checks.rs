use serde::{Deserialize, Serialize};

use super::config::{grid_through, Measure, PathConfig, Scheme};
use super::engine::{simulate, Estimate};
use crate::error::{Error, Result};
use crate::hjm::{bond_price, reconstruct_forward_libor, WgParams};
use crate::marketdata::{CurveSet, Tenor};
use crate::pricing::{par_swap_rate, SwapSchedule};

/// Outcome of one martingale test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleReport {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub expected: f64,
    pub z: f64,
}

impl MartingaleReport {
    fn new(name: String, est: Estimate, expected: f64) -> Self {
        let diff = est.mean - expected;
        // Agreement at rounding level counts as exact; with h = 0 the sample
        // spread is pure rounding noise and would inflate z.
        let z = if diff.abs() <= 1e-12 * expected.abs().max(1.0) {
            0.0
        } else if est.std_error > 0.0 {
            diff / est.std_error
        } else {
            diff.signum() * f64::INFINITY
        };
        Self { name, estimate: est.mean, std_error: est.std_error, expected, z }
    }

    pub fn passes(&self, threshold: f64) -> bool {
        self.z.abs() < threshold
    }
}

fn grid_index(times: &[f64], t: f64, what: &str) -> Result<()> {
    if times.iter().any(|&s| (s - t).abs() <= 1e-12) {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} {t} is not on the simulation grid")))
    }
}

fn on_grid(times: &[f64], t: f64) -> f64 {
    *times.iter().find(|&&s| (s - t).abs() <= 1e-12).expect("checked")
}

/// Deflated unit payoff at `maturity` against `P0(maturity)`.
pub fn check_bond_martingale(p: &WgParams, cs: &CurveSet, cfg: &PathConfig, maturity: f64) -> Result<MartingaleReport> {
    grid_index(&cfg.times, maturity, "bond maturity")?;
    let cfg = cfg.clone().with_observe(vec![on_grid(&cfg.times, maturity)]);
    let set = simulate(p, &cfg)?;
    let vals = set.map_paths(|k| set.deflator(p, cs, k, 0))?;
    Ok(MartingaleReport::new(format!("bond T={maturity}"), set.estimate(&vals), cs.discount().discount(maturity)?))
}

/// Mean of `kappa + F_{T-x}(T, x)` against `kappa + F0(T, x)`.
///
/// Under the `T`-forward measure this is a martingale test. Under the
/// risk-neutral measure the values are not reweighted by the numeraire,
/// which makes the test a negative control.
pub fn check_forward_martingale(p: &WgParams, cs: &CurveSet, cfg: &PathConfig, maturity: f64, tenor: Tenor) -> Result<MartingaleReport> {
    if let Measure::Forward(m) = cfg.measure {
        if (m - maturity).abs() > 1e-12 {
            return Err(Error::domain(format!("forward check at T={maturity} needs the T-forward measure, got {m}")));
        }
    }
    let fixing = maturity - tenor.years();
    grid_index(&cfg.times, fixing, "fixing time")?;
    let cfg = cfg.clone().with_observe(vec![on_grid(&cfg.times, fixing)]);
    let set = simulate(p, &cfg)?;
    let kappa = p.kappa(maturity, tenor.years());
    let vals = set.map_paths(|k| Ok(kappa + reconstruct_forward_libor(p, &set.state(k, 0), cs, maturity, tenor)?))?;
    let expected = kappa + cs.forward(maturity, tenor)?;
    let tag = match cfg.measure {
        Measure::RiskNeutral => "forward(rn, unweighted)",
        Measure::Forward(_) => "forward",
    };
    Ok(MartingaleReport::new(format!("{tag} T={maturity} x={tenor}"), set.estimate(&vals), expected))
}

/// Monte Carlo payer swaption price `E[deflator * (float - K * A)^+]` with
/// the annuity and float leg reconstructed from the state at expiry.
/// `strike = None` uses the time-0 par rate.
pub fn mc_swaption_price(p: &WgParams, cs: &CurveSet, sch: &SwapSchedule, strike: Option<f64>, cfg: &PathConfig) -> Result<Estimate> {
    let ta = sch.start();
    grid_index(&cfg.times, ta, "swaption expiry")?;
    let k = match strike {
        Some(k) => k,
        None => par_swap_rate(cs, sch)?,
    };
    let cfg = cfg.clone().with_observe(vec![on_grid(&cfg.times, ta)]);
    let set = simulate(p, &cfg)?;
    let tenor = sch.float_tenor();
    let vals = set.map_paths(|path| {
        let s = set.state(path, 0);
        let mut annuity = 0.0;
        for &t in &sch.fixed_times()[1..] {
            annuity += sch.fixed_accrual() * bond_price(p, &s, cs.discount(), t)?;
        }
        let mut float = 0.0;
        for &t in &sch.float_times()[1..] {
            float += sch.float_accrual() * bond_price(p, &s, cs.discount(), t)? * reconstruct_forward_libor(p, &s, cs, t, tenor)?;
        }
        Ok((float - k * annuity).max(0.0) * set.deflator(p, cs, path, 0)?)
    })?;
    Ok(set.estimate(&vals))
}

/// Battery of martingale checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSpec {
    pub maturities: Vec<f64>,
    pub tenors: Vec<Tenor>,
    pub paths: usize,
    pub seed: u64,
    pub antithetic: bool,
    /// Largest step of the risk-neutral grid used for bond checks.
    pub max_step: f64,
    pub scheme: Scheme,
    /// Scale `h` by this factor and run forward checks under the
    /// risk-neutral measure without numeraire reweighting.
    pub negative_control: Option<f64>,
}

impl Default for CheckSpec {
    fn default() -> Self {
        Self {
            maturities: vec![1.0, 2.0, 5.0, 10.0],
            tenors: vec![Tenor::M3, Tenor::M6],
            paths: 100_000,
            seed: 20100812,
            antithetic: false,
            max_step: 1.0 / 12.0,
            scheme: Scheme::Exact,
            negative_control: None,
        }
    }
}

/// Runs bond checks (risk-neutral) and forward checks (`T`-forward, one
/// exact step to each fixing). In negative-control mode only the forward
/// checks run, under the risk-neutral measure with scaled `h`.
pub fn run_checks(p: &WgParams, cs: &CurveSet, spec: &CheckSpec) -> Result<Vec<MartingaleReport>> {
    let mut out = Vec::new();
    let params = match spec.negative_control {
        Some(f) => p.scaled_h(f),
        None => p.clone(),
    };
    let base = |times: Vec<f64>, measure: Measure| {
        PathConfig::new(spec.paths, times, measure, spec.seed)
            .with_antithetic(spec.antithetic)
            .with_scheme(spec.scheme)
    };
    if spec.negative_control.is_none() && !spec.maturities.is_empty() {
        let grid = grid_through(&spec.maturities, spec.max_step);
        let cfg = base(grid, Measure::RiskNeutral).with_observe(spec.maturities.clone());
        let set = simulate(&params, &cfg)?;
        for &t in &spec.maturities {
            let obs = set.time_index(t).expect("maturity on grid");
            let vals = set.map_paths(|k| set.deflator(&params, cs, k, obs))?;
            out.push(MartingaleReport::new(format!("bond T={t}"), set.estimate(&vals), cs.discount().discount(t)?));
        }
    }
    for &t in &spec.maturities {
        for &x in &spec.tenors {
            let fixing = t - x.years();
            if fixing <= 0.0 {
                continue;
            }
            let measure = if spec.negative_control.is_some() { Measure::RiskNeutral } else { Measure::Forward(t) };
            let grid = if spec.scheme == Scheme::Exact { vec![0.0, fixing] } else { grid_through(&[fixing], spec.max_step) };
            out.push(check_forward_martingale(&params, cs, &base(grid, measure), t, x)?);
        }
    }
    Ok(out)
}
