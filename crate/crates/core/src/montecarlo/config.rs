use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probability measure the state is simulated under.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Measure {
    /// Bank-account numeraire.
    RiskNeutral,
    /// Numeraire `P_t(T)` for the given maturity.
    Forward(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Scheme {
    /// Exact conditional Gaussian transition between grid points.
    #[default]
    Exact,
    /// Euler-Maruyama on the grid.
    Euler,
}

/// Simulation settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathConfig {
    pub paths: usize,
    /// Step grid, strictly increasing from 0.
    pub times: Vec<f64>,
    /// Grid points at which states are stored; all grid points when empty.
    pub observe: Vec<f64>,
    pub measure: Measure,
    pub seed: u64,
    pub antithetic: bool,
    pub scheme: Scheme,
}

/// `steps + 1` equally spaced points on `[0, end]`.
pub fn uniform_grid(end: f64, steps: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (0..=steps).map(|k| end * k as f64 / steps as f64).collect();
    if let Some(last) = g.last_mut() {
        *last = end;
    }
    g
}

/// Grid with steps of at most `max_step` that contains every point of `must`.
pub fn grid_through(must: &[f64], max_step: f64) -> Vec<f64> {
    let mut knots: Vec<f64> = std::iter::once(0.0).chain(must.iter().copied()).collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let mut g = vec![0.0];
    for w in knots.windows(2) {
        let n = ((w[1] - w[0]) / max_step).ceil().max(1.0) as usize;
        for k in 1..n {
            g.push(w[0] + (w[1] - w[0]) * k as f64 / n as f64);
        }
        g.push(w[1]);
    }
    g
}

impl PathConfig {
    pub fn new(paths: usize, times: Vec<f64>, measure: Measure, seed: u64) -> Self {
        Self { paths, times, observe: Vec::new(), measure, seed, antithetic: false, scheme: Scheme::Exact }
    }

    pub fn with_antithetic(mut self, on: bool) -> Self {
        self.antithetic = on;
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_observe(mut self, observe: Vec<f64>) -> Self {
        self.observe = observe;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths < 2 {
            return Err(Error::domain("at least two paths are required"));
        }
        if self.antithetic && self.paths % 2 != 0 {
            return Err(Error::domain("antithetic sampling needs an even path count"));
        }
        if self.times.first() != Some(&0.0) {
            return Err(Error::domain("time grid must start at 0"));
        }
        if !self.times.windows(2).all(|w| w[1] > w[0]) || !self.times.iter().all(|t| t.is_finite()) {
            return Err(Error::Ordering("time grid must be strictly increasing".into()));
        }
        if let Some(t) = self.observe.iter().find(|t| !self.times.contains(t)) {
            return Err(Error::domain(format!("observation time {t} is not on the grid")));
        }
        if let Measure::Forward(m) = self.measure {
            let last = *self.times.last().expect("non-empty grid");
            if !(m >= last) {
                return Err(Error::domain(format!("forward measure maturity {m} precedes grid end {last}")));
            }
        }
        Ok(())
    }

    /// Indices of the stored grid points.
    pub(crate) fn observed_indices(&self) -> Vec<usize> {
        if self.observe.is_empty() {
            (0..self.times.len()).collect()
        } else {
            let mut idx: Vec<usize> = self
                .observe
                .iter()
                .map(|t| self.times.iter().position(|g| g == t).expect("validated"))
                .collect();
            idx.sort_unstable();
            idx.dedup();
            idx
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let g = uniform_grid(1.0, 4);
        assert!(PathConfig::new(10, g.clone(), Measure::RiskNeutral, 1).validate().is_ok());
        assert!(PathConfig::new(1, g.clone(), Measure::RiskNeutral, 1).validate().is_err());
        assert!(PathConfig::new(10, vec![0.0, 1.0, 0.5], Measure::RiskNeutral, 1).validate().is_err());
        assert!(PathConfig::new(10, vec![0.1, 1.0], Measure::RiskNeutral, 1).validate().is_err());
        assert!(PathConfig::new(10, g.clone(), Measure::Forward(0.5), 1).validate().is_err());
        assert!(PathConfig::new(11, g.clone(), Measure::RiskNeutral, 1).with_antithetic(true).validate().is_err());
        assert!(PathConfig::new(10, g, Measure::RiskNeutral, 1).with_observe(vec![0.3]).validate().is_err());
    }

    #[test]
    fn grid_contains_knots() {
        let g = grid_through(&[1.75, 0.5], 0.1);
        assert!(g.contains(&0.5) && g.contains(&1.75));
        assert!(g.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] <= 0.1 + 1e-15));
    }
}
