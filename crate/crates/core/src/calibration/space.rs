use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::variant::ModelVariant;
use crate::error::{Error, Result};
use crate::hjm::WgParams;

/// Box bounds for one coordinate of the optimisation vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub lo: f64,
    pub hi: f64,
}

impl Bound {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn clamp(self, v: f64) -> f64 {
        v.clamp(self.lo, self.hi)
    }
}

/// Coordinates of the optimisation vector.
///
/// Mean reversions are ordered by construction: `lambda2 = lambda1 + exp(u)`.
/// The dampings `eta1, eta2` only exist for the weighted variant.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpace {
    variant: ModelVariant,
    names: Vec<&'static str>,
    bounds: Vec<Bound>,
}

const WG_NAMES: [&str; 10] = ["lambda1", "log_dlambda", "h1", "h2", "eta1", "eta2", "rho", "beta0", "beta1", "beta2"];

fn default_bound(name: &str) -> Bound {
    match name {
        "lambda1" => Bound::new(0.0, 5.0),
        "log_dlambda" => Bound::new((1e-4f64).ln(), 20f64.ln()),
        "h1" | "h2" => Bound::new(1e-5, 0.5),
        "eta1" | "eta2" => Bound::new(0.0, 10.0),
        "rho" => Bound::new(-0.999, 0.999),
        "beta0" => Bound::new(0.05, 10.0),
        "beta1" => Bound::new(1e-4, 20.0),
        "beta2" => Bound::new(0.01, 10.0),
        _ => unreachable!("unknown coordinate {name}"),
    }
}

impl ParamSpace {
    pub fn new(variant: ModelVariant) -> Self {
        let names: Vec<&'static str> = WG_NAMES
            .iter()
            .copied()
            .filter(|n| variant.has_eta() || !n.starts_with("eta"))
            .collect();
        let bounds = names.iter().map(|n| default_bound(n)).collect();
        Self { variant, names, bounds }
    }

    /// Replaces bounds by name; unknown names are an error.
    pub fn with_bounds(mut self, overrides: &BTreeMap<String, [f64; 2]>) -> Result<Self> {
        for (name, [lo, hi]) in overrides {
            let i = self.index(name).ok_or_else(|| {
                Error::InvalidParams(format!("unknown bound '{name}' for variant {}", self.variant))
            })?;
            if !(lo <= hi) {
                return Err(Error::InvalidParams(format!("bound '{name}' has lo > hi")));
            }
            self.bounds[i] = Bound::new(*lo, *hi);
        }
        Ok(self)
    }

    pub fn variant(&self) -> ModelVariant {
        self.variant
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[&'static str] {
        &self.names
    }

    pub fn bounds(&self) -> &[Bound] {
        &self.bounds
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| *n == name)
    }

    pub fn project(&self, theta: &mut [f64]) {
        for (v, b) in theta.iter_mut().zip(&self.bounds) {
            *v = b.clamp(*v);
        }
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == self.dim() && theta.iter().zip(&self.bounds).all(|(v, b)| *v >= b.lo && *v <= b.hi)
    }

    pub fn to_params(&self, theta: &[f64]) -> Result<WgParams> {
        if theta.len() != self.dim() {
            return Err(Error::InvalidParams(format!("expected {} coordinates, got {}", self.dim(), theta.len())));
        }
        let get = |n: &str| theta[self.index(n).expect("known coordinate")];
        let l1 = get("lambda1");
        let l2 = l1 + get("log_dlambda").exp();
        let eta = if self.variant.has_eta() { [get("eta1"), get("eta2")] } else { [0.0, 0.0] };
        WgParams::two_factor(
            [l1, l2],
            [get("h1"), get("h2")],
            eta,
            get("rho"),
            get("beta0"),
            get("beta1"),
            get("beta2"),
        )
    }

    /// Inverse of [`to_params`](Self::to_params) for a two-factor ordered
    /// parameter set. Dampings are dropped for variants without them.
    pub fn from_params(&self, p: &WgParams) -> Result<Vec<f64>> {
        if p.factors() != 2 || !p.is_ordered() {
            return Err(Error::InvalidParams("expected two factors with lambda1 < lambda2".into()));
        }
        let [b0, b1, b2] = p.beta();
        Ok(self
            .names
            .iter()
            .map(|n| match *n {
                "lambda1" => p.lambda()[0],
                "log_dlambda" => (p.lambda()[1] - p.lambda()[0]).ln(),
                "h1" => p.h()[0],
                "h2" => p.h()[1],
                "eta1" => p.eta()[0],
                "eta2" => p.eta()[1],
                "rho" => p.rho(0, 1),
                "beta0" => b0,
                "beta1" => b1,
                "beta2" => b2,
                _ => unreachable!(),
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled::published_params;

    #[test]
    fn dimensions() {
        assert_eq!(ParamSpace::new(ModelVariant::Wg2pp).dim(), 10);
        assert_eq!(ParamSpace::new(ModelVariant::Mmg).dim(), 8);
        assert_eq!(ParamSpace::new(ModelVariant::G2pp).dim(), 8);
    }

    #[test]
    fn round_trip_params() {
        let s = ParamSpace::new(ModelVariant::Wg2pp);
        let p = published_params(ModelVariant::Wg2pp);
        let th = s.from_params(&p).unwrap();
        assert!(s.contains(&th));
        let q = s.to_params(&th).unwrap();
        assert!((q.lambda()[1] - 4.7344).abs() < 1e-14);
        assert_eq!(q.eta(), p.eta());
    }

    #[test]
    fn ordering_by_construction() {
        let s = ParamSpace::new(ModelVariant::Mmg);
        let mut th = vec![0.3, -20.0, 0.01, 0.02, -0.5, 1.0, 1.0, 0.5];
        s.project(&mut th);
        assert!(s.to_params(&th).unwrap().is_ordered());
    }

    #[test]
    fn bound_overrides() {
        let mut o = BTreeMap::new();
        o.insert("rho".to_string(), [-0.5, 0.5]);
        let s = ParamSpace::new(ModelVariant::Mmg).with_bounds(&o).unwrap();
        assert_eq!(s.bounds()[s.index("rho").unwrap()], Bound::new(-0.5, 0.5));
        o.insert("eta1".to_string(), [0.0, 1.0]);
        assert!(ParamSpace::new(ModelVariant::Mmg).with_bounds(&o).is_err());
    }
}
