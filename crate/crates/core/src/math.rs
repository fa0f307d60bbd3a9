//! Small numerical helpers shared across modules.

use std::sync::OnceLock;

use statrs::distribution::{ContinuousCDF, Normal};

/// Standard normal cumulative distribution function.
pub fn norm_cdf(x: f64) -> f64 {
    static STD: OnceLock<Normal> = OnceLock::new();
    STD.get_or_init(|| Normal::standard()).cdf(x)
}

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `(1 - exp(-z)) / z`, continuous at `z = 0`.
///
/// A four-term Taylor series is used below `|z| < 1e-6`.
pub fn one_minus_exp_over(z: f64) -> f64 {
    if z.abs() < 1e-6 {
        1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0
    } else {
        -(-z).exp_m1() / z
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Shared 64-node rule.
    pub fn n64() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(64))
    }

    /// Shared 16-node rule.
    pub fn n16() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(16))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node/weight pairs mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

/// Pseudo square root of a symmetric positive semidefinite matrix (row-major,
/// `n x n`): a lower-triangular `r` with `r * r^T = m`.
///
/// Zero pivots are tolerated so that singular correlations such as
/// `rho = +-1` still factor.
pub fn cholesky_psd(m: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut r = vec![0.0; n * n];
    let scale = (0..n).map(|i| m[i * n + i].abs()).fold(0.0, f64::max).max(1e-300);
    let tol = 1e-13 * scale;
    for j in 0..n {
        let mut d = m[j * n + j];
        for k in 0..j {
            d -= r[j * n + k] * r[j * n + k];
        }
        if d < -tol {
            return None;
        }
        if d <= tol {
            // Zero pivot: the rest of the column must vanish too.
            for i in (j + 1)..n {
                let mut s = m[i * n + j];
                for k in 0..j {
                    s -= r[i * n + k] * r[j * n + k];
                }
                if s.abs() > 1e-7 * scale.sqrt() {
                    return None;
                }
            }
            continue;
        }
        let djj = d.sqrt();
        r[j * n + j] = djj;
        for i in (j + 1)..n {
            let mut s = m[i * n + j];
            for k in 0..j {
                s -= r[i * n + k] * r[j * n + k];
            }
            r[i * n + j] = s / djj;
        }
    }
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(8);
        // degree 15 is exact with 8 nodes
        let v = rule.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
        let w: f64 = rule.mapped(-1.0, 1.0).map(|(_, w)| w).sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_64_exponential() {
        let v = GaussLegendre::n64().integrate(0.0, 3.0, |x| (-x).exp());
        assert!((v - (1.0 - (-3.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn taylor_branch_matches_expm1() {
        for &z in &[1e-7, 5e-7, 9.9e-7, -3e-7] {
            let direct = -(-z as f64).exp_m1() / z;
            assert!((one_minus_exp_over(z) - direct).abs() < 1e-15);
        }
        assert_eq!(one_minus_exp_over(0.0), 1.0);
    }

    #[test]
    fn psd_factor_handles_perfect_correlation() {
        let m = [1.0, -1.0, -1.0, 1.0];
        let r = cholesky_psd(&m, 2).unwrap();
        assert_eq!(r[0], 1.0);
        assert_eq!(r[2], -1.0);
        assert_eq!(r[3], 0.0);
        assert!(cholesky_psd(&[1.0, 2.0, 2.0, 1.0], 2).is_none());
    }

    #[test]
    fn normal_cdf_symmetry() {
        assert!((norm_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((norm_cdf(1.3) + norm_cdf(-1.3) - 1.0).abs() < 1e-15);
    }
}
