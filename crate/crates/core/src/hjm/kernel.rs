use super::params::WgParams;
use crate::error::{Error, Result};
use crate::math::{one_minus_exp_over, GaussLegendre};

/// Common volatility shape `eps(t) = 1 + (beta0 - 1 + beta1 t) exp(-beta2 t)`.
pub fn epsilon(p: &WgParams, t: f64) -> f64 {
    let [b0, b1, b2] = p.beta();
    1.0 + (b0 - 1.0 + b1 * t) * (-b2 * t).exp()
}

/// `g_i(t, u) = exp(-lambda_i (u - t))` for `u >= t`.
pub fn kernel_g(p: &WgParams, i: usize, t: f64, u: f64) -> Result<f64> {
    if u < t {
        return Err(Error::domain(format!("kernel g needs u >= t (t = {t}, u = {u})")));
    }
    Ok((-p.lambda()[i] * (u - t)).exp())
}

/// `G0(t, T0, T1) = int_{T0}^{T1} g(t, y) dy`, one entry per factor.
pub fn kernel_g0(p: &WgParams, t: f64, t0: f64, t1: f64) -> Result<Vec<f64>> {
    check_order(t, t0, t1)?;
    let mut out = vec![0.0; p.factors()];
    VolKernel::new(p).g0_into(t, t0, t1, &mut out);
    Ok(out)
}

/// `G(t, T0, T1; T, x) = int_{T0}^{T1} q(y; T, x) g(t, y) dy`.
pub fn kernel_g_tenor(p: &WgParams, t: f64, t0: f64, t1: f64, maturity: f64, x: f64) -> Result<Vec<f64>> {
    check_order(t, t0, t1)?;
    let mut out = vec![0.0; p.factors()];
    VolKernel::new(p).g_tenor_into(t, t0, t1, maturity, x, &mut out);
    Ok(out)
}

fn check_order(t: f64, t0: f64, t1: f64) -> Result<()> {
    if !(t <= t0 && t0 <= t1) {
        return Err(Error::domain(format!(
            "kernel integral needs t <= T0 <= T1 (got {t}, {t0}, {t1})"
        )));
    }
    Ok(())
}

/// Closed-form volatility kernels bound to a parameter set.
#[derive(Debug, Clone, Copy)]
pub struct VolKernel<'a> {
    params: &'a WgParams,
}

impl<'a> VolKernel<'a> {
    pub fn new(params: &'a WgParams) -> Self {
        Self { params }
    }

    pub fn params(&self) -> &'a WgParams {
        self.params
    }

    pub fn epsilon(&self, t: f64) -> f64 {
        epsilon(self.params, t)
    }

    /// Per-factor `G0` written into `out`; ordering is not checked.
    pub fn g0_into(&self, t: f64, t0: f64, t1: f64, out: &mut [f64]) {
        for (o, &l) in out.iter_mut().zip(self.params.lambda()) {
            let len = t1 - t0;
            *o = (-l * (t0 - t)).exp() * len * one_minus_exp_over(l * len);
        }
    }

    /// Tenor factor `q_i(T, x) = qhat(T, x) exp(-x eta_i)`.
    pub fn q(&self, maturity: f64, x: f64, i: usize) -> f64 {
        self.params.q_scale(maturity, x) * (-x * self.params.eta()[i]).exp()
    }

    pub fn g_tenor_into(&self, t: f64, t0: f64, t1: f64, maturity: f64, x: f64, out: &mut [f64]) {
        self.g0_into(t, t0, t1, out);
        if x > 0.0 {
            for (i, o) in out.iter_mut().enumerate() {
                *o *= self.q(maturity, x, i);
            }
        }
    }

    /// `int_{a}^{b} eps(s)^2 exp(-L (b - s)) ds` in closed form.
    pub fn variance_integral(&self, rate: f64, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let [b0, b1, c] = self.params.beta();
        let a0 = b0 - 1.0;
        // eps^2 = 1 + 2 (a0 + b1 s) e^{-c s} + (a0 + b1 s)^2 e^{-2 c s}
        let m0 = poly_exp_integral(&[1.0, 0.0, 0.0], 0.0, rate, a, b);
        let m1 = poly_exp_integral(&[2.0 * a0, 2.0 * b1, 0.0], c, rate, a, b);
        let m2 = poly_exp_integral(&[a0 * a0, 2.0 * a0 * b1, b1 * b1], 2.0 * c, rate, a, b);
        m0 + m1 + m2
    }

    /// Same integral as [`variance_integral`](Self::variance_integral) over
    /// `[0, b]`, evaluated with composite 64-node Gauss-Legendre quadrature.
    pub fn variance_integral_quadrature(&self, rate: f64, b: f64) -> f64 {
        if b <= 0.0 {
            return 0.0;
        }
        let c = self.params.beta()[2];
        // Below b - 45/L the weight exp(-L (b - s)) is under 1e-19.
        let start = if rate > 0.0 { (b - 45.0 / rate).max(0.0) } else { 0.0 };
        let width = (24.0 / (rate + 2.0 * c)).min(16.0);
        let panels = ((b - start) / width).ceil().max(1.0) as usize;
        let step = (b - start) / panels as f64;
        let rule = GaussLegendre::n64();
        (0..panels)
            .map(|k| {
                let lo = start + k as f64 * step;
                let hi = if k + 1 == panels { b } else { lo + step };
                rule.integrate(lo, hi, |s| {
                    let e = self.epsilon(s);
                    e * e * (-rate * (b - s)).exp()
                })
            })
            .sum()
    }

    /// Covariance of the Gaussian state increments over `[a, b]`:
    /// `h_i h_k rho_ik int_a^b eps^2 e^{-(lambda_i + lambda_k)(b - s)} ds`.
    pub fn covariance(&self, a: f64, b: f64) -> Vec<f64> {
        let p = self.params;
        let n = p.factors();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..=i {
                let v = p.h()[i] * p.h()[k] * p.rho(i, k)
                    * self.variance_integral(p.lambda()[i] + p.lambda()[k], a, b);
                out[i * n + k] = v;
                out[k * n + i] = v;
            }
        }
        out
    }
}

/// `int_a^b poly(s) e^{-m s} e^{-L (b - s)} ds` for a quadratic `poly`
/// (coefficients in ascending order), `m >= 0`, `L >= 0`.
fn poly_exp_integral(poly: &[f64; 3], m: f64, rate: f64, a: f64, b: f64) -> f64 {
    if poly.iter().all(|&c| c == 0.0) {
        return 0.0;
    }
    let len = b - a;
    let k = rate - m;
    let mut moments = [0.0; 3];
    if k >= 0.0 {
        // e^{-m b} int_0^len (b - w)^p e^{-k w} dw
        exp_moments(k, len, &mut moments);
        let scale = (-m * b).exp();
        let p0 = moments[0];
        let p1 = b * moments[0] - moments[1];
        let p2 = b * b * moments[0] - 2.0 * b * moments[1] + moments[2];
        scale * (poly[0] * p0 + poly[1] * p1 + poly[2] * p2)
    } else {
        // e^{-m a - L len} int_0^len (a + v)^p e^{-|k| v} dv
        exp_moments(-k, len, &mut moments);
        let scale = (-m * a - rate * len).exp();
        let p0 = moments[0];
        let p1 = a * moments[0] + moments[1];
        let p2 = a * a * moments[0] + 2.0 * a * moments[1] + moments[2];
        scale * (poly[0] * p0 + poly[1] * p1 + poly[2] * p2)
    }
}

/// `E_j = int_0^len w^j e^{-k w} dw` for `j = 0, 1, 2` and `k >= 0`.
fn exp_moments(k: f64, len: f64, out: &mut [f64; 3]) {
    if k * len < 1.0 {
        exp_moments_series(k, len, out)
    } else {
        exp_moments_recurrence(k, len, out)
    }
}

fn exp_moments_series(k: f64, len: f64, out: &mut [f64; 3]) {
    let z = k * len;
    for (j, o) in out.iter_mut().enumerate() {
        let mut term = len.powi(j as i32 + 1); // (-k)^n len^{n+j+1} / n!
        let mut sum = term / (j as f64 + 1.0);
        for n in 1..60 {
            term *= -z / n as f64;
            let add = term / (n as f64 + j as f64 + 1.0);
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        *o = sum;
    }
}

fn exp_moments_recurrence(k: f64, len: f64, out: &mut [f64; 3]) {
    let z = k * len;
    let e = (-z).exp();
    out[0] = -(-z).exp_m1() / k;
    out[1] = (out[0] - len * e) / k;
    out[2] = (2.0 * out[1] - len * len * e) / k;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wg() -> WgParams {
        WgParams::two_factor([0.0073, 4.7344], [0.0059, 0.0411], [0.1581, 0.8894], -0.8577, 1.3160, 1.3327, 0.5900)
            .unwrap()
    }

    #[test]
    fn epsilon_limits() {
        let p = wg();
        assert_eq!(epsilon(&p, 0.0), 1.3160);
        assert!((epsilon(&p, 200.0) - 1.0).abs() < 1e-40_f64.max(1e-15));
    }

    #[test]
    fn g_boundary_and_zero_reversion() {
        let p = wg();
        assert_eq!(kernel_g(&p, 0, 3.0, 3.0).unwrap(), 1.0);
        assert!((kernel_g(&p, 0, 1.0, 11.0).unwrap() - (-0.073f64).exp()).abs() < 1e-15);
        assert!(kernel_g(&p, 0, 2.0, 1.0).is_err());
        let flat = WgParams::two_factor([0.0, 0.0], [0.01, 0.01], [0.0; 2], 0.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(kernel_g(&flat, 1, 0.0, 25.0).unwrap(), 1.0);
        assert_eq!(kernel_g0(&flat, 0.0, 1.0, 3.5).unwrap(), vec![2.5, 2.5]);
    }

    #[test]
    fn g0_empty_interval_and_ordering() {
        let p = wg();
        assert_eq!(kernel_g0(&p, 0.0, 2.0, 2.0).unwrap(), vec![0.0, 0.0]);
        assert!(kernel_g0(&p, 1.0, 0.5, 2.0).is_err());
        assert!(kernel_g_tenor(&p, 0.0, 3.0, 2.0, 3.0, 0.5).is_err());
    }

    #[test]
    fn g_tenor_reduces_to_g0() {
        let p = wg();
        let g0 = kernel_g0(&p, 0.5, 2.0, 2.5).unwrap();
        assert_eq!(kernel_g_tenor(&p, 0.5, 2.0, 2.5, 2.5, 0.0).unwrap(), g0);
        let no_eta = p.without_eta();
        assert_eq!(kernel_g_tenor(&no_eta, 0.5, 2.0, 2.5, 2.5, 0.5).unwrap(), g0);
        let g = kernel_g_tenor(&p, 0.5, 2.0, 2.5, 2.5, 0.5).unwrap();
        let factor = (-0.5f64 * 0.1581).exp();
        assert!((factor - 0.92400).abs() < 1e-5);
        assert!((g[0] - factor * g0[0]).abs() < 1e-16);
    }

    #[test]
    fn exp_moments_branches_agree() {
        let mut a = [0.0; 3];
        let mut b = [0.0; 3];
        // both forms around the switch point z = 1
        for &z in &[0.8, 1.0, 1.3] {
            exp_moments_series(z, 1.0, &mut a);
            exp_moments_recurrence(z, 1.0, &mut b);
            for j in 0..3 {
                assert!((a[j] - b[j]).abs() < 1e-13 * a[j], "z={z} j={j}");
            }
        }
    }

    #[test]
    fn variance_integral_quadrature_agrees() {
        let p = wg();
        let k = VolKernel::new(&p);
        for &l in &[0.0, 0.0146, 4.7417, 9.4688] {
            for &t in &[0.5, 1.0, 5.0, 20.0] {
                let cf = k.variance_integral(l, 0.0, t);
                let q = k.variance_integral_quadrature(l, t);
                assert!(((cf - q) / cf).abs() < 1e-10, "L={l} t={t}: {cf} vs {q}");
            }
        }
    }
}
