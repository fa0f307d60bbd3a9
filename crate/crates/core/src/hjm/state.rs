use serde::{Deserialize, Serialize};

use super::kernel::VolKernel;
use super::params::WgParams;
use crate::error::{Error, Result};
use crate::marketdata::{CurveSet, DiscountCurve, Tenor};

const TIME_SLACK: f64 = 1e-12;

/// Markov state `(X_t, Y_t)`; `y` is row-major `n x n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HjmState {
    pub t: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl HjmState {
    pub fn initial(n: usize) -> Self {
        Self {
            t: 0.0,
            x: vec![0.0; n],
            y: vec![0.0; n * n],
        }
    }

    pub fn new(t: f64, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if y.len() != n * n {
            return Err(Error::domain("Y must be n x n"));
        }
        for i in 0..n {
            for k in 0..i {
                if (y[i * n + k] - y[k * n + i]).abs() > 1e-14 * (1.0 + y[i * n + k].abs()) {
                    return Err(Error::domain("Y must be symmetric"));
                }
            }
        }
        Ok(Self { t, x, y })
    }

    /// State at time `t` with the deterministic `Y_t` implied by `p`.
    pub fn with_x(p: &WgParams, t: f64, x: Vec<f64>) -> Result<Self> {
        if x.len() != p.factors() {
            return Err(Error::domain("X has the wrong number of factors"));
        }
        Ok(Self {
            t,
            x,
            y: evolve_y(p, t),
        })
    }

    pub fn factors(&self) -> usize {
        self.x.len()
    }

    /// `b . (X + Y (a - b/2))`
    fn exponent(&self, a: &[f64], b: &[f64]) -> f64 {
        let n = self.factors();
        let mut total = 0.0;
        for i in 0..n {
            let mut inner = self.x[i];
            for k in 0..n {
                inner += self.y[i * n + k] * (a[k] - 0.5 * b[k]);
            }
            total += b[i] * inner;
        }
        total
    }
}

/// Deterministic `Y_t`: `Y_ik = h_i h_k rho_ik int_0^t eps^2(s) e^{-(lambda_i + lambda_k)(t - s)} ds`.
pub fn evolve_y(p: &WgParams, t: f64) -> Vec<f64> {
    VolKernel::new(p).covariance(0.0, t.max(0.0))
}

fn check_alive(t: f64, fixing: f64) -> Result<()> {
    if t > fixing + TIME_SLACK {
        return Err(Error::Expired { t, fixing });
    }
    Ok(())
}

/// Shifted-lognormal Libor reconstruction with an explicit initial forward
/// `F0(T, x)`:
///
/// `F_t = (kappa + F0) exp{G* (X + Y (G0(t,t,T) - G/2))} - kappa`
/// with `G = G(t, T - x, T; T, x)`.
pub fn shifted_libor(p: &WgParams, s: &HjmState, maturity: f64, x: f64, initial: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("tenor {x} must be positive")));
    }
    check_alive(s.t, maturity - x)?;
    let t = s.t.min(maturity - x);
    let k = VolKernel::new(p);
    let n = p.factors();
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    k.g0_into(t, t, maturity, &mut a);
    k.g_tenor_into(t, maturity - x, maturity, maturity, x, &mut b);
    let kappa = p.kappa(maturity, x);
    let expo = s.exponent(&a, &b);
    Ok((kappa + initial) * expo.exp_m1() + initial)
}

/// `F_t(T, x)` with `F0` taken from the curve set's forwarding curve for `tenor`.
pub fn reconstruct_forward_libor(p: &WgParams, s: &HjmState, cs: &CurveSet, maturity: f64, tenor: Tenor) -> Result<f64> {
    let initial = cs.forward(maturity, tenor)?;
    shifted_libor(p, s, maturity, tenor.years(), initial)
}

/// OIS simple rate `E_t(T, x)` from
/// `ln((1 + x E_t)/(1 + x E_0)) = G0* (X + Y (G0(t,t,T) - G0(t,T-x,T)/2))`.
pub fn reconstruct_ois_rate(p: &WgParams, s: &HjmState, c: &DiscountCurve, maturity: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("tenor {x} must be positive")));
    }
    check_alive(s.t, maturity - x)?;
    let t = s.t.min(maturity - x);
    let k = VolKernel::new(p);
    let n = p.factors();
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    k.g0_into(t, t, maturity, &mut a);
    k.g0_into(t, maturity - x, maturity, &mut b);
    let log_growth0 = c.log_discount(maturity - x)? - c.log_discount(maturity)?;
    Ok((log_growth0 + s.exponent(&a, &b)).exp_m1() / x)
}

/// Zero-coupon bond `P_t(T) = 1 / (1 + (T - t) E_t(T, T - t))`.
pub fn bond_price(p: &WgParams, s: &HjmState, c: &DiscountCurve, maturity: f64) -> Result<f64> {
    if s.t > maturity + TIME_SLACK {
        return Err(Error::domain(format!("bond matured at {maturity} before t = {}", s.t)));
    }
    let x = maturity - s.t;
    if x <= 0.0 {
        return Ok(1.0);
    }
    let e = reconstruct_ois_rate(p, s, c, maturity, x)?;
    Ok(1.0 / (1.0 + x * e))
}

/// Short rate `r_t = f0(t) + sum_i X_i`.
pub fn short_rate(_p: &WgParams, s: &HjmState, c: &DiscountCurve) -> Result<f64> {
    Ok(c.forward(s.t)? + s.x.iter().sum::<f64>())
}

/// Instantaneous forward `f_t(T) = f0(T) + g(t,T) . (X + Y G0(t,t,T))`.
pub fn instantaneous_forward_at(p: &WgParams, s: &HjmState, c: &DiscountCurve, maturity: f64) -> Result<f64> {
    check_alive(s.t, maturity)?;
    let k = VolKernel::new(p);
    let n = p.factors();
    let mut a = vec![0.0; n];
    k.g0_into(s.t, s.t, maturity, &mut a);
    let mut total = c.forward(maturity)?;
    for i in 0..n {
        let g = (-p.lambda()[i] * (maturity - s.t)).exp();
        let mut inner = s.x[i];
        for kk in 0..n {
            inner += s.y[i * n + kk] * a[kk];
        }
        total += g * inner;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;

    fn wg() -> WgParams {
        bundled::published_params(crate::calibration::ModelVariant::Wg2pp)
    }

    #[test]
    fn initial_state_reproduces_curves() {
        let cs = bundled::reference_curves();
        let p = wg();
        let s = HjmState::initial(2);
        for &t in &[0.5, 1.0, 3.3, 10.0] {
            let f = reconstruct_forward_libor(&p, &s, &cs, t, Tenor::M6).unwrap();
            assert_eq!(f, cs.forward(t, Tenor::M6).unwrap());
            let e = reconstruct_ois_rate(&p, &s, cs.discount(), t, 0.25).unwrap();
            assert!((e - cs.discount().ois_rate(t, 0.25).unwrap()).abs() < 1e-15);
            let b = bond_price(&p, &s, cs.discount(), t).unwrap();
            assert!((b - cs.discount().discount(t).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn expired_fixing_is_rejected() {
        let cs = bundled::reference_curves();
        let p = wg();
        let s = HjmState::with_x(&p, 2.0, vec![0.0, 0.0]).unwrap();
        let err = reconstruct_forward_libor(&p, &s, &cs, 2.25, Tenor::M6);
        assert!(matches!(err, Err(Error::Expired { .. })));
        assert!(bond_price(&p, &s, cs.discount(), 1.0).is_err());
    }

    #[test]
    fn bond_at_maturity_is_one() {
        let cs = bundled::reference_curves();
        let p = wg();
        let s = HjmState::with_x(&p, 3.0, vec![0.01, -0.02]).unwrap();
        assert_eq!(bond_price(&p, &s, cs.discount(), 3.0).unwrap(), 1.0);
    }

    #[test]
    fn short_rate_arithmetic() {
        let c = DiscountCurve::flat("2010-08-12".parse().unwrap(), 0.005);
        let p = wg();
        let s = HjmState::new(1.0, vec![0.01, -0.003], vec![0.0; 4]).unwrap();
        assert!((short_rate(&p, &s, &c).unwrap() - 0.012).abs() < 1e-15);
    }

    #[test]
    fn libor_stays_above_minus_shift() {
        let cs = bundled::reference_curves();
        let p = wg();
        let s = HjmState::with_x(&p, 1.0, vec![-5.0, -5.0]).unwrap();
        let f = reconstruct_forward_libor(&p, &s, &cs, 3.0, Tenor::M3).unwrap();
        assert!(f > -p.kappa(3.0, 0.25));
    }

    #[test]
    fn y_initial_is_zero_and_symmetric() {
        let p = wg();
        assert_eq!(evolve_y(&p, 0.0), vec![0.0; 4]);
        let y = evolve_y(&p, 4.0);
        assert_eq!(y[1], y[2]);
        assert!(y[0] > 0.0 && y[3] > 0.0);
        assert!(y[0] * y[3] >= y[1] * y[1]);
    }
}
