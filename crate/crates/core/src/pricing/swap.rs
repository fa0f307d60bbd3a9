use crate::error::{Error, Result};
use crate::hjm::ShiftRule;
use crate::marketdata::{CurveSet, Tenor};

use super::schedule::{build_schedule, SwapSchedule};

/// Fixed-leg annuity `sum tau_j P0(T_j)` on the discount curve.
pub fn annuity(cs: &CurveSet, sch: &SwapSchedule) -> Result<f64> {
    let tau = sch.fixed_accrual();
    let mut sum = 0.0;
    for &t in &sch.fixed_times()[1..] {
        sum += tau * cs.discount().discount(t)?;
    }
    Ok(sum)
}

fn float_leg_sum(cs: &CurveSet, sch: &SwapSchedule, mut per_period: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let tau = sch.float_accrual();
    let mut sum = 0.0;
    for &t in &sch.float_times()[1..] {
        sum += tau * cs.discount().discount(t)? * per_period(t)?;
    }
    Ok(sum)
}

/// `S0 = sum tau_k P0(T_k) F0(T_k, x) / A`.
pub fn par_swap_rate(cs: &CurveSet, sch: &SwapSchedule) -> Result<f64> {
    let tenor = sch.float_tenor();
    let float = float_leg_sum(cs, sch, |t| cs.forward(t, tenor))?;
    Ok(float / annuity(cs, sch)?)
}

/// Annuity-weighted Libor shift `sum tau_k P0(T_k) kappa(T_k, x) / A`.
pub fn swap_shift_psi(cs: &CurveSet, sch: &SwapSchedule, shift: &ShiftRule) -> Result<f64> {
    let x = sch.float_tenor().years();
    // Look up the tenor curve so a missing curve fails here as well.
    cs.forward(sch.start(), sch.float_tenor())?;
    let s = float_leg_sum(cs, sch, |t| Ok(shift.kappa(t, x)))?;
    Ok(s / annuity(cs, sch)?)
}

/// Frozen weights `delta_k = tau_k P0(T_k) (kappa + F0) / sum(...)`.
pub fn delta_weights(cs: &CurveSet, sch: &SwapSchedule, shift: &ShiftRule) -> Result<Vec<f64>> {
    let tenor = sch.float_tenor();
    let x = tenor.years();
    let tau = sch.float_accrual();
    let mut w = Vec::with_capacity(sch.float_periods());
    for &t in &sch.float_times()[1..] {
        w.push(tau * cs.discount().discount(t)? * (shift.kappa(t, x) + cs.forward(t, tenor)?));
    }
    let total: f64 = w.iter().sum();
    if !(total > 0.0) {
        return Err(Error::domain("shifted float leg has non-positive value"));
    }
    w.iter_mut().for_each(|v| *v /= total);
    Ok(w)
}

/// Basis spread `S(x, xbar) - S(x', xbar)` between two floating tenors.
pub fn basis_swap_spread(cs: &CurveSet, start: f64, tenor_years: u32, x: Tenor, x_other: Tenor, fixed: Tenor) -> Result<f64> {
    let a = build_schedule(start, tenor_years, x, fixed)?;
    let b = build_schedule(start, tenor_years, x_other, fixed)?;
    Ok(par_swap_rate(cs, &a)? - par_swap_rate(cs, &b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled::reference_curves;
    use crate::marketdata::{DiscountCurve, MarketDate, TenorCurve};

    fn flat_set(rate: f64, fwd: f64) -> CurveSet {
        let anchor = MarketDate::from_ymd(2010, 8, 12).unwrap();
        let pillars: Vec<_> = (1..=40).map(|y| anchor.add_months(12 * y)).collect();
        let tc = TenorCurve::new(anchor, Tenor::Y1, pillars.clone(), vec![fwd; 40]).unwrap();
        CurveSet::new(DiscountCurve::flat(anchor, rate)).with_tenor_curve(tc).unwrap()
    }

    #[test]
    fn one_period_identities() {
        let cs = flat_set(0.02, 0.031);
        let s = build_schedule(2.0, 1, Tenor::Y1, Tenor::Y1).unwrap();
        let a = annuity(&cs, &s).unwrap();
        assert!((a - (-0.02 * 3.0f64).exp()).abs() < 1e-15);
        assert!((par_swap_rate(&cs, &s).unwrap() - 0.031).abs() < 1e-15);
        let psi = swap_shift_psi(&cs, &s, &ShiftRule::inverse_tenor()).unwrap();
        assert!((psi - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_shift_gives_zero_psi() {
        let cs = reference_curves();
        let s = build_schedule(1.0, 2, Tenor::M6, Tenor::Y1).unwrap();
        let zero = ShiftRule {
            overrides: vec![crate::hjm::ShiftOverride { t_min: 0.0, t_max: 1e9, tenor_months: 6, value: 0.0 }],
        };
        assert_eq!(swap_shift_psi(&cs, &s, &zero).unwrap(), 0.0);
    }

    #[test]
    fn weights_sum_to_one() {
        let cs = reference_curves();
        let s = build_schedule(5.0, 10, Tenor::M6, Tenor::Y1).unwrap();
        let w = delta_weights(&cs, &s, &ShiftRule::inverse_tenor()).unwrap();
        assert_eq!(w.len(), 20);
        assert!(w.iter().all(|&v| v > 0.0));
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn basis_spread_signs() {
        let cs = reference_curves();
        let b = basis_swap_spread(&cs, 0.0, 2, Tenor::M6, Tenor::M3, Tenor::Y1).unwrap();
        assert!(b > 0.0);
        let r = basis_swap_spread(&cs, 0.0, 2, Tenor::M3, Tenor::M6, Tenor::Y1).unwrap();
        assert_eq!(b, -r);
        assert_eq!(basis_swap_spread(&cs, 0.0, 2, Tenor::M3, Tenor::M3, Tenor::Y1).unwrap(), 0.0);
    }

    #[test]
    fn missing_tenor_curve() {
        let cs = reference_curves();
        let s = build_schedule(1.0, 1, Tenor::Y1, Tenor::Y1).unwrap();
        assert!(matches!(par_swap_rate(&cs, &s), Err(Error::MissingCurve(_))));
    }
}
