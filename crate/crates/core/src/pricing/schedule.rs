use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::marketdata::{CurveSet, Tenor};

/// Float and fixed payment grids of a swap on the model clock.
///
/// Periods step by the nominal tenor, so the floating accrual over
/// `[T_{k-1}, T_k]` equals the Libor tenor `x` and fixed accruals equal the
/// fixed tenor (1 for the annual Euro convention).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapSchedule {
    float_tenor: Tenor,
    fixed_tenor: Tenor,
    /// `T_a, ..., T_b` for the floating leg.
    float_times: Vec<f64>,
    /// `T_a, ..., T_b` for the fixed leg.
    fixed_times: Vec<f64>,
}

/// Builds a swap starting at model time `start` lasting `tenor_years`.
pub fn build_schedule(start: f64, tenor_years: u32, float_tenor: Tenor, fixed_tenor: Tenor) -> Result<SwapSchedule> {
    if tenor_years == 0 {
        return Err(Error::domain("swap tenor must be at least one year"));
    }
    if !(start >= 0.0) {
        return Err(Error::domain(format!("swap start {start} is before the anchor")));
    }
    let months = 12 * tenor_years;
    let grid = |tenor: Tenor| -> Result<Vec<f64>> {
        if months % tenor.months() != 0 {
            return Err(Error::domain(format!("{tenor} does not divide a {tenor_years}Y swap")));
        }
        let count = months / tenor.months();
        Ok((0..=count).map(|k| start + k as f64 * tenor.years()).collect())
    };
    Ok(SwapSchedule {
        float_tenor,
        fixed_tenor,
        float_times: grid(float_tenor)?,
        fixed_times: grid(fixed_tenor)?,
    })
}

/// Same as [`build_schedule`] with the start given as a calendar date.
pub fn build_schedule_from_date(
    cs: &CurveSet,
    start: crate::marketdata::MarketDate,
    tenor_years: u32,
    float_tenor: Tenor,
    fixed_tenor: Tenor,
) -> Result<SwapSchedule> {
    build_schedule(cs.discount().time_of(start)?, tenor_years, float_tenor, fixed_tenor)
}

impl SwapSchedule {
    pub fn start(&self) -> f64 {
        self.float_times[0]
    }

    pub fn end(&self) -> f64 {
        *self.float_times.last().expect("non-empty grid")
    }

    pub fn float_tenor(&self) -> Tenor {
        self.float_tenor
    }

    pub fn fixed_tenor(&self) -> Tenor {
        self.fixed_tenor
    }

    pub fn float_times(&self) -> &[f64] {
        &self.float_times
    }

    pub fn fixed_times(&self) -> &[f64] {
        &self.fixed_times
    }

    pub fn float_periods(&self) -> usize {
        self.float_times.len() - 1
    }

    pub fn fixed_periods(&self) -> usize {
        self.fixed_times.len() - 1
    }

    pub fn float_accrual(&self) -> f64 {
        self.float_tenor.years()
    }

    pub fn fixed_accrual(&self) -> f64 {
        self.fixed_tenor.years()
    }

    /// Floating periods as `(T_{k-1}, T_k)`.
    pub fn float_periods_iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.float_times.windows(2).map(|w| (w[0], w[1]))
    }

    /// Same swap indexed on a different floating tenor.
    pub fn with_float_tenor(&self, float_tenor: Tenor) -> Result<Self> {
        let years = ((self.end() - self.start()) + 1e-9).floor() as u32;
        build_schedule(self.start(), years, float_tenor, self.fixed_tenor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn period_counts() {
        let s = build_schedule(1.0, 1, Tenor::M3, Tenor::Y1).unwrap();
        assert_eq!((s.float_periods(), s.fixed_periods()), (4, 1));
        let s = build_schedule(1.0, 5, Tenor::M6, Tenor::Y1).unwrap();
        assert_eq!((s.float_periods(), s.fixed_periods()), (10, 5));
        assert_eq!(s.start(), 1.0);
        assert_eq!(s.end(), 6.0);
    }

    #[test]
    fn zero_tenor_rejected() {
        assert!(build_schedule(1.0, 0, Tenor::M6, Tenor::Y1).is_err());
    }

    #[test]
    fn dated_schedule_is_increasing() {
        let cs = crate::bundled::reference_curves();
        let start = "2011-08-16".parse().unwrap();
        let s = build_schedule_from_date(&cs, start, 2, Tenor::M6, Tenor::Y1).unwrap();
        let t0 = cs.discount().time_of(start).unwrap();
        assert!(s.float_times().iter().all(|&t| t >= t0));
        assert!(s.float_times().windows(2).all(|w| w[1] > w[0]));
        assert!(s.fixed_times().windows(2).all(|w| w[1] > w[0]));
        assert_eq!(s.end(), s.fixed_times()[2]);
    }
}
