use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::date::{year_fraction, DayCount, MarketDate};
use crate::error::{Error, Result};

/// Libor tenor, stored as a whole number of months.
///
/// The model uses the nominal year fraction `months / 12` as the tenor `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Tenor(u32);

impl Tenor {
    pub const M3: Tenor = Tenor(3);
    pub const M6: Tenor = Tenor(6);
    pub const Y1: Tenor = Tenor(12);

    pub fn from_months(months: u32) -> Result<Self> {
        if months == 0 {
            return Err(Error::domain("tenor must be positive"));
        }
        Ok(Self(months))
    }

    pub fn months(self) -> u32 {
        self.0
    }

    /// Nominal year fraction.
    pub fn years(self) -> f64 {
        self.0 as f64 / 12.0
    }
}

impl FromStr for Tenor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::domain(format!("bad tenor '{s}' (expected e.g. 3M, 6M, 1Y)"));
        if s.len() < 2 {
            return Err(bad());
        }
        let (num, unit) = s.split_at(s.len() - 1);
        let n: u32 = num.parse().map_err(|_| bad())?;
        match unit {
            "M" | "m" => Tenor::from_months(n),
            "Y" | "y" => Tenor::from_months(12 * n),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Tenor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}M", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DiscountInterpolation {
    /// Linear in `ln P`, i.e. piecewise-constant instantaneous forwards.
    #[default]
    LogLinearDiscount,
    /// Linear in the zero rate.
    LinearZero,
}

fn check_pillars(anchor: MarketDate, pillars: &[MarketDate], rates: &[f64]) -> Result<Vec<f64>> {
    if pillars.is_empty() {
        return Err(Error::domain("curve needs at least one pillar"));
    }
    if pillars.len() != rates.len() {
        return Err(Error::domain("pillar and rate counts differ"));
    }
    if let Some(r) = rates.iter().find(|r| !r.is_finite()) {
        return Err(Error::domain(format!("non-finite rate {r}")));
    }
    for w in pillars.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Ordering(format!(
                "pillars must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
    }
    if pillars[0] <= anchor {
        return Err(Error::Ordering(format!(
            "first pillar {} must be after anchor {anchor}",
            pillars[0]
        )));
    }
    pillars
        .iter()
        .map(|&d| year_fraction(anchor, d, DayCount::Act360))
        .collect()
}

/// Locates `t` among sorted `times`: the index `i` with `times[i] <= t < times[i+1]`,
/// or `None` when `t` is before the first pillar.
fn bracket(times: &[f64], t: f64) -> Option<usize> {
    match times.partition_point(|&x| x <= t) {
        0 => None,
        k => Some(k - 1),
    }
}

/// OIS discount curve built from continuously-compounded ACT/360 zero rates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscountCurve {
    anchor: MarketDate,
    pillars: Vec<MarketDate>,
    times: Vec<f64>,
    zero_rates: Vec<f64>,
    interpolation: DiscountInterpolation,
}

impl DiscountCurve {
    pub fn new(
        anchor: MarketDate,
        pillars: Vec<MarketDate>,
        zero_rates: Vec<f64>,
        interpolation: DiscountInterpolation,
    ) -> Result<Self> {
        let times = check_pillars(anchor, &pillars, &zero_rates)?;
        Ok(Self {
            anchor,
            pillars,
            times,
            zero_rates,
            interpolation,
        })
    }

    /// Flat continuously-compounded curve.
    pub fn flat(anchor: MarketDate, rate: f64) -> Self {
        Self::new(
            anchor,
            vec![anchor.add_days(360)],
            vec![rate],
            DiscountInterpolation::LogLinearDiscount,
        )
        .expect("single pillar after anchor")
    }

    pub fn anchor(&self) -> MarketDate {
        self.anchor
    }

    pub fn pillars(&self) -> &[MarketDate] {
        &self.pillars
    }

    pub fn pillar_times(&self) -> &[f64] {
        &self.times
    }

    pub fn zero_rates(&self) -> &[f64] {
        &self.zero_rates
    }

    pub fn interpolation(&self) -> DiscountInterpolation {
        self.interpolation
    }

    /// Model time of `date`.
    pub fn time_of(&self, date: MarketDate) -> Result<f64> {
        year_fraction(self.anchor, date, DayCount::Act360)
            .map_err(|_| Error::domain(format!("{date} is before curve anchor {}", self.anchor)))
    }

    fn check_time(t: f64) -> Result<()> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::domain(format!("time {t} is before the anchor")));
        }
        Ok(())
    }

    /// Zero rate at model time `t`; pillar values are returned exactly.
    pub fn zero_rate(&self, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        let n = self.times.len();
        match bracket(&self.times, t) {
            None => Ok(self.zero_rates[0]),
            Some(i) if self.times[i] == t => Ok(self.zero_rates[i]),
            Some(i) if i + 1 == n => Ok(self.zero_rates[n - 1]),
            Some(i) => match self.interpolation {
                DiscountInterpolation::LogLinearDiscount => Ok(-self.log_discount_unchecked(t) / t),
                DiscountInterpolation::LinearZero => {
                    let w = (t - self.times[i]) / (self.times[i + 1] - self.times[i]);
                    Ok(self.zero_rates[i] + w * (self.zero_rates[i + 1] - self.zero_rates[i]))
                }
            },
        }
    }

    fn log_discount_unchecked(&self, t: f64) -> f64 {
        let n = self.times.len();
        match bracket(&self.times, t) {
            None => -self.zero_rates[0] * t,
            Some(i) if i + 1 == n => -self.zero_rates[n - 1] * t,
            Some(i) => {
                let (t0, t1) = (self.times[i], self.times[i + 1]);
                let (z0, z1) = (self.zero_rates[i], self.zero_rates[i + 1]);
                match self.interpolation {
                    DiscountInterpolation::LogLinearDiscount => {
                        let w = (t - t0) / (t1 - t0);
                        -(z0 * t0) * (1.0 - w) - (z1 * t1) * w
                    }
                    DiscountInterpolation::LinearZero => {
                        let w = (t - t0) / (t1 - t0);
                        -(z0 + w * (z1 - z0)) * t
                    }
                }
            }
        }
    }

    /// `ln P0(t)`.
    pub fn log_discount(&self, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        Ok(self.log_discount_unchecked(t))
    }

    /// `P0(t) = exp(-r_z(t) t)`, with `P0(0) = 1`.
    pub fn discount(&self, t: f64) -> Result<f64> {
        Ok(self.log_discount(t)?.exp())
    }

    /// Instantaneous forward `f0(t) = -d/dt ln P0(t)`, evaluated analytically from
    /// the interpolant. At a pillar the right-hand derivative is returned.
    pub fn forward(&self, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        Ok(self.forward_unchecked(t))
    }

    pub(crate) fn forward_unchecked(&self, t: f64) -> f64 {
        let n = self.times.len();
        match bracket(&self.times, t) {
            None => self.zero_rates[0],
            Some(i) if i + 1 == n => self.zero_rates[n - 1],
            Some(i) => {
                let (t0, t1) = (self.times[i], self.times[i + 1]);
                let (z0, z1) = (self.zero_rates[i], self.zero_rates[i + 1]);
                match self.interpolation {
                    DiscountInterpolation::LogLinearDiscount => (z1 * t1 - z0 * t0) / (t1 - t0),
                    DiscountInterpolation::LinearZero => {
                        let slope = (z1 - z0) / (t1 - t0);
                        z0 + slope * (t - t0) + slope * t
                    }
                }
            }
        }
    }

    /// Single-period OIS simple rate `E0(t, x) = (P0(t-x)/P0(t) - 1) / x`.
    pub fn ois_rate(&self, t: f64, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::domain(format!("tenor {x} must be positive")));
        }
        if t - x < 0.0 {
            return Err(Error::domain(format!(
                "accrual start {} is before the anchor",
                t - x
            )));
        }
        let growth = (self.log_discount_unchecked(t - x) - self.log_discount_unchecked(t)).exp_m1();
        Ok(growth / x)
    }

    pub fn discount_factor(&self, date: MarketDate) -> Result<f64> {
        self.discount(self.time_of(date)?)
    }

    pub fn instantaneous_forward(&self, date: MarketDate) -> Result<f64> {
        let t = self.time_of(date)?;
        if t <= 0.0 {
            return Err(Error::domain("instantaneous forward needs a date after the anchor"));
        }
        self.forward(t)
    }

    /// `E0(T, x)` for a payment date and a nominal tenor.
    pub fn ois_simple_rate(&self, date: MarketDate, tenor: Tenor) -> Result<f64> {
        self.ois_rate(self.time_of(date)?, tenor.years())
    }
}

/// Initial forward Libor curve `T -> F0(T, x)` for a single tenor `x`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TenorCurve {
    anchor: MarketDate,
    tenor: Tenor,
    pillars: Vec<MarketDate>,
    times: Vec<f64>,
    rates: Vec<f64>,
}

impl TenorCurve {
    pub fn new(anchor: MarketDate, tenor: Tenor, pillars: Vec<MarketDate>, rates: Vec<f64>) -> Result<Self> {
        let times = check_pillars(anchor, &pillars, &rates)?;
        Ok(Self {
            anchor,
            tenor,
            pillars,
            times,
            rates,
        })
    }

    pub fn anchor(&self) -> MarketDate {
        self.anchor
    }

    pub fn tenor(&self) -> Tenor {
        self.tenor
    }

    pub fn pillars(&self) -> &[MarketDate] {
        &self.pillars
    }

    pub fn pillar_times(&self) -> &[f64] {
        &self.times
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    /// Linear interpolation in `F0`, flat outside the pillar range.
    pub fn forward(&self, t: f64) -> f64 {
        let n = self.times.len();
        match bracket(&self.times, t) {
            None => self.rates[0],
            Some(i) if self.times[i] == t || i + 1 == n => self.rates[i],
            Some(i) => {
                let w = (t - self.times[i]) / (self.times[i + 1] - self.times[i]);
                self.rates[i] + w * (self.rates[i + 1] - self.rates[i])
            }
        }
    }
}

/// One discount curve plus forwarding curves keyed by tenor.
///
/// A single-curve set carries no tenor curves and derives every `F0(T, x)`
/// from the discount curve as `E0(T, x)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveSet {
    discount: DiscountCurve,
    tenors: BTreeMap<Tenor, TenorCurve>,
    single_curve: bool,
}

impl CurveSet {
    pub fn new(discount: DiscountCurve) -> Self {
        Self {
            discount,
            tenors: BTreeMap::new(),
            single_curve: false,
        }
    }

    /// Curve set whose forwards are implied by the discount curve.
    pub fn single_curve(discount: DiscountCurve) -> Self {
        Self {
            discount,
            tenors: BTreeMap::new(),
            single_curve: true,
        }
    }

    pub fn with_tenor_curve(mut self, curve: TenorCurve) -> Result<Self> {
        self.insert_tenor_curve(curve)?;
        Ok(self)
    }

    pub fn insert_tenor_curve(&mut self, curve: TenorCurve) -> Result<()> {
        if curve.anchor() != self.discount.anchor() {
            return Err(Error::domain(format!(
                "tenor curve anchor {} differs from discount anchor {}",
                curve.anchor(),
                self.discount.anchor()
            )));
        }
        self.tenors.insert(curve.tenor(), curve);
        Ok(())
    }

    pub fn anchor(&self) -> MarketDate {
        self.discount.anchor()
    }

    pub fn discount(&self) -> &DiscountCurve {
        &self.discount
    }

    pub fn is_single_curve(&self) -> bool {
        self.single_curve
    }

    pub fn tenor_curve(&self, tenor: Tenor) -> Option<&TenorCurve> {
        self.tenors.get(&tenor)
    }

    pub fn tenors(&self) -> impl Iterator<Item = Tenor> + '_ {
        self.tenors.keys().copied()
    }

    /// `F0(T, x)` at model time `t`.
    pub fn forward(&self, t: f64, tenor: Tenor) -> Result<f64> {
        match self.tenors.get(&tenor) {
            Some(c) => Ok(c.forward(t)),
            None if self.single_curve => self.discount.ois_rate(t, tenor.years()),
            None => Err(Error::MissingCurve(tenor.to_string())),
        }
    }

    pub fn forward_libor_initial(&self, date: MarketDate, tenor: Tenor) -> Result<f64> {
        self.forward(self.discount.time_of(date)?, tenor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> MarketDate {
        s.parse().unwrap()
    }

    fn two_pillar() -> DiscountCurve {
        DiscountCurve::new(
            d("2010-01-01"),
            vec![d("2011-01-01"), d("2012-01-01")],
            vec![0.01, 0.02],
            DiscountInterpolation::LogLinearDiscount,
        )
        .unwrap()
    }

    #[test]
    fn discount_at_anchor_is_one() {
        let c = two_pillar();
        assert_eq!(c.discount(0.0).unwrap(), 1.0);
        assert_eq!(c.discount_factor(d("2010-01-01")).unwrap(), 1.0);
    }

    #[test]
    fn before_anchor_is_domain_error() {
        let c = two_pillar();
        assert!(matches!(c.discount_factor(d("2009-12-31")), Err(Error::Domain(_))));
        assert!(c.instantaneous_forward(d("2010-01-01")).is_err());
        assert!(c.ois_rate(0.1, 0.25).is_err());
    }

    #[test]
    fn flat_curve_forward_equals_rate() {
        let c = DiscountCurve::flat(d("2010-01-01"), 0.03);
        for &t in &[0.01, 0.5, 1.0, 7.3, 40.0] {
            assert!((c.forward(t).unwrap() - 0.03).abs() < 1e-15);
            assert!((c.discount(t).unwrap() - (-0.03 * t).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_curve_gives_zero_ois_rate() {
        let c = DiscountCurve::flat(d("2010-01-01"), 0.0);
        assert_eq!(c.ois_rate(2.0, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn single_pillar_extrapolates_flat() {
        let c = DiscountCurve::new(
            d("2010-01-01"),
            vec![d("2010-07-01")],
            vec![0.02],
            DiscountInterpolation::LogLinearDiscount,
        )
        .unwrap();
        assert_eq!(c.zero_rate(10.0).unwrap(), 0.02);
        assert_eq!(c.forward(0.1).unwrap(), 0.02);
    }

    #[test]
    fn linear_zero_forward_matches_finite_difference() {
        let c = DiscountCurve::new(
            d("2010-01-01"),
            vec![d("2011-01-01"), d("2013-01-01")],
            vec![0.01, 0.03],
            DiscountInterpolation::LinearZero,
        )
        .unwrap();
        let t = 2.0;
        let h = 1e-5;
        let fd = -(c.log_discount(t + h).unwrap() - c.log_discount(t - h).unwrap()) / (2.0 * h);
        assert!((c.forward(t).unwrap() - fd).abs() < 1e-9);
    }

    #[test]
    fn unsorted_pillars_rejected() {
        let r = DiscountCurve::new(
            d("2010-01-01"),
            vec![d("2012-01-01"), d("2011-01-01")],
            vec![0.01, 0.02],
            DiscountInterpolation::LogLinearDiscount,
        );
        assert!(matches!(r, Err(Error::Ordering(_))));
    }

    #[test]
    fn tenor_parsing() {
        assert_eq!("3M".parse::<Tenor>().unwrap(), Tenor::M3);
        assert_eq!("1Y".parse::<Tenor>().unwrap(), Tenor::Y1);
        assert!("0M".parse::<Tenor>().is_err());
        assert!("6W".parse::<Tenor>().is_err());
        assert_eq!(Tenor::M6.years(), 0.5);
    }

    #[test]
    fn missing_tenor_curve() {
        let cs = CurveSet::new(two_pillar());
        assert!(matches!(cs.forward(1.0, Tenor::M3), Err(Error::MissingCurve(_))));
        let single = CurveSet::single_curve(two_pillar());
        let e = single.discount().ois_rate(1.0, 0.25).unwrap();
        assert_eq!(single.forward(1.0, Tenor::M3).unwrap(), e);
    }
}
