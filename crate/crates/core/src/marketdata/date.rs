use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, Months, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Calendar date stored as a serial day number (days since 1970-01-01).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MarketDate(i32);

const EPOCH_CE_DAYS: i32 = 719_163;

impl MarketDate {
    pub fn from_serial(days: i32) -> Self {
        Self(days)
    }

    pub fn from_ymd(year: i32, month: u32, day: u32) -> Result<Self> {
        NaiveDate::from_ymd_opt(year, month, day)
            .map(Self::from)
            .ok_or_else(|| Error::domain(format!("invalid date {year}-{month}-{day}")))
    }

    pub fn serial(self) -> i32 {
        self.0
    }

    pub fn to_naive(self) -> NaiveDate {
        NaiveDate::from_num_days_from_ce_opt(self.0 + EPOCH_CE_DAYS)
            .expect("serial day within chrono range")
    }

    pub fn add_days(self, days: i32) -> Self {
        Self(self.0 + days)
    }

    /// Adds calendar months, clamping to the end of shorter months.
    pub fn add_months(self, months: i32) -> Self {
        let d = self.to_naive();
        let shifted = if months >= 0 {
            d.checked_add_months(Months::new(months as u32))
        } else {
            d.checked_sub_months(Months::new(months.unsigned_abs()))
        };
        Self::from(shifted.expect("month arithmetic within chrono range"))
    }

    pub fn year(self) -> i32 {
        self.to_naive().year()
    }
}

impl From<NaiveDate> for MarketDate {
    fn from(d: NaiveDate) -> Self {
        Self(d.num_days_from_ce() - EPOCH_CE_DAYS)
    }
}

impl FromStr for MarketDate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
            .map(Self::from)
            .map_err(|e| Error::domain(format!("bad ISO date '{s}': {e}")))
    }
}

impl fmt::Display for MarketDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_naive().format("%Y-%m-%d"))
    }
}

/// Day-count convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DayCount {
    #[default]
    Act360,
    Act365Fixed,
}

impl DayCount {
    fn denominator(self) -> f64 {
        match self {
            DayCount::Act360 => 360.0,
            DayCount::Act365Fixed => 365.0,
        }
    }
}

/// Year fraction between `d1` and `d2` (requires `d1 <= d2`).
pub fn year_fraction(d1: MarketDate, d2: MarketDate, dc: DayCount) -> Result<f64> {
    if d1 > d2 {
        return Err(Error::Ordering(format!("{d1} is after {d2}")));
    }
    Ok((d2.0 - d1.0) as f64 / dc.denominator())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> MarketDate {
        s.parse().unwrap()
    }

    #[test]
    fn act360_examples() {
        let yf = |a, b| year_fraction(d(a), d(b), DayCount::Act360).unwrap();
        assert_eq!(yf("2010-08-16", "2010-08-16"), 0.0);
        assert_eq!(yf("2010-08-12", "2011-08-16"), 369.0 / 360.0);
        assert_eq!(yf("2010-08-12", "2011-08-16"), 1.025);
        assert_eq!(yf("2010-08-16", "2010-11-16"), 92.0 / 360.0);
        assert!((yf("2010-08-16", "2010-11-16") - 0.255556).abs() < 1e-6);
    }

    #[test]
    fn reversed_dates_are_rejected() {
        let err = year_fraction(d("2011-01-01"), d("2010-01-01"), DayCount::Act360);
        assert!(matches!(err, Err(Error::Ordering(_))));
    }

    #[test]
    fn serial_round_trip_and_order() {
        let a = d("2010-08-12");
        assert_eq!(a.to_string(), "2010-08-12");
        assert_eq!(MarketDate::from_serial(a.serial()), a);
        assert!(a < d("2010-08-13"));
        assert_eq!(d("1970-01-01").serial(), 0);
    }

    #[test]
    fn month_roll_clamps() {
        assert_eq!(d("2011-01-31").add_months(1), d("2011-02-28"));
        assert_eq!(d("2011-08-16").add_months(-3), d("2011-05-16"));
    }
}
