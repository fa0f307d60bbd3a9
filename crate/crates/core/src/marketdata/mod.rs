//! Dates, day counts and the initial discounting/forwarding term structures.
//!
//! Curves are evaluated on a single model clock: ACT/360 year fractions
//! measured from the curve anchor (the quote date). Date-based entry points
//! convert to that clock and delegate.

mod curve;
mod date;
mod io;

pub use curve::{CurveSet, DiscountCurve, DiscountInterpolation, Tenor, TenorCurve};
pub use date::{year_fraction, DayCount, MarketDate};
pub use io::{load_curves, parse_curves, save_curves, write_curves};
