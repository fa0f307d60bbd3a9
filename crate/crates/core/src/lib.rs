//! Multi-curve interest-rate engine built on an extended HJM framework.
//!
//! A single family of Gaussian Markov factors `(X, Y)` drives the OIS
//! (discounting) curve and every forward Libor curve. The crate covers:
//!
//! - [`marketdata`]: dates, day counts, discount and tenor curves, CSV I/O.
//! - [`hjm`]: the weighted-Gaussian parameterization, volatility kernels,
//!   state evolution and the reconstruction formulas for Libor, OIS and bonds.
//! - [`pricing`]: swap schedules, annuities, par rates, the frozen-weights
//!   shifted-lognormal swaption formula, Black pricing and implied vols.
//! - [`calibration`]: least-squares fitting of the WG2++/MMG/G2++ variants to
//!   ATM swaption premia.
//! - [`montecarlo`]: exact Gaussian simulation of the state and martingale checks.

pub mod bundled;
pub mod calibration;
pub mod error;
pub mod hjm;
pub mod marketdata;
pub mod math;
pub mod montecarlo;
pub mod pricing;

pub use error::{Error, Result};
pub use hjm::{HjmState, ShiftRule, VolKernel, WgParams};
pub use marketdata::{CurveSet, DayCount, DiscountCurve, MarketDate, Tenor, TenorCurve};
pub use pricing::{SwapSchedule, SwaptionAnalytics, SwaptionQuote};
