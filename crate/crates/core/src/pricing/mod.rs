//! Swap analytics and the analytic swaption pricer.
//!
//! Under frozen weights the par swap rate follows a shifted-lognormal
//! dynamics, so an ATM swaption is priced with a Black formula on
//! `S + psi` with total standard deviation `Gamma`.

mod black;
mod quotes;
mod schedule;
mod swap;
mod swaption;

pub use black::{black_price, implied_black_vol, OptionSide};
pub use quotes::{load_swaptions, parse_swaptions, write_swaptions, QuoteKind, SwaptionQuote};
pub use schedule::{build_schedule, build_schedule_from_date, SwapSchedule};
pub use swap::{annuity, basis_swap_spread, delta_weights, par_swap_rate, swap_shift_psi};
pub use swaption::{swap_vol_gamma, swaption_price, FrozenSwap, SwaptionAnalytics, SwaptionPricer};
