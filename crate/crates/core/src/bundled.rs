//! Reference market data quoted on 12 August 2010 and the published fitted
//! parameters for the three model variants.

use crate::calibration::ModelVariant;
use crate::hjm::WgParams;
use crate::marketdata::{parse_curves, CurveSet};
use crate::pricing::{parse_swaptions, SwaptionQuote};

/// Eonia zero rates and Euribor 3M/6M forwards (ACT/360).
pub const REFERENCE_CURVES_CSV: &str = include_str!("../data/reference_curves.csv");

/// ATM swaption premia, 12 expiries x 12 tenors, as decimal fractions of notional.
pub const REFERENCE_SWAPTIONS_CSV: &str = include_str!("../data/reference_swaptions.csv");

pub fn reference_curves() -> CurveSet {
    parse_curves(REFERENCE_CURVES_CSV, None).expect("bundled curve file is valid")
}

pub fn reference_quotes() -> Vec<SwaptionQuote> {
    parse_swaptions(REFERENCE_SWAPTIONS_CSV).expect("bundled swaption file is valid")
}

/// Expiries (rows) and underlying tenors (columns) of the quote grid, in years.
pub const GRID_YEARS: [u32; 12] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20];

/// Published calibrated parameters for each variant.
pub fn published_params(variant: ModelVariant) -> WgParams {
    let p = match variant {
        ModelVariant::G2pp => {
            WgParams::two_factor([0.0008, 0.0036], [0.0132, 0.0162], [0.0, 0.0], -0.9488, 1.0976, 1.5277, 0.4928)
        }
        ModelVariant::Mmg => {
            WgParams::two_factor([0.0090, 5.0077], [0.0057, 0.0318], [0.0, 0.0], -0.8396, 1.2811, 1.3109, 0.6059)
        }
        ModelVariant::Wg2pp => WgParams::two_factor(
            [0.0073, 4.7344],
            [0.0059, 0.0411],
            [0.1581, 0.8894],
            -0.8577,
            1.3160,
            1.3327,
            0.5900,
        ),
    };
    p.expect("published parameters are valid")
}
