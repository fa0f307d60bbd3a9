use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::marketdata::{CurveSet, DiscountCurve, DiscountInterpolation, Tenor};

/// Model variants as restrictions of the weighted two-factor model.
///
/// - `Wg2pp`: all parameters free, multi-curve.
/// - `Mmg`: tenor dampings `eta = 0`, multi-curve.
/// - `G2pp`: `eta = 0` on a single curve used for both discounting and
///   forwarding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelVariant {
    Wg2pp,
    Mmg,
    G2pp,
}

impl ModelVariant {
    pub const ALL: [ModelVariant; 3] = [ModelVariant::G2pp, ModelVariant::Mmg, ModelVariant::Wg2pp];

    pub fn name(self) -> &'static str {
        match self {
            ModelVariant::Wg2pp => "wg2pp",
            ModelVariant::Mmg => "mmg",
            ModelVariant::G2pp => "g2pp",
        }
    }

    pub fn has_eta(self) -> bool {
        matches!(self, ModelVariant::Wg2pp)
    }

    /// Floating tenor used to price a quote indexed on `tenor`.
    ///
    /// The single-curve variant has no notion of Libor tenor: every quote
    /// is priced as a 6M-indexed swap on the single curve.
    pub fn pricing_tenor(self, tenor: Tenor) -> Tenor {
        match self {
            ModelVariant::G2pp => Tenor::M6,
            _ => tenor,
        }
    }

    /// Curves the variant is calibrated on.
    pub fn curves(self, market: &CurveSet) -> Result<CurveSet> {
        match self {
            ModelVariant::G2pp => single_curve_from_forwards(market, Tenor::M6),
            _ => Ok(market.clone()),
        }
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wg2pp" | "wg2++" => Ok(ModelVariant::Wg2pp),
            "mmg" => Ok(ModelVariant::Mmg),
            "g2pp" | "g2++" => Ok(ModelVariant::G2pp),
            _ => Err(Error::domain(format!("unknown model variant '{s}' (expected wg2pp, mmg or g2pp)"))),
        }
    }
}

/// Single curve whose instantaneous forward is the linearly interpolated
/// `tenor` forward curve: `z(T) = (1/T) int_0^T F(u) du` at the forward
/// curve's pillars. Forward rates then come from the discount curve itself.
pub fn single_curve_from_forwards(market: &CurveSet, tenor: Tenor) -> Result<CurveSet> {
    let tc = market
        .tenor_curve(tenor)
        .ok_or_else(|| Error::MissingCurve(format!("no {tenor} forward curve")))?;
    let times = tc.pillar_times();
    let rates = tc.rates();
    let mut integral = 0.0;
    let mut prev_t = 0.0;
    let mut prev_f = rates[0];
    let mut zeros = Vec::with_capacity(times.len());
    for (&t, &f) in times.iter().zip(rates) {
        integral += 0.5 * (prev_f + f) * (t - prev_t);
        zeros.push(integral / t);
        prev_t = t;
        prev_f = f;
    }
    let discount = DiscountCurve::new(
        market.anchor(),
        tc.pillars().to_vec(),
        zeros,
        DiscountInterpolation::LogLinearDiscount,
    )?;
    Ok(CurveSet::single_curve(discount))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled::reference_curves;

    #[test]
    fn parse_names() {
        for v in ModelVariant::ALL {
            assert_eq!(v.name().parse::<ModelVariant>().unwrap(), v);
        }
        assert!("hw".parse::<ModelVariant>().is_err());
    }

    #[test]
    fn single_curve_tracks_forwards() {
        let cs = reference_curves();
        let sc = ModelVariant::G2pp.curves(&cs).unwrap();
        assert!(sc.is_single_curve());
        let tc = cs.tenor_curve(Tenor::M6).unwrap();
        // Between two pillars the discount forward is the average of the
        // linear forward over the interval.
        let t = tc.pillar_times();
        let mid = 0.5 * (t[5] + t[6]);
        let avg = 0.5 * (tc.rates()[5] + tc.rates()[6]);
        assert!((sc.discount().forward(mid).unwrap() - avg).abs() < 1e-12);
    }
}
