use multicurve::bundled::{reference_curves, published_params};
use multicurve::calibration::{ModelVariant, ParamSpace};
use multicurve::math::norm_pdf;
use multicurve::montecarlo::{exact_step_moments, Measure};
use multicurve::pricing::{black_price, build_schedule, delta_weights, implied_black_vol, swaption_price, OptionSide};
use multicurve::{ShiftRule, Tenor, WgParams};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = WgParams> {
    (
        0.001f64..1.0,
        0.01f64..3.0,
        0.002f64..0.03,
        0.002f64..0.03,
        0.0f64..2.0,
        0.0f64..2.0,
        -0.95f64..0.95,
        0.5f64..2.0,
        0.0f64..2.0,
        0.1f64..2.0,
    )
        .prop_map(|(l1, dl, h1, h2, e1, e2, rho, b0, b1, b2)| {
            WgParams::two_factor([l1, l1 + dl], [h1, h2], [e1, e2], rho, b0, b1, b2).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn discount_is_decreasing(a in 0.01f64..29.0, d in 0.01f64..1.0) {
        let dc = reference_curves();
        let dc = dc.discount();
        let p0 = dc.discount(a).unwrap();
        prop_assert!(p0 > 0.0 && p0 < 1.0);
        prop_assert!(dc.discount(a + d).unwrap() < p0);
    }

    #[test]
    fn put_call_parity(f in 0.001f64..0.08, k in 0.001f64..0.08, shift in 0.0f64..4.0, gamma in 0.0f64..1.0, a in 0.1f64..10.0) {
        let payer = black_price(f, k, shift, gamma, a, OptionSide::Payer).unwrap();
        let receiver = black_price(f, k, shift, gamma, a, OptionSide::Receiver).unwrap();
        prop_assert!((payer - receiver - a * (f - k)).abs() < 1e-13 * a * (1.0 + shift));
    }

    #[test]
    fn black_is_homogeneous_and_monotone(f in 0.001f64..0.08, k in 0.001f64..0.08, shift in 0.0f64..0.05, gamma in 0.01f64..1.0, scale in 0.5f64..4.0) {
        let base = black_price(f, k, shift, gamma, 1.0, OptionSide::Payer).unwrap();
        let scaled = black_price(scale * f, scale * k, scale * shift, gamma, 1.0, OptionSide::Payer).unwrap();
        prop_assert!((scaled - scale * base).abs() <= 1e-12 * (1.0 + scaled));
        let wider = black_price(f, k, shift, gamma * 1.1, 1.0, OptionSide::Payer).unwrap();
        prop_assert!(wider >= base - 1e-15);
    }

    #[test]
    fn implied_vol_round_trips(f in 0.005f64..0.06, m in -0.3f64..0.3, sigma in 0.05f64..0.8, t in 0.5f64..20.0) {
        let k = f * (1.0 + m);
        let price = black_price(f, k, 0.0, sigma * t.sqrt(), 1.0, OptionSide::Payer).unwrap();
        // Inversion stops at a price tolerance; skip cells where vega is too small to pin sigma.
        let d1 = ((f / k).ln() + 0.5 * sigma * sigma * t) / (sigma * t.sqrt());
        prop_assume!(price > 0.0 && f * norm_pdf(d1) * t.sqrt() > 1e-4);
        let back = implied_black_vol(price, f, k, 0.0, 1.0, t).unwrap();
        prop_assert!((back - sigma).abs() < 1e-6, "{back} vs {sigma}");
    }

    #[test]
    fn frozen_weights_sum_to_one(expiry in 1u32..20, tenor in 1u32..20, six in any::<bool>()) {
        let cs = reference_curves();
        let float = if six { Tenor::M6 } else { Tenor::M3 };
        let sch = build_schedule(expiry as f64, tenor, float, Tenor::Y1).unwrap();
        let w = delta_weights(&cs, &sch, &ShiftRule::inverse_tenor()).unwrap();
        prop_assert_eq!(w.len(), sch.float_periods());
        prop_assert!(w.iter().all(|&v| v > 0.0));
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn swaption_price_increases_with_volatility(p in params(), expiry in 1u32..15, tenor in 1u32..15, scale in 1.01f64..3.0) {
        let cs = reference_curves();
        let sch = build_schedule(expiry as f64, tenor, Tenor::M6, Tenor::Y1).unwrap();
        let lo = swaption_price(&p, &cs, &sch, None).unwrap();
        let hi = swaption_price(&p.scaled_h(scale), &cs, &sch, None).unwrap();
        prop_assert!(lo.price > 0.0 && hi.price > lo.price);
        prop_assert!((hi.gamma / lo.gamma - scale).abs() < 1e-12 * scale);
    }

    #[test]
    fn step_covariance_is_symmetric_psd(p in params(), a in 0.0f64..10.0, len in 0.01f64..2.0) {
        let s = exact_step_moments(&p, Measure::Forward(15.0), a, a + len);
        prop_assert_eq!(s.cov[1], s.cov[2]);
        let (c00, c01, c11) = (s.cov[0], s.cov[1], s.cov[3]);
        prop_assert!(c00 >= 0.0 && c11 >= 0.0);
        prop_assert!(c00 * c11 - c01 * c01 >= -1e-18 * c00 * c11);
    }

    #[test]
    fn param_space_round_trips(p in params()) {
        let space = ParamSpace::new(ModelVariant::Wg2pp);
        let theta = space.from_params(&p).unwrap();
        let back = space.to_params(&theta).unwrap();
        for i in 0..2 {
            prop_assert!((back.lambda()[i] - p.lambda()[i]).abs() < 1e-13);
            prop_assert_eq!(back.h()[i], p.h()[i]);
            prop_assert_eq!(back.eta()[i], p.eta()[i]);
        }
        prop_assert_eq!(back.rho(0, 1), p.rho(0, 1));
        prop_assert_eq!(back.beta(), p.beta());
    }

    #[test]
    fn params_toml_round_trips(p in params()) {
        let back = WgParams::from_toml_str(&p.to_toml_string()).unwrap();
        prop_assert_eq!(back, p);
    }
}

#[test]
fn published_parameters_are_ordered() {
    for v in ModelVariant::ALL {
        assert!(published_params(v).is_ordered());
    }
}
