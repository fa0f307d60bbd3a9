use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use multicurve::bundled::{reference_curves, reference_quotes, published_params};
use multicurve::calibration::{CalibrationProblem, ModelVariant, OptimizerSettings};
use multicurve::hjm::VolKernel;
use multicurve::montecarlo::{exact_step_moments, simulate, Measure, PathConfig};
use multicurve::pricing::{build_schedule, SwaptionPricer};
use multicurve::Tenor;

fn pricing(c: &mut Criterion) {
    let cs = reference_curves();
    let p = published_params(ModelVariant::Wg2pp);
    c.bench_function("price 12x12 atm grid", |b| {
        b.iter(|| {
            let mut pricer = SwaptionPricer::new(&p, &cs);
            let mut sum = 0.0;
            for e in 1..=12 {
                for t in 1..=12u32 {
                    let tenor = if t == 1 { Tenor::M3 } else { Tenor::M6 };
                    let sch = build_schedule(e as f64, t, tenor, Tenor::Y1).unwrap();
                    sum += pricer.price(&sch, None).unwrap().price;
                }
            }
            black_box(sum)
        })
    });
    let k = VolKernel::new(&p);
    c.bench_function("variance integral quadrature", |b| {
        b.iter(|| black_box(k.variance_integral_quadrature(black_box(0.7), 10.0)))
    });
}

fn calibration(c: &mut Criterion) {
    let cs = reference_curves();
    let quotes = reference_quotes();
    let prob = CalibrationProblem::new(ModelVariant::Wg2pp, &cs, &quotes, OptimizerSettings::default()).unwrap();
    let p = published_params(ModelVariant::Wg2pp);
    c.bench_function("objective evaluation", |b| b.iter(|| black_box(prob.evaluate_params(&p).objective)));
}

fn montecarlo(c: &mut Criterion) {
    let p = published_params(ModelVariant::Wg2pp);
    c.bench_function("exact step moments", |b| {
        b.iter(|| black_box(exact_step_moments(&p, Measure::Forward(10.0), 1.0, 1.25)))
    });
    let cfg = PathConfig::new(10_000, vec![0.0, 1.0, 2.0, 5.0], Measure::RiskNeutral, 7);
    let mut g = c.benchmark_group("simulate");
    g.sample_size(10);
    g.bench_function("10k paths 3 steps", |b| b.iter(|| black_box(simulate(&p, &cfg).unwrap().paths())));
    g.finish();
}

criterion_group!(benches, pricing, calibration, montecarlo);
criterion_main!(benches);
