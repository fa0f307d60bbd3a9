use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use multicurve::{MarketDate, Tenor};

use super::{emit, load_curves};
use crate::error::{CliError, CliResult};
use crate::manifest::ConfigDigest;
use crate::CurveArgs;

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[command(flatten)]
    pub input: CurveArgs,

    /// Comma-separated ISO dates; only these samples are printed.
    #[arg(long, value_delimiter = ',')]
    pub sample_dates: Option<Vec<String>>,

    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

const DEFAULT_SAMPLE_YEARS: [i32; 9] = [1, 2, 3, 5, 7, 10, 15, 20, 30];

pub fn run(args: CurvesArgs) -> CliResult<()> {
    let loaded = load_curves(&args.input, &mut ConfigDigest::new("curves"))?;
    let cs = &loaded.set;
    let dc = cs.discount();
    let mut out = String::new();

    let samples: Vec<MarketDate> = match &args.sample_dates {
        Some(list) => list
            .iter()
            .map(|s| s.trim().parse::<MarketDate>().map_err(|e| CliError::usage(format!("--sample-dates: {e}"))))
            .collect::<CliResult<_>>()?,
        None => {
            writeln!(out, "# discount pillars ({})", loaded.label).unwrap();
            writeln!(out, "date,t,zero_rate,discount").unwrap();
            for (d, z) in dc.pillars().iter().zip(dc.zero_rates()) {
                let t = dc.time_of(*d)?;
                writeln!(out, "{d},{t},{z},{}", dc.discount(t)?).unwrap();
            }
            for tenor in cs.tenors() {
                let tc = cs.tenor_curve(tenor).expect("listed tenor");
                writeln!(out, "# forward pillars {tenor}").unwrap();
                writeln!(out, "date,t,rate").unwrap();
                for ((d, t), r) in tc.pillars().iter().zip(tc.pillar_times()).zip(tc.rates()) {
                    writeln!(out, "{d},{t},{r}").unwrap();
                }
            }
            writeln!(out, "# samples").unwrap();
            DEFAULT_SAMPLE_YEARS.iter().map(|y| cs.anchor().add_months(12 * y)).collect()
        }
    };

    let tenors: Vec<Tenor> = if cs.is_single_curve() { vec![Tenor::M3, Tenor::M6] } else { cs.tenors().collect() };
    write!(out, "date,t,zero_rate,discount,inst_forward,ois_3M,ois_6M").unwrap();
    for t in &tenors {
        write!(out, ",fwd_{t}").unwrap();
    }
    writeln!(out).unwrap();
    for d in samples {
        let t = dc.time_of(d)?;
        if t <= 0.0 {
            return Err(CliError::data(format!("sample date {d} is not after the anchor {}", cs.anchor())));
        }
        write!(
            out,
            "{d},{t},{},{},{},{},{}",
            dc.zero_rate(t)?,
            dc.discount(t)?,
            dc.forward(t)?,
            ois_or_na(dc, t, Tenor::M3),
            ois_or_na(dc, t, Tenor::M6)
        )
        .unwrap();
        for tenor in &tenors {
            write!(out, ",{}", cs.forward(t, *tenor)?).unwrap();
        }
        writeln!(out).unwrap();
    }
    emit(args.out.as_ref(), out.as_bytes())
}

fn ois_or_na(dc: &multicurve::DiscountCurve, t: f64, tenor: Tenor) -> String {
    dc.ois_rate(t, tenor.years()).map_or_else(|_| "NA".to_string(), |v| v.to_string())
}
