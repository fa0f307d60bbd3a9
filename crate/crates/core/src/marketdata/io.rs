//! `curves.csv` reader and writer.
//!
//! Schema: header `date,kind,tenor,rate`; `kind` is `zero` (OIS zero rate,
//! empty tenor) or `fwd` (forward Libor, tenor such as `3M`); ISO dates;
//! decimal rates. The anchor is carried by a leading directive line
//! `# anchor: YYYY-MM-DD`; other `#` lines are comments.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use super::curve::{CurveSet, DiscountCurve, DiscountInterpolation, Tenor, TenorCurve};
use super::date::MarketDate;
use crate::error::{Error, Result};

#[derive(Debug, serde::Deserialize)]
struct Row {
    date: String,
    kind: String,
    tenor: String,
    rate: String,
}

fn anchor_directive(text: &str) -> Result<Option<MarketDate>> {
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(v) = rest.trim().strip_prefix("anchor:") {
                return v.trim().parse().map(Some).map_err(|e: Error| Error::parse(i + 1, e.to_string()));
            }
        }
    }
    Ok(None)
}

/// Parses curve CSV text. `anchor` overrides the file's anchor directive.
pub fn parse_curves(text: &str, anchor: Option<MarketDate>) -> Result<CurveSet> {
    if text.trim().is_empty() {
        return Err(Error::parse(1, "empty curve file"));
    }
    let anchor = match anchor {
        Some(a) => a,
        None => anchor_directive(text)?
            .ok_or_else(|| Error::parse(1, "missing '# anchor: YYYY-MM-DD' directive"))?,
    };

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(1, e.to_string()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["date", "kind", "tenor", "rate"] {
        return Err(Error::parse(1, format!("unexpected header {:?}", headers)));
    }

    let mut zero: Vec<(MarketDate, f64)> = Vec::new();
    let mut fwd: BTreeMap<Tenor, Vec<(MarketDate, f64)>> = BTreeMap::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let row = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::parse(row, e.to_string())
        })?;
        let row_no = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let row: Row = rec
            .deserialize(Some(&headers))
            .map_err(|e| Error::parse(row_no, e.to_string()))?;
        let date: MarketDate = row
            .date
            .parse()
            .map_err(|e: Error| Error::parse(row_no, e.to_string()))?;
        let rate: f64 = row
            .rate
            .parse()
            .map_err(|_| Error::parse(row_no, format!("bad rate '{}'", row.rate)))?;
        if !rate.is_finite() {
            return Err(Error::parse(row_no, "rate must be finite"));
        }
        let series = match row.kind.as_str() {
            "zero" => {
                if !row.tenor.is_empty() {
                    return Err(Error::parse(row_no, "zero rows take an empty tenor"));
                }
                &mut zero
            }
            "fwd" => {
                let tenor: Tenor = row
                    .tenor
                    .parse()
                    .map_err(|e: Error| Error::parse(row_no, e.to_string()))?;
                fwd.entry(tenor).or_default()
            }
            other => return Err(Error::parse(row_no, format!("unknown kind '{other}'"))),
        };
        if let Some(&(last, _)) = series.last() {
            if date == last {
                return Err(Error::parse(row_no, format!("duplicate pillar {date}")));
            }
            if date < last {
                return Err(Error::parse(row_no, format!("pillar {date} out of order after {last}")));
            }
        }
        if date <= anchor {
            return Err(Error::parse(row_no, format!("pillar {date} not after anchor {anchor}")));
        }
        series.push((date, rate));
    }

    if zero.is_empty() {
        return Err(Error::parse(1, "no zero-rate rows"));
    }
    let (dates, rates): (Vec<_>, Vec<_>) = zero.into_iter().unzip();
    let discount = DiscountCurve::new(anchor, dates, rates, DiscountInterpolation::LogLinearDiscount)?;
    let mut set = CurveSet::new(discount);
    for (tenor, pts) in fwd {
        let (dates, rates): (Vec<_>, Vec<_>) = pts.into_iter().unzip();
        set.insert_tenor_curve(TenorCurve::new(anchor, tenor, dates, rates)?)?;
    }
    Ok(set)
}

pub fn load_curves(path: impl AsRef<Path>) -> Result<CurveSet> {
    let text = std::fs::read_to_string(path)?;
    parse_curves(&text, None)
}

/// Writes a curve set in the `curves.csv` schema. Rates are printed in their
/// shortest round-trip form, so a reload reproduces them bit-exactly.
pub fn write_curves<W: Write>(set: &CurveSet, mut out: W) -> Result<()> {
    writeln!(out, "# anchor: {}", set.anchor())?;
    writeln!(out, "date,kind,tenor,rate")?;
    let dc = set.discount();
    for (d, r) in dc.pillars().iter().zip(dc.zero_rates()) {
        writeln!(out, "{d},zero,,{r}")?;
    }
    for tenor in set.tenors() {
        let c = set.tenor_curve(tenor).expect("listed tenor");
        for (d, r) in c.pillars().iter().zip(c.rates()) {
            writeln!(out, "{d},fwd,{tenor},{r}")?;
        }
    }
    Ok(())
}

pub fn save_curves(set: &CurveSet, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_curves(set, std::io::BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "# anchor: 2010-08-12\n\
        date,kind,tenor,rate\n\
        2010-08-13,zero,,0.00477\n\
        2011-08-16,zero,,0.006357\n\
        2011-08-16,fwd,3M,0.010829\n";

    #[test]
    fn parses_small_file() {
        let cs = parse_curves(SMALL, None).unwrap();
        assert_eq!(cs.discount().pillars().len(), 2);
        assert_eq!(cs.tenor_curve(Tenor::M3).unwrap().rates(), &[0.010829]);
    }

    #[test]
    fn empty_file_is_parse_error() {
        assert!(matches!(parse_curves("", None), Err(Error::Parse { .. })));
        assert!(matches!(parse_curves("   \n", None), Err(Error::Parse { .. })));
    }

    #[test]
    fn duplicate_pillar_names_row() {
        let text = format!("{SMALL}2011-08-16,fwd,3M,0.011\n");
        match parse_curves(&text, None) {
            Err(Error::Parse { row, message }) => {
                assert_eq!(row, 6);
                assert!(message.contains("duplicate"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unsorted_rows_rejected() {
        let text = "# anchor: 2010-08-12\ndate,kind,tenor,rate\n\
                    2011-08-16,zero,,0.006\n2010-09-16,zero,,0.005\n";
        match parse_curves(text, None) {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_rate_rejected() {
        let text = "# anchor: 2010-08-12\ndate,kind,tenor,rate\n2011-08-16,zero,,abc\n";
        assert!(matches!(parse_curves(text, None), Err(Error::Parse { row: 3, .. })));
    }

    #[test]
    fn missing_anchor_needs_override() {
        let text = "date,kind,tenor,rate\n2011-08-16,zero,,0.006\n";
        assert!(parse_curves(text, None).is_err());
        let a = "2010-08-12".parse().unwrap();
        assert!(parse_curves(text, Some(a)).is_ok());
    }

    #[test]
    fn single_pillar_curve_is_flat() {
        let text = "# anchor: 2010-08-12\ndate,kind,tenor,rate\n2011-08-16,zero,,0.01\n";
        let cs = parse_curves(text, None).unwrap();
        let dc = cs.discount();
        assert_eq!(dc.zero_rate(0.3).unwrap(), 0.01);
        assert_eq!(dc.zero_rate(30.0).unwrap(), 0.01);
    }
}
