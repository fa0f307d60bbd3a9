use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::marketdata::Tenor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuoteKind {
    /// Premium as a fraction of notional.
    Premium,
    /// Annualised lognormal Black volatility.
    BlackVol,
}

impl QuoteKind {
    fn column(self) -> &'static str {
        match self {
            QuoteKind::Premium => "premium",
            QuoteKind::BlackVol => "vol",
        }
    }
}

/// One ATM swaption quote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwaptionQuote {
    pub expiry: f64,
    pub tenor_years: u32,
    pub float_tenor: Tenor,
    pub kind: QuoteKind,
    pub value: f64,
}

impl SwaptionQuote {
    pub fn premium(expiry: f64, tenor_years: u32, float_tenor: Tenor, value: f64) -> Result<Self> {
        let q = Self { expiry, tenor_years, float_tenor, kind: QuoteKind::Premium, value };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.expiry > 0.0) || self.tenor_years == 0 {
            return Err(Error::domain("quote expiry and tenor must be positive"));
        }
        if !(self.value >= 0.0) || !self.value.is_finite() {
            return Err(Error::domain(format!("quote value {} must be finite and non-negative", self.value)));
        }
        Ok(())
    }
}

/// Parses `expiry_years,tenor_years,float_tenor,premium` (or `...,vol`).
pub fn parse_swaptions(text: &str) -> Result<Vec<SwaptionQuote>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| Error::parse(1, e.to_string()))?.clone();
    let names: Vec<&str> = header.iter().collect();
    let kind = match names.as_slice() {
        ["expiry_years", "tenor_years", "float_tenor", "premium"] => QuoteKind::Premium,
        ["expiry_years", "tenor_years", "float_tenor", "vol"] => QuoteKind::BlackVol,
        _ => {
            return Err(Error::parse(
                1,
                format!("expected header expiry_years,tenor_years,float_tenor,premium; found {}", names.join(",")),
            ))
        }
    };
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::parse(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let row = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != 4 {
            return Err(Error::parse(row, format!("expected 4 fields, found {}", rec.len())));
        }
        let num = |i: usize| -> Result<f64> {
            rec[i].parse::<f64>().map_err(|_| Error::parse(row, format!("invalid number '{}'", &rec[i])))
        };
        let tenor_years = rec[1]
            .parse::<u32>()
            .map_err(|_| Error::parse(row, format!("invalid tenor '{}'", &rec[1])))?;
        let float_tenor: Tenor = rec[2].parse().map_err(|_| Error::parse(row, format!("invalid float tenor '{}'", &rec[2])))?;
        let q = SwaptionQuote { expiry: num(0)?, tenor_years, float_tenor, kind, value: num(3)? };
        q.validate().map_err(|e| Error::parse(row, e.to_string()))?;
        if out.iter().any(|o: &SwaptionQuote| o.expiry == q.expiry && o.tenor_years == q.tenor_years && o.float_tenor == q.float_tenor) {
            return Err(Error::parse(row, "duplicate quote".to_string()));
        }
        out.push(q);
    }
    if out.is_empty() {
        return Err(Error::parse(1, "no quotes".to_string()));
    }
    Ok(out)
}

pub fn load_swaptions(path: impl AsRef<Path>) -> Result<Vec<SwaptionQuote>> {
    parse_swaptions(&std::fs::read_to_string(path)?)
}

/// Writes quotes of a single kind; mixed kinds are rejected.
pub fn write_swaptions<W: Write>(quotes: &[SwaptionQuote], mut out: W) -> Result<()> {
    let kind = quotes.first().map_or(QuoteKind::Premium, |q| q.kind);
    if quotes.iter().any(|q| q.kind != kind) {
        return Err(Error::domain("cannot write premium and vol quotes to one file"));
    }
    writeln!(out, "expiry_years,tenor_years,float_tenor,{}", kind.column())?;
    for q in quotes {
        writeln!(out, "{},{},{},{}", q.expiry, q.tenor_years, q.float_tenor, q.value)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "expiry_years,tenor_years,float_tenor,premium\n1,1,3M,0.0027\n2.5,10,6M,0.0413\n";
        let q = parse_swaptions(text).unwrap();
        let mut buf = Vec::new();
        write_swaptions(&q, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), text);
    }

    #[test]
    fn rejects_bad_rows() {
        let h = "expiry_years,tenor_years,float_tenor,premium\n";
        assert!(parse_swaptions(&format!("{h}0,1,3M,0.1\n")).is_err());
        assert!(parse_swaptions(&format!("{h}1,1,3M,-0.1\n")).is_err());
        assert!(parse_swaptions(&format!("{h}1,1,3M,0.1\n1,1,3M,0.2\n")).is_err());
        assert!(parse_swaptions("a,b,c,d\n1,1,3M,0.1\n").is_err());
    }

    #[test]
    fn vol_header() {
        let q = parse_swaptions("expiry_years,tenor_years,float_tenor,vol\n1,1,3M,0.3\n").unwrap();
        assert_eq!(q[0].kind, QuoteKind::BlackVol);
    }
}
