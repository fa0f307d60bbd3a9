use std::io::{Read, Write};

use super::engine::PathSet;
use crate::error::{Error, Result};

/// Writes the states at the last observation time: a header of two
/// little-endian `u64` (paths, factors) followed by `paths x factors`
/// little-endian `f64` in row-major order.
pub fn write_terminal_states<W: Write>(set: &PathSet, mut out: W) -> Result<()> {
    let last = set.times().len() - 1;
    out.write_all(&(set.paths() as u64).to_le_bytes())?;
    out.write_all(&(set.factors() as u64).to_le_bytes())?;
    for k in 0..set.paths() {
        for v in set.x(k, last) {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Reads a dump written by [`write_terminal_states`]: `(paths, factors, values)`.
pub fn read_terminal_states<R: Read>(mut input: R) -> Result<(usize, usize, Vec<f64>)> {
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    let paths = u64::from_le_bytes(word) as usize;
    input.read_exact(&mut word)?;
    let factors = u64::from_le_bytes(word) as usize;
    let mut values = Vec::with_capacity(paths * factors);
    for _ in 0..paths * factors {
        input.read_exact(&mut word)?;
        values.push(f64::from_le_bytes(word));
    }
    let mut rest = Vec::new();
    input.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(Error::domain(format!("{} trailing bytes after state dump", rest.len())));
    }
    Ok((paths, factors, values))
}
