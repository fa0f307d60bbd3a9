use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliResult;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Description of a run written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    /// SHA-256 over the input file contents and the effective settings.
    pub config_digest: String,
    pub seed: Option<u64>,
    pub output_dir: String,
    pub tool_version: String,
}

/// Incremental digest of everything that determines a run's output.
pub struct ConfigDigest(Sha256);

impl ConfigDigest {
    pub fn new(command: &str) -> Self {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        Self(h)
    }

    pub fn add(&mut self, label: &str, bytes: &[u8]) {
        self.0.update((label.len() as u64).to_le_bytes());
        self.0.update(label.as_bytes());
        self.0.update((bytes.len() as u64).to_le_bytes());
        self.0.update(bytes);
    }

    pub fn finish(self) -> String {
        hex::encode(self.0.finalize())
    }
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> CliResult<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serialises");
        std::fs::write(dir.join(MANIFEST_FILE), text + "\n")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_separates_fields() {
        let run = |parts: &[(&str, &str)]| {
            let mut d = ConfigDigest::new("calibrate");
            for (l, b) in parts {
                d.add(l, b.as_bytes());
            }
            d.finish()
        };
        assert_eq!(run(&[("a", "xy")]), run(&[("a", "xy")]));
        assert_ne!(run(&[("a", "xy")]), run(&[("ax", "y")]));
        assert_ne!(run(&[("a", "x"), ("b", "")]), run(&[("a", "xb")]));
        assert_eq!(run(&[]).len(), 64);
    }
}
