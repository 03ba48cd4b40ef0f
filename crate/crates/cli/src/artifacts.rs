//! Persisted failure-count artifacts.
//!
//! Counts are meaningless without the exact code layout and decoder
//! tie-break that produced them, so the schema pins schema_version, the
//! code layout hash, and the decoder version; loading validates all three.

use serde::{Deserialize, Serialize};

use pecmem::analytics::{CountEntry, FailureCounts};
use pecmem::{CodeKind, CodeSpec, DECODER_VERSION};

use crate::CliError;

pub const COUNTS_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeIdentity {
    pub kind: CodeKind,
    pub d: usize,
    pub layout_hash: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountsArtifact {
    pub schema_version: u32,
    pub code: CodeIdentity,
    pub decoder_version: String,
    /// Counts are X-sector integers; depolarizing predictions map them
    /// through the Y-acts-like-X / Z-acts-like-identity reduction.
    pub noise: String,
    pub counts: Vec<CountEntry>,
}

impl CountsArtifact {
    pub fn new(code: &CodeSpec) -> Self {
        CountsArtifact {
            schema_version: COUNTS_SCHEMA_VERSION,
            code: CodeIdentity {
                kind: code.kind(),
                d: code.distance(),
                layout_hash: format!("{:016x}", code.layout_hash()),
            },
            decoder_version: DECODER_VERSION.to_string(),
            noise: "bit_flip".to_string(),
            counts: Vec::new(),
        }
    }

    /// Check the artifact belongs to this exact code and decoder.
    pub fn validate_against(&self, code: &CodeSpec) -> Result<(), CliError> {
        if self.schema_version != COUNTS_SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "counts schema_version {} unsupported",
                self.schema_version
            )));
        }
        let hash = format!("{:016x}", code.layout_hash());
        if self.code.kind != code.kind()
            || self.code.d != code.distance()
            || self.code.layout_hash != hash
        {
            return Err(CliError::Config(format!(
                "counts artifact is for {:?} d={} layout {}, not {:?} d={} layout {hash}",
                self.code.kind,
                self.code.d,
                self.code.layout_hash,
                code.kind(),
                code.distance()
            )));
        }
        if self.decoder_version != DECODER_VERSION {
            return Err(CliError::Config(format!(
                "counts produced by decoder {}, this binary is {DECODER_VERSION}",
                self.decoder_version
            )));
        }
        Ok(())
    }

    pub fn merge(&mut self, entry: CountEntry) {
        self.counts.retain(|e| e.k != entry.k);
        self.counts.push(entry);
        self.counts.sort_by_key(|e| e.k);
    }

    pub fn to_failure_counts(&self, n: usize, omega: usize) -> FailureCounts {
        let mut counts = FailureCounts::new(n, omega);
        for entry in &self.counts {
            counts.insert(entry.clone());
        }
        counts
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), CliError> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)
                    .map_err(|e| CliError::Io(format!("creating {}: {e}", parent.display())))?;
            }
        }
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Io(format!("serializing counts: {e}")))?;
        std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::MissingArtifact(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("bad counts artifact: {e}")))
    }
}
