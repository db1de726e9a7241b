//! Scan checkpointing: a single human-readable JSON record, written
//! atomically (write to a temporary file, then rename). The running-maximum
//! ratio is stored as an exact hex-float string so a resumed scan restores
//! the tracker state bit for bit; a decimal round-trip would not.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hp::HpFloat;
use crate::Nat;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Checkpoint {
    /// Last index fully processed and flushed to the output stream.
    pub last_m: String,
    /// Argmax of the running maximum so far.
    pub best_m: String,
    /// The running maximum as an exact hex float.
    pub best_ratio_hex: String,
    /// Working precision the scan runs at.
    pub prec: u32,
}

impl Checkpoint {
    pub fn new(last_m: &Nat, best_m: &Nat, best_ratio: &HpFloat, prec: u32) -> Self {
        Checkpoint {
            last_m: last_m.to_string(),
            best_m: best_m.to_string(),
            best_ratio_hex: best_ratio.to_hex(),
            prec,
        }
    }

    pub fn last_m(&self) -> Result<Nat> {
        self.last_m
            .parse()
            .map_err(|_| Error::Parse(format!("bad last_m `{}`", self.last_m)))
    }

    pub fn best_m(&self) -> Result<Nat> {
        self.best_m
            .parse()
            .map_err(|_| Error::Parse(format!("bad best_m `{}`", self.best_m)))
    }

    pub fn best_ratio(&self) -> Result<HpFloat> {
        HpFloat::from_hex(&self.best_ratio_hex)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).expect("checkpoint serialization");
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, json)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Load and validate a checkpoint; any defect refuses the resume.
    pub fn load(path: &Path) -> Result<Checkpoint> {
        let err = |reason: String| Error::Checkpoint {
            path: path.display().to_string(),
            reason,
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| err(format!("unreadable: {e}")))?;
        let cp: Checkpoint =
            serde_json::from_str(&text).map_err(|e| err(format!("corrupt JSON: {e}")))?;
        cp.last_m().map_err(|e| err(e.to_string()))?;
        cp.best_m().map_err(|e| err(e.to_string()))?;
        cp.best_ratio().map_err(|e| err(e.to_string()))?;
        Ok(cp)
    }
}
