//! Model files: a hypothesis pair as UTF-8 JSON.

use std::path::Path;

use dht_core::{HypothesisPair, Pair, Real};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Raw probabilities may be off by this much from summing to one; they are
/// renormalized on load.
pub const SUM_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphabetSizes {
    pub x: usize,
    pub y1: usize,
    pub y2: usize,
}

/// `p` and `p_bar` are row-major over (x, y1, y2) with y2 varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub alphabet_sizes: AlphabetSizes,
    pub p: Vec<f64>,
    pub p_bar: Vec<f64>,
}

impl ModelFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Read { path: path.display().to_string(), source })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("{}: malformed model file: {e}", path.display())))
    }

    pub fn from_pair(pair: &Pair, name: Option<String>) -> Self {
        let [x, y1, y2] = pair.sizes();
        Self {
            name,
            alphabet_sizes: AlphabetSizes { x, y1, y2 },
            p: pair.p().probs().to_vec(),
            p_bar: pair.p_bar().probs().to_vec(),
        }
    }

    /// Validates both tables and renormalizes them.
    pub fn to_pair(&self) -> Result<Pair> {
        let s = self.alphabet_sizes;
        let cells = s.x * s.y1 * s.y2;
        if cells == 0 {
            return Err(CliError::Validation("alphabet sizes must be positive".into()));
        }
        let table = |name: &str, v: &[f64]| -> Result<Vec<f64>> {
            if v.len() != cells {
                return Err(CliError::Validation(format!(
                    "{name} has {} entries but |X|·|Y1|·|Y2| = {cells}",
                    v.len()
                )));
            }
            if let Some(i) = v.iter().position(|p| !p.is_finite() || *p < 0.0) {
                return Err(CliError::Validation(format!("{name}[{i}] = {} is not a probability", v[i])));
            }
            let sum: f64 = v.iter().sum();
            if (sum - 1.0).abs() > SUM_SLACK {
                return Err(CliError::Validation(format!("{name} sums to {sum}, not 1 (slack {SUM_SLACK:e})")));
            }
            // tables that already sum to one are kept bit-for-bit
            if (sum - 1.0).abs() <= f64::sum_tolerance() {
                return Ok(v.to_vec());
            }
            Ok(v.iter().map(|p| p / sum).collect())
        };
        let p = table("p", &self.p)?;
        let q = table("p_bar", &self.p_bar)?;
        Ok(HypothesisPair::from_tables([s.x, s.y1, s.y2], p, q)?)
    }
}
