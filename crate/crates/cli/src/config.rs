use serde::{Deserialize, Serialize};

use nodaltree::verify::{CorpusSpec, Tolerances};
use nodaltree::{PotentialLaw, TreeKind, WeightLaw};

use crate::UsageError;

/// Residual bound used by the solver certificate, relative to `‖A‖_F`.
pub const EPS_RES: f64 = nodaltree::eigen::EPS_RES;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Generate {
        kind: TreeKind,
        n: usize,
        weights: String,
        potential: String,
    },
    Input {
        path: String,
    },
    Corpus {
        kind: TreeKind,
        n_min: usize,
        n_max: usize,
        weights: String,
        potential: String,
    },
}

/// Everything that determines an output. Embedded in every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub source: Source,
    pub seed: u64,
    pub eps_z: f64,
    /// `null` means `1e-8 · max(1, ‖A‖_F)` per operator.
    pub tau_gap: Option<f64>,
    pub eps_res: f64,
    pub format: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigen_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub remix_samples: Option<usize>,
}

impl RunConfig {
    pub fn check(&self) -> Result<(), UsageError> {
        if !(self.eps_z > 0.0 && self.eps_z.is_finite()) {
            return Err(UsageError(format!("--eps-z must be positive, got {}", self.eps_z)));
        }
        if let Some(t) = self.tau_gap {
            if !(t > 0.0 && t.is_finite()) {
                return Err(UsageError(format!("--tau-gap must be positive, got {t}")));
            }
        }
        if self.jobs == Some(0) {
            return Err(UsageError("--jobs must be at least 1".into()));
        }
        Ok(())
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("run config always serializes")
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("run config always serializes")
    }
}

/// Overrides read from `batch --config FILE`. Present keys replace the
/// corresponding flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchOverrides {
    pub generate: Option<TreeKind>,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub weights: Option<String>,
    pub potential: Option<String>,
    pub seed: Option<u64>,
    pub count: Option<usize>,
    pub jobs: Option<usize>,
    pub eps_z: Option<f64>,
    pub tau_gap: Option<f64>,
    pub remix_samples: Option<usize>,
}

/// Fully resolved batch parameters.
#[derive(Debug, Clone)]
pub struct BatchPlan {
    pub corpus: CorpusSpec,
    pub seed: u64,
    pub count: usize,
    pub jobs: usize,
    pub tolerances: Tolerances,
}

pub fn parse_weights(s: &str) -> Result<WeightLaw, UsageError> {
    s.parse().map_err(|e| UsageError(format!("--weights: {e}")))
}

pub fn parse_potential(s: &str) -> Result<PotentialLaw, UsageError> {
    s.parse().map_err(|e| UsageError(format!("--potential: {e}")))
}
