use serde::{Deserialize, Serialize};

use super::Candidate;

/// Chosen settings of one feature set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    /// Per member group, in ensemble order.
    pub members: Vec<(String, Candidate)>,
    /// Present for the combined model.
    pub ensemble_weights: Option<Vec<f64>>,
}

/// Cross-validated performance of one feature set on one objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub objective: String,
    pub mode: String,
    pub feature_set: String,
    pub n_games: usize,
    pub n_positive: usize,
    /// Validation AUC of each split.
    pub aucs: Vec<f64>,
    pub mean_auc: f64,
    pub sd_auc: f64,
    pub p_value: Option<f64>,
    pub n_perm: usize,
    pub hyperparameters: Hyperparameters,
    /// Mean and standard deviation of AUC over resampled splits.
    pub resampled: Option<(f64, f64)>,
    pub seed: u64,
    pub config_hash: String,
    pub lexicon_checksum: String,
}

impl EvalReport {
    /// Significance marker: `*` below 0.05, `**` below 0.01, `***` below 0.001.
    pub fn stars(&self) -> &'static str {
        match self.p_value {
            Some(p) if p < 0.001 => "***",
            Some(p) if p < 0.01 => "**",
            Some(p) if p < 0.05 => "*",
            _ => "",
        }
    }
}
