//! Classification and evaluation: standardisation, L2-regularised logistic
//! regression, rank AUC, puzzle-aware splits, grid search with weighted model
//! averaging, and permutation significance.

mod auc;
mod logreg;
mod permutation;
mod report;
mod select;
mod splits;
mod standardize;

pub use auc::auc;
pub use logreg::{loss_and_gradient, train_logreg, LogRegModel, TrainOptions};
pub use permutation::{permutation_test, permutation_test_many, PermutationResult};
pub use report::{EvalReport, Hyperparameters};
pub use select::{
    cross_validate, ensemble_search, select_candidate, simplex_weights, Candidate, CvResult,
    Ensemble, GridConfig,
};
pub use splits::{iteration_seed, puzzle_aware_splits, Split};
pub use standardize::{standardize_dense, Design, Standardizer};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("labels contain a single class")]
    SingleClassLabels,
    #[error("no split with both classes on both sides after {0} draws")]
    UnsplittableCorpus(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("scores must be comparable (no NaN)")]
    IncomparableScores,
}
