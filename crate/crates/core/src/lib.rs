//! Constructiveness of task-oriented team discussions: geodesic scoring of
//! team and solo guesses, conversational and linguistic features, and
//! prediction of whether a team outperforms its members.
//!
//! Numeric code is generic over [`scalar::Scalar`] or [`scalar::Real`]; the
//! aliases below fix the common choices.

pub mod conversation;
pub mod corpus;
pub mod dynamics;
pub mod geo;
pub mod ideaflow;
pub mod lingfeat;
pub mod model;
pub mod pipeline;
pub mod scalar;
pub mod synth;
pub mod text;

/// Exact rational scalar.
pub type Rational = num_rational::Ratio<i64>;

pub type Label = geo::ConstructivenessLabel<f64>;
pub type ExactLabel = geo::ConstructivenessLabel<Rational>;
pub type Score = geo::Score<f64>;
pub type LatLon = geo::LatLon<f64>;
pub type LogReg = model::LogRegModel<f64>;
pub type LogRegF32 = model::LogRegModel<f32>;
pub type Standardizer = model::Standardizer<f64>;
pub type StandardizerF32 = model::Standardizer<f32>;
pub type Design = model::Design<f64>;

pub use corpus::GameRecord;
pub use geo::Objective;
pub use lingfeat::{FeatureGroup, FeatureVector, Featurizer};
pub use pipeline::{Mode, PipelineConfig};
pub use text::LexiconSet;
