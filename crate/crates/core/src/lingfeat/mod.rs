//! Linguistic and length features, POS n-grams, baseline features, the
//! early-window truncation and assembly of full feature vectors.

mod baseline;
mod early;
mod featurize;
mod length;
mod lexfeat;
mod posgram;

pub use baseline::baseline_features;
pub use early::{early_window, EarlyWindow, EARLY_HORIZON_S, EARLY_MAX_COVERAGE};
pub use featurize::{FeatureVector, Featurizer};
pub use length::length_features;
pub use lexfeat::lexicon_features;
pub use posgram::{pos_ngram_counts, PosCounts, PosVocabulary, BOUNDARY};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("game {0} has no chat messages or marker moves")]
    NoEvents(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureGroup {
    Baseline,
    Interaction,
    Linguistic,
    Pos,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 4] = [
        FeatureGroup::Baseline,
        FeatureGroup::Interaction,
        FeatureGroup::Linguistic,
        FeatureGroup::Pos,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeatureGroup::Baseline => "baseline",
            FeatureGroup::Interaction => "interaction",
            FeatureGroup::Linguistic => "linguistic",
            FeatureGroup::Pos => "pos",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|g| g.name() == s)
    }

    /// Group of a feature name by its prefix.
    pub fn of(feature: &str) -> Option<Self> {
        match feature.split('.').next()? {
            "base" => Some(FeatureGroup::Baseline),
            "ideas" | "dyn" => Some(FeatureGroup::Interaction),
            "lng" => Some(FeatureGroup::Linguistic),
            "pos" => Some(FeatureGroup::Pos),
            _ => None,
        }
    }
}

/// Scalar features in canonical order. POS n-gram features follow them.
pub const SCALAR_FEATURES: [&str; 39] = [
    "base.team_size",
    "base.msgs_per_player",
    "base.duration_s",
    "ideas.count",
    "ideas.unanimous_count",
    "ideas.max_introduced",
    "ideas.intro_entropy",
    "ideas.intro_hedged_frac",
    "ideas.adopt_hedged_frac",
    "dyn.all_chat",
    "dyn.all_move",
    "dyn.two_plus_move",
    "dyn.entropy_msgs",
    "dyn.entropy_words_per_msg",
    "dyn.entropy_moves",
    "dyn.match_stop",
    "dyn.match_content",
    "dyn.match_posbi",
    "dyn.match_stop_maxpair",
    "dyn.match_content_maxpair",
    "dyn.match_posbi_maxpair",
    "dyn.agree_count",
    "dyn.disagree_count",
    "dyn.median_jump",
    "dyn.median_cross_jump",
    "dyn.mean_confidence",
    "lng.words_per_msg",
    "lng.solo_reason_words",
    "lng.ttr",
    "lng.mean_turn_gap_s",
    "lng.num_turns",
    "lng.certainty_frac",
    "lng.hedge_frac",
    "lng.pron_1sg_frac",
    "lng.pron_1pl_frac",
    "lng.pron_2_frac",
    "lng.concreteness",
    "lng.geo_frac",
    "lng.interface_frac",
];

/// Scalar feature names of one group, in canonical order.
pub fn group_features(group: FeatureGroup) -> Vec<&'static str> {
    SCALAR_FEATURES
        .iter()
        .copied()
        .filter(|f| FeatureGroup::of(f) == Some(group))
        .collect()
}
