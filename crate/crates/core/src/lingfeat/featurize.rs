use serde::Serialize;

use super::{
    baseline_features, length_features, lexicon_features, pos_ngram_counts, FeatureGroup,
    PosCounts, PosVocabulary, SCALAR_FEATURES,
};
use crate::conversation::{Conversation, FeatureMap};
use crate::corpus::GameRecord;
use crate::dynamics::{
    confidence_feature, guess_dynamics, matching_features, participation_indicators,
    stance_features,
};
use crate::ideaflow::{extract_ideas, idea_features};
use crate::text::{LexiconSet, Tagger};

/// Feature values in canonical order. Missing values are stored as 0 with
/// `mask` false.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureVector {
    pub names: Vec<String>,
    pub values: Vec<f64>,
    /// True where the value is present.
    pub mask: Vec<bool>,
    pub groups: Vec<FeatureGroup>,
}

impl FeatureVector {
    /// Registry scalars followed by the vocabulary's n-grams.
    pub fn assemble(scalars: &FeatureMap, pos: &FeatureMap, vocab: &PosVocabulary) -> Self {
        let mut v = FeatureVector {
            names: Vec::new(),
            values: Vec::new(),
            mask: Vec::new(),
            groups: Vec::new(),
        };
        let entries = SCALAR_FEATURES
            .iter()
            .map(|n| (n.to_string(), scalars.get(n)))
            .chain(vocab.ngrams.iter().map(|n| (n.clone(), pos.get(n))));
        for (name, value) in entries {
            v.groups.push(FeatureGroup::of(&name).expect("registry names carry a group prefix"));
            v.names.push(name);
            v.mask.push(value.is_some());
            v.values.push(value.unwrap_or(0.0));
        }
        v
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        let i = self.names.iter().position(|n| n == name)?;
        self.mask[i].then_some(self.values[i])
    }
}

/// Computes every feature of a game against one set of lexicons.
#[derive(Debug, Clone)]
pub struct Featurizer<'a> {
    pub lexicons: &'a LexiconSet,
    tagger: Tagger,
}

impl<'a> Featurizer<'a> {
    pub fn new(lexicons: &'a LexiconSet) -> Self {
        Self {
            lexicons,
            tagger: lexicons.tagger(),
        }
    }

    pub fn tagger(&self) -> &Tagger {
        &self.tagger
    }

    pub fn conversation(&self, game: &GameRecord) -> Conversation {
        Conversation::from_game(game, &self.tagger)
    }

    /// All registry scalars of a game.
    pub fn scalar_features(&self, game: &GameRecord) -> FeatureMap {
        self.scalars_of(game, &self.conversation(game))
    }

    /// Registry scalars and POS n-gram counts up to `max_order`, sharing one
    /// tagging pass.
    pub fn analyze(&self, game: &GameRecord, max_order: usize) -> (FeatureMap, PosCounts) {
        let conv = self.conversation(game);
        let pos = pos_ngram_counts(&conv.messages, max_order);
        (self.scalars_of(game, &conv), pos)
    }

    pub fn featurize_game(&self, game: &GameRecord, vocab: &PosVocabulary) -> FeatureVector {
        let (scalars, counts) = self.analyze(game, vocab.n.max(1));
        FeatureVector::assemble(&scalars, &vocab.transform(&counts), vocab)
    }

    fn scalars_of(&self, game: &GameRecord, conv: &Conversation) -> FeatureMap {
        let lx = self.lexicons;
        let mut f = baseline_features(game);
        let ideas = extract_ideas(&conv.messages, &lx.stopwords, &lx.hedges);
        f.extend(idea_features(&ideas, &game.players));
        f.extend(participation_indicators(game, conv));
        f.extend(matching_features(conv, &lx.stopwords));
        f.extend(stance_features(&conv.messages, lx));
        f.extend(guess_dynamics(&game.marker_moves));
        f.set("dyn.mean_confidence", confidence_feature(&game.solo_guesses));
        f.extend(length_features(game, conv, &self.tagger));
        f.extend(lexicon_features(conv, lx));
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tests::minimal_game;

    #[test]
    fn every_registry_feature_is_computed() {
        let fz = Featurizer::new(LexiconSet::builtin());
        let f = fz.scalar_features(&minimal_game());
        for name in SCALAR_FEATURES {
            assert!(f.contains(name), "{name} missing");
        }
        assert_eq!(f.len(), SCALAR_FEATURES.len());
    }

    #[test]
    fn degenerate_game_masks_move_features() {
        let mut g = minimal_game();
        g.messages.truncate(2);
        g.marker_moves.clear();
        let fz = Featurizer::new(LexiconSet::builtin());
        let v = fz.featurize_game(&g, &PosVocabulary::empty());
        assert_eq!(v.len(), SCALAR_FEATURES.len());
        assert_eq!(v.get("dyn.median_jump"), None);
        assert_eq!(v.get("dyn.median_cross_jump"), None);
        assert_eq!(v.get("dyn.entropy_moves"), Some(0.0));
        assert!(v.values.iter().all(|x| x.is_finite()));
        let i = v.names.iter().position(|n| n == "dyn.median_jump").unwrap();
        assert!(!v.mask[i]);
        assert_eq!(v.values[i], 0.0);
    }

    #[test]
    fn deterministic() {
        let fz = Featurizer::new(LexiconSet::builtin());
        let g = minimal_game();
        let (_, counts) = fz.analyze(&g, 2);
        let vocab = PosVocabulary::fit([&counts], 2, 1);
        let a = fz.featurize_game(&g, &vocab);
        let b = fz.featurize_game(&g, &vocab);
        assert_eq!(a, b);
        assert_eq!(a.len(), SCALAR_FEATURES.len() + vocab.len());
        assert!(a.groups[SCALAR_FEATURES.len()..].iter().all(|g| *g == FeatureGroup::Pos));
    }
}
