use crate::conversation::{Conversation, FeatureMap};
use crate::text::{ConcretenessStats, Lexicon, LexiconSet};

/// Lexicon hit rates over chat words, plus mean concreteness of content
/// words.
pub fn lexicon_features(conv: &Conversation, lexicons: &LexiconSet) -> FeatureMap {
    let mut f = FeatureMap::new();
    let words = conv.word_count();
    let rate = |lex: &Lexicon| {
        let hits: usize = conv.messages.iter().map(|m| lex.find(&m.tokens).count).sum();
        if words == 0 {
            0.0
        } else {
            (hits as f64 / words as f64).min(1.0)
        }
    };
    f.put("lng.certainty_frac", rate(&lexicons.certainty));
    f.put("lng.hedge_frac", rate(&lexicons.hedges));
    f.put("lng.pron_1sg_frac", rate(&lexicons.pron_1sg));
    f.put("lng.pron_1pl_frac", rate(&lexicons.pron_1pl));
    f.put("lng.pron_2_frac", rate(&lexicons.pron_2));
    f.put("lng.geo_frac", rate(&lexicons.geo));
    f.put("lng.interface_frac", rate(&lexicons.interface));

    let mut stats = ConcretenessStats::default();
    for m in &conv.messages {
        stats.merge(lexicons.concreteness.stats(&m.tokens));
    }
    f.set("lng.concreteness", stats.mean());
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tests::minimal_game;
    use crate::corpus::ChatMessage;
    use crate::text::Tagger;
    use std::collections::BTreeMap;

    fn features_with(lx: &LexiconSet, texts: &[&str]) -> FeatureMap {
        let mut g = minimal_game();
        g.messages = texts
            .iter()
            .enumerate()
            .map(|(i, t)| ChatMessage::new(["a", "b"][i % 2], 101.0 + i as f64, t))
            .collect();
        let conv = Conversation::from_game(&g, Tagger::builtin());
        lexicon_features(&conv, lx)
    }

    #[test]
    fn geo_fraction_with_small_lexicon() {
        let mut src = BTreeMap::new();
        src.insert("gazetteer.txt".to_string(), "china\n".to_string());
        src.insert("geo_terms.txt".to_string(), "asia\n".to_string());
        let lx = LexiconSet::from_sources(&src).unwrap();
        let f = features_with(&lx, &["china is in asia"]);
        assert_eq!(f.get("lng.geo_frac"), Some(0.5));
    }

    #[test]
    fn no_hedges() {
        let f = features_with(LexiconSet::builtin(), &["red flag on the left"]);
        assert_eq!(f.get("lng.hedge_frac"), Some(0.0));
    }

    #[test]
    fn pronoun_fractions_sum_to_one() {
        let f = features_with(LexiconSet::builtin(), &["i you we"]);
        let sum: f64 = ["lng.pron_1sg_frac", "lng.pron_1pl_frac", "lng.pron_2_frac"]
            .iter()
            .map(|n| f.get(n).unwrap())
            .sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fractions_are_bounded() {
        let f = features_with(
            LexiconSet::builtin(),
            &["maybe maybe probably", "i think it would be china", "sure"],
        );
        for (name, v) in f.iter() {
            if name.ends_with("_frac") {
                let v = v.unwrap();
                assert!((0.0..=1.0).contains(&v), "{name} = {v}");
            }
        }
    }
}
