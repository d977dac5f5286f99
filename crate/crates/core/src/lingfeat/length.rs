use std::collections::HashSet;

use crate::conversation::{Conversation, FeatureMap};
use crate::corpus::GameRecord;
use crate::text::{tokenize, Tagger};

/// Message length, solo reason length, type/token ratio and turn timing.
pub fn length_features(game: &GameRecord, conv: &Conversation, tagger: &Tagger) -> FeatureMap {
    let mut f = FeatureMap::new();
    let words = conv.word_count();
    f.set(
        "lng.words_per_msg",
        (!conv.messages.is_empty()).then(|| words as f64 / conv.messages.len() as f64),
    );
    let reason_words: usize = game
        .solo_guesses
        .iter()
        .map(|g| {
            tagger
                .tag(&tokenize(&g.reason))
                .iter()
                .filter(|t| t.tag.is_word())
                .count()
        })
        .sum();
    f.put("lng.solo_reason_words", reason_words as f64);

    let norms: Vec<&str> = conv
        .messages
        .iter()
        .flat_map(|m| &m.tokens)
        .filter(|t| t.tag.is_word())
        .map(|t| t.token.norm.as_str())
        .collect();
    let distinct: HashSet<&str> = norms.iter().copied().collect();
    f.set(
        "lng.ttr",
        (!norms.is_empty()).then(|| distinct.len() as f64 / norms.len() as f64),
    );

    let utts = &conv.utterances;
    let gaps: Vec<f64> = utts
        .windows(2)
        .map(|w| w[1].utterance.start - w[0].utterance.end)
        .collect();
    f.set(
        "lng.mean_turn_gap_s",
        (!gaps.is_empty()).then(|| gaps.iter().sum::<f64>() / gaps.len() as f64),
    );
    f.put("lng.num_turns", utts.len().saturating_sub(1) as f64);
    f
}
