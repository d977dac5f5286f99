//! Interaction dynamics: contribution balance, participation, language
//! matching between turns, stance counts, marker-move jumps and solo
//! confidence.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::conversation::{Conversation, FeatureMap, TaggedMessage, TaggedUtterance};
use crate::corpus::{GameRecord, MarkerMove, SoloGuess};
use crate::geo::arc_distance;
use crate::scalar::Real;
use crate::text::{detect_stance, Lexicon, LexiconSet, Stance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("balance needs at least two values, got {0}")]
    SizeUnderTwo(usize),
    #[error("balance values must be finite and non-negative")]
    NegativeValue,
    #[error("conversation has no turns with a non-empty item set")]
    NoTurns,
}

/// Normalised Shannon entropy with log base equal to the number of values:
/// 1 when all values are equal, falling toward 0 as one value dominates.
/// An all-zero input has no contributions to balance and yields 0.
pub fn balance_entropy<T: Real>(values: &[T]) -> Result<T, DynamicsError> {
    let n = values.len();
    if n < 2 {
        return Err(DynamicsError::SizeUnderTwo(n));
    }
    if values.iter().any(|v| !v.is_finite() || *v < T::zero()) {
        return Err(DynamicsError::NegativeValue);
    }
    let total: T = values.iter().copied().sum();
    if total == T::zero() {
        return Ok(T::zero());
    }
    if values.iter().all(|v| *v == values[0]) {
        return Ok(T::one());
    }
    // sorted summation keeps the result independent of input order
    let mut shares: Vec<T> = values.iter().map(|&v| v / total).collect();
    shares.sort_by(|a, b| a.partial_cmp(b).expect("finite shares"));
    let h: T = shares
        .into_iter()
        .filter(|&s| s > T::zero())
        .map(|s| -s * s.ln())
        .sum();
    let base = T::from_count(n).ln();
    Ok((h / base).max(T::zero()).min(T::one()))
}

fn per_player<F: Fn(&str) -> f64>(players: &[String], f: F) -> Vec<f64> {
    players.iter().map(|p| f(p)).collect()
}

pub fn participation_indicators(game: &GameRecord, conv: &Conversation) -> FeatureMap {
    let mut f = FeatureMap::new();
    let players = &game.players;
    let msgs = per_player(players, |p| {
        game.messages.iter().filter(|m| m.player == p).count() as f64
    });
    let moves = per_player(players, |p| {
        game.marker_moves.iter().filter(|m| m.player == p).count() as f64
    });
    let words_per_msg = per_player(players, |p| {
        let mine: Vec<&TaggedMessage> = conv.messages.iter().filter(|m| m.player == p).collect();
        if mine.is_empty() {
            0.0
        } else {
            mine.iter().map(|m| m.word_count()).sum::<usize>() as f64 / mine.len() as f64
        }
    });
    f.flag("dyn.all_chat", msgs.iter().all(|&c| c > 0.0));
    f.flag("dyn.all_move", moves.iter().all(|&c| c > 0.0));
    f.flag("dyn.two_plus_move", moves.iter().filter(|&&c| c > 0.0).count() >= 2);
    f.set("dyn.entropy_msgs", balance_entropy(&msgs).ok());
    f.set("dyn.entropy_words_per_msg", balance_entropy(&words_per_msg).ok());
    f.set("dyn.entropy_moves", balance_entropy(&moves).ok());
    f
}

/// Item vocabulary compared between a message and its reply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VocabClass {
    Stopword,
    Content,
    PosBigram,
}

/// Distinct items of one utterance for a vocabulary class.
pub fn item_set(utt: &TaggedUtterance, class: VocabClass, stopwords: &Lexicon) -> HashSet<String> {
    let toks = &utt.tokens;
    match class {
        VocabClass::Stopword => toks
            .iter()
            .filter(|t| stopwords.contains_word(&t.token.norm))
            .map(|t| t.token.norm.clone())
            .collect(),
        VocabClass::Content => toks
            .iter()
            .filter(|t| t.tag.is_content() && !stopwords.contains_word(&t.token.norm))
            .map(|t| t.token.norm.clone())
            .collect(),
        VocabClass::PosBigram => toks
            .windows(2)
            .map(|w| format!("{} {}", w[0].tag.symbol(), w[1].tag.symbol()))
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Matching {
    /// Micro-average over all turns.
    pub overall: f64,
    /// Highest per-speaker-pair micro-average.
    pub max_pair: f64,
    /// Lowest per-speaker-pair micro-average.
    pub min_pair: f64,
}

/// Micro-averaged language matching: repeated items summed over turns,
/// divided by the summed size of the earlier message's item sets. Turns whose
/// earlier message has no items are skipped.
pub fn matching(
    utterances: &[TaggedUtterance],
    class: VocabClass,
    stopwords: &Lexicon,
) -> Result<Matching, DynamicsError> {
    let sets: Vec<HashSet<String>> = utterances
        .iter()
        .map(|u| item_set(u, class, stopwords))
        .collect();
    let turns = utterances.iter().zip(&sets).zip(utterances.iter().skip(1).zip(sets.iter().skip(1)));
    let (mut num, mut den) = (0usize, 0usize);
    let mut pairs: BTreeMap<(&str, &str), (usize, usize)> = BTreeMap::new();
    for ((msg, msg_items), (reply, reply_items)) in turns {
        if msg_items.is_empty() {
            continue;
        }
        let shared = msg_items.intersection(reply_items).count();
        num += shared;
        den += msg_items.len();
        let (a, b) = (msg.player(), reply.player());
        let key = if a <= b { (a, b) } else { (b, a) };
        let e = pairs.entry(key).or_default();
        e.0 += shared;
        e.1 += msg_items.len();
    }
    if den == 0 {
        return Err(DynamicsError::NoTurns);
    }
    let pair_vals = pairs.values().map(|&(n, d)| n as f64 / d as f64);
    Ok(Matching {
        overall: num as f64 / den as f64,
        max_pair: pair_vals.clone().fold(f64::NEG_INFINITY, f64::max),
        min_pair: pair_vals.fold(f64::INFINITY, f64::min),
    })
}

pub fn matching_features(conv: &Conversation, stopwords: &Lexicon) -> FeatureMap {
    let mut f = FeatureMap::new();
    for (class, name) in [
        (VocabClass::Stopword, "stop"),
        (VocabClass::Content, "content"),
        (VocabClass::PosBigram, "posbi"),
    ] {
        let m = matching(&conv.utterances, class, stopwords).ok();
        f.set(format!("dyn.match_{name}"), m.map(|m| m.overall));
        f.set(format!("dyn.match_{name}_maxpair"), m.map(|m| m.max_pair));
    }
    f
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StanceCounts {
    pub agree: usize,
    pub disagree: usize,
    pub messages: usize,
}

impl StanceCounts {
    pub fn agree_frac(&self) -> f64 {
        if self.messages == 0 {
            0.0
        } else {
            self.agree as f64 / self.messages as f64
        }
    }

    pub fn disagree_frac(&self) -> f64 {
        if self.messages == 0 {
            0.0
        } else {
            self.disagree as f64 / self.messages as f64
        }
    }
}

pub fn stance_counts(messages: &[TaggedMessage], lexicons: &LexiconSet) -> StanceCounts {
    let mut c = StanceCounts {
        agree: 0,
        disagree: 0,
        messages: messages.len(),
    };
    for m in messages {
        match detect_stance(&m.tokens, &lexicons.agree, &lexicons.disagree) {
            Stance::Agree => c.agree += 1,
            Stance::Disagree => c.disagree += 1,
            Stance::None => {}
        }
    }
    c
}

pub fn stance_features(messages: &[TaggedMessage], lexicons: &LexiconSet) -> FeatureMap {
    let c = stance_counts(messages, lexicons);
    let mut f = FeatureMap::new();
    f.put("dyn.agree_count", c.agree as f64);
    f.put("dyn.disagree_count", c.disagree as f64);
    f
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

/// Median jump between consecutive marker moves, overall and restricted to
/// consecutive moves by different players.
pub fn guess_dynamics(moves: &[MarkerMove]) -> FeatureMap {
    let mut all = Vec::new();
    let mut cross = Vec::new();
    for w in moves.windows(2) {
        let d = arc_distance(w[0].location, w[1].location);
        all.push(d);
        if w[0].player != w[1].player {
            cross.push(d);
        }
    }
    let mut f = FeatureMap::new();
    f.set("dyn.median_jump", median(&mut all));
    f.set("dyn.median_cross_jump", median(&mut cross));
    f
}

/// Mean solo confidence, absent when nobody rated their guess.
pub fn confidence_feature(solo_guesses: &[SoloGuess]) -> Option<f64> {
    if solo_guesses.is_empty() {
        return None;
    }
    Some(solo_guesses.iter().map(|g| g.confidence).sum::<f64>() / solo_guesses.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tests::minimal_game;
    use crate::corpus::{ChatMessage, Utterance};
    use crate::geo::LatLon;
    use crate::text::{pos_tag, tokenize, Tagger};
    use proptest::prelude::*;

    #[test]
    fn balance_fixtures() {
        assert_eq!(balance_entropy(&[3.0, 3.0]).unwrap(), 1.0);
        assert_eq!(balance_entropy(&[4.0, 4.0, 4.0]).unwrap(), 1.0);
        assert_eq!(balance_entropy(&[5.0, 0.0]).unwrap(), 0.0);
        assert!((balance_entropy(&[2.0f64, 1.0, 1.0]).unwrap() - 0.9464).abs() < 1e-4);
        assert_eq!(balance_entropy(&[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(balance_entropy(&[1.0]), Err(DynamicsError::SizeUnderTwo(1)));
        assert_eq!(balance_entropy(&[1.0, -1.0]), Err(DynamicsError::NegativeValue));
        assert!((balance_entropy(&[2.0f32, 1.0, 1.0]).unwrap() - 0.9464).abs() < 1e-4);
    }

    proptest! {
        #[test]
        fn balance_is_scale_and_permutation_invariant(
            mut v in prop::collection::vec(0.0f64..100.0, 2..8),
            c in 0.01f64..100.0,
            rot in 0usize..8,
        ) {
            let base = balance_entropy(&v).unwrap();
            prop_assert!((0.0..=1.0).contains(&base));
            let scaled: Vec<f64> = v.iter().map(|x| x * c).collect();
            prop_assert!((balance_entropy(&scaled).unwrap() - base).abs() < 1e-12);
            let k = rot % v.len();
            v.rotate_left(k);
            prop_assert!((balance_entropy(&v).unwrap() - base).abs() < 1e-12);
        }
    }

    fn utt(player: &str, text: &str) -> TaggedUtterance {
        TaggedUtterance {
            utterance: Utterance {
                player: player.into(),
                start: 0.0,
                end: 0.0,
                text: text.into(),
                message_indices: vec![],
            },
            tokens: pos_tag(&tokenize(text)),
        }
    }

    fn stop() -> &'static Lexicon {
        &LexiconSet::builtin().stopwords
    }

    #[test]
    fn single_turn_stopword_match() {
        let u = [utt("A", "the a"), utt("B", "the")];
        let m = matching(&u, VocabClass::Stopword, stop()).unwrap();
        assert_eq!(m.overall, 0.5);
        assert_eq!(m.max_pair, m.overall);
    }

    #[test]
    fn micro_average_over_turns() {
        // turn 1 repeats 1 of 3 stopwords, turn 2 repeats 2 of 2
        let u = [
            utt("A", "the a of"),
            utt("B", "the with"),
            utt("A", "with the"),
        ];
        let m = matching(&u, VocabClass::Stopword, stop()).unwrap();
        assert_eq!(m.overall, 0.6);
    }

    #[test]
    fn pair_level_matching() {
        let u = [
            utt("A", "the a"),
            utt("B", "the a"),
            utt("C", "of"),
            utt("A", "with"),
        ];
        let m = matching(&u, VocabClass::Stopword, stop()).unwrap();
        // pairs: AB 2/2, BC 0/2, AC 0/1
        assert_eq!(m.max_pair, 1.0);
        assert_eq!(m.min_pair, 0.0);
        assert_eq!(m.overall, 2.0 / 5.0);
    }

    #[test]
    fn no_turns() {
        assert_eq!(
            matching(&[utt("A", "flag")], VocabClass::Content, stop()),
            Err(DynamicsError::NoTurns)
        );
        let u = [utt("A", "zzz"), utt("B", "the")];
        assert_eq!(
            matching(&u, VocabClass::Stopword, stop()),
            Err(DynamicsError::NoTurns)
        );
    }

    #[test]
    fn verbatim_echo_matches_fully() {
        let text = "the red flag is on the left side of the road";
        let u = [utt("A", text), utt("B", text), utt("A", text)];
        for class in [VocabClass::Stopword, VocabClass::Content, VocabClass::PosBigram] {
            assert_eq!(matching(&u, class, stop()).unwrap().overall, 1.0);
        }
    }

    #[test]
    fn participation_fixture() {
        let g = minimal_game();
        let conv = Conversation::from_game(&g, Tagger::builtin());
        let f = participation_indicators(&g, &conv);
        assert_eq!(f.get("dyn.all_chat"), Some(1.0));
        assert_eq!(f.get("dyn.all_move"), Some(0.0));
        assert_eq!(f.get("dyn.two_plus_move"), Some(0.0));
        assert_eq!(f.get("dyn.entropy_moves"), Some(0.0));
    }

    #[test]
    fn participation_entropies() {
        let mut g = minimal_game();
        g.players = vec!["a".into(), "b".into(), "c".into()];
        g.messages = (0..12)
            .map(|i| ChatMessage::new(["a", "b", "c"][i % 3], 101.0 + i as f64, "hi there"))
            .collect();
        let who = ["a", "a", "b", "c"];
        g.marker_moves = who
            .iter()
            .enumerate()
            .map(|(i, p)| MarkerMove {
                player: p.to_string(),
                ts: 115.0 + i as f64,
                location: LatLon::new(0.0, i as f64),
            })
            .collect();
        let conv = Conversation::from_game(&g, Tagger::builtin());
        let f = participation_indicators(&g, &conv);
        assert_eq!(f.get("dyn.entropy_msgs"), Some(1.0));
        assert_eq!(f.get("dyn.entropy_words_per_msg"), Some(1.0));
        assert!((f.get("dyn.entropy_moves").unwrap() - 0.9464).abs() < 1e-4);
        assert_eq!(f.get("dyn.all_move"), Some(1.0));
        assert_eq!(f.get("dyn.two_plus_move"), Some(1.0));
    }

    fn tagged_msgs(texts: &[&str]) -> Vec<TaggedMessage> {
        texts
            .iter()
            .map(|t| TaggedMessage {
                player: "a".into(),
                ts: 0.0,
                tokens: pos_tag(&tokenize(t)),
            })
            .collect()
    }

    #[test]
    fn stance_fixtures() {
        let lx = LexiconSet::builtin();
        let msgs = tagged_msgs(&[
            "buildings look chinese",
            "yes those buildings",
            "shanghai?",
            "sure, shanghai",
        ]);
        let f = stance_features(&msgs, lx);
        assert_eq!(f.get("dyn.agree_count"), Some(2.0));
        assert_eq!(f.get("dyn.disagree_count"), Some(0.0));
        assert_eq!(stance_counts(&msgs, lx).agree_frac(), 0.5);

        let f = stance_features(&[], lx);
        assert_eq!(f.get("dyn.agree_count"), Some(0.0));
        let f = stance_features(&tagged_msgs(&["are you sure about it"]), lx);
        assert_eq!(f.get("dyn.agree_count"), Some(0.0));
        assert_eq!(f.get("dyn.disagree_count"), Some(0.0));
    }

    fn mv(player: &str, ts: f64, lat: f64, lon: f64) -> MarkerMove {
        MarkerMove {
            player: player.into(),
            ts,
            location: LatLon::new(lat, lon),
        }
    }

    #[test]
    fn guess_jumps() {
        let same = [mv("a", 0.0, 1.0, 1.0), mv("b", 1.0, 1.0, 1.0)];
        let f = guess_dynamics(&same);
        assert_eq!(f.get("dyn.median_jump"), Some(0.0));
        assert_eq!(f.get("dyn.median_cross_jump"), Some(0.0));

        let line = [mv("a", 0.0, 0.0, 0.0), mv("b", 1.0, 0.0, 1.0), mv("a", 2.0, 0.0, 2.0)];
        let gap = arc_distance(LatLon::new(0.0, 0.0), LatLon::new(0.0, 1.0));
        let f = guess_dynamics(&line);
        assert!((f.get("dyn.median_jump").unwrap() - gap).abs() < 1e-9);
        assert!((f.get("dyn.median_cross_jump").unwrap() - gap).abs() < 1e-9);

        let f = guess_dynamics(&line[..1]);
        assert_eq!(f.get("dyn.median_jump"), None);
        assert_eq!(f.get("dyn.median_cross_jump"), None);
    }

    #[test]
    fn jumps_ignore_time_shifts() {
        let line = [mv("a", 0.0, 0.0, 0.0), mv("b", 1.0, 3.0, 1.0), mv("a", 2.0, 0.0, 5.0)];
        let shifted: Vec<MarkerMove> = line
            .iter()
            .map(|m| MarkerMove { ts: m.ts + 1000.0, ..m.clone() })
            .collect();
        assert_eq!(guess_dynamics(&line), guess_dynamics(&shifted));
    }

    #[test]
    fn mean_confidence() {
        let g = |c| SoloGuess::new("a", LatLon::new(0.0, 0.0), c, "");
        assert_eq!(confidence_feature(&[g(0.2), g(0.8)]), Some(0.5));
        assert_eq!(confidence_feature(&[g(1.0)]), Some(1.0));
        assert_eq!(confidence_feature(&[]), None);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&mut []), None);
    }
}
