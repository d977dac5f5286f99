//! Tagged view of a game's chat, shared by the feature extractors.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::corpus::{derive_utterances, GameRecord, PlayerId, Utterance};
use crate::text::{TaggedToken, Tagger};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaggedMessage {
    pub player: PlayerId,
    pub ts: f64,
    pub tokens: Vec<TaggedToken>,
}

impl TaggedMessage {
    /// Non-punctuation token count.
    pub fn word_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.tag.is_word()).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaggedUtterance {
    pub utterance: Utterance,
    /// Tokens of the merged messages, in order.
    pub tokens: Vec<TaggedToken>,
}

impl TaggedUtterance {
    pub fn player(&self) -> &str {
        &self.utterance.player
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conversation {
    pub players: Vec<PlayerId>,
    pub messages: Vec<TaggedMessage>,
    pub utterances: Vec<TaggedUtterance>,
}

impl Conversation {
    pub fn from_game(game: &GameRecord, tagger: &Tagger) -> Self {
        let messages: Vec<TaggedMessage> = game
            .messages
            .iter()
            .map(|m| TaggedMessage {
                player: m.player.clone(),
                ts: m.ts,
                tokens: tagger.tag_message(m),
            })
            .collect();
        let utterances = derive_utterances(&game.messages)
            .into_iter()
            .map(|u| TaggedUtterance {
                tokens: u
                    .message_indices
                    .iter()
                    .flat_map(|&i| messages[i].tokens.iter().cloned())
                    .collect(),
                utterance: u,
            })
            .collect();
        Self {
            players: game.players.clone(),
            messages,
            utterances,
        }
    }

    pub fn word_count(&self) -> usize {
        self.messages.iter().map(TaggedMessage::word_count).sum()
    }
}

/// Named feature values; `None` marks a feature that is undefined for the
/// game.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct FeatureMap(BTreeMap<String, Option<f64>>);

impl FeatureMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Stores a value; non-finite values are stored as missing.
    pub fn set(&mut self, name: impl Into<String>, value: Option<f64>) {
        self.0.insert(name.into(), value.filter(|v| v.is_finite()));
    }

    pub fn put(&mut self, name: impl Into<String>, value: f64) {
        self.set(name, Some(value));
    }

    pub fn flag(&mut self, name: impl Into<String>, value: bool) {
        self.put(name, if value { 1.0 } else { 0.0 });
    }

    /// The value, or `None` when missing or never set.
    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied().flatten()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn extend(&mut self, other: FeatureMap) {
        self.0.extend(other.0);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Option<f64>)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}
