//! Team-game records: data model, JSON Lines ingestion, quality filters and
//! speaker-merged utterances.

mod filter;
mod parse;
mod utterance;

pub use filter::{filter_corpus, FilterConfig, FilterReport, RejectReason, Rejection};
pub use parse::{
    parse_game_record, read_corpus, read_corpus_lenient, to_json_line, write_corpus, CorpusError,
    FieldViolation, LineError,
};
pub use utterance::{derive_utterances, Utterance};

use crate::geo::LatLon;
use crate::text::PosTag;

pub type PlayerId = String;

#[derive(Debug, Clone, PartialEq)]
pub struct SoloGuess {
    pub player: PlayerId,
    pub location: LatLon,
    /// Normalised to `[0, 1]` at ingestion.
    pub confidence: f64,
    pub reason: String,
}

impl SoloGuess {
    pub fn new(player: &str, location: LatLon, confidence: f64, reason: &str) -> Self {
        Self {
            player: player.to_string(),
            location,
            confidence,
            reason: reason.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChatMessage {
    pub player: PlayerId,
    /// Epoch seconds.
    pub ts: f64,
    pub text: String,
    /// Gold POS tags, one per token of `text`. Overrides the rule tagger.
    pub tags: Option<Vec<PosTag>>,
}

impl ChatMessage {
    pub fn new(player: &str, ts: f64, text: &str) -> Self {
        Self {
            player: player.to_string(),
            ts,
            text: text.to_string(),
            tags: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkerMove {
    pub player: PlayerId,
    pub ts: f64,
    pub location: LatLon,
}

/// Window-focus telemetry: a player left the game window at `ts`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowLeave {
    pub player: PlayerId,
    pub ts: f64,
}

/// One team game.
#[derive(Debug, Clone, PartialEq)]
pub struct GameRecord {
    pub game_id: String,
    pub puzzle_id: String,
    pub true_location: LatLon,
    pub players: Vec<PlayerId>,
    pub solo_guesses: Vec<SoloGuess>,
    pub messages: Vec<ChatMessage>,
    pub marker_moves: Vec<MarkerMove>,
    pub final_guess: Option<LatLon>,
    pub started_at: f64,
    pub submitted_at: f64,
    /// `None` when the source had no window-focus telemetry at all.
    pub window_leave: Option<Vec<WindowLeave>>,
}

impl GameRecord {
    pub fn team_size(&self) -> usize {
        self.players.len()
    }

    /// Timestamp of the first chat message or marker move.
    pub fn first_event_ts(&self) -> Option<f64> {
        let m = self.messages.first().map(|m| m.ts);
        let g = self.marker_moves.first().map(|m| m.ts);
        match (m, g) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn event_count(&self) -> usize {
        self.messages.len() + self.marker_moves.len()
    }

    /// Distinct players who sent at least one message, in player-list order.
    pub fn chatters(&self) -> Vec<&str> {
        self.players
            .iter()
            .filter(|p| self.messages.iter().any(|m| &m.player == *p))
            .map(String::as_str)
            .collect()
    }

    pub fn player_index(&self, player: &str) -> Option<usize> {
        self.players.iter().position(|p| p == player)
    }
}
