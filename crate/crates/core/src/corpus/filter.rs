use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::GameRecord;
use crate::geo::arc_distance;
use crate::text::contains_url;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub min_chatters: usize,
    pub min_games_per_puzzle: usize,
    pub cheat_radius_km: f64,
    pub dev_player_ids: BTreeSet<String>,
    /// Reject on proximity alone for games without window-focus telemetry.
    pub strict_cheat: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            min_chatters: 2,
            min_games_per_puzzle: 5,
            cheat_radius_km: 10.0,
            dev_player_ids: BTreeSet::new(),
            strict_cheat: false,
        }
    }
}

/// Rejection reasons, in the order they are checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RejectReason {
    NoTeamGuess,
    DevPlayer,
    UnderTwoChatters,
    CheatUrl,
    CheatProximityFlag,
    SparsePuzzle,
}

impl RejectReason {
    pub fn code(self) -> &'static str {
        match self {
            RejectReason::NoTeamGuess => "NO_TEAM_GUESS",
            RejectReason::DevPlayer => "DEV_PLAYER",
            RejectReason::UnderTwoChatters => "UNDER_TWO_CHATTERS",
            RejectReason::CheatUrl => "CHEAT_URL",
            RejectReason::CheatProximityFlag => "CHEAT_PROXIMITY_FLAG",
            RejectReason::SparsePuzzle => "SPARSE_PUZZLE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub game_id: String,
    pub reason: RejectReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FilterReport {
    pub kept: usize,
    pub rejected: Vec<Rejection>,
}

impl FilterReport {
    pub fn count(&self, reason: RejectReason) -> usize {
        self.rejected.iter().filter(|r| r.reason == reason).count()
    }
}

fn near_truth(game: &GameRecord, radius_km: f64) -> bool {
    let truth = game.true_location;
    let close = |p| arc_distance(p, truth) <= radius_km;
    game.final_guess.is_some_and(close) || game.solo_guesses.iter().any(|g| close(g.location))
}

fn per_game_reason(game: &GameRecord, cfg: &FilterConfig) -> Option<RejectReason> {
    if game.final_guess.is_none() {
        return Some(RejectReason::NoTeamGuess);
    }
    if game.players.iter().any(|p| cfg.dev_player_ids.contains(p)) {
        return Some(RejectReason::DevPlayer);
    }
    if game.chatters().len() < cfg.min_chatters {
        return Some(RejectReason::UnderTwoChatters);
    }
    if game.messages.iter().any(|m| contains_url(&m.text)) {
        return Some(RejectReason::CheatUrl);
    }
    if near_truth(game, cfg.cheat_radius_km) {
        let flagged = match &game.window_leave {
            Some(leaves) => !leaves.is_empty(),
            None => cfg.strict_cheat,
        };
        if flagged {
            return Some(RejectReason::CheatProximityFlag);
        }
    }
    None
}

/// Applies the quality filters. Each rejected game is reported once, with the
/// first reason it fails. Puzzle sparsity is judged on the games that pass
/// every per-game check, which makes the filter idempotent.
pub fn filter_corpus(games: &[GameRecord], cfg: &FilterConfig) -> (Vec<GameRecord>, FilterReport) {
    let reasons: Vec<Option<RejectReason>> =
        games.iter().map(|g| per_game_reason(g, cfg)).collect();

    let mut per_puzzle: BTreeMap<&str, usize> = BTreeMap::new();
    for (g, r) in games.iter().zip(&reasons) {
        if r.is_none() {
            *per_puzzle.entry(g.puzzle_id.as_str()).or_default() += 1;
        }
    }

    let mut kept = Vec::new();
    let mut report = FilterReport::default();
    for (g, r) in games.iter().zip(reasons) {
        let reason = r.or_else(|| {
            (per_puzzle[g.puzzle_id.as_str()] < cfg.min_games_per_puzzle)
                .then_some(RejectReason::SparsePuzzle)
        });
        match reason {
            Some(reason) => report.rejected.push(Rejection {
                game_id: g.game_id.clone(),
                reason,
            }),
            None => kept.push(g.clone()),
        }
    }
    report.kept = kept.len();
    (kept, report)
}
