use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ChatMessage, GameRecord, MarkerMove, SoloGuess, WindowLeave};
use crate::geo::LatLon;
use crate::text::{tokenize, PosTag};

/// A single violated field, addressed by a jq-style path such as
/// `.messages[3].ts`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldViolation {
    pub path: String,
    pub reason: String,
}

impl fmt::Display for FieldViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.reason)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("invalid record: {}", join_violations(.0))]
    Invalid(Vec<FieldViolation>),
}

fn join_violations(v: &[FieldViolation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl CorpusError {
    pub fn violations(&self) -> &[FieldViolation] {
        match self {
            CorpusError::Invalid(v) => v,
            CorpusError::Malformed(_) => &[],
        }
    }
}

#[derive(Debug, Error)]
pub enum LineError {
    #[error("line {line}: {error}")]
    Record { line: usize, error: CorpusError },
    #[error("failed reading corpus: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Serialize, Deserialize)]
struct RawLatLon {
    lat: f64,
    lon: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawSolo {
    player: String,
    lat: f64,
    lon: f64,
    confidence: serde_json::Number,
    #[serde(default)]
    reason: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawMessage {
    player: String,
    ts: f64,
    text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tags: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawMove {
    player: String,
    ts: f64,
    lat: f64,
    lon: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawLeave {
    player: String,
    ts: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawGame {
    game_id: String,
    puzzle_id: String,
    true_location: RawLatLon,
    players: Vec<String>,
    #[serde(default)]
    solo_guesses: Vec<RawSolo>,
    #[serde(default)]
    messages: Vec<RawMessage>,
    #[serde(default)]
    marker_moves: Vec<RawMove>,
    #[serde(default)]
    final_guess: Option<RawLatLon>,
    started_at: f64,
    submitted_at: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    window_leave: Option<Vec<RawLeave>>,
}

struct Checker {
    violations: Vec<FieldViolation>,
}

impl Checker {
    fn fail(&mut self, path: impl Into<String>, reason: impl Into<String>) {
        self.violations.push(FieldViolation {
            path: path.into(),
            reason: reason.into(),
        });
    }

    fn location(&mut self, path: &str, lat: f64, lon: f64) -> LatLon {
        if !(lat.is_finite() && (-90.0..=90.0).contains(&lat)) {
            self.fail(format!("{path}.lat"), format!("latitude {lat} outside [-90, 90]"));
        }
        if !(lon.is_finite() && (-180.0..=180.0).contains(&lon)) {
            self.fail(format!("{path}.lon"), format!("longitude {lon} outside [-180, 180]"));
        }
        LatLon::new(lat, lon)
    }

    fn player(&mut self, path: String, id: &str, players: &HashSet<&str>) {
        if !players.contains(id) {
            self.fail(path, format!("unknown player id {id:?}"));
        }
    }

    fn timestamp(&mut self, path: String, ts: f64, start: f64, end: f64) {
        if !ts.is_finite() || ts < start || ts > end {
            self.fail(path, format!("timestamp {ts} outside [{start}, {end}]"));
        }
    }
}

/// Integers 1..=5 are a Likert scale mapped to `(v - 1) / 4`; anything else
/// must already be a real in `[0, 1]`.
fn normalize_confidence(n: &serde_json::Number) -> Result<f64, String> {
    if let Some(v) = n.as_i64() {
        return match v {
            0 => Ok(0.0),
            1..=5 => Ok((v - 1) as f64 / 4.0),
            _ => Err(format!("integer confidence {v} outside 1..=5")),
        };
    }
    match n.as_f64() {
        Some(v) if (0.0..=1.0).contains(&v) => Ok(v),
        _ => Err(format!("confidence {n} outside [0, 1]")),
    }
}

fn check_non_decreasing(c: &mut Checker, list: &str, stamps: impl Iterator<Item = f64>) {
    let mut prev = f64::NEG_INFINITY;
    for (i, ts) in stamps.enumerate() {
        if ts < prev {
            c.fail(format!(".{list}[{i}].ts"), format!("timestamp {ts} precedes {prev}"));
        }
        prev = prev.max(ts);
    }
}

fn validate(raw: RawGame) -> Result<GameRecord, Vec<FieldViolation>> {
    let mut c = Checker {
        violations: Vec::new(),
    };
    if raw.game_id.trim().is_empty() {
        c.fail(".game_id", "empty");
    }
    if raw.puzzle_id.trim().is_empty() {
        c.fail(".puzzle_id", "empty");
    }
    let true_location = c.location(".true_location", raw.true_location.lat, raw.true_location.lon);

    let mut seen = HashSet::new();
    for (i, p) in raw.players.iter().enumerate() {
        if p.is_empty() {
            c.fail(format!(".players[{i}]"), "empty player id");
        }
        if !seen.insert(p.as_str()) {
            c.fail(format!(".players[{i}]"), format!("duplicate player id {p:?}"));
        }
    }
    if seen.len() < 2 {
        c.fail(".players", "a team needs at least two distinct players");
    }
    let players = seen;

    let (start, end) = (raw.started_at, raw.submitted_at);
    if !start.is_finite() {
        c.fail(".started_at", "not finite");
    }
    if !end.is_finite() || end < start {
        c.fail(".submitted_at", format!("{end} precedes started_at {start}"));
    }

    let mut guessed = HashSet::new();
    let mut solo_guesses = Vec::with_capacity(raw.solo_guesses.len());
    for (i, g) in raw.solo_guesses.iter().enumerate() {
        let path = format!(".solo_guesses[{i}]");
        c.player(format!("{path}.player"), &g.player, &players);
        if !guessed.insert(g.player.as_str()) {
            c.fail(format!("{path}.player"), "second solo guess for this player");
        }
        let location = c.location(&path, g.lat, g.lon);
        let confidence = normalize_confidence(&g.confidence).unwrap_or_else(|reason| {
            c.fail(format!("{path}.confidence"), reason);
            0.0
        });
        solo_guesses.push(SoloGuess {
            player: g.player.clone(),
            location,
            confidence,
            reason: g.reason.clone(),
        });
    }

    let mut messages = Vec::with_capacity(raw.messages.len());
    for (i, m) in raw.messages.iter().enumerate() {
        let path = format!(".messages[{i}]");
        c.player(format!("{path}.player"), &m.player, &players);
        c.timestamp(format!("{path}.ts"), m.ts, start, end);
        if m.text.trim().is_empty() {
            c.fail(format!("{path}.text"), "empty message");
        }
        let tags = m.tags.as_ref().map(|tags| {
            let n_tokens = tokenize(&m.text).len();
            if tags.len() != n_tokens {
                c.fail(
                    format!("{path}.tags"),
                    format!("{} tags for {n_tokens} tokens", tags.len()),
                );
            }
            tags.iter()
                .enumerate()
                .map(|(j, t)| {
                    PosTag::from_symbol(t).unwrap_or_else(|| {
                        c.fail(format!("{path}.tags[{j}]"), format!("unknown tag {t:?}"));
                        PosTag::Other
                    })
                })
                .collect()
        });
        messages.push(ChatMessage {
            player: m.player.clone(),
            ts: m.ts,
            text: m.text.clone(),
            tags,
        });
    }
    check_non_decreasing(&mut c, "messages", raw.messages.iter().map(|m| m.ts));

    let mut marker_moves = Vec::with_capacity(raw.marker_moves.len());
    for (i, m) in raw.marker_moves.iter().enumerate() {
        let path = format!(".marker_moves[{i}]");
        c.player(format!("{path}.player"), &m.player, &players);
        c.timestamp(format!("{path}.ts"), m.ts, start, end);
        let location = c.location(&path, m.lat, m.lon);
        marker_moves.push(MarkerMove {
            player: m.player.clone(),
            ts: m.ts,
            location,
        });
    }
    check_non_decreasing(&mut c, "marker_moves", raw.marker_moves.iter().map(|m| m.ts));

    let final_guess = raw
        .final_guess
        .as_ref()
        .map(|g| c.location(".final_guess", g.lat, g.lon));

    let window_leave = raw.window_leave.as_ref().map(|leaves| {
        leaves
            .iter()
            .enumerate()
            .map(|(i, l)| {
                c.player(format!(".window_leave[{i}].player"), &l.player, &players);
                c.timestamp(format!(".window_leave[{i}].ts"), l.ts, start, end);
                WindowLeave {
                    player: l.player.clone(),
                    ts: l.ts,
                }
            })
            .collect()
    });

    if !c.violations.is_empty() {
        return Err(c.violations);
    }
    Ok(GameRecord {
        game_id: raw.game_id,
        puzzle_id: raw.puzzle_id,
        true_location,
        players: raw.players,
        solo_guesses,
        messages,
        marker_moves,
        final_guess,
        started_at: start,
        submitted_at: end,
        window_leave,
    })
}

/// Parses and validates one JSON object.
pub fn parse_game_record(document: &str) -> Result<GameRecord, CorpusError> {
    let raw: RawGame =
        serde_json::from_str(document).map_err(|e| CorpusError::Malformed(e.to_string()))?;
    validate(raw).map_err(CorpusError::Invalid)
}

fn to_raw(game: &GameRecord) -> RawGame {
    let ll = |p: &LatLon| RawLatLon {
        lat: p.lat,
        lon: p.lon,
    };
    RawGame {
        game_id: game.game_id.clone(),
        puzzle_id: game.puzzle_id.clone(),
        true_location: ll(&game.true_location),
        players: game.players.clone(),
        solo_guesses: game
            .solo_guesses
            .iter()
            .map(|g| RawSolo {
                player: g.player.clone(),
                lat: g.location.lat,
                lon: g.location.lon,
                confidence: serde_json::Number::from_f64(g.confidence)
                    .unwrap_or_else(|| serde_json::Number::from(0)),
                reason: g.reason.clone(),
            })
            .collect(),
        messages: game
            .messages
            .iter()
            .map(|m| RawMessage {
                player: m.player.clone(),
                ts: m.ts,
                text: m.text.clone(),
                tags: m
                    .tags
                    .as_ref()
                    .map(|t| t.iter().map(|t| t.symbol().to_string()).collect()),
            })
            .collect(),
        marker_moves: game
            .marker_moves
            .iter()
            .map(|m| RawMove {
                player: m.player.clone(),
                ts: m.ts,
                lat: m.location.lat,
                lon: m.location.lon,
            })
            .collect(),
        final_guess: game.final_guess.as_ref().map(ll),
        started_at: game.started_at,
        submitted_at: game.submitted_at,
        window_leave: game.window_leave.as_ref().map(|l| {
            l.iter()
                .map(|l| RawLeave {
                    player: l.player.clone(),
                    ts: l.ts,
                })
                .collect()
        }),
    }
}

/// Serialises a record as a single JSON line (no trailing newline).
pub fn to_json_line(game: &GameRecord) -> String {
    serde_json::to_string(&to_raw(game)).expect("records serialise")
}

pub fn write_corpus<W: Write>(games: &[GameRecord], mut out: W) -> std::io::Result<()> {
    for g in games {
        writeln!(out, "{}", to_json_line(g))?;
    }
    Ok(())
}

/// Reads every line, keeping per-line failures. Blank lines are skipped.
pub fn read_corpus_lenient<R: BufRead>(
    input: R,
) -> Result<Vec<(usize, Result<GameRecord, CorpusError>)>, std::io::Error> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push((i + 1, parse_game_record(&line)));
    }
    Ok(out)
}

/// Reads a corpus, failing on the first bad line.
pub fn read_corpus<R: BufRead>(input: R) -> Result<Vec<GameRecord>, LineError> {
    read_corpus_lenient(input)?
        .into_iter()
        .map(|(line, r)| r.map_err(|error| LineError::Record { line, error }))
        .collect()
}
