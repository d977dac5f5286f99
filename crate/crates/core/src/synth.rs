//! Deterministic synthetic corpora with planted differences between team
//! styles. Labels are never planted: they follow from the simulated guesses.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{ChatMessage, GameRecord, MarkerMove, SoloGuess};
use crate::geo::{arc_distance, LatLon, EARTH_RADIUS_KM};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("invalid archetype mix: {0}")]
    InvalidMix(String),
}

/// Behavioural parameters of one team style.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchetypeConfig {
    pub name: String,
    pub team_size: usize,
    /// Relative speaking weight of everyone but the first player, who has
    /// weight 1. Values near 1 give balanced teams.
    pub concentration: f64,
    /// Chance that an idea introduction or adoption is hedged.
    pub hedge_rate: f64,
    /// Ideas introduced per game.
    pub idea_budget: usize,
    /// Chance that a turn adopts an earlier idea, possibly with agreement.
    pub agreement_rate: f64,
    /// Signed km per marker move toward (+) or away from (-) the truth.
    pub drift_km: f64,
    pub solo_error_km: f64,
    /// Mean solo confidence.
    pub confidence: f64,
}

impl ArchetypeConfig {
    pub fn constructive() -> Self {
        Self {
            name: "constructive".into(),
            team_size: 3,
            concentration: 1.0,
            hedge_rate: 0.15,
            idea_budget: 5,
            agreement_rate: 0.7,
            drift_km: 400.0,
            solo_error_km: 1500.0,
            confidence: 0.65,
        }
    }

    pub fn non_constructive() -> Self {
        Self {
            name: "non_constructive".into(),
            team_size: 3,
            concentration: 0.25,
            hedge_rate: 0.65,
            idea_budget: 4,
            agreement_rate: 0.3,
            drift_km: -400.0,
            solo_error_km: 1500.0,
            confidence: 0.4,
        }
    }

    fn validate(&self) -> Result<(), SynthError> {
        let rate = |v: f64| (0.0..=1.0).contains(&v);
        if self.team_size < 2 {
            return Err(SynthError::InvalidMix(format!("{}: team size below 2", self.name)));
        }
        if !(rate(self.hedge_rate) && rate(self.agreement_rate) && rate(self.confidence)) {
            return Err(SynthError::InvalidMix(format!("{}: rate outside [0, 1]", self.name)));
        }
        if !(self.concentration > 0.0 && self.solo_error_km >= 0.0 && self.drift_km.is_finite()) {
            return Err(SynthError::InvalidMix(format!("{}: bad scale", self.name)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_games: usize,
    pub n_puzzles: usize,
    /// Archetypes with mixing weights summing to 1.
    pub mix: Vec<(ArchetypeConfig, f64)>,
    /// Share of games whose whole team phase fits in the first seconds.
    pub quick_rate: f64,
    /// Length of that opening window in seconds.
    pub quick_window_s: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_games: 400,
            n_puzzles: 40,
            mix: vec![
                (ArchetypeConfig::constructive(), 0.5),
                (ArchetypeConfig::non_constructive(), 0.5),
            ],
            quick_rate: 0.1,
            quick_window_s: 20.0,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub game_id: String,
    pub puzzle_id: String,
    pub archetype: String,
    /// All chat and marker events fall inside the opening window.
    pub quick: bool,
}

const PLACES: &[&str] = &[
    "brazil", "peru", "chile", "spain", "portugal", "india", "thailand", "vietnam", "mexico",
    "italy", "greece", "norway", "kenya", "egypt", "morocco", "japan", "china", "russia",
    "canada", "australia", "argentina", "france", "germany", "turkey", "iran",
];
const GEO_TERMS: &[&str] = &[
    "mountains", "desert", "coast", "river", "beach", "forest", "hills", "island", "village",
    "jungle", "valley", "lake",
];
const THINGS: &[&str] = &[
    "signs", "cars", "buildings", "trees", "road", "houses", "church", "palm", "flag", "market",
    "bus", "sand", "snow", "temple",
];
const QUALITIES: &[&str] = &["tropical", "european", "asian", "dry", "green", "rocky", "old"];
const HEDGES: &[&str] = &[
    "maybe", "probably", "i think", "looks like", "might be", "could be", "perhaps", "i guess",
];
const CERTAIN: &[&str] = &["definitely", "clearly", "for sure", "certainly", "obviously"];
const AGREE: &[&str] = &["yes", "yeah", "agree", "exactly", "i agree", "sounds good"];
const DISAGREE: &[&str] = &["nope", "no way", "i disagree", "not really", "nah"];
const INTERFACE: &[&str] = &[
    "move the marker", "check the map", "zoom in on the map", "this game is hard",
    "watch the timer", "where is the pin",
];
const FILLER: &[&str] = &["hmm", "ok", "lol", "wait", "hmm not sure", "idk"];

fn pick<'a>(rng: &mut ChaCha8Rng, pool: &[&'a str]) -> &'a str {
    pool.choose(rng).copied().expect("non-empty pool")
}

/// Point reached from `from` after `dist_km` along initial bearing `bearing`
/// (radians from north).
pub fn destination(from: LatLon, bearing: f64, dist_km: f64) -> LatLon {
    let d = dist_km / EARTH_RADIUS_KM;
    let (p1, l1) = (from.lat.to_radians(), from.lon.to_radians());
    let p2 = (p1.sin() * d.cos() + p1.cos() * d.sin() * bearing.cos())
        .clamp(-1.0, 1.0)
        .asin();
    let l2 = l1 + (bearing.sin() * d.sin() * p1.cos()).atan2(d.cos() - p1.sin() * p2.sin());
    let lon = (l2.to_degrees() + 540.0).rem_euclid(360.0) - 180.0;
    LatLon::new(p2.to_degrees().clamp(-90.0, 90.0), lon.clamp(-180.0, 180.0))
}

/// Initial great-circle bearing from `a` to `b`, radians from north.
pub fn bearing(a: LatLon, b: LatLon) -> f64 {
    let (p1, p2) = (a.lat.to_radians(), b.lat.to_radians());
    let dl = (b.lon - a.lon).to_radians();
    (dl.sin() * p2.cos()).atan2(p1.cos() * p2.sin() - p1.sin() * p2.cos() * dl.cos())
}

fn puzzle_location(seed: u64, k: usize) -> LatLon {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.rotate_left(17) ^ k as u64);
    LatLon::new(rng.random_range(-55.0..65.0), rng.random_range(-179.0..179.0))
}

fn choose_player(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random_range(0.0..total);
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

struct Idea {
    term: String,
    users: Vec<usize>,
}

fn idea_term(rng: &mut ChaCha8Rng) -> String {
    match rng.random_range(0..3) {
        0 => pick(rng, PLACES).to_string(),
        1 => pick(rng, GEO_TERMS).to_string(),
        _ => pick(rng, THINGS).to_string(),
    }
}

fn hedge_prefix(rng: &mut ChaCha8Rng, a: &ArchetypeConfig) -> String {
    if rng.random_bool(a.hedge_rate) {
        format!("{} ", pick(rng, HEDGES))
    } else if rng.random_bool(1.0 - a.hedge_rate) {
        format!("{} ", pick(rng, CERTAIN))
    } else {
        String::new()
    }
}

/// Chat lines of one game as (speaker, text).
fn conversation(rng: &mut ChaCha8Rng, a: &ArchetypeConfig, weights: &[f64]) -> Vec<(usize, String)> {
    let n_msgs = rng.random_range(9..16);
    let mut ideas: Vec<Idea> = Vec::new();
    let mut lines = Vec::with_capacity(n_msgs);
    let constructive = a.drift_km > 0.0;
    for k in 0..n_msgs {
        // everyone speaks at least once
        let who = if k < a.team_size && (constructive || k == 1) {
            if constructive { k } else { 1 }
        } else {
            choose_player(rng, weights)
        };
        let adoptable: Vec<usize> = (0..ideas.len())
            .filter(|&i| !ideas[i].users.contains(&who))
            .collect();
        let text = if !adoptable.is_empty() && rng.random_bool(a.agreement_rate) {
            let i = *adoptable.choose(rng).expect("non-empty");
            ideas[i].users.push(who);
            let term = ideas[i].term.clone();
            let opener = if rng.random_bool(0.6) {
                format!("{} ", pick(rng, AGREE))
            } else {
                String::new()
            };
            format!("{opener}{}{term}", hedge_prefix(rng, a))
        } else if ideas.len() < a.idea_budget && rng.random_bool(0.6) {
            let term = idea_term(rng);
            ideas.push(Idea {
                term: term.clone(),
                users: vec![who],
            });
            let tail = if rng.random_bool(0.4) {
                format!(" {}", pick(rng, QUALITIES))
            } else {
                String::new()
            };
            format!("{}{term}{tail}", hedge_prefix(rng, a))
        } else if constructive {
            match rng.random_range(0..3) {
                0 => format!("the {} look {}", pick(rng, THINGS), pick(rng, QUALITIES)),
                1 => format!("{} near the {}", pick(rng, PLACES), pick(rng, GEO_TERMS)),
                _ => format!("{} {}", pick(rng, CERTAIN), pick(rng, PLACES)),
            }
        } else {
            match rng.random_range(0..3) {
                0 => pick(rng, INTERFACE).to_string(),
                1 => pick(rng, DISAGREE).to_string(),
                _ => pick(rng, FILLER).to_string(),
            }
        };
        lines.push((who, text));
    }
    lines
}

fn generate_game(
    index: usize,
    cfg: &SynthConfig,
    archetype: &ArchetypeConfig,
    rng: &mut ChaCha8Rng,
    quick: bool,
) -> GameRecord {
    let a = archetype;
    let puzzle = index % cfg.n_puzzles;
    let truth = puzzle_location(cfg.seed, puzzle);
    let players: Vec<String> = (0..a.team_size).map(|i| format!("g{index}p{i}")).collect();
    let mut weights = vec![a.concentration; a.team_size];
    weights[0] = 1.0;
    for w in weights.iter_mut() {
        *w *= rng.random_range(0.85..1.15);
    }

    let solo_guesses: Vec<SoloGuess> = players
        .iter()
        .map(|p| {
            let dist = a.solo_error_km * rng.random_range(0.3..1.7);
            let loc = destination(truth, rng.random_range(0.0..std::f64::consts::TAU), dist);
            let conf = (a.confidence + rng.random_range(-0.3..0.3)).clamp(0.0, 1.0);
            let reason = format!(
                "{} {} and {}",
                pick(rng, THINGS),
                pick(rng, QUALITIES),
                pick(rng, GEO_TERMS)
            );
            SoloGuess::new(p, loc, (conf * 100.0).round() / 100.0, &reason)
        })
        .collect();

    let lines = conversation(rng, a, &weights);
    let n_moves = rng.random_range(3..7);
    let mover_weights: Vec<f64> = if a.drift_km > 0.0 {
        vec![1.0; a.team_size]
    } else {
        weights.clone()
    };
    let start = solo_guesses.choose(rng).expect("team has players").location;
    let mut loc = start;
    let mut moves = Vec::with_capacity(n_moves);
    for k in 0..n_moves {
        if k > 0 {
            let dist = arc_distance(loc, truth);
            let toward = bearing(loc, truth);
            let step = a.drift_km.abs() * rng.random_range(0.5..1.5);
            loc = if a.drift_km > 0.0 {
                destination(loc, toward + rng.random_range(-0.2..0.2), step.min(0.8 * dist))
            } else {
                destination(loc, toward + std::f64::consts::PI + rng.random_range(-0.4..0.4), step)
            };
        }
        moves.push((choose_player(rng, &mover_weights), loc));
    }

    // interleave chat and moves on a single timeline
    let n_events = lines.len() + moves.len();
    let mut kinds: Vec<bool> = (0..n_events).map(|i| i < moves.len()).collect();
    for i in (1..n_events).rev() {
        let j = rng.random_range(0..=i);
        kinds.swap(i, j);
    }
    let mut offsets = Vec::with_capacity(n_events);
    let mut t = rng.random_range(1.0..4.0);
    for _ in 0..n_events {
        offsets.push(t);
        t += rng.random_range(2.5..8.0);
    }
    let last = *offsets.last().expect("games have events");
    let first = offsets[0];
    if quick {
        let span = cfg.quick_window_s * 0.9;
        for o in offsets.iter_mut() {
            *o = first + (*o - first) * span / (last - first);
        }
    } else {
        // keep at most 60% of events inside the opening window
        let keep = (0.6 * n_events as f64).floor() as usize;
        let inside = |o: &[f64]| o.iter().filter(|&&x| x < first + cfg.quick_window_s).count();
        while inside(&offsets) > keep {
            for o in offsets.iter_mut() {
                *o = first + (*o - first) * 1.25;
            }
        }
    }

    let started_at = 1_500_000_000.0 + (index as f64) * 1000.0;
    let round = |x: f64| (x * 100.0).round() / 100.0;
    let round_deg = |l: LatLon| LatLon::new((l.lat * 1e6).round() / 1e6, (l.lon * 1e6).round() / 1e6);
    let mut messages = Vec::new();
    let mut marker_moves = Vec::new();
    let (mut li, mut mi) = (0, 0);
    for (is_move, off) in kinds.iter().zip(&offsets) {
        let ts = round(started_at + 30.0 + off);
        if *is_move {
            let (who, l) = moves[mi];
            mi += 1;
            marker_moves.push(MarkerMove {
                player: players[who].clone(),
                ts,
                location: round_deg(l),
            });
        } else {
            let (who, text) = &lines[li];
            li += 1;
            messages.push(ChatMessage::new(&players[*who], ts, text));
        }
    }
    let last_ts = messages
        .last()
        .map(|m| m.ts)
        .into_iter()
        .chain(marker_moves.last().map(|m| m.ts))
        .fold(started_at, f64::max);
    let final_guess = marker_moves.last().map(|m| m.location);

    GameRecord {
        game_id: format!("synth-{}-{index:05}", cfg.seed),
        puzzle_id: format!("puzzle-{puzzle:03}"),
        true_location: round_deg(truth),
        players,
        solo_guesses,
        messages,
        marker_moves,
        final_guess,
        started_at,
        submitted_at: round(last_ts + rng.random_range(2.0..8.0)),
        window_leave: None,
    }
}

/// Generates `cfg.n_games` games; game `i` belongs to puzzle `i % n_puzzles`
/// and draws from its own seeded stream.
pub fn generate_corpus(cfg: &SynthConfig) -> Result<(Vec<GameRecord>, Vec<ManifestEntry>), SynthError> {
    if cfg.mix.is_empty() {
        return Err(SynthError::InvalidMix("no archetypes".into()));
    }
    let total: f64 = cfg.mix.iter().map(|(_, w)| *w).sum();
    if cfg.mix.iter().any(|(_, w)| !(*w >= 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(SynthError::InvalidMix(format!("weights sum to {total}, not 1")));
    }
    if cfg.n_puzzles == 0 || !(0.0..=1.0).contains(&cfg.quick_rate) {
        return Err(SynthError::InvalidMix("need puzzles and a quick rate in [0, 1]".into()));
    }
    for (a, _) in &cfg.mix {
        a.validate()?;
    }
    let mut games = Vec::with_capacity(cfg.n_games);
    let mut manifest = Vec::with_capacity(cfg.n_games);
    for i in 0..cfg.n_games {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ i as u64);
        let mut u = rng.random_range(0.0..1.0);
        let mut archetype = &cfg.mix.last().expect("non-empty").0;
        for (a, w) in &cfg.mix {
            if u < *w {
                archetype = a;
                break;
            }
            u -= w;
        }
        let quick = rng.random_bool(cfg.quick_rate);
        let g = generate_game(i, cfg, archetype, &mut rng, quick);
        manifest.push(ManifestEntry {
            game_id: g.game_id.clone(),
            puzzle_id: g.puzzle_id.clone(),
            archetype: archetype.name.clone(),
            quick,
        });
        games.push(g);
    }
    Ok((games, manifest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conversation::Conversation;
    use crate::corpus::{filter_corpus, parse_game_record, to_json_line, FilterConfig};
    use crate::dynamics::participation_indicators;
    use crate::geo::label_game;
    use crate::lingfeat::{early_window, EARLY_HORIZON_S, EARLY_MAX_COVERAGE};
    use crate::text::Tagger;

    fn single(a: ArchetypeConfig, n: usize) -> SynthConfig {
        SynthConfig {
            n_games: n,
            n_puzzles: 20,
            mix: vec![(a, 1.0)],
            quick_rate: 0.0,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn destination_and_bearing_agree() {
        let a = LatLon::new(10.0, 20.0);
        let b = destination(a, 1.0, 1234.0);
        assert!((arc_distance(a, b) - 1234.0).abs() < 1e-6);
        assert!((bearing(a, b) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn positive_drift_mostly_constructive() {
        let (games, _) = generate_corpus(&single(ArchetypeConfig::constructive(), 200)).unwrap();
        let pos = games
            .iter()
            .filter(|g| label_game(g).unwrap().obj_constructive)
            .count();
        assert!(pos > 140, "{pos} of 200");
    }

    #[test]
    fn negative_drift_mostly_not() {
        let (games, _) = generate_corpus(&single(ArchetypeConfig::non_constructive(), 200)).unwrap();
        let neg = games
            .iter()
            .filter(|g| label_game(g).unwrap().c_avg < 0.0)
            .count();
        assert!(neg > 140, "{neg} of 200");
    }

    #[test]
    fn deterministic_and_valid() {
        let cfg = SynthConfig {
            n_games: 60,
            n_puzzles: 6,
            ..SynthConfig::default()
        };
        let (a, ma) = generate_corpus(&cfg).unwrap();
        let (b, mb) = generate_corpus(&cfg).unwrap();
        let lines = |g: &[GameRecord]| g.iter().map(to_json_line).collect::<Vec<_>>();
        assert_eq!(lines(&a), lines(&b));
        assert_eq!(ma, mb);
        for line in lines(&a) {
            parse_game_record(&line).unwrap();
        }
        let (kept, report) = filter_corpus(&a, &FilterConfig::default());
        assert_eq!(kept.len(), a.len(), "{:?}", report.rejected);
    }

    #[test]
    fn quick_games_are_exactly_the_ineligible_ones() {
        let cfg = SynthConfig {
            n_games: 200,
            ..SynthConfig::default()
        };
        let (games, manifest) = generate_corpus(&cfg).unwrap();
        assert!(manifest.iter().any(|m| m.quick));
        for (g, m) in games.iter().zip(&manifest) {
            let w = early_window(g, EARLY_HORIZON_S, EARLY_MAX_COVERAGE).unwrap();
            assert_eq!(!w.eligible, m.quick, "{}", g.game_id);
        }
    }

    #[test]
    fn balanced_archetype_has_higher_message_entropy() {
        let mean_entropy = |a: ArchetypeConfig| {
            let (games, _) = generate_corpus(&single(a, 100)).unwrap();
            games
                .iter()
                .map(|g| {
                    let conv = Conversation::from_game(g, Tagger::builtin());
                    participation_indicators(g, &conv).get("dyn.entropy_msgs").unwrap()
                })
                .sum::<f64>()
                / 100.0
        };
        assert!(
            mean_entropy(ArchetypeConfig::constructive())
                > mean_entropy(ArchetypeConfig::non_constructive())
        );
    }

    #[test]
    fn invalid_mix() {
        let mut cfg = SynthConfig::default();
        cfg.mix[0].1 = 0.7;
        assert!(generate_corpus(&cfg).is_err());
        cfg.mix.clear();
        assert!(generate_corpus(&cfg).is_err());
        let mut cfg = SynthConfig::default();
        cfg.mix[0].0.team_size = 1;
        assert!(generate_corpus(&cfg).is_err());
    }
}
