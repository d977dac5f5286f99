//! Great-circle scoring and constructiveness measures.
//!
//! Distances use the spherical law of cosines on a sphere of radius
//! [`EARTH_RADIUS_KM`]. A guess scores the negated distance, so higher is
//! better and an exact hit scores zero.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{GameRecord, SoloGuess};
use crate::scalar::{Real, Scalar};

/// Mean earth radius in kilometres.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeoError {
    #[error("no solo guesses to compare the team guess against")]
    NoSoloGuesses,
    #[error("need at least {needed} marker moves, game has {found}")]
    TooFewGuesses { needed: usize, found: usize },
    #[error("game has no team guess")]
    NoTeamGuess,
}

/// A point in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatLon<T = f64> {
    pub lat: T,
    pub lon: T,
}

impl<T: Real> LatLon<T> {
    pub fn new(lat: T, lon: T) -> Self {
        Self { lat, lon }
    }

    pub fn in_range(&self) -> bool {
        self.lat.is_finite()
            && self.lon.is_finite()
            && self.lat.abs() <= T::lit(90.0)
            && self.lon.abs() <= T::lit(180.0)
    }
}

/// Central angle in radians between two points.
pub fn central_angle<T: Real>(a: LatLon<T>, b: LatLon<T>) -> T {
    if a == b {
        return T::zero();
    }
    let phi1 = a.lat.to_radians();
    let phi2 = b.lat.to_radians();
    let dlambda = (b.lon - a.lon).to_radians();
    let cos_d = phi1.sin() * phi2.sin() + phi1.cos() * phi2.cos() * dlambda.cos();
    // rounding can leave the cosine slightly outside [-1, 1]
    cos_d.max(-T::one()).min(T::one()).acos()
}

/// Great-circle distance in kilometres.
pub fn arc_distance<T: Real>(a: LatLon<T>, b: LatLon<T>) -> T {
    central_angle(a, b) * T::lit(EARTH_RADIUS_KM)
}

/// Negated distance in kilometres; higher is better.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Score<T = f64>(pub T);

impl<T: Real> Score<T> {
    pub fn value(self) -> T {
        self.0
    }

    /// Distance in kilometres this score corresponds to.
    pub fn distance_km(self) -> T {
        -self.0
    }
}

pub fn score<T: Real>(guess: LatLon<T>, truth: LatLon<T>) -> Score<T> {
    Score(-arc_distance(guess, truth))
}

/// Team improvement over the mean, best and worst member scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstructivenessLabel<T = f64> {
    pub c_avg: T,
    pub c_best: T,
    pub c_worst: T,
    /// Team beats its best member.
    pub obj_best: bool,
    /// Team beats its members' mean.
    pub obj_constructive: bool,
    /// Team does worse than its worst member.
    pub obj_worst: bool,
}

/// The three binary classification objectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Objective {
    /// `c_best > 0`
    #[serde(rename = "PP")]
    Best,
    /// `c_avg > 0`
    #[serde(rename = "P")]
    Constructive,
    /// `c_worst < 0`
    #[serde(rename = "MM")]
    Worst,
}

impl Objective {
    pub const ALL: [Objective; 3] = [Objective::Best, Objective::Constructive, Objective::Worst];

    pub fn code(self) -> &'static str {
        match self {
            Objective::Best => "PP",
            Objective::Constructive => "P",
            Objective::Worst => "MM",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code.to_ascii_uppercase().as_str() {
            "PP" | "++" => Some(Objective::Best),
            "P" | "+" => Some(Objective::Constructive),
            "MM" | "--" => Some(Objective::Worst),
            _ => None,
        }
    }
}

impl<T> ConstructivenessLabel<T> {
    pub fn objective(&self, objective: Objective) -> bool {
        match objective {
            Objective::Best => self.obj_best,
            Objective::Constructive => self.obj_constructive,
            Objective::Worst => self.obj_worst,
        }
    }
}

/// Summary of the solo scores a label was computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoloSummary<T> {
    pub mean: T,
    pub best: T,
    pub worst: T,
}

/// Mean, max and min of the solo scores. The mean is clamped into
/// `[min, max]` because inexact division can push it past either end.
pub fn summarize_solo<T: Scalar>(solo_scores: &[T]) -> Result<SoloSummary<T>, GeoError> {
    let (&first, rest) = solo_scores.split_first().ok_or(GeoError::NoSoloGuesses)?;
    let (mut best, mut worst, mut sum) = (first, first, first);
    for &s in rest {
        if s > best {
            best = s;
        }
        if s < worst {
            worst = s;
        }
        sum = sum + s;
    }
    let mut mean = sum / T::from_count(solo_scores.len());
    if mean > best {
        mean = best;
    }
    if mean < worst {
        mean = worst;
    }
    Ok(SoloSummary { mean, best, worst })
}

/// Constructiveness from raw scores. Works for any ordered field, including
/// exact rationals.
pub fn constructiveness_from_scores<T: Scalar>(
    team_score: T,
    solo_scores: &[T],
) -> Result<ConstructivenessLabel<T>, GeoError> {
    let solo = summarize_solo(solo_scores)?;
    let c_avg = team_score - solo.mean;
    let c_best = team_score - solo.best;
    let c_worst = team_score - solo.worst;
    let zero = T::zero();
    Ok(ConstructivenessLabel {
        c_avg,
        c_best,
        c_worst,
        obj_best: c_best > zero,
        obj_constructive: c_avg > zero,
        obj_worst: c_worst < zero,
    })
}

/// Constructiveness of a team guess against its members' solo guesses.
/// Players without a solo guess simply do not appear in `solo_guesses`.
pub fn constructiveness(
    team_guess: LatLon,
    solo_guesses: &[SoloGuess],
    truth: LatLon,
) -> Result<ConstructivenessLabel, GeoError> {
    let solo: Vec<f64> = solo_guesses
        .iter()
        .map(|g| score(g.location, truth).value())
        .collect();
    constructiveness_from_scores(score(team_guess, truth).value(), &solo)
}

/// Label a whole game.
pub fn label_game(game: &GameRecord) -> Result<ConstructivenessLabel, GeoError> {
    let team = game.final_guess.ok_or(GeoError::NoTeamGuess)?;
    constructiveness(team, &game.solo_guesses, game.true_location)
}

/// Distance of each of the last `k` marker moves to the final guess,
/// oldest first.
pub fn convergence_profile(game: &GameRecord, k: usize) -> Result<Vec<f64>, GeoError> {
    let final_guess = game.final_guess.ok_or(GeoError::NoTeamGuess)?;
    let moves = &game.marker_moves;
    if moves.len() < k {
        return Err(GeoError::TooFewGuesses {
            needed: k,
            found: moves.len(),
        });
    }
    Ok(moves[moves.len() - k..]
        .iter()
        .map(|m| arc_distance(m.location, final_guess))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreProfile {
    /// Scores of the first `k` marker moves against the truth.
    pub intermediate: Vec<Score>,
    /// Mean solo score; absent when nobody submitted a solo guess.
    pub mean_solo: Option<Score>,
    pub final_score: Score,
}

pub fn score_profile(game: &GameRecord, k: usize) -> Result<ScoreProfile, GeoError> {
    let final_guess = game.final_guess.ok_or(GeoError::NoTeamGuess)?;
    let moves = &game.marker_moves;
    if moves.len() < k {
        return Err(GeoError::TooFewGuesses {
            needed: k,
            found: moves.len(),
        });
    }
    let truth = game.true_location;
    let solo: Vec<f64> = game
        .solo_guesses
        .iter()
        .map(|g| score(g.location, truth).value())
        .collect();
    Ok(ScoreProfile {
        intermediate: moves[..k].iter().map(|m| score(m.location, truth)).collect(),
        mean_solo: summarize_solo(&solo).ok().map(|s| Score(s.mean)),
        final_score: score(final_guess, truth),
    })
}
