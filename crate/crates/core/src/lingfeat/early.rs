use super::FeatureError;
use crate::corpus::GameRecord;

pub const EARLY_HORIZON_S: f64 = 20.0;
pub const EARLY_MAX_COVERAGE: f64 = 0.75;

/// The opening seconds of a game's team phase.
#[derive(Debug, Clone, PartialEq)]
pub struct EarlyWindow {
    /// The game restricted to events before `anchor + horizon`.
    pub game: GameRecord,
    pub anchor: f64,
    /// Retained events over all events.
    pub coverage: f64,
    pub eligible: bool,
}

/// Keeps chat messages and marker moves strictly before `anchor + horizon_s`,
/// where the anchor is the first message or move. Solo-phase data is kept
/// whole. Games where the window holds more than `max_coverage` of all
/// events are ineligible.
pub fn early_window(
    game: &GameRecord,
    horizon_s: f64,
    max_coverage: f64,
) -> Result<EarlyWindow, FeatureError> {
    let anchor = game
        .first_event_ts()
        .ok_or_else(|| FeatureError::NoEvents(game.game_id.clone()))?;
    let cutoff = anchor + horizon_s;
    let mut g = game.clone();
    g.messages.retain(|m| m.ts < cutoff);
    g.marker_moves.retain(|m| m.ts < cutoff);
    if let Some(leaves) = g.window_leave.as_mut() {
        leaves.retain(|w| w.ts < cutoff);
    }
    g.submitted_at = g.submitted_at.min(cutoff);
    let coverage = g.event_count() as f64 / game.event_count() as f64;
    Ok(EarlyWindow {
        game: g,
        anchor,
        coverage,
        eligible: coverage <= max_coverage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tests::minimal_game;
    use crate::corpus::{ChatMessage, MarkerMove};
    use crate::geo::LatLon;
    use proptest::prelude::*;

    fn game_with_offsets(msgs: &[f64], moves: &[f64]) -> GameRecord {
        let mut g = minimal_game();
        g.submitted_at = 1000.0;
        g.messages = msgs
            .iter()
            .map(|o| ChatMessage::new("a", 100.0 + o, "hi"))
            .collect();
        g.marker_moves = moves
            .iter()
            .map(|o| MarkerMove {
                player: "b".into(),
                ts: 100.0 + o,
                location: LatLon::new(0.0, 0.0),
            })
            .collect();
        g
    }

    fn window(msgs: &[f64], moves: &[f64]) -> EarlyWindow {
        early_window(&game_with_offsets(msgs, moves), EARLY_HORIZON_S, EARLY_MAX_COVERAGE).unwrap()
    }

    #[test]
    fn half_retained() {
        let w = window(&[0.0, 30.0], &[5.0, 60.0]);
        assert_eq!(w.game.event_count(), 2);
        assert_eq!(w.coverage, 0.5);
        assert!(w.eligible);
        assert_eq!(w.game.submitted_at, 120.0);
    }

    #[test]
    fn three_quarters_is_still_eligible() {
        let w = window(&[0.0, 2.0, 3.0, 50.0], &[]);
        assert_eq!(w.coverage, 0.75);
        assert!(w.eligible);
    }

    #[test]
    fn everything_inside_is_ineligible() {
        let w = window(&[0.0, 5.0], &[10.0, 19.9]);
        assert_eq!(w.coverage, 1.0);
        assert!(!w.eligible);
    }

    #[test]
    fn horizon_is_exclusive() {
        let w = window(&[0.0, 20.0], &[]);
        assert_eq!(w.game.messages.len(), 1);
    }

    #[test]
    fn anchor_may_be_a_move() {
        let w = window(&[15.0, 25.0], &[3.0]);
        assert_eq!(w.anchor, 103.0);
        assert_eq!(w.game.messages.len(), 1);
    }

    #[test]
    fn solo_phase_is_kept() {
        let g = game_with_offsets(&[0.0, 100.0], &[]);
        let w = early_window(&g, EARLY_HORIZON_S, EARLY_MAX_COVERAGE).unwrap();
        assert_eq!(w.game.solo_guesses, g.solo_guesses);
    }

    #[test]
    fn no_events() {
        let g = game_with_offsets(&[], &[]);
        assert!(matches!(
            early_window(&g, EARLY_HORIZON_S, EARLY_MAX_COVERAGE),
            Err(FeatureError::NoEvents(_))
        ));
    }

    proptest! {
        #[test]
        fn idempotent_and_subset(
            mut msgs in prop::collection::vec(0.0f64..120.0, 1..12),
            mut moves in prop::collection::vec(0.0f64..120.0, 0..6),
        ) {
            msgs.sort_by(f64::total_cmp);
            moves.sort_by(f64::total_cmp);
            let g = game_with_offsets(&msgs, &moves);
            let w = early_window(&g, EARLY_HORIZON_S, EARLY_MAX_COVERAGE).unwrap();
            let again = early_window(&w.game, EARLY_HORIZON_S, EARLY_MAX_COVERAGE).unwrap();
            prop_assert_eq!(&again.game, &w.game);
            prop_assert!((0.0..=1.0).contains(&w.coverage));
            for m in &w.game.messages {
                prop_assert!(m.ts < w.anchor + EARLY_HORIZON_S);
                prop_assert!(g.messages.contains(m));
            }
            for m in &w.game.marker_moves {
                prop_assert!(g.marker_moves.contains(m));
            }
        }
    }
}
