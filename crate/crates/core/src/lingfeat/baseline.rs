use crate::conversation::FeatureMap;
use crate::corpus::GameRecord;

/// Team size, messages per player and conversation duration measured from
/// the first chat message or marker move.
pub fn baseline_features(game: &GameRecord) -> FeatureMap {
    let mut f = FeatureMap::new();
    let anchor = game.first_event_ts().unwrap_or(game.started_at);
    f.put("base.team_size", game.team_size() as f64);
    f.put(
        "base.msgs_per_player",
        game.messages.len() as f64 / game.team_size().max(1) as f64,
    );
    f.put("base.duration_s", (game.submitted_at - anchor).max(0.0));
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tests::minimal_game;
    use crate::corpus::ChatMessage;

    #[test]
    fn six_messages_ninety_seconds() {
        let mut g = minimal_game();
        g.messages = (0..6)
            .map(|i| ChatMessage::new(["a", "b"][i % 2], 100.0 + i as f64, "ok"))
            .collect();
        g.marker_moves.clear();
        g.submitted_at = 190.0;
        let f = baseline_features(&g);
        assert_eq!(f.get("base.team_size"), Some(2.0));
        assert_eq!(f.get("base.msgs_per_player"), Some(3.0));
        assert_eq!(f.get("base.duration_s"), Some(90.0));
    }

    #[test]
    fn no_messages() {
        let mut g = minimal_game();
        g.messages.clear();
        g.marker_moves.clear();
        let f = baseline_features(&g);
        assert_eq!(f.get("base.msgs_per_player"), Some(0.0));
        assert_eq!(f.get("base.duration_s"), Some(30.0));
    }

    #[test]
    fn instant_submit() {
        let mut g = minimal_game();
        g.messages.truncate(1);
        g.marker_moves.clear();
        g.submitted_at = g.messages[0].ts;
        assert_eq!(baseline_features(&g).get("base.duration_s"), Some(0.0));
    }
}
