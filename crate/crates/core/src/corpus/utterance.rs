use serde::Serialize;

use super::{ChatMessage, PlayerId};

/// A maximal run of consecutive messages by one speaker.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Utterance {
    pub player: PlayerId,
    pub start: f64,
    pub end: f64,
    /// Message texts joined with a single space.
    pub text: String,
    /// Indices into the source message list, ascending and contiguous.
    pub message_indices: Vec<usize>,
}

/// Merges runs of same-speaker messages. Adjacent utterances always have
/// different speakers; each adjacent pair is one turn.
pub fn derive_utterances(messages: &[ChatMessage]) -> Vec<Utterance> {
    let mut out: Vec<Utterance> = Vec::new();
    for (i, m) in messages.iter().enumerate() {
        match out.last_mut() {
            Some(u) if u.player == m.player => {
                u.end = m.ts;
                u.text.push(' ');
                u.text.push_str(&m.text);
                u.message_indices.push(i);
            }
            _ => out.push(Utterance {
                player: m.player.clone(),
                start: m.ts,
                end: m.ts,
                text: m.text.clone(),
                message_indices: vec![i],
            }),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn msgs(speakers: &str) -> Vec<ChatMessage> {
        speakers
            .chars()
            .enumerate()
            .map(|(i, s)| ChatMessage::new(&s.to_string(), i as f64, &format!("m{i}")))
            .collect()
    }

    #[test]
    fn merges_same_speaker_runs() {
        let u = derive_utterances(&msgs("AAB"));
        assert_eq!(u.len(), 2);
        assert_eq!(u[0].text, "m0 m1");
        assert_eq!(u[0].message_indices, vec![0, 1]);
        assert_eq!((u[0].start, u[0].end), (0.0, 1.0));
        assert_eq!(u[1].player, "B");
    }

    #[test]
    fn no_merge_across_speakers() {
        assert_eq!(derive_utterances(&msgs("ABA")).len(), 3);
    }

    #[test]
    fn empty_input() {
        assert!(derive_utterances(&[]).is_empty());
    }

    proptest! {
        #[test]
        fn utterances_partition_messages(speakers in "[ABC]{0,30}") {
            let m = msgs(&speakers);
            let u = derive_utterances(&m);
            let flat: Vec<usize> = u.iter().flat_map(|u| u.message_indices.clone()).collect();
            prop_assert_eq!(flat, (0..m.len()).collect::<Vec<_>>());
            for w in u.windows(2) {
                prop_assert_ne!(&w[0].player, &w[1].player);
            }
            let words: Vec<&str> = u.iter().flat_map(|u| u.text.split(' ')).collect();
            let orig: Vec<&str> = m.iter().map(|m| m.text.as_str()).collect();
            prop_assert_eq!(words, orig);
        }
    }
}
