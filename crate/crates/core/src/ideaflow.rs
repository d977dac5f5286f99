//! Idea flow: content words introduced by one player and adopted by others.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::conversation::{FeatureMap, TaggedMessage};
use crate::corpus::PlayerId;
use crate::dynamics::balance_entropy;
use crate::text::{Lexicon, PosTag, TaggedToken};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Adoption {
    pub player: PlayerId,
    pub msg_index: usize,
    pub hedged: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdeaEvent {
    pub term: String,
    pub introducer: PlayerId,
    pub intro_msg_index: usize,
    pub intro_hedged: bool,
    /// First use by each other player, in conversation order.
    pub adoptions: Vec<Adoption>,
}

impl IdeaEvent {
    pub fn adopters(&self) -> impl Iterator<Item = &str> {
        self.adoptions.iter().map(|a| a.player.as_str())
    }
}

/// Tags that can carry an idea: nouns, proper nouns, adjectives, verbs.
pub fn is_idea_tag(tag: PosTag) -> bool {
    matches!(
        tag,
        PosTag::Noun | PosTag::ProperNoun | PosTag::Adjective | PosTag::Verb
    )
}

/// Whether a token may introduce or adopt an idea.
pub fn is_candidate(token: &TaggedToken, stopwords: &Lexicon) -> bool {
    is_idea_tag(token.tag)
        && token.token.norm.chars().count() >= 2
        && !stopwords.contains_word(&token.token.norm)
}

/// Single pass over the conversation. The first player to use a candidate
/// norm introduces it; every other player's first use adopts it. Only norms
/// with at least one adoption are returned, ordered by introduction.
pub fn extract_ideas(
    messages: &[TaggedMessage],
    stopwords: &Lexicon,
    hedges: &Lexicon,
) -> Vec<IdeaEvent> {
    let mut ideas: Vec<IdeaEvent> = Vec::new();
    let mut by_term: HashMap<&str, usize> = HashMap::new();
    let mut users: Vec<HashSet<&str>> = Vec::new();

    for (idx, msg) in messages.iter().enumerate() {
        let hedged = hedges.find(&msg.tokens).count > 0;
        for tok in msg.tokens.iter().filter(|t| is_candidate(t, stopwords)) {
            let term = tok.token.norm.as_str();
            match by_term.get(term) {
                None => {
                    by_term.insert(term, ideas.len());
                    users.push(HashSet::from([msg.player.as_str()]));
                    ideas.push(IdeaEvent {
                        term: term.to_string(),
                        introducer: msg.player.clone(),
                        intro_msg_index: idx,
                        intro_hedged: hedged,
                        adoptions: Vec::new(),
                    });
                }
                Some(&i) => {
                    if users[i].insert(msg.player.as_str()) {
                        ideas[i].adoptions.push(Adoption {
                            player: msg.player.clone(),
                            msg_index: idx,
                            hedged,
                        });
                    }
                }
            }
        }
    }
    ideas.retain(|e| !e.adoptions.is_empty());
    ideas
}

/// Adopted by every team member other than the introducer.
pub fn is_unanimous(idea: &IdeaEvent, players: &[PlayerId]) -> bool {
    let adopters: HashSet<&str> = idea.adopters().collect();
    players
        .iter()
        .filter(|p| **p != idea.introducer)
        .all(|p| adopters.contains(p.as_str()))
}

pub const IDEA_FEATURES: [&str; 6] = [
    "ideas.count",
    "ideas.unanimous_count",
    "ideas.max_introduced",
    "ideas.intro_entropy",
    "ideas.intro_hedged_frac",
    "ideas.adopt_hedged_frac",
];

pub fn idea_features(ideas: &[IdeaEvent], players: &[PlayerId]) -> FeatureMap {
    let mut f = FeatureMap::new();
    let per_player: Vec<f64> = players
        .iter()
        .map(|p| ideas.iter().filter(|e| &e.introducer == p).count() as f64)
        .collect();
    let adoptions: Vec<&Adoption> = ideas.iter().flat_map(|e| &e.adoptions).collect();
    let frac = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };

    f.put("ideas.count", ideas.len() as f64);
    f.put(
        "ideas.unanimous_count",
        ideas.iter().filter(|e| is_unanimous(e, players)).count() as f64,
    );
    f.put(
        "ideas.max_introduced",
        per_player.iter().copied().fold(0.0, f64::max),
    );
    f.set("ideas.intro_entropy", balance_entropy(&per_player).ok());
    f.put(
        "ideas.intro_hedged_frac",
        frac(ideas.iter().filter(|e| e.intro_hedged).count(), ideas.len()),
    );
    f.put(
        "ideas.adopt_hedged_frac",
        frac(adoptions.iter().filter(|a| a.hedged).count(), adoptions.len()),
    );
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{tag_message, LexiconSet};
    use crate::corpus::ChatMessage;

    fn conv(lines: &[(&str, &str)]) -> Vec<TaggedMessage> {
        lines
            .iter()
            .enumerate()
            .map(|(i, (p, text))| {
                let m = ChatMessage::new(p, i as f64, text);
                TaggedMessage {
                    player: p.to_string(),
                    ts: m.ts,
                    tokens: tag_message(&m),
                }
            })
            .collect()
    }

    fn extract(lines: &[(&str, &str)]) -> Vec<IdeaEvent> {
        let lx = LexiconSet::builtin();
        extract_ideas(&conv(lines), &lx.stopwords, &lx.hedges)
    }

    fn players(ids: &[&str]) -> Vec<PlayerId> {
        ids.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn three_message_fixture() {
        let ideas = extract(&[
            ("A", "buildings look chinese"),
            ("B", "yeah those buildings, maybe shanghai"),
            ("A", "shanghai works"),
        ]);
        let expected = vec![
            IdeaEvent {
                term: "buildings".into(),
                introducer: "A".into(),
                intro_msg_index: 0,
                intro_hedged: false,
                adoptions: vec![Adoption {
                    player: "B".into(),
                    msg_index: 1,
                    hedged: true,
                }],
            },
            IdeaEvent {
                term: "shanghai".into(),
                introducer: "B".into(),
                intro_msg_index: 1,
                intro_hedged: true,
                adoptions: vec![Adoption {
                    player: "A".into(),
                    msg_index: 2,
                    hedged: false,
                }],
            },
        ];
        assert_eq!(ideas, expected);

        let f = idea_features(&ideas, &players(&["A", "B"]));
        assert_eq!(f.get("ideas.count"), Some(2.0));
        assert_eq!(f.get("ideas.unanimous_count"), Some(2.0));
        assert_eq!(f.get("ideas.max_introduced"), Some(1.0));
        assert_eq!(f.get("ideas.intro_entropy"), Some(1.0));
        assert_eq!(f.get("ideas.intro_hedged_frac"), Some(0.5));
        assert_eq!(f.get("ideas.adopt_hedged_frac"), Some(0.5));
    }

    #[test]
    fn repetition_by_introducer_is_not_an_idea() {
        let ideas = extract(&[("A", "flag"), ("B", "hmm"), ("A", "the flag again")]);
        assert!(ideas.is_empty());
    }

    #[test]
    fn three_way_adoption_is_unanimous() {
        let ideas = extract(&[("A", "red flag"), ("B", "flag yes"), ("C", "that flag")]);
        let flag = ideas.iter().find(|e| e.term == "flag").unwrap();
        assert_eq!(flag.adoptions.len(), 2);
        let ps = players(&["A", "B", "C"]);
        assert!(is_unanimous(flag, &ps));
        let f = idea_features(&ideas, &ps);
        assert_eq!(f.get("ideas.unanimous_count"), Some(1.0));
    }

    #[test]
    fn partial_adoption_is_not_unanimous() {
        let ideas = extract(&[("A", "flag"), ("B", "flag")]);
        assert!(!is_unanimous(&ideas[0], &players(&["A", "B", "C"])));
    }

    #[test]
    fn no_ideas_gives_zeros() {
        let f = idea_features(&[], &players(&["A", "B"]));
        for name in IDEA_FEATURES {
            assert_eq!(f.get(name), Some(0.0), "{name}");
        }
    }

    #[test]
    fn casing_does_not_matter() {
        let lower = extract(&[("A", "the Flag is red"), ("B", "FLAG red")]);
        let upper = extract(&[("A", "the flag is red"), ("B", "flag red")]);
        let terms = |v: &[IdeaEvent]| v.iter().map(|e| e.term.clone()).collect::<Vec<_>>();
        assert_eq!(terms(&lower), terms(&upper));
    }
}
