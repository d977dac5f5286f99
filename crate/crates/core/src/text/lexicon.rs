use std::collections::{HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use super::tokenize::tokenize;
use super::Normed;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("lexicon {name}, line {line}: {reason}")]
    BadLine {
        name: String,
        line: usize,
        reason: String,
    },
    #[error("lexicon {0} has no entries")]
    Empty(String),
}

/// Where in a message an entry may match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Position {
    Any,
    /// Only as the first token of a message.
    Initial,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LexEntry {
    /// Normalised token sequence.
    pub terms: Vec<String>,
    pub weight: Option<f64>,
    pub position: Position,
}

/// Named term list with multi-word entries and optional position
/// constraints. Immutable once built.
#[derive(Debug, Clone)]
pub struct Lexicon {
    name: String,
    entries: Vec<LexEntry>,
    /// First token -> entry indices, longest first.
    by_first: HashMap<String, Vec<usize>>,
    single_words: HashSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct LexiconHits {
    pub count: usize,
    /// `(start, length)` of each non-overlapping match, in order.
    pub spans: Vec<(usize, usize)>,
}

impl Lexicon {
    pub fn new(name: &str, entries: Vec<LexEntry>) -> Result<Self, LexiconError> {
        if entries.is_empty() {
            return Err(LexiconError::Empty(name.to_string()));
        }
        let mut by_first: HashMap<String, Vec<usize>> = HashMap::new();
        let mut single_words = HashSet::new();
        for (i, e) in entries.iter().enumerate() {
            by_first.entry(e.terms[0].clone()).or_default().push(i);
            if e.terms.len() == 1 && e.position == Position::Any {
                single_words.insert(e.terms[0].clone());
            }
        }
        for idx in by_first.values_mut() {
            idx.sort_by_key(|&i| std::cmp::Reverse(entries[i].terms.len()));
        }
        Ok(Self {
            name: name.to_string(),
            entries,
            by_first,
            single_words,
        })
    }

    /// Builds an unweighted, unconstrained lexicon from terms.
    pub fn from_terms<S: AsRef<str>>(name: &str, terms: &[S]) -> Result<Self, LexiconError> {
        let entries = terms
            .iter()
            .filter_map(|t| entry_terms(t.as_ref()))
            .map(|terms| LexEntry {
                terms,
                weight: None,
                position: Position::Any,
            })
            .collect();
        Self::new(name, entries)
    }

    /// Parses `term[TAB]weight?[TAB]position?` lines; `#` starts a comment.
    pub fn parse(name: &str, text: &str) -> Result<Self, LexiconError> {
        let bad = |line: usize, reason: String| LexiconError::BadLine {
            name: name.to_string(),
            line,
            reason,
        };
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim_end();
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let term = fields.next().unwrap_or("");
            let Some(terms) = entry_terms(term) else {
                return Err(bad(i + 1, "empty term".into()));
            };
            let weight = match fields.next().map(str::trim) {
                None | Some("") => None,
                Some(w) => Some(
                    w.parse::<f64>()
                        .ok()
                        .filter(|w| w.is_finite())
                        .ok_or_else(|| bad(i + 1, format!("bad weight {w:?}")))?,
                ),
            };
            let position = match fields.next().map(|p| p.trim().to_ascii_lowercase()) {
                None => Position::Any,
                Some(p) if p.is_empty() || p == "any" => Position::Any,
                Some(p) if p == "initial" => Position::Initial,
                Some(p) => return Err(bad(i + 1, format!("bad position {p:?}"))),
            };
            if fields.next().is_some() {
                return Err(bad(i + 1, "too many fields".into()));
            }
            entries.push(LexEntry {
                terms,
                weight,
                position,
            });
        }
        Self::new(name, entries)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn entries(&self) -> &[LexEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True for a single-token entry usable at any position.
    pub fn contains_word(&self, norm: &str) -> bool {
        self.single_words.contains(norm)
    }

    /// Greedy left-to-right longest match; matches never overlap.
    pub fn find<T: Normed>(&self, tokens: &[T]) -> LexiconHits {
        let mut hits = LexiconHits::default();
        let mut i = 0;
        while i < tokens.len() {
            let matched = self.by_first.get(tokens[i].norm()).and_then(|cands| {
                cands.iter().map(|&c| &self.entries[c]).find(|e| {
                    (e.position == Position::Any || i == 0)
                        && i + e.terms.len() <= tokens.len()
                        && e
                            .terms
                            .iter()
                            .zip(&tokens[i..])
                            .all(|(term, tok)| term == tok.norm())
                })
            });
            match matched {
                Some(e) => {
                    hits.spans.push((i, e.terms.len()));
                    hits.count += 1;
                    i += e.terms.len();
                }
                None => i += 1,
            }
        }
        hits
    }
}

fn entry_terms(term: &str) -> Option<Vec<String>> {
    let terms: Vec<String> = tokenize(term).into_iter().map(|t| t.norm).collect();
    (!terms.is_empty()).then_some(terms)
}

pub fn lexicon_hits<T: Normed>(tokens: &[T], lexicon: &Lexicon) -> LexiconHits {
    lexicon.find(tokens)
}
