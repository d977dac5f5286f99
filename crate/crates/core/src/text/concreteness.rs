use std::collections::HashMap;

use super::{LexiconError, TaggedToken};

/// Word and bigram concreteness ratings rescaled from 1..=5 to `[0, 1]`.
#[derive(Debug, Clone, Default)]
pub struct ConcretenessTable {
    unigrams: HashMap<String, f64>,
    bigrams: HashMap<(String, String), f64>,
}

/// Pooled concreteness over a span of text.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConcretenessStats {
    pub sum: f64,
    /// Rated units found (a bigram counts once).
    pub covered: usize,
    /// Content-tagged tokens examined.
    pub content_tokens: usize,
}

impl ConcretenessStats {
    pub fn mean(&self) -> Option<f64> {
        (self.covered > 0).then(|| (self.sum / self.covered as f64).clamp(0.0, 1.0))
    }

    pub fn merge(&mut self, other: ConcretenessStats) {
        self.sum += other.sum;
        self.covered += other.covered;
        self.content_tokens += other.content_tokens;
    }
}

impl ConcretenessTable {
    /// Parses `term[TAB]raw_rating` lines with raw ratings in `[1, 5]`.
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let bad = |line: usize, reason: String| LexiconError::BadLine {
            name: "concreteness".into(),
            line,
            reason,
        };
        let mut table = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end();
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (term, rating) = line
                .split_once('\t')
                .ok_or_else(|| bad(i + 1, "expected term<TAB>rating".into()))?;
            let raw_rating: f64 = rating
                .trim()
                .parse()
                .map_err(|_| bad(i + 1, format!("bad rating {rating:?}")))?;
            if !(1.0..=5.0).contains(&raw_rating) {
                return Err(bad(i + 1, format!("rating {raw_rating} outside [1, 5]")));
            }
            table.insert(term, raw_rating)?;
        }
        if table.is_empty() {
            return Err(LexiconError::Empty("concreteness".into()));
        }
        Ok(table)
    }

    fn insert(&mut self, term: &str, raw_rating: f64) -> Result<(), LexiconError> {
        let scaled = Self::scale(raw_rating);
        let words: Vec<String> = term.split_whitespace().map(str::to_lowercase).collect();
        match words.as_slice() {
            [w] => {
                self.unigrams.insert(w.clone(), scaled);
            }
            [a, b] => {
                self.bigrams.insert((a.clone(), b.clone()), scaled);
            }
            _ => {
                return Err(LexiconError::BadLine {
                    name: "concreteness".into(),
                    line: 0,
                    reason: format!("term {term:?} must be one or two words"),
                })
            }
        }
        Ok(())
    }

    /// Maps the 1..=5 rating scale onto `[0, 1]`.
    pub fn scale(raw_rating: f64) -> f64 {
        (raw_rating - 1.0) / 4.0
    }

    pub fn from_raw<S: AsRef<str>>(entries: &[(S, f64)]) -> Self {
        let mut t = Self::default();
        for (term, r) in entries {
            t.insert(term.as_ref(), *r).expect("one- or two-word terms");
        }
        t
    }

    pub fn len(&self) -> usize {
        self.unigrams.len() + self.bigrams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rating(&self, word: &str) -> Option<f64> {
        self.unigrams.get(word).copied()
    }

    /// Left-to-right scan over content-tagged tokens; a rated bigram of two
    /// content tokens is taken before either unigram.
    pub fn stats(&self, tokens: &[TaggedToken]) -> ConcretenessStats {
        let mut s = ConcretenessStats::default();
        let mut i = 0;
        while i < tokens.len() {
            let t = &tokens[i];
            if !t.tag.is_content() {
                i += 1;
                continue;
            }
            s.content_tokens += 1;
            if let Some(next) = tokens.get(i + 1).filter(|n| n.tag.is_content()) {
                let key = (t.token.norm.clone(), next.token.norm.clone());
                if let Some(&r) = self.bigrams.get(&key) {
                    s.content_tokens += 1;
                    s.sum += r;
                    s.covered += 1;
                    i += 2;
                    continue;
                }
            }
            if let Some(r) = self.rating(&t.token.norm) {
                s.sum += r;
                s.covered += 1;
            }
            i += 1;
        }
        s
    }
}

/// Mean rating over covered content tokens, or `None` if nothing is rated.
pub fn mean_concreteness(tokens: &[TaggedToken], table: &ConcretenessTable) -> Option<f64> {
    table.stats(tokens).mean()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{pos_tag, tokenize};

    fn tagged(text: &str) -> Vec<TaggedToken> {
        pos_tag(&tokenize(text))
    }

    #[test]
    fn rating_scale_endpoints() {
        assert_eq!(ConcretenessTable::scale(5.0), 1.0);
        assert_eq!(ConcretenessTable::scale(1.0), 0.0);
        assert_eq!(ConcretenessTable::scale(3.0), 0.5);
    }

    #[test]
    fn no_content_words_is_absent() {
        let t = ConcretenessTable::from_raw(&[("flag", 5.0)]);
        assert_eq!(mean_concreteness(&tagged("i would, you"), &t), None);
    }

    #[test]
    fn mean_of_two_covered_tokens() {
        // 0.2 and 0.8 after scaling
        let t = ConcretenessTable::from_raw(&[("soil", 1.8), ("truck", 4.2)]);
        let m = mean_concreteness(&tagged("the soil and truck"), &t).unwrap();
        assert!((m - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bigrams_before_unigrams() {
        let t = ConcretenessTable::from_raw(&[("palm", 5.0), ("tree", 5.0), ("palm tree", 3.0)]);
        let s = t.stats(&tagged("palm tree"));
        assert_eq!(s.covered, 1);
        assert_eq!(s.mean(), Some(0.5));
    }

    #[test]
    fn parse_rejects_out_of_scale() {
        assert!(ConcretenessTable::parse("flag\t5\nsoil\t4.5\n").is_ok());
        assert!(ConcretenessTable::parse("flag\t6\n").is_err());
        assert!(ConcretenessTable::parse("flag 5\n").is_err());
    }
}
