use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::conversation::{FeatureMap, TaggedMessage};

/// Padding symbol marking the start and end of a message.
pub const BOUNDARY: &str = "BND";

/// POS n-gram counts of one game, for orders `1..=max_order`. Keys are
/// feature names such as `pos.PROPN_PUNCT`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PosCounts {
    pub max_order: usize,
    pub counts: BTreeMap<String, (usize, usize)>,
}

impl PosCounts {
    /// Total count over n-grams of order at most `n`.
    pub fn total(&self, n: usize) -> usize {
        self.counts
            .values()
            .filter(|(order, _)| *order <= n)
            .map(|(_, c)| c)
            .sum()
    }

    pub fn keys(&self, n: usize) -> impl Iterator<Item = &str> {
        self.counts
            .iter()
            .filter(move |(_, (order, _))| *order <= n)
            .map(|(k, _)| k.as_str())
    }

    pub fn count(&self, key: &str) -> usize {
        self.counts.get(key).map_or(0, |(_, c)| *c)
    }
}

pub fn pos_ngram_counts(messages: &[TaggedMessage], max_order: usize) -> PosCounts {
    let mut counts: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for m in messages {
        let mut seq = vec![BOUNDARY];
        seq.extend(m.tokens.iter().map(|t| t.tag.name()));
        seq.push(BOUNDARY);
        for order in 1..=max_order {
            for w in seq.windows(order) {
                if w.iter().all(|s| *s == BOUNDARY) {
                    continue;
                }
                let key = format!("pos.{}", w.join("_"));
                counts.entry(key).or_insert((order, 0)).1 += 1;
            }
        }
    }
    PosCounts { max_order, counts }
}

/// N-grams kept for modelling: those of order at most `n` occurring in at
/// least `min_df` training games.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PosVocabulary {
    pub n: usize,
    pub min_df: usize,
    pub ngrams: Vec<String>,
}

impl PosVocabulary {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn fit<'a>(games: impl IntoIterator<Item = &'a PosCounts>, n: usize, min_df: usize) -> Self {
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for g in games {
            assert!(g.max_order >= n, "counts of order {} cannot fit n = {n}", g.max_order);
            for k in g.keys(n) {
                *df.entry(k).or_default() += 1;
            }
        }
        let ngrams = df
            .into_iter()
            .filter(|(_, d)| *d >= min_df)
            .map(|(k, _)| k.to_string())
            .collect();
        Self { n, min_df, ngrams }
    }

    pub fn len(&self) -> usize {
        self.ngrams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ngrams.is_empty()
    }

    /// Relative frequencies of the vocabulary n-grams in one game. Unseen
    /// n-grams are ignored.
    pub fn transform(&self, counts: &PosCounts) -> FeatureMap {
        let mut f = FeatureMap::new();
        let total = counts.total(self.n);
        for k in &self.ngrams {
            let c = counts.count(k);
            f.put(k.clone(), if total == 0 { 0.0 } else { c as f64 / total as f64 });
        }
        f
    }

    pub fn names(&self) -> BTreeSet<&str> {
        self.ngrams.iter().map(String::as_str).collect()
    }
}
