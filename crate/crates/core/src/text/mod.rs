//! Tokenisation, coarse POS tagging and lexicon resources for chat text.

mod concreteness;
mod lexicon;
mod resources;
mod stance;
mod tagger;
mod tokenize;

pub use concreteness::{mean_concreteness, ConcretenessStats, ConcretenessTable};
pub use lexicon::{lexicon_hits, LexEntry, Lexicon, LexiconError, LexiconHits, Position};
pub use resources::{LexiconLoadError, LexiconSet, LEXICON_FILES};
pub use stance::{detect_stance, Stance};
pub use tagger::{pos_tag, tag_message, PosTag, TaggedToken, Tagger};
pub use tokenize::{contains_url, is_emoticon, is_url, tokenize, Token};

/// Anything carrying a normalised surface form.
pub trait Normed {
    fn norm(&self) -> &str;
}

impl Normed for Token {
    fn norm(&self) -> &str {
        &self.norm
    }
}

impl Normed for TaggedToken {
    fn norm(&self) -> &str {
        &self.token.norm
    }
}

impl Normed for &str {
    fn norm(&self) -> &str {
        self
    }
}

impl Normed for String {
    fn norm(&self) -> &str {
        self
    }
}
