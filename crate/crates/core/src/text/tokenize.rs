use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    /// Lowercased surface.
    pub norm: String,
}

impl Token {
    pub fn new(surface: &str) -> Self {
        Self {
            surface: surface.to_string(),
            norm: surface.to_lowercase(),
        }
    }
}

const TLDS: &str = "com|org|net|edu|gov|info|io|co|uk|de|fr|ru|cn|jp|br|au|ca|it|es|nl|me|ly|tv";

static URL_FULL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(
        r"(?i)^(?:(?:https?|ftp)://\S+|www\.\S+|[a-z0-9][a-z0-9-]*(?:\.[a-z0-9-]+)*\.(?:{TLDS})(?:/\S*)?)$"
    ))
    .expect("url regex")
});

static URL_ANYWHERE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(
        r"(?i)(?:(?:https?|ftp)://\S+|\bwww\.\S+|\b[a-z0-9][a-z0-9-]*(?:\.[a-z0-9-]+)*\.(?:{TLDS})\b)"
    ))
    .expect("url regex")
});

const EMOTICONS: &[&str] = &[
    ":)", ":-)", ":(", ":-(", ";)", ";-)", ":d", ":-d", ":p", ":-p", ":o", ":-o", ":/", ":-/",
    ":|", ":'(", ":3", "=)", "=(", "=d", "<3", "</3", "xd", "^^", "^_^", "-_-", "o_o", "d:",
    ":]", ":[", ":*", ";p", ":))", ":((",
];

pub fn is_url(s: &str) -> bool {
    URL_FULL.is_match(s)
}

/// True when the text contains anything that looks like a link.
pub fn contains_url(text: &str) -> bool {
    URL_ANYWHERE.is_match(text)
}

pub fn is_emoticon(s: &str) -> bool {
    let lower = s.to_lowercase();
    EMOTICONS.contains(&lower.as_str())
}

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric()
}

/// Whitespace tokenizer that splits off leading and trailing punctuation
/// runs while keeping URLs, emoticons and contractions whole.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        if is_url(chunk) || is_emoticon(chunk) {
            out.push(Token::new(chunk));
            continue;
        }
        let Some(core_start) = chunk.find(|c: char| !is_punct(c)) else {
            out.push(Token::new(chunk));
            continue;
        };
        let core_end = chunk
            .rfind(|c: char| !is_punct(c))
            .map(|i| i + chunk[i..].chars().next().map_or(1, char::len_utf8))
            .unwrap_or(chunk.len());
        if core_start > 0 {
            out.push(Token::new(&chunk[..core_start]));
        }
        out.push(Token::new(&chunk[core_start..core_end]));
        if core_end < chunk.len() {
            out.push(Token::new(&chunk[core_end..]));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn surfaces(text: &str) -> Vec<String> {
        tokenize(text).into_iter().map(|t| t.surface).collect()
    }

    #[test]
    fn contraction_and_trailing_bang() {
        assert_eq!(surfaces("i think it's china!"), ["i", "think", "it's", "china", "!"]);
    }

    #[test]
    fn urls_stay_whole() {
        assert_eq!(surfaces("http://a.b c"), ["http://a.b", "c"]);
        assert_eq!(surfaces("see www.example.org/x?y=1"), ["see", "www.example.org/x?y=1"]);
    }

    #[test]
    fn emoticons_stay_whole() {
        assert_eq!(surfaces(":) yes"), [":)", "yes"]);
        assert_eq!(surfaces("XD"), ["XD"]);
    }

    #[test]
    fn punctuation_runs() {
        assert_eq!(surfaces("(really?!)"), ["(", "really", "?!)"]);
        assert_eq!(surfaces("..."), ["..."]);
        assert_eq!(surfaces("sure, shanghai"), ["sure", ",", "shanghai"]);
        assert!(tokenize("   ").is_empty());
    }

    #[test]
    fn norm_is_lowercase() {
        let t = tokenize("Shanghai");
        assert_eq!(t[0].norm, "shanghai");
        assert_eq!(t[0].surface, "Shanghai");
    }

    #[test]
    fn url_detection_in_running_text() {
        assert!(contains_url("check http://maps.example.com now"));
        assert!(contains_url("try google.com"));
        assert!(!contains_url("i think it's china. maybe"));
        assert!(!contains_url("e.g. the flag"));
    }

    proptest! {
        #[test]
        fn surfaces_reconstruct_non_whitespace(text in "[a-zA-Z0-9 ,.!?'():;-]{0,60}|\\PC{0,40}") {
            let joined: String = tokenize(&text).into_iter().map(|t| t.surface).collect();
            let stripped: String = text.chars().filter(|c| !c.is_whitespace()).collect();
            prop_assert_eq!(joined, stripped);
        }

        #[test]
        fn tokenization_is_deterministic(text in "\\PC{0,40}") {
            prop_assert_eq!(tokenize(&text), tokenize(&text));
        }
    }
}
