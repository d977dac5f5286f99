//! Deterministic rule tagger over a coarse, Twitter-style tag set.
//!
//! Rules fire in priority order: surface patterns (URL, emoticon,
//! punctuation, numeral), multi-word gazetteer spans, closed-class word
//! lists, single-word gazetteer entries, capitalisation, suffixes, and
//! finally the noun default.

use std::collections::HashMap;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::tokenize::{is_emoticon, is_url, tokenize, Token};
use super::{Lexicon, LexiconSet};
use crate::corpus::ChatMessage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PosTag {
    Noun,
    ProperNoun,
    Verb,
    Adjective,
    Adverb,
    Pronoun,
    Preposition,
    Determiner,
    Conjunction,
    Numeral,
    Interjection,
    Emoticon,
    Url,
    Punctuation,
    Other,
}

impl PosTag {
    pub const ALL: [PosTag; 15] = [
        PosTag::Noun,
        PosTag::ProperNoun,
        PosTag::Verb,
        PosTag::Adjective,
        PosTag::Adverb,
        PosTag::Pronoun,
        PosTag::Preposition,
        PosTag::Determiner,
        PosTag::Conjunction,
        PosTag::Numeral,
        PosTag::Interjection,
        PosTag::Emoticon,
        PosTag::Url,
        PosTag::Punctuation,
        PosTag::Other,
    ];

    /// Single-character tag symbol used in corpus files.
    pub fn symbol(self) -> &'static str {
        match self {
            PosTag::Noun => "N",
            PosTag::ProperNoun => "^",
            PosTag::Verb => "V",
            PosTag::Adjective => "A",
            PosTag::Adverb => "R",
            PosTag::Pronoun => "O",
            PosTag::Preposition => "P",
            PosTag::Determiner => "D",
            PosTag::Conjunction => "&",
            PosTag::Numeral => "$",
            PosTag::Interjection => "!",
            PosTag::Emoticon => "E",
            PosTag::Url => "U",
            PosTag::Punctuation => ",",
            PosTag::Other => "G",
        }
    }

    /// Identifier-safe name, used in feature names and CSV headers.
    pub fn name(self) -> &'static str {
        match self {
            PosTag::Noun => "N",
            PosTag::ProperNoun => "PROPN",
            PosTag::Verb => "V",
            PosTag::Adjective => "A",
            PosTag::Adverb => "R",
            PosTag::Pronoun => "PRON",
            PosTag::Preposition => "P",
            PosTag::Determiner => "D",
            PosTag::Conjunction => "CONJ",
            PosTag::Numeral => "NUM",
            PosTag::Interjection => "INTJ",
            PosTag::Emoticon => "EMO",
            PosTag::Url => "URL",
            PosTag::Punctuation => "PUNCT",
            PosTag::Other => "G",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        PosTag::ALL.into_iter().find(|t| t.symbol() == s)
    }

    /// Nouns, proper nouns, adjectives, adverbs and verbs.
    pub fn is_content(self) -> bool {
        matches!(
            self,
            PosTag::Noun | PosTag::ProperNoun | PosTag::Adjective | PosTag::Adverb | PosTag::Verb
        )
    }

    /// Tokens that count as words (everything except punctuation).
    pub fn is_word(self) -> bool {
        self != PosTag::Punctuation
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedToken {
    pub token: Token,
    pub tag: PosTag,
}

impl TaggedToken {
    pub fn surface(&self) -> &str {
        &self.token.surface
    }
}

const PRONOUNS: &[&str] = &[
    "i", "me", "my", "mine", "myself", "you", "your", "yours", "yourself", "yourselves", "u",
    "ur", "ya", "he", "him", "his", "himself", "she", "her", "hers", "herself", "it", "its",
    "itself", "we", "us", "our", "ours", "ourselves", "they", "them", "their", "theirs",
    "themselves", "who", "whom", "whose", "what", "which", "someone", "somebody", "something",
    "anyone", "anybody", "anything", "everyone", "everybody", "everything", "nothing", "nobody",
    "i'm", "im", "i'd", "i'll", "i've", "you're", "youre", "you'll", "you've", "you'd", "we're",
    "we'll", "we've", "we'd", "they're", "they'll", "they've", "it's", "its'", "that's",
    "thats", "he's", "she's", "what's", "whats", "let's", "lets",
];

const DETERMINERS: &[&str] = &[
    "the", "a", "an", "this", "that", "these", "those", "some", "any", "every", "each", "all",
    "both", "another", "either", "neither", "many", "much", "few", "several", "other", "such",
    "da", "teh",
];

const PREPOSITIONS: &[&str] = &[
    "in", "on", "at", "of", "to", "from", "by", "with", "about", "near", "into", "onto", "over",
    "under", "between", "through", "across", "around", "for", "than", "after", "before",
    "behind", "along", "toward", "towards", "without", "within", "off", "up", "down", "out",
    "per", "via", "since", "during", "against", "among", "beside", "beyond", "upon", "like",
    "inside", "outside", "below", "above", "past", "till", "until", "w/",
];

const CONJUNCTIONS: &[&str] = &[
    "and", "or", "but", "nor", "so", "yet", "because", "if", "although", "though", "while",
    "unless", "whereas", "whether", "cuz", "coz", "bc", "n", "&", "plus", "or.",
];

/// Modals and auxiliaries, plus a handful of frequent lexical verbs.
const VERBS: &[&str] = &[
    "would", "could", "should", "might", "may", "must", "can", "will", "shall", "wont",
    "won't", "can't", "cant", "cannot", "couldn't", "couldnt", "wouldn't", "wouldnt",
    "shouldn't", "shouldnt", "mustn't", "is", "am", "are", "was", "were", "be", "been",
    "being", "do", "does", "did", "don't", "dont", "doesn't", "doesnt", "didn't", "didnt",
    "have", "has", "had", "haven't", "havent", "hasn't", "isn't", "isnt", "aren't", "arent",
    "wasn't", "wasnt", "weren't", "ain't", "think", "thinks", "thought", "know", "knew", "see",
    "saw", "seen", "look", "looks", "go", "goes", "went", "gone", "say", "says", "said", "get",
    "got", "agree", "agreed", "seem", "seems", "mean", "means", "want", "try", "let", "move",
    "put", "click", "submit", "find", "found", "make", "made", "take", "took", "come", "came",
    "believe", "feel", "felt", "sounds", "sound", "works", "work", "drive", "drives", "speak",
    "speaks", "spoke", "use", "uses", "used", "need", "keep", "check", "zoom",
];

const ADVERBS: &[&str] = &[
    "not", "maybe", "probably", "very", "too", "also", "just", "here", "there", "now",
    "then", "really", "perhaps", "quite", "still", "already", "almost", "again", "even",
    "only", "never", "always", "more", "most", "less", "well", "somewhere", "anywhere",
    "everywhere", "where", "when", "why", "how", "pretty", "rather", "soon", "often",
    "sometimes", "kinda", "sorta", "prob", "prolly", "def", "maybe.", "else", "instead",
    "anyway", "though.", "far", "away", "back", "north", "south", "east", "west",
];

const INTERJECTIONS: &[&str] = &[
    "yes", "yeah", "yea", "yep", "yup", "ya.", "no", "nope", "nah", "ok", "okay", "oh", "ah",
    "hmm", "hm", "hmmm", "lol", "haha", "hahaha", "hah", "wow", "hey", "hi", "hello", "um",
    "uh", "umm", "thanks", "thx", "ty", "please", "pls", "omg", "aha", "ooh", "alright", "k",
    "kk", "ugh", "welp", "oops", "cool", "nice", "great", "agreed", "right", "true",
];

const ADJECTIVES: &[&str] = &[
    "big", "small", "large", "little", "old", "new", "green", "red", "blue", "white", "black",
    "yellow", "brown", "grey", "gray", "orange", "pink", "purple", "dry", "wet", "hot", "cold",
    "warm", "flat", "tall", "high", "low", "long", "short", "good", "bad", "wrong", "same",
    "different", "close", "sure", "certain", "likely", "possible", "tropical", "rural",
    "urban", "modern", "ancient", "northern", "southern", "eastern", "western", "central",
    "coastal", "sunny", "snowy", "rainy", "hilly", "rocky", "sandy", "narrow", "wide",
    "european", "asian", "african", "american", "chinese", "japanese", "korean", "indian",
    "russian", "french", "german", "italian", "spanish", "english", "british", "dutch",
    "arabic", "arab", "latin", "mexican", "brazilian", "canadian", "australian", "thai",
    "vietnamese", "greek", "turkish", "polish", "swedish", "norwegian", "finnish", "danish",
    "portuguese", "irish", "scottish", "cyrillic", "mediterranean", "scandinavian",
    "nordic", "balkan", "baltic", "slavic", "caribbean", "pacific", "atlantic",
];

static NUMERAL: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)^[#$€£]?\d+(?:[.,:]\d+)*(?:st|nd|rd|th|s|k|km|m|mi|ft|%)?$|^(?:one|two|three|four|five|six|seven|eight|nine|ten|eleven|twelve|twenty|thirty|fifty|hundred|thousand|million|first|second|third)$")
        .expect("numeral regex")
});

static CLOSED_CLASS: LazyLock<HashMap<&'static str, PosTag>> = LazyLock::new(|| {
    let mut m = HashMap::new();
    // later lists do not override earlier ones
    for (list, tag) in [
        (PRONOUNS, PosTag::Pronoun),
        (DETERMINERS, PosTag::Determiner),
        (PREPOSITIONS, PosTag::Preposition),
        (CONJUNCTIONS, PosTag::Conjunction),
        (VERBS, PosTag::Verb),
        (INTERJECTIONS, PosTag::Interjection),
        (ADVERBS, PosTag::Adverb),
        (ADJECTIVES, PosTag::Adjective),
    ] {
        for w in list {
            m.entry(*w).or_insert(tag);
        }
    }
    m
});

fn pattern_tag(surface: &str) -> Option<PosTag> {
    if is_url(surface) {
        Some(PosTag::Url)
    } else if is_emoticon(surface) {
        Some(PosTag::Emoticon)
    } else if surface.chars().all(|c| !c.is_alphanumeric()) {
        Some(PosTag::Punctuation)
    } else if NUMERAL.is_match(surface) {
        Some(PosTag::Numeral)
    } else {
        None
    }
}

fn suffix_tag(norm: &str) -> Option<PosTag> {
    let len = norm.chars().count();
    let has = |suffix: &str, min_len: usize| norm.ends_with(suffix) && len >= min_len;
    if has("ly", 5) {
        Some(PosTag::Adverb)
    } else if has("ing", 6) || has("ed", 5) {
        Some(PosTag::Verb)
    } else if has("ous", 5) || has("ful", 5) || has("ish", 5) {
        Some(PosTag::Adjective)
    } else {
        None
    }
}

fn starts_upper(s: &str) -> bool {
    s.chars().next().is_some_and(char::is_uppercase)
}

/// Rule tagger bound to a place-name gazetteer.
#[derive(Debug, Clone)]
pub struct Tagger {
    gazetteer: Lexicon,
}

impl Tagger {
    pub fn new(gazetteer: Lexicon) -> Self {
        Self { gazetteer }
    }

    /// Tagger over the shipped gazetteer.
    pub fn builtin() -> &'static Tagger {
        static T: LazyLock<Tagger> =
            LazyLock::new(|| Tagger::new(LexiconSet::builtin().gazetteer.clone()));
        &T
    }

    pub fn tag(&self, tokens: &[Token]) -> Vec<TaggedToken> {
        let mut tags: Vec<Option<PosTag>> = tokens.iter().map(|t| pattern_tag(&t.surface)).collect();

        // multi-word place names win over the closed-class lists
        let hits = self.gazetteer.find(tokens);
        for &(start, len) in &hits.spans {
            if len > 1 && tags[start..start + len].iter().all(Option::is_none) {
                tags[start..start + len].fill(Some(PosTag::ProperNoun));
            }
        }

        for (i, t) in tokens.iter().enumerate() {
            if tags[i].is_some() {
                continue;
            }
            let norm = t.norm.as_str();
            tags[i] = Some(if let Some(&tag) = CLOSED_CLASS.get(norm) {
                tag
            } else if self.gazetteer.contains_word(norm) {
                PosTag::ProperNoun
            } else if i > 0
                && starts_upper(&t.surface)
                && !tokens[i - 1].surface.ends_with(['.', '!', '?'])
            {
                PosTag::ProperNoun
            } else if let Some(tag) = suffix_tag(norm) {
                tag
            } else {
                PosTag::Noun
            });
        }

        tokens
            .iter()
            .zip(tags)
            .map(|(t, tag)| TaggedToken {
                token: t.clone(),
                tag: tag.expect("every token tagged"),
            })
            .collect()
    }

    /// Tokenises and tags a message, preferring gold tags when they line up
    /// with the tokens.
    pub fn tag_message(&self, message: &ChatMessage) -> Vec<TaggedToken> {
        let tokens = tokenize(&message.text);
        match &message.tags {
            Some(gold) if gold.len() == tokens.len() => tokens
                .into_iter()
                .zip(gold)
                .map(|(token, &tag)| TaggedToken { token, tag })
                .collect(),
            _ => self.tag(&tokens),
        }
    }
}

/// Tags with the shipped gazetteer.
pub fn pos_tag(tokens: &[Token]) -> Vec<TaggedToken> {
    Tagger::builtin().tag(tokens)
}

pub fn tag_message(message: &ChatMessage) -> Vec<TaggedToken> {
    Tagger::builtin().tag_message(message)
}
