use serde::Serialize;

use super::{Lexicon, Normed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stance {
    Agree,
    Disagree,
    None,
}

/// Keyword stance of one message. Agreement entries are checked first, so
/// a message matching both lists counts as agreement.
pub fn detect_stance<T: Normed>(tokens: &[T], agree: &Lexicon, disagree: &Lexicon) -> Stance {
    if agree.find(tokens).count > 0 {
        Stance::Agree
    } else if disagree.find(tokens).count > 0 {
        Stance::Disagree
    } else {
        Stance::None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{tokenize, LexiconSet};

    fn stance(text: &str) -> Stance {
        let lx = LexiconSet::builtin();
        detect_stance(&tokenize(text), &lx.agree, &lx.disagree)
    }

    #[test]
    fn initial_sure_agrees() {
        assert_eq!(stance("sure, shanghai"), Stance::Agree);
        assert_eq!(stance("Sure"), Stance::Agree);
    }

    #[test]
    fn sure_elsewhere_is_neutral() {
        assert_eq!(stance("are you sure"), Stance::None);
    }

    #[test]
    fn disagreement_phrases() {
        assert_eq!(stance("no way"), Stance::Disagree);
        assert_eq!(stance("i disagree, it's peru"), Stance::Disagree);
        assert_eq!(stance("i don't think so"), Stance::Disagree);
    }

    #[test]
    fn agreement_checked_first() {
        assert_eq!(stance("yes i agree"), Stance::Agree);
        assert_eq!(stance("no, i agree"), Stance::Agree);
        assert_eq!(stance("the buildings"), Stance::None);
    }
}
