use std::collections::BTreeMap;
use std::path::Path;
use std::sync::LazyLock;

use sha2::{Digest, Sha256};

use super::{ConcretenessTable, LexEntry, Lexicon, LexiconError, Tagger};

/// Resource files, in checksum order.
pub const LEXICON_FILES: &[&str] = &[
    "hedges.txt",
    "certainty.txt",
    "agree.txt",
    "disagree.txt",
    "pron_1sg.txt",
    "pron_1pl.txt",
    "pron_2.txt",
    "gazetteer.txt",
    "geo_terms.txt",
    "interface.txt",
    "stopwords.txt",
    "concreteness.tsv",
];

fn builtin_source(file: &str) -> &'static str {
    match file {
        "hedges.txt" => include_str!("../../lexicons/hedges.txt"),
        "certainty.txt" => include_str!("../../lexicons/certainty.txt"),
        "agree.txt" => include_str!("../../lexicons/agree.txt"),
        "disagree.txt" => include_str!("../../lexicons/disagree.txt"),
        "pron_1sg.txt" => include_str!("../../lexicons/pron_1sg.txt"),
        "pron_1pl.txt" => include_str!("../../lexicons/pron_1pl.txt"),
        "pron_2.txt" => include_str!("../../lexicons/pron_2.txt"),
        "gazetteer.txt" => include_str!("../../lexicons/gazetteer.txt"),
        "geo_terms.txt" => include_str!("../../lexicons/geo_terms.txt"),
        "interface.txt" => include_str!("../../lexicons/interface.txt"),
        "stopwords.txt" => include_str!("../../lexicons/stopwords.txt"),
        "concreteness.tsv" => include_str!("../../lexicons/concreteness.tsv"),
        other => panic!("unknown lexicon file {other}"),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LexiconLoadError {
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] LexiconError),
}

/// Every lexical resource the feature extractors use, with a checksum per
/// source file.
#[derive(Debug, Clone)]
pub struct LexiconSet {
    pub hedges: Lexicon,
    pub certainty: Lexicon,
    pub agree: Lexicon,
    pub disagree: Lexicon,
    pub pron_1sg: Lexicon,
    pub pron_1pl: Lexicon,
    pub pron_2: Lexicon,
    pub gazetteer: Lexicon,
    pub geo_terms: Lexicon,
    /// Gazetteer and geography terms together.
    pub geo: Lexicon,
    pub interface: Lexicon,
    pub stopwords: Lexicon,
    pub concreteness: ConcretenessTable,
    /// File name -> hex SHA-256 of its contents.
    pub checksums: BTreeMap<String, String>,
}

impl LexiconSet {
    /// The shipped resources.
    pub fn builtin() -> &'static LexiconSet {
        static SET: LazyLock<LexiconSet> = LazyLock::new(|| {
            let sources = LEXICON_FILES
                .iter()
                .map(|f| (f.to_string(), builtin_source(f).to_string()))
                .collect();
            LexiconSet::from_sources(&sources).expect("shipped lexicons parse")
        });
        &SET
    }

    /// Loads resources from `dir`; files it lacks fall back to the shipped
    /// versions.
    pub fn load_dir(dir: &Path) -> Result<LexiconSet, LexiconLoadError> {
        let mut sources = BTreeMap::new();
        for f in LEXICON_FILES {
            let path = dir.join(f);
            let text = if path.exists() {
                std::fs::read_to_string(&path).map_err(|source| LexiconLoadError::Io {
                    path: path.display().to_string(),
                    source,
                })?
            } else {
                builtin_source(f).to_string()
            };
            sources.insert(f.to_string(), text);
        }
        LexiconSet::from_sources(&sources)
    }

    pub fn from_sources(sources: &BTreeMap<String, String>) -> Result<LexiconSet, LexiconLoadError> {
        let text = |f: &str| sources.get(f).map_or_else(|| builtin_source(f), String::as_str);
        let lex = |f: &str| Lexicon::parse(f.trim_end_matches(".txt"), text(f));
        let gazetteer = lex("gazetteer.txt")?;
        let geo_terms = lex("geo_terms.txt")?;
        let geo_entries: Vec<LexEntry> = gazetteer
            .entries()
            .iter()
            .chain(geo_terms.entries())
            .cloned()
            .collect();
        let checksums = LEXICON_FILES
            .iter()
            .map(|f| (f.to_string(), hex::encode(Sha256::digest(text(f).as_bytes()))))
            .collect();
        Ok(LexiconSet {
            hedges: lex("hedges.txt")?,
            certainty: lex("certainty.txt")?,
            agree: lex("agree.txt")?,
            disagree: lex("disagree.txt")?,
            pron_1sg: lex("pron_1sg.txt")?,
            pron_1pl: lex("pron_1pl.txt")?,
            pron_2: lex("pron_2.txt")?,
            geo: Lexicon::new("geo", geo_entries)?,
            gazetteer,
            geo_terms,
            interface: lex("interface.txt")?,
            stopwords: lex("stopwords.txt")?,
            concreteness: ConcretenessTable::parse(text("concreteness.tsv"))?,
            checksums,
        })
    }

    /// Combined checksum over all resource files.
    pub fn checksum(&self) -> String {
        let mut h = Sha256::new();
        for (file, sum) in &self.checksums {
            h.update(file.as_bytes());
            h.update(b":");
            h.update(sum.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }

    pub fn tagger(&self) -> Tagger {
        Tagger::new(self.gazetteer.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_set_loads_with_expected_sizes() {
        let lx = LexiconSet::builtin();
        assert!(lx.hedges.len() >= 40, "hedges {}", lx.hedges.len());
        assert!(lx.certainty.len() >= 25);
        assert!(lx.gazetteer.len() + lx.geo_terms.len() >= 1000);
        assert!(lx.stopwords.contains_word("the"));
        assert!(lx.interface.contains_word("marker"));
        assert!(lx.geo.contains_word("china"));
        assert!(lx.geo.contains_word("mountains"));
        assert_eq!(lx.checksums.len(), LEXICON_FILES.len());
        assert_eq!(lx.checksum().len(), 64);
    }

    #[test]
    fn directory_overrides_change_checksum() {
        let dir = std::env::temp_dir().join(format!("teamtalk-lex-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("hedges.txt"), "perchance\n").unwrap();
        let lx = LexiconSet::load_dir(&dir).unwrap();
        assert_eq!(lx.hedges.len(), 1);
        assert_ne!(lx.checksum(), LexiconSet::builtin().checksum());
        assert_eq!(lx.checksums["agree.txt"], LexiconSet::builtin().checksums["agree.txt"]);
        std::fs::remove_dir_all(&dir).ok();
    }
}
