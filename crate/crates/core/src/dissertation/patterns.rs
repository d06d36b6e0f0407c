//! Heading and table-label regular expressions.
//!
//! Each pattern list lives in its own text file, one regex per line, with
//! blank lines and `#` comments ignored. The defaults ship in the crate's
//! `patterns/` directory; a user directory overrides any subset of files.

use std::fs;
use std::path::Path;

use regex::Regex;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocLang {
    Sr,
    En,
}

impl DocLang {
    pub fn other(self) -> DocLang {
        match self {
            DocLang::Sr => DocLang::En,
            DocLang::En => DocLang::Sr,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DocLang::Sr => "sr",
            DocLang::En => "en",
        }
    }
}

/// A non-empty list of alternative regexes.
#[derive(Debug, Clone)]
pub struct PatternList(Vec<Regex>);

impl PatternList {
    pub fn parse(text: &str) -> Result<Self> {
        let mut v = Vec::new();
        for line in text.lines() {
            let line = line.trim_end_matches(['\r', '\n']);
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let re = Regex::new(line).map_err(|source| Error::Pattern {
                pattern: line.to_string(),
                source,
            })?;
            v.push(re);
        }
        if v.is_empty() {
            return Err(Error::Config("pattern list is empty".into()));
        }
        Ok(PatternList(v))
    }

    /// Earliest match starting at or after `from`, as a byte range.
    pub fn find_from(&self, text: &str, from: usize) -> Option<(usize, usize)> {
        self.0
            .iter()
            .filter_map(|re| re.find_at(text, from))
            .map(|m| (m.start(), m.end()))
            .min()
    }

    pub fn is_match(&self, text: &str) -> bool {
        self.0.iter().any(|re| re.is_match(text))
    }
}

#[derive(Debug, Clone)]
pub struct LangPatterns {
    pub abstract_heading: PatternList,
    pub keywords_heading: PatternList,
    pub field_heading: PatternList,
    pub table_anchor: PatternList,
    pub table_abstract: PatternList,
    pub table_keywords: PatternList,
    pub table_field: PatternList,
}

#[derive(Debug, Clone)]
pub struct SectionPatterns {
    pub sr: LangPatterns,
    pub en: LangPatterns,
    /// Generic key word documentation row label; ends the previous row.
    pub table_row: PatternList,
}

macro_rules! default_file {
    ($name:literal) => {
        ($name, include_str!(concat!("../../patterns/", $name)))
    };
}

const DEFAULTS: &[(&str, &str)] = &[
    default_file!("abstract.sr.txt"),
    default_file!("abstract.en.txt"),
    default_file!("keywords.sr.txt"),
    default_file!("keywords.en.txt"),
    default_file!("field.sr.txt"),
    default_file!("field.en.txt"),
    default_file!("table_anchor.sr.txt"),
    default_file!("table_anchor.en.txt"),
    default_file!("table_abstract.sr.txt"),
    default_file!("table_abstract.en.txt"),
    default_file!("table_keywords.sr.txt"),
    default_file!("table_keywords.en.txt"),
    default_file!("table_field.sr.txt"),
    default_file!("table_field.en.txt"),
    default_file!("table_row.txt"),
];

/// File names understood by [`SectionPatterns::load_dir`].
pub fn pattern_file_names() -> impl Iterator<Item = &'static str> {
    DEFAULTS.iter().map(|(n, _)| *n)
}

impl Default for SectionPatterns {
    fn default() -> Self {
        Self::build(|name| Ok(default_text(name).to_string())).expect("default patterns are valid")
    }
}

fn default_text(name: &str) -> &'static str {
    DEFAULTS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .expect("known pattern file")
}

impl SectionPatterns {
    fn build(mut read: impl FnMut(&str) -> Result<String>) -> Result<Self> {
        let mut list = |name: &str| -> Result<PatternList> {
            let text = read(name)?;
            PatternList::parse(&text).map_err(|e| Error::Config(format!("{name}: {e}")))
        };
        let mut lang = |l: &str| -> Result<LangPatterns> {
            Ok(LangPatterns {
                abstract_heading: list(&format!("abstract.{l}.txt"))?,
                keywords_heading: list(&format!("keywords.{l}.txt"))?,
                field_heading: list(&format!("field.{l}.txt"))?,
                table_anchor: list(&format!("table_anchor.{l}.txt"))?,
                table_abstract: list(&format!("table_abstract.{l}.txt"))?,
                table_keywords: list(&format!("table_keywords.{l}.txt"))?,
                table_field: list(&format!("table_field.{l}.txt"))?,
            })
        };
        let sr = lang("sr")?;
        let en = lang("en")?;
        drop(lang);
        Ok(SectionPatterns {
            sr,
            en,
            table_row: list("table_row.txt")?,
        })
    }

    /// Load pattern files from `dir`; files that are absent fall back to
    /// the built-in defaults.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        if !dir.is_dir() {
            return Err(Error::io(
                dir,
                std::io::Error::new(std::io::ErrorKind::NotFound, "pattern directory not found"),
            ));
        }
        Self::build(|name| {
            let p = dir.join(name);
            if p.exists() {
                fs::read_to_string(&p).map_err(|e| Error::io(&p, e))
            } else {
                Ok(default_text(name).to_string())
            }
        })
    }

    /// Write the built-in pattern files into `dir`.
    pub fn write_defaults(dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, text) in DEFAULTS {
            let p = dir.join(name);
            fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
        }
        Ok(())
    }

    pub fn lang(&self, l: DocLang) -> &LangPatterns {
        match l {
            DocLang::Sr => &self.sr,
            DocLang::En => &self.en,
        }
    }

    /// Table layout if any key word documentation anchor matches.
    pub fn is_table_layout(&self, text: &str) -> bool {
        self.sr.table_anchor.is_match(text) || self.en.table_anchor.is_match(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_compile_and_match() {
        let p = SectionPatterns::default();
        assert!(p.sr.abstract_heading.is_match("Uvod\nSAŽETAK\ntekst"));
        assert!(p.sr.abstract_heading.is_match("  Rezime: tekst"));
        assert!(!p.sr.abstract_heading.is_match("Ovo je rezime rada"));
        assert!(p.en.keywords_heading.is_match("Key words: a, b"));
        assert!(p.sr.keywords_heading.is_match("Ključne riječi: a"));
        assert!(p.sr.field_heading.is_match("Naučna oblast: Biologija"));
        assert!(p.sr.table_field.is_match("Naučna oblast, NO: Biologija"));
        assert!(p.en.table_keywords.is_match("Subject/Key words, S/KW: a"));
        assert!(p.table_row.is_match("Naučna disciplina, ND: x"));
        assert!(p.table_row.is_match("Accepted by the Scientific Board on, ASB: x"));
        assert!(!p.table_row.is_match("In this work, we show: x"));
        assert!(p.is_table_layout("KLJUČNA DOKUMENTACIJSKA INFORMACIJA"));
        assert!(p.is_table_layout("KEY WORDS DOCUMENTATION"));
        assert!(!p.is_table_layout("Rezime\nKey words: x"));
    }

    #[test]
    fn earliest_match_wins() {
        let l = PatternList::parse("b\n# c\n\na\n").unwrap();
        assert_eq!(l.find_from("xxab", 0), Some((2, 3)));
        assert_eq!(l.find_from("xxab", 3), Some((3, 4)));
        assert_eq!(l.find_from("xxab", 4), None);
    }

    #[test]
    fn bad_or_empty_lists() {
        assert!(PatternList::parse("# only a comment\n").is_err());
        assert!(matches!(PatternList::parse("(unclosed").unwrap_err(), Error::Pattern { .. }));
    }

    #[test]
    fn directory_overrides_subset() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("abstract.en.txt"), "(?m)^RESUMEN").unwrap();
        let p = SectionPatterns::load_dir(dir.path()).unwrap();
        assert!(p.en.abstract_heading.is_match("RESUMEN"));
        assert!(!p.en.abstract_heading.is_match("Abstract"));
        assert!(p.sr.abstract_heading.is_match("Rezime"));
        assert!(SectionPatterns::load_dir(dir.path().join("missing")).is_err());

        let out = tempfile::tempdir().unwrap();
        SectionPatterns::write_defaults(out.path()).unwrap();
        assert_eq!(fs::read_dir(out.path()).unwrap().count(), pattern_file_names().count());
    }
}
