//! Serbian vs. Croatian document classification.
//!
//! Two signals are combined: counts of lexical marker doublets (`tko`/`ko`,
//! `uvjet`/`uslov`, ...) and the ratio of the substring `je` to the letter
//! `e`, which is high in Ijekavian text. Croatian markers plus one
//! Ijekavian vote (when the ratio exceeds the threshold) are weighed against
//! Serbian markers; ties go to the configured side.
//!
//! The default ratio threshold of 0.16 is a heuristic starting point. Ekavian
//! text still contains the copula `je`, so the threshold should be
//! calibrated on labelled samples for each deployment.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::token::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Serbian,
    Croatian,
}

/// Marker doublets as (croatian form, serbian form).
#[derive(Debug, Clone)]
pub struct MarkerLexicon {
    pairs: Vec<(String, String)>,
    lookup: HashMap<String, Side>,
}

impl Default for MarkerLexicon {
    fn default() -> Self {
        Self::new([("tko", "ko"), ("što", "šta"), ("uvjet", "uslov"), ("uopće", "uopšte")])
            .expect("default lexicon is valid")
    }
}

impl MarkerLexicon {
    pub fn new<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let mut lex = MarkerLexicon {
            pairs: Vec::new(),
            lookup: HashMap::new(),
        };
        for (hr, sr) in pairs {
            lex.add(hr.into(), sr.into())?;
        }
        Ok(lex)
    }

    fn add(&mut self, hr: String, sr: String) -> Result<()> {
        for form in [&hr, &sr] {
            let t = tokenize(form);
            if t.len() != 1 || &t[0] != form {
                return Err(Error::Config(format!(
                    "marker {form:?} is not a single lowercase token"
                )));
            }
        }
        if hr == sr {
            return Err(Error::Config(format!("marker pair {hr:?}/{sr:?} is not distinct")));
        }
        for (form, side) in [(&hr, Side::Croatian), (&sr, Side::Serbian)] {
            match self.lookup.get(form) {
                Some(s) if *s != side => {
                    return Err(Error::Config(format!(
                        "marker {form:?} listed for both variants"
                    )))
                }
                _ => {
                    self.lookup.insert(form.clone(), side);
                }
            }
        }
        self.pairs.push((hr, sr));
        Ok(())
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    /// Parse a two-column TSV (`hr_form<TAB>sr_form`). Blank lines, `#`
    /// comments and a `hr_form	sr_form` header are ignored.
    pub fn parse_tsv(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            if cols.len() != 2 {
                return Err(Error::Config(format!(
                    "markers line {}: expected 2 tab-separated columns",
                    i + 1
                )));
            }
            if i == 0 && cols == ["hr_form", "sr_form"] {
                continue;
            }
            pairs.push((cols[0].to_lowercase(), cols[1].to_lowercase()));
        }
        if pairs.is_empty() {
            return Err(Error::Config("marker lexicon is empty".into()));
        }
        Self::new(pairs)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_tsv(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TieBreak {
    #[default]
    Serbian,
    Croatian,
    Unknown,
}

impl FromStr for TieBreak {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "serbian" => Ok(TieBreak::Serbian),
            "croatian" => Ok(TieBreak::Croatian),
            "unknown" => Ok(TieBreak::Unknown),
            o => Err(format!("unknown tie break {o:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub je_ratio_threshold: f64,
    pub je_vote_weight: u32,
    pub tie_break: TieBreak,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            je_ratio_threshold: 0.16,
            je_vote_weight: 1,
            tie_break: TieBreak::Serbian,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.je_ratio_threshold) {
            return Err(Error::Config(format!(
                "je ratio threshold {} outside [0, 1]",
                self.je_ratio_threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    Serbian,
    Croatian,
    /// Only produced by [`TieBreak::Unknown`].
    Unknown,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Serbian => "Serbian",
            Variant::Croatian => "Croatian",
            Variant::Unknown => "Unknown",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariantVerdict {
    pub label: Variant,
    pub sr_votes: u64,
    pub hr_votes: u64,
    pub je_ratio: f64,
}

/// Occurrences of Serbian and Croatian marker forms, as `(sr, hr)`.
pub fn marker_votes<'a>(
    tokens: impl IntoIterator<Item = &'a String>,
    lexicon: &MarkerLexicon,
) -> (u64, u64) {
    let (mut sr, mut hr) = (0, 0);
    for t in tokens {
        match lexicon.lookup.get(t.as_str()) {
            Some(Side::Serbian) => sr += 1,
            Some(Side::Croatian) => hr += 1,
            None => {}
        }
    }
    (sr, hr)
}

/// Count of `je` over count of `e` in the lowercased text; 0 without any `e`.
pub fn je_ratio(text: &str) -> f64 {
    let (mut je, mut e) = (0u64, 0u64);
    let mut prev_j = false;
    for c in text.chars() {
        // only 'E' lowercases to 'e' and only 'J' to 'j'
        let c = c.to_ascii_lowercase();
        if c == 'e' {
            e += 1;
            if prev_j {
                je += 1;
            }
        }
        prev_j = c == 'j';
    }
    if e == 0 {
        0.0
    } else {
        je as f64 / e as f64
    }
}

pub fn classify_text(text: &str, lexicon: &MarkerLexicon, config: &ClassifierConfig) -> VariantVerdict {
    let tokens = tokenize(text);
    let (sr_votes, hr_votes) = marker_votes(&tokens, lexicon);
    let ratio = je_ratio(text);
    let ijekavian = if ratio > config.je_ratio_threshold {
        config.je_vote_weight as u64
    } else {
        0
    };
    let hr_total = hr_votes + ijekavian;
    let label = match hr_total.cmp(&sr_votes) {
        std::cmp::Ordering::Greater => Variant::Croatian,
        std::cmp::Ordering::Less => Variant::Serbian,
        std::cmp::Ordering::Equal => match config.tie_break {
            TieBreak::Serbian => Variant::Serbian,
            TieBreak::Croatian => Variant::Croatian,
            TieBreak::Unknown => Variant::Unknown,
        },
    };
    VariantVerdict {
        label,
        sr_votes,
        hr_votes,
        je_ratio: ratio,
    }
}

pub fn classify(doc: &Document, lexicon: &MarkerLexicon, config: &ClassifierConfig) -> VariantVerdict {
    classify_text(&doc.text, lexicon, config)
}

/// Classify a batch in parallel; output order matches input order.
pub fn classify_batch(
    docs: &[Document],
    lexicon: &MarkerLexicon,
    config: &ClassifierConfig,
) -> Vec<VariantVerdict> {
    docs.par_iter().map(|d| classify(d, lexicon, config)).collect()
}

/// Which half of the split a document lands in. `Unknown` verdicts go to the
/// non-Serbian half, since the split isolates Serbian text.
pub fn is_serbian(v: &VariantVerdict) -> bool {
    v.label == Variant::Serbian
}

const BATCH: usize = 1024;

/// Stream `docs` through the classifier in order-preserving parallel batches,
/// calling `sink` with each document and its verdict in input order.
pub fn classify_stream<I, F>(docs: I, lexicon: &MarkerLexicon, config: &ClassifierConfig, mut sink: F) -> Result<()>
where
    I: IntoIterator<Item = Result<Document>>,
    F: FnMut(Document, VariantVerdict) -> Result<()>,
{
    config.validate()?;
    let mut batch = Vec::with_capacity(BATCH);
    let mut flush = |batch: &mut Vec<Document>| -> Result<()> {
        let verdicts = classify_batch(batch, lexicon, config);
        for (d, v) in batch.drain(..).zip(verdicts) {
            sink(d, v)?;
        }
        Ok(())
    };
    for doc in docs {
        batch.push(doc?);
        if batch.len() == BATCH {
            flush(&mut batch)?;
        }
    }
    flush(&mut batch)
}

/// Partition documents into (Serbian, non-Serbian), preserving order in each.
pub fn split_corpus(
    docs: Vec<Document>,
    lexicon: &MarkerLexicon,
    config: &ClassifierConfig,
) -> Result<(Vec<Document>, Vec<Document>)> {
    let (mut sr, mut hr) = (Vec::new(), Vec::new());
    classify_stream(docs.into_iter().map(Ok), lexicon, config, |d, v| {
        if is_serbian(&v) {
            sr.push(d);
        } else {
            hr.push(d);
        }
        Ok(())
    })?;
    Ok((sr, hr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::token::tokenize;

    fn votes(text: &str) -> (u64, u64) {
        marker_votes(&tokenize(text), &MarkerLexicon::default())
    }

    #[test]
    fn marker_counts() {
        assert_eq!(votes("ko uslov ko"), (3, 0));
        assert_eq!(votes("tko uvjet"), (0, 2));
        assert_eq!(votes("ko tko što šta"), (2, 2));
        assert_eq!(votes("Uopšte, KO?"), (2, 0));
    }

    #[test]
    fn je_ratio_cases() {
        assert_eq!(je_ratio("eee"), 0.0);
        assert_eq!(je_ratio("je"), 1.0);
        assert_eq!(je_ratio("dijete sedi"), 1.0 / 3.0);
        assert_eq!(je_ratio("xyz"), 0.0);
        assert_eq!(je_ratio("JE Je"), 1.0);
    }

    #[test]
    fn decision_rule() {
        let lex = MarkerLexicon::default();
        let cfg = ClassifierConfig::default();
        assert_eq!(classify_text("ko je to uradio, šta i kako", &lex, &cfg).label, Variant::Serbian);
        assert_eq!(classify_text("tko to radi i uvjet", &lex, &cfg).label, Variant::Croatian);
        // no markers; je/e = 3/10 = 0.30
        let v = classify_text("dijete mlijeko vrijeme sede mene te", &lex, &cfg);
        assert_eq!((v.sr_votes, v.hr_votes), (0, 0));
        assert!((v.je_ratio - 0.3).abs() < 1e-12, "{}", v.je_ratio);
        assert_eq!(v.label, Variant::Croatian);
        // no evidence at all
        assert_eq!(classify_text("mama tata", &lex, &cfg).label, Variant::Serbian);
        let unk = ClassifierConfig { tie_break: TieBreak::Unknown, ..cfg };
        assert_eq!(classify_text("mama tata", &lex, &unk).label, Variant::Unknown);
    }

    #[test]
    fn lexicon_tsv() {
        let lex = MarkerLexicon::parse_tsv("hr_form\tsr_form\n# comment\ntko\tko\n\ntjedan\tnedelja\n").unwrap();
        assert_eq!(lex.pairs().len(), 2);
        assert!(MarkerLexicon::parse_tsv("tko ko\n").is_err());
        assert!(MarkerLexicon::parse_tsv("tko\ttko\n").is_err());
        assert!(MarkerLexicon::parse_tsv("tko\tko\nko\ttko\n").is_err());
        assert!(MarkerLexicon::parse_tsv("two words\tko\n").is_err());
        assert!(MarkerLexicon::parse_tsv("").is_err());
    }

    #[test]
    fn split_preserves_order() {
        let lex = MarkerLexicon::default();
        let cfg = ClassifierConfig::default();
        let texts = [
            "ko to zna", "tko to zna", "uslov je jasan", "uvjet", "šta", "što tko", "mama", "uopće",
            "uopšte", "ko ko",
        ];
        let docs: Vec<_> = texts.iter().enumerate().map(|(i, t)| Document::new(i.to_string(), *t)).collect();
        let (sr, hr) = split_corpus(docs, &lex, &cfg).unwrap();
        let ids = |v: &[Document]| v.iter().map(|d| d.id.clone()).collect::<Vec<_>>();
        assert_eq!(ids(&sr), ["0", "2", "4", "6", "8", "9"]);
        assert_eq!(ids(&hr), ["1", "3", "5", "7"]);
        let (sr, hr) = split_corpus(Vec::new(), &lex, &cfg).unwrap();
        assert!(sr.is_empty() && hr.is_empty());
    }
}
