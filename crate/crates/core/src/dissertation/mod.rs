//! Parallel Serbian-English abstracts from dissertation full texts.
//!
//! Input is a metadata jsonl file plus one pre-extracted `<id>.txt` per
//! dissertation (and optionally `<id>.p10.txt`, the text of the first ten
//! pages, used for the OCR probe). Candidates are filtered on their
//! enrichment flags, each candidate's text is routed to the inline or the
//! table extractor, and every candidate ends up paired, partial (one
//! abstract) or failed.

pub mod extract;
pub mod locate;
pub mod patterns;
pub mod record;

use std::fs::{self, File};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use extract::{extract_inline, extract_kwd_table, Bundle, ExtractFailure, ExtractOptions, Extraction, Layout};
pub use locate::{locate_by_prefix, Location};
pub use patterns::{DocLang, SectionPatterns};
pub use record::{derive_need_ocr, filter_candidates, DissertationRecord, DEFAULT_MIN_OCR_CHARS};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelAbstractPair {
    pub id: String,
    pub sr_abstract: String,
    pub en_abstract: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sr_keywords: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub en_keywords: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scientific_field: Option<String>,
    pub layout: Layout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CandidateState {
    Paired,
    /// Exactly one abstract extracted.
    Partial,
    Failed,
}

impl CandidateState {
    pub fn as_str(self) -> &'static str {
        match self {
            CandidateState::Paired => "paired",
            CandidateState::Partial => "partial",
            CandidateState::Failed => "failed",
        }
    }
}

/// Extraction results of one candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateOutcome {
    pub layout: Layout,
    pub sr: Extraction,
    pub en: Extraction,
}

impl CandidateOutcome {
    fn failed(layout: Layout, reason: &str) -> Self {
        let f = |lang| {
            Err(ExtractFailure {
                lang,
                reason: reason.to_string(),
            })
        };
        CandidateOutcome {
            layout,
            sr: f(DocLang::Sr),
            en: f(DocLang::En),
        }
    }

    pub fn state(&self) -> CandidateState {
        match (&self.sr, &self.en) {
            (Ok(_), Ok(_)) => CandidateState::Paired,
            (Err(_), Err(_)) => CandidateState::Failed,
            _ => CandidateState::Partial,
        }
    }

    fn reason(&self) -> String {
        let mut parts = Vec::new();
        for (lang, r) in [(DocLang::Sr, &self.sr), (DocLang::En, &self.en)] {
            if let Err(e) = r {
                parts.push(format!("{}: {}", lang.as_str(), e.reason));
            }
        }
        parts.join("; ")
    }
}

/// Route one candidate's full text to the matching extractor.
pub fn extract_record(
    record: &DissertationRecord,
    fulltext: &str,
    patterns: &SectionPatterns,
    opts: &ExtractOptions,
) -> CandidateOutcome {
    let layout = record.layout.unwrap_or_else(|| Layout::detect(fulltext, patterns));
    match layout {
        Layout::Inline => CandidateOutcome {
            layout,
            sr: extract_inline(fulltext, patterns, DocLang::Sr, record.partial_abstract_sr.as_deref(), opts),
            en: extract_inline(fulltext, patterns, DocLang::En, record.partial_abstract_en.as_deref(), opts),
        },
        Layout::KwdTable => {
            let (sr, en) = extract_kwd_table(fulltext, patterns);
            CandidateOutcome { layout, sr, en }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    pub id: String,
    pub state: CandidateState,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct PairsOutput {
    pub pairs: Vec<ParallelAbstractPair>,
    /// Candidate records with extracted fields filled in.
    pub records: Vec<DissertationRecord>,
    /// One row per candidate that did not produce a pair.
    pub report: Vec<ReportRow>,
    pub paired: usize,
    pub partial: usize,
    pub failed: usize,
}

/// Update candidate records with their extractions and emit a pair for
/// every candidate with both abstracts.
pub fn build_pairs(candidates: Vec<(DissertationRecord, CandidateOutcome)>) -> PairsOutput {
    let mut out = PairsOutput::default();
    for (mut rec, outcome) in candidates {
        if let Ok(b) = &outcome.sr {
            rec.abstract_sr = Some(b.abstract_text.clone());
            rec.scientific_field_sr = b.scientific_field.clone();
            if b.keywords.is_some() {
                rec.keywords_from_text = b.keywords.clone();
            }
        }
        if let Ok(b) = &outcome.en {
            rec.abstract_en = Some(b.abstract_text.clone());
            rec.scientific_field_en = b.scientific_field.clone();
            if b.keywords.is_some() {
                rec.keywords_from_text_en = b.keywords.clone();
            }
        }
        let state = outcome.state();
        match state {
            CandidateState::Paired => {
                out.paired += 1;
                let (sr, en) = (outcome.sr.as_ref().unwrap(), outcome.en.as_ref().unwrap());
                out.pairs.push(ParallelAbstractPair {
                    id: rec.id.clone(),
                    sr_abstract: sr.abstract_text.clone(),
                    en_abstract: en.abstract_text.clone(),
                    sr_keywords: sr.keywords.clone(),
                    en_keywords: en.keywords.clone(),
                    scientific_field: sr.scientific_field.clone().or_else(|| en.scientific_field.clone()),
                    layout: outcome.layout,
                });
            }
            CandidateState::Partial => out.partial += 1,
            CandidateState::Failed => out.failed += 1,
        }
        if state != CandidateState::Paired {
            out.report.push(ReportRow {
                id: rec.id.clone(),
                state,
                reason: outcome.reason(),
            });
        }
        out.records.push(rec);
    }
    out
}

/// Read a metadata jsonl file.
pub fn read_metadata(path: impl AsRef<Path>) -> Result<Vec<DissertationRecord>> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: DissertationRecord = serde_json::from_str(&line).map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn write_jsonl<W: Write, T: Serialize>(mut w: W, items: &[T]) -> std::io::Result<()> {
    for it in items {
        serde_json::to_writer(&mut w, it)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

/// `id,reason` CSV; the reason starts with the candidate state.
pub fn write_report_csv<W: Write>(w: W, rows: &[ReportRow]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["id", "reason"])?;
    for r in rows {
        wr.write_record([r.id.as_str(), &format!("{}: {}", r.state.as_str(), r.reason)])?;
    }
    wr.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub extract: ExtractOptions,
    pub min_ocr_chars: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            extract: ExtractOptions::default(),
            min_ocr_chars: DEFAULT_MIN_OCR_CHARS,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub pairs: Vec<ParallelAbstractPair>,
    /// Every input record, enriched, with candidates updated.
    pub records: Vec<DissertationRecord>,
    pub report: Vec<ReportRow>,
    pub candidates: usize,
    pub paired: usize,
    pub partial: usize,
    pub failed: usize,
}

fn read_optional(p: &Path) -> Result<Option<String>> {
    match fs::read_to_string(p) {
        Ok(s) => Ok(Some(s)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(Error::io(p, e)),
    }
}

/// Enrich, filter and extract a whole metadata set against a text directory.
pub fn process_dissertations(
    mut records: Vec<DissertationRecord>,
    texts_dir: &Path,
    patterns: &SectionPatterns,
    opts: &RunOptions,
) -> Result<RunOutput> {
    for r in records.iter_mut() {
        let probe = read_optional(&texts_dir.join(format!("{}.p10.txt", r.id)))?;
        r.enrich(probe.as_deref(), opts.min_ocr_chars);
    }
    let flags = records.iter().map(|r| r.is_candidate()).collect::<Result<Vec<bool>>>()?;

    let candidates: Vec<(usize, &DissertationRecord)> = records
        .iter()
        .enumerate()
        .filter(|(i, _)| flags[*i])
        .collect();
    let outcomes = candidates
        .par_iter()
        .map(|(_, rec)| {
            let p = texts_dir.join(format!("{}.txt", rec.id));
            Ok(match read_optional(&p)? {
                Some(text) => extract_record(rec, &text, patterns, &opts.extract),
                None => CandidateOutcome::failed(
                    rec.layout.unwrap_or(Layout::Inline),
                    &format!("full text {} not found", p.display()),
                ),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let idx: Vec<usize> = candidates.iter().map(|(i, _)| *i).collect();
    let built = build_pairs(
        idx.iter()
            .zip(outcomes)
            .map(|(&i, o)| (records[i].clone(), o))
            .collect(),
    );
    for (&i, rec) in idx.iter().zip(&built.records) {
        records[i] = rec.clone();
    }
    Ok(RunOutput {
        pairs: built.pairs,
        records,
        report: built.report,
        candidates: idx.len(),
        paired: built.paired,
        partial: built.partial,
        failed: built.failed,
    })
}
