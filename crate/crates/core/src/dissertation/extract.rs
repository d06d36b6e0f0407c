//! Section extraction for the two dissertation layouts.
//!
//! Inline layout: abstract, keywords and scientific field follow each other
//! in that order, per language, each introduced by a heading. The abstract
//! start comes from the metadata's partial abstract when it can be found in
//! the text, otherwise from the abstract heading. Every section ends where
//! the next recognized heading begins.
//!
//! Table layout: a "key word documentation" block per language, made of
//! `Label, ABBR:` rows. A row's value runs until the next row label, the
//! next block anchor or the end of the block.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::locate::locate_by_prefix;
use super::patterns::{DocLang, PatternList, SectionPatterns};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    Inline,
    KwdTable,
}

impl Layout {
    pub fn detect(text: &str, patterns: &SectionPatterns) -> Layout {
        if patterns.is_table_layout(text) {
            Layout::KwdTable
        } else {
            Layout::Inline
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    Abstract,
    Keywords,
    Field,
}

/// Sections found for one language.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Bundle {
    pub abstract_text: String,
    pub keywords: Option<Vec<String>>,
    pub scientific_field: Option<String>,
    /// Byte ranges of the trimmed section bodies in the source text.
    pub spans: Vec<(Section, Range<usize>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractFailure {
    pub lang: DocLang,
    pub reason: String,
}

pub type Extraction = Result<Bundle, ExtractFailure>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtractOptions {
    /// An abstract with no terminating heading runs to the end of the text;
    /// if that is longer than this many characters the extraction fails.
    pub max_section_chars: usize,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            max_section_chars: 20_000,
        }
    }
}

fn fail(lang: DocLang, reason: impl Into<String>) -> ExtractFailure {
    ExtractFailure {
        lang,
        reason: reason.into(),
    }
}

/// Trim whitespace from both ends of `text[range]`, keeping original offsets.
fn trim_range(text: &str, r: Range<usize>) -> Range<usize> {
    let s = &text[r.clone()];
    let start = r.start + (s.len() - s.trim_start().len());
    let end = r.end - (s.len() - s.trim_end().len());
    start..end.max(start)
}

/// Split a keyword section on commas and semicolons.
pub fn parse_keywords(raw: &str) -> Vec<String> {
    raw.split([',', ';'])
        .map(|k| k.split_whitespace().collect::<Vec<_>>().join(" "))
        .map(|k| k.trim_end_matches('.').to_string())
        .filter(|k| !k.is_empty())
        .collect()
}

/// Earliest match at or after `from` across several lists, with the index of
/// the list that produced it.
fn first_of(text: &str, from: usize, lists: &[&PatternList]) -> Option<(usize, (usize, usize))> {
    lists
        .iter()
        .enumerate()
        .filter_map(|(i, l)| l.find_from(text, from).map(|m| (i, m)))
        .min_by_key(|(i, m)| (m.0, *i))
}

/// Extract abstract, keywords and field of one language from an
/// inline-layout text. `partial_abstract` is the metadata abstract, if any.
pub fn extract_inline(
    text: &str,
    patterns: &SectionPatterns,
    lang: DocLang,
    partial_abstract: Option<&str>,
    opts: &ExtractOptions,
) -> Extraction {
    let own = patterns.lang(lang);
    let other = patterns.lang(lang.other());

    let start = partial_abstract
        .filter(|p| !p.trim().is_empty())
        .and_then(|p| locate_by_prefix(text, p))
        .map(|loc| loc.byte)
        .or_else(|| own.abstract_heading.find_from(text, 0).map(|m| m.1))
        .ok_or_else(|| fail(lang, "abstract start not found"))?;

    // terminators in section order; index 0 and 1 continue this language's
    // sequence, the rest belong to the other language
    let after_abstract = [
        &own.keywords_heading,
        &own.field_heading,
        &other.abstract_heading,
        &other.keywords_heading,
        &other.field_heading,
    ];
    let mut bundle = Bundle::default();
    let (abs_end, next) = match first_of(text, start, &after_abstract) {
        Some((i, m)) => (m.0, Some((i, m))),
        None => (text.len(), None),
    };
    let abs = trim_range(text, start..abs_end);
    if abs.is_empty() {
        return Err(fail(lang, "empty abstract"));
    }
    if next.is_none() && text[abs.clone()].chars().count() > opts.max_section_chars {
        return Err(fail(lang, "abstract has no terminating heading"));
    }
    bundle.abstract_text = text[abs.clone()].to_string();
    bundle.spans.push((Section::Abstract, abs));

    let mut field_at = None;
    match next {
        Some((0, kw)) => {
            let after_keywords = [
                &own.field_heading,
                &other.abstract_heading,
                &other.keywords_heading,
                &other.field_heading,
            ];
            let found = first_of(text, kw.1, &after_keywords);
            let kw_end = found.map_or(text.len(), |(_, m)| m.0);
            let r = trim_range(text, kw.1..kw_end);
            let list = parse_keywords(&text[r.clone()]);
            if !list.is_empty() {
                bundle.keywords = Some(list);
                bundle.spans.push((Section::Keywords, r));
            }
            if let Some((0, m)) = found {
                field_at = Some(m);
            }
        }
        Some((1, m)) => field_at = Some(m),
        _ => {}
    }

    if let Some((_, heading_end)) = field_at {
        // the field value is the first non-empty line after the heading
        let rest = &text[heading_end..];
        let skip = rest.len() - rest.trim_start().len();
        let value_start = heading_end + skip;
        let line_end = text[value_start..].find('\n').map_or(text.len(), |i| value_start + i);
        let r = trim_range(text, value_start..line_end);
        if !r.is_empty() {
            bundle.scientific_field = Some(text[r.clone()].to_string());
            bundle.spans.push((Section::Field, r));
        }
    }
    Ok(bundle)
}

/// Extract both languages from a key-word-documentation table layout.
pub fn extract_kwd_table(text: &str, patterns: &SectionPatterns) -> (Extraction, Extraction) {
    (
        extract_table_lang(text, patterns, DocLang::Sr),
        extract_table_lang(text, patterns, DocLang::En),
    )
}

fn extract_table_lang(text: &str, patterns: &SectionPatterns, lang: DocLang) -> Extraction {
    let own = patterns.lang(lang);
    let other = patterns.lang(lang.other());
    let block_start = own
        .table_anchor
        .find_from(text, 0)
        .ok_or_else(|| fail(lang, "key word documentation block not found"))?
        .1;
    let block_end = other
        .table_anchor
        .find_from(text, block_start)
        .map_or(text.len(), |m| m.0);
    let block = &text[..block_end];

    let terminators = [
        &patterns.table_row,
        &own.table_abstract,
        &own.table_keywords,
        &own.table_field,
        &own.table_anchor,
    ];
    let row_value = |label: &PatternList| -> Option<Range<usize>> {
        let (_, label_end) = label.find_from(block, block_start)?;
        let end = first_of(block, label_end, &terminators).map_or(block.len(), |(_, m)| m.0);
        Some(trim_range(text, label_end..end))
    };

    let abs = row_value(&own.table_abstract).ok_or_else(|| fail(lang, "abstract row not found"))?;
    if abs.is_empty() {
        return Err(fail(lang, "empty abstract"));
    }
    let mut bundle = Bundle {
        abstract_text: text[abs.clone()].to_string(),
        ..Default::default()
    };
    bundle.spans.push((Section::Abstract, abs));
    if let Some(r) = row_value(&own.table_keywords) {
        let list = parse_keywords(&text[r.clone()]);
        if !list.is_empty() {
            bundle.keywords = Some(list);
            bundle.spans.push((Section::Keywords, r));
        }
    }
    if let Some(r) = row_value(&own.table_field).filter(|r| !r.is_empty()) {
        bundle.scientific_field = Some(text[r.clone()].to_string());
        bundle.spans.push((Section::Field, r));
    }
    bundle.spans.sort_by_key(|(_, r)| r.start);
    Ok(bundle)
}
