//! Dissertation metadata records, enrichment flags and the candidate filter.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Deserializer, Serialize};

use super::extract::Layout;
use crate::error::{Error, Result};

/// Metadata of one dissertation. Fields not modelled here are kept in
/// `extra` and written back unchanged.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DissertationRecord {
    pub id: String,
    #[serde(default)]
    pub dc_language: String,
    #[serde(default)]
    pub dc_language_iso: String,
    #[serde(default)]
    pub dc_rights_license: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partial_abstract_sr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partial_abstract_en: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keywords_meta: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fulltext_url: Option<String>,
    #[serde(default, deserialize_with = "yes_no", skip_serializing_if = "Option::is_none")]
    pub need_ocr: Option<bool>,
    #[serde(default, deserialize_with = "yes_no", skip_serializing_if = "Option::is_none")]
    pub srpski: Option<bool>,
    #[serde(
        rename = "ARR",
        default,
        deserialize_with = "yes_no",
        skip_serializing_if = "Option::is_none"
    )]
    pub arr: Option<bool>,
    /// Serbian keywords found in the full text.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keywords_from_text: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keywords_from_text_en: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abstract_sr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abstract_en: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scientific_field_sr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scientific_field_en: Option<String>,
    /// Forces the extraction layout instead of detecting it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<Layout>,
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

/// Accepts `true`/`false`, `"yes"`/`"no"`, `"true"`/`"false"` or null.
fn yes_no<'de, D: Deserializer<'de>>(d: D) -> Result<Option<bool>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Bool(bool),
        Str(String),
    }
    match Option::<Raw>::deserialize(d)? {
        None => Ok(None),
        Some(Raw::Bool(b)) => Ok(Some(b)),
        Some(Raw::Str(s)) => match s.trim().to_ascii_lowercase().as_str() {
            "yes" | "true" | "da" => Ok(Some(true)),
            "no" | "false" | "ne" => Ok(Some(false)),
            "" => Ok(None),
            other => Err(serde::de::Error::custom(format!("expected yes/no, got {other:?}"))),
        },
    }
}

/// True if a `dc.language` style value names Serbian. Multi-valued fields
/// separated by `;`, `,` or `|` match if any value does.
pub fn names_serbian(value: &str) -> bool {
    value.split([';', ',', '|']).any(|v| {
        let v = v.trim().to_lowercase();
        matches!(v.as_str(), "sr" | "srp" | "scc" | "srpski" | "serbian" | "српски")
            || v.starts_with("sr-")
            || v.starts_with("sr_")
            || v.contains("serbian")
            || v.contains("srpski")
            || v.contains("српски")
    })
}

/// Serbian if either language field says so.
pub fn derive_srpski(dc_language: &str, dc_language_iso: &str) -> bool {
    names_serbian(dc_language) || names_serbian(dc_language_iso)
}

fn arr_patterns() -> &'static [Regex] {
    static P: OnceLock<Vec<Regex>> = OnceLock::new();
    P.get_or_init(|| {
        [
            r"(?i)all\s+rights\s+reserved",
            r"(?i)sva\s+prava\s+zadr[žz]ana",
            r"(?i)сва\s+права\s+задржана",
            r"(?i)^\s*arr\s*$",
            r"(?i)\(\s*arr\s*\)",
        ]
        .iter()
        .map(|p| Regex::new(p).expect("valid ARR pattern"))
        .collect()
    })
}

/// True if a license string denotes "all rights reserved".
pub fn is_all_rights_reserved(license: &str) -> bool {
    arr_patterns().iter().any(|re| re.is_match(license))
}

/// OCR is needed when the text of the first pages has fewer than
/// `min_chars` non-whitespace characters.
pub fn derive_need_ocr(first_pages_text: &str, min_chars: usize) -> bool {
    first_pages_text.chars().filter(|c| !c.is_whitespace()).count() < min_chars
}

pub const DEFAULT_MIN_OCR_CHARS: usize = 500;

impl DissertationRecord {
    /// Fill `srpski` and `ARR` from the metadata, and `need_ocr` from the
    /// first-pages probe text when one is given. Values already present are
    /// left alone.
    pub fn enrich(&mut self, first_pages_text: Option<&str>, min_chars: usize) {
        if self.srpski.is_none() {
            self.srpski = Some(derive_srpski(&self.dc_language, &self.dc_language_iso));
        }
        if self.arr.is_none() {
            self.arr = Some(is_all_rights_reserved(&self.dc_rights_license));
        }
        if self.need_ocr.is_none() {
            if let Some(t) = first_pages_text {
                self.need_ocr = Some(derive_need_ocr(t, min_chars));
            }
        }
    }

    fn has_fulltext(&self) -> bool {
        self.fulltext_url.as_deref().is_some_and(|u| !u.trim().is_empty())
    }

    /// Candidate iff it has a full-text URL, is Serbian, needs no OCR and
    /// is not all-rights-reserved.
    pub fn is_candidate(&self) -> Result<bool> {
        let need = |v: Option<bool>, field| {
            v.ok_or_else(|| Error::MissingField {
                id: self.id.clone(),
                field,
            })
        };
        let srpski = need(self.srpski, "srpski")?;
        let need_ocr = need(self.need_ocr, "need_ocr")?;
        let arr = need(self.arr, "ARR")?;
        Ok(self.has_fulltext() && srpski && !need_ocr && !arr)
    }
}

/// Keep candidate records, in input order.
pub fn filter_candidates(records: Vec<DissertationRecord>) -> Result<Vec<DissertationRecord>> {
    let mut out = Vec::new();
    for r in records {
        if r.is_candidate()? {
            out.push(r);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(url: bool, srpski: bool, need_ocr: bool, arr: bool) -> DissertationRecord {
        DissertationRecord {
            id: format!("{}{}{}{}", url as u8, srpski as u8, need_ocr as u8, arr as u8),
            fulltext_url: url.then(|| "https://example.org/t.pdf".to_string()),
            srpski: Some(srpski),
            need_ocr: Some(need_ocr),
            arr: Some(arr),
            ..Default::default()
        }
    }

    #[test]
    fn need_ocr_boundary() {
        assert!(derive_need_ocr("", 500));
        assert!(!derive_need_ocr(&"x".repeat(10_000), 500));
        let exactly = "ab cd\n".repeat(125);
        assert_eq!(exactly.chars().filter(|c| !c.is_whitespace()).count(), 500);
        assert!(!derive_need_ocr(&exactly, 500));
        assert!(derive_need_ocr(&exactly[1..], 500));
    }

    #[test]
    fn filter_rule() {
        assert_eq!(filter_candidates(vec![rec(true, true, false, false)]).unwrap().len(), 1);
        assert!(filter_candidates(vec![rec(true, true, false, true)]).unwrap().is_empty());
        let mut missing = rec(true, true, false, false);
        missing.need_ocr = None;
        let err = filter_candidates(vec![missing]).unwrap_err();
        assert_eq!(err.to_string(), "record 1100: missing enrichment field need_ocr");
    }

    #[test]
    fn language_and_license() {
        assert!(derive_srpski("srpski", ""));
        assert!(derive_srpski("", "sr"));
        assert!(derive_srpski("Serbian", "en"));
        assert!(derive_srpski("", "sr_RS"));
        assert!(derive_srpski("en; sr", ""));
        assert!(!derive_srpski("English", "en"));
        assert!(!derive_srpski("srpskohrvatski", "sh"));
        assert!(is_all_rights_reserved("All rights reserved"));
        assert!(is_all_rights_reserved("Autorsko pravo: sva prava zadržana"));
        assert!(is_all_rights_reserved("ARR"));
        assert!(!is_all_rights_reserved("Autorstvo - Nekomercijalno 3.0 Srbija (CC BY-NC 3.0)"));
        assert!(!is_all_rights_reserved("carry on"));
    }

    #[test]
    fn enrich_fills_missing_only() {
        let mut r = DissertationRecord {
            id: "x".into(),
            dc_language: "srpski".into(),
            dc_rights_license: "All rights reserved".into(),
            srpski: Some(false),
            ..Default::default()
        };
        r.enrich(Some("short"), 500);
        assert_eq!(r.srpski, Some(false));
        assert_eq!(r.arr, Some(true));
        assert_eq!(r.need_ocr, Some(true));
    }

    #[test]
    fn json_roundtrip_keeps_unknown_fields() {
        let line = r#"{"id":"7","dc_language":"srpski","need_ocr":"no","ARR":"yes","srpski":true,"dc_title":"Naslov","layout":"kwd_table"}"#;
        let r: DissertationRecord = serde_json::from_str(line).unwrap();
        assert_eq!(r.need_ocr, Some(false));
        assert_eq!(r.arr, Some(true));
        assert_eq!(r.layout, Some(Layout::KwdTable));
        let back = serde_json::to_value(&r).unwrap();
        assert_eq!(back["dc_title"], "Naslov");
        assert_eq!(back["ARR"], true);
        assert!(serde_json::from_str::<DissertationRecord>(r#"{"id":"1","ARR":"maybe"}"#).is_err());
    }
}
