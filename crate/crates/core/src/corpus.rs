//! Documents, corpus metadata and the two on-disk corpus formats.
//!
//! Document order is the unit of determinism for everything downstream:
//! a `jsonl` corpus yields records in file order, a `textdir` corpus yields
//! its `.txt` files sorted by file name.

use std::collections::HashSet;
use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::token::count_tokens;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lang {
    Sr,
    Hr,
    Bs,
    Cnr,
    Sh,
    Mixed,
    #[default]
    Unknown,
}

impl Lang {
    pub fn as_str(self) -> &'static str {
        match self {
            Lang::Sr => "sr",
            Lang::Hr => "hr",
            Lang::Bs => "bs",
            Lang::Cnr => "cnr",
            Lang::Sh => "sh",
            Lang::Mixed => "mixed",
            Lang::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Lang {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "sr" => Lang::Sr,
            "hr" => Lang::Hr,
            "bs" => Lang::Bs,
            "cnr" => Lang::Cnr,
            "sh" => Lang::Sh,
            "mixed" => Lang::Mixed,
            "unknown" | "" => Lang::Unknown,
            other => return Err(format!("unknown language tag {other:?}")),
        })
    }
}

/// Where a corpus' text comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Origin {
    Web,
    Textbook,
    Literary,
    Synthetic,
    Mixed,
}

/// Representation of a corpus: plain, annotated or parallel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Form {
    Plain,
    Annotated,
    Parallel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusMeta {
    pub name: String,
    pub lang: Lang,
    pub origin: Origin,
    pub form: Form,
    pub word_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub lang: Lang,
    #[serde(default)]
    pub source: String,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            text: text.into(),
            lang: Lang::Unknown,
            source: String::new(),
        }
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }

    pub fn with_lang(mut self, lang: Lang) -> Self {
        self.lang = lang;
        self
    }

    pub fn word_count(&self) -> usize {
        count_tokens(&self.text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorpusFormat {
    #[default]
    Jsonl,
    Textdir,
}

impl FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "jsonl" => Ok(CorpusFormat::Jsonl),
            "textdir" => Ok(CorpusFormat::Textdir),
            other => Err(format!("unknown corpus format {other:?} (expected jsonl or textdir)")),
        }
    }
}

/// What to do with a record that cannot be turned into a [`Document`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OnMalformed {
    #[default]
    Fail,
    /// Log a warning, count the record and continue.
    Skip,
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    pub format: CorpusFormat,
    pub on_malformed: OnMalformed,
    pub allow_empty: bool,
    /// Source name for records without one. Defaults to the file stem
    /// (jsonl) or directory name (textdir).
    pub source: Option<String>,
    /// Overrides the `source` field of every record.
    pub force_source: Option<String>,
    /// Language tag for records without one.
    pub lang: Option<Lang>,
}

impl LoadOptions {
    pub fn new(format: CorpusFormat) -> Self {
        LoadOptions {
            format,
            ..Default::default()
        }
    }
}

#[derive(Deserialize)]
struct JsonRecord {
    id: Option<String>,
    text: Option<String>,
    lang: Option<String>,
    source: Option<String>,
}

enum Inner {
    Jsonl {
        lines: io::Lines<BufReader<File>>,
        line_no: usize,
        stem: String,
    },
    Textdir {
        files: std::vec::IntoIter<PathBuf>,
    },
}

/// Streaming reader over one corpus. Yields documents in the format's
/// documented order.
pub struct CorpusReader {
    path: PathBuf,
    opts: LoadOptions,
    default_source: String,
    inner: Inner,
    seen: HashSet<String>,
    skipped: usize,
}

/// Open a corpus for reading. Unreadable paths fail here, before any
/// document is produced.
pub fn load_corpus(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<CorpusReader> {
    let path = path.as_ref().to_path_buf();
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let default_source = opts.source.clone().unwrap_or_else(|| stem.clone());
    let inner = match opts.format {
        CorpusFormat::Jsonl => {
            let f = File::open(&path).map_err(|e| Error::io(&path, e))?;
            Inner::Jsonl {
                lines: BufReader::with_capacity(1 << 20, f).lines(),
                line_no: 0,
                stem,
            }
        }
        CorpusFormat::Textdir => {
            let mut files = Vec::new();
            for entry in fs::read_dir(&path).map_err(|e| Error::io(&path, e))? {
                let entry = entry.map_err(|e| Error::io(&path, e))?;
                let p = entry.path();
                if p.extension().is_some_and(|e| e == "txt") && p.is_file() {
                    files.push(p);
                }
            }
            files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
            Inner::Textdir {
                files: files.into_iter(),
            }
        }
    };
    Ok(CorpusReader {
        path,
        opts: opts.clone(),
        default_source,
        inner,
        seen: HashSet::new(),
        skipped: 0,
    })
}

impl CorpusReader {
    /// Records dropped so far in [`OnMalformed::Skip`] mode.
    pub fn skipped(&self) -> usize {
        self.skipped
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn next_raw(&mut self) -> Option<Result<Document>> {
        match &mut self.inner {
            Inner::Jsonl {
                lines,
                line_no,
                stem,
            } => loop {
                let line = lines.next()?;
                *line_no += 1;
                let n = *line_no;
                let line = match line {
                    Ok(l) => l,
                    Err(e) if e.kind() == io::ErrorKind::InvalidData => {
                        return Some(Err(malformed(&self.path, n, "invalid UTF-8")))
                    }
                    Err(e) => return Some(Err(Error::io(&self.path, e))),
                };
                if line.trim().is_empty() {
                    continue;
                }
                let rec: JsonRecord = match serde_json::from_str(&line) {
                    Ok(r) => r,
                    Err(e) => return Some(Err(malformed(&self.path, n, &e.to_string()))),
                };
                let Some(text) = rec.text else {
                    return Some(Err(malformed(&self.path, n, "missing field text")));
                };
                let lang = match rec.lang.as_deref().map(str::parse::<Lang>) {
                    None => self.opts.lang.unwrap_or_default(),
                    Some(Ok(l)) => l,
                    Some(Err(msg)) => return Some(Err(malformed(&self.path, n, &msg))),
                };
                let id = rec.id.unwrap_or_else(|| format!("{stem}:{n}"));
                let source = rec.source.unwrap_or_else(|| self.default_source.clone());
                return Some(Ok(Document {
                    id,
                    text,
                    lang,
                    source,
                }));
            },
            Inner::Textdir { files } => {
                let p = files.next()?;
                let text = match fs::read(&p) {
                    Ok(bytes) => match String::from_utf8(bytes) {
                        Ok(t) => t,
                        Err(_) => return Some(Err(malformed(&p, 1, "invalid UTF-8"))),
                    },
                    Err(e) => return Some(Err(Error::io(&p, e))),
                };
                let id = p
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                Some(Ok(Document {
                    id,
                    text,
                    lang: self.opts.lang.unwrap_or_default(),
                    source: self.default_source.clone(),
                }))
            }
        }
    }

    fn current_line(&self) -> usize {
        match &self.inner {
            Inner::Jsonl { line_no, .. } => *line_no,
            Inner::Textdir { .. } => 1,
        }
    }

    fn check(&mut self, mut doc: Document) -> Result<Document> {
        if doc.id.is_empty() {
            return Err(malformed(&self.path, self.current_line(), "empty id"));
        }
        if !self.opts.allow_empty && doc.text.is_empty() {
            return Err(malformed(&self.path, self.current_line(), "empty text"));
        }
        if !self.seen.insert(doc.id.clone()) {
            return Err(Error::DuplicateId {
                path: self.path.clone(),
                id: doc.id,
            });
        }
        if let Some(s) = &self.opts.force_source {
            doc.source.clone_from(s);
        }
        Ok(doc)
    }
}

fn malformed(path: &Path, line: usize, message: &str) -> Error {
    Error::Malformed {
        path: path.to_path_buf(),
        line,
        message: message.to_string(),
    }
}

impl Iterator for CorpusReader {
    type Item = Result<Document>;

    fn next(&mut self) -> Option<Result<Document>> {
        loop {
            let res = self.next_raw()?.and_then(|d| self.check(d));
            match res {
                Err(e @ (Error::Malformed { .. } | Error::DuplicateId { .. }))
                    if self.opts.on_malformed == OnMalformed::Skip =>
                {
                    self.skipped += 1;
                    log::warn!("skipping record ({} skipped so far): {e}", self.skipped);
                }
                other => return Some(other),
            }
        }
    }
}

/// Write one document as a jsonl line.
pub fn write_jsonl_doc<W: Write>(w: &mut W, doc: &Document) -> io::Result<()> {
    serde_json::to_writer(&mut *w, doc)?;
    w.write_all(b"\n")
}

/// Write documents as `<id>.txt` files into `dir`, creating it if needed.
pub fn write_textdir<'a>(
    dir: impl AsRef<Path>,
    docs: impl IntoIterator<Item = &'a Document>,
) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for doc in docs {
        if doc.id.contains(['/', '\\']) || doc.id.starts_with('.') {
            return Err(Error::Config(format!(
                "document id {:?} is not usable as a file name",
                doc.id
            )));
        }
        let p = dir.join(format!("{}.txt", doc.id));
        fs::write(&p, &doc.text).map_err(|e| Error::io(&p, e))?;
    }
    Ok(())
}

/// Total token count over a document stream.
pub fn count_words<'a>(docs: impl IntoIterator<Item = &'a Document>) -> u64 {
    docs.into_iter().map(|d| d.word_count() as u64).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn jsonl(lines: &[&str]) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(".jsonl").tempfile().unwrap();
        for l in lines {
            writeln!(f, "{l}").unwrap();
        }
        f
    }

    #[test]
    fn jsonl_file_order() {
        let f = jsonl(&[
            r#"{"id":"c","text":"three"}"#,
            r#"{"id":"a","text":"one","lang":"sr","source":"x"}"#,
            r#"{"text":"two"}"#,
        ]);
        let docs: Vec<_> = load_corpus(f.path(), &LoadOptions::default())
            .unwrap()
            .collect::<Result<_>>()
            .unwrap();
        assert_eq!(docs.len(), 3);
        assert_eq!(docs[0].id, "c");
        assert_eq!(docs[1].lang, Lang::Sr);
        assert_eq!(docs[1].source, "x");
        let stem = f.path().file_stem().unwrap().to_str().unwrap().to_string();
        assert_eq!(docs[2].id, format!("{stem}:3"));
        assert_eq!(docs[2].source, stem);
    }

    #[test]
    fn missing_text_names_line() {
        let f = jsonl(&[r#"{"id":"a","text":"x"}"#, r#"{"id":"b"}"#]);
        let err = load_corpus(f.path(), &LoadOptions::default())
            .unwrap()
            .collect::<Result<Vec<_>>>()
            .unwrap_err();
        assert!(err.to_string().ends_with("line 2: missing field text"), "{err}");
    }

    #[test]
    fn skip_mode_counts() {
        let f = jsonl(&[
            r#"{"id":"a","text":"x"}"#,
            "not json",
            r#"{"id":"a","text":"dup"}"#,
            r#"{"id":"b","text":""}"#,
            r#"{"id":"c","text":"y"}"#,
        ]);
        let mut opts = LoadOptions::default();
        opts.on_malformed = OnMalformed::Skip;
        let mut r = load_corpus(f.path(), &opts).unwrap();
        let ids: Vec<String> = r.by_ref().map(|d| d.unwrap().id).collect();
        assert_eq!(ids, ["a", "c"]);
        assert_eq!(r.skipped(), 3);
    }

    #[test]
    fn empty_text_allowed_when_asked() {
        let f = jsonl(&[r#"{"id":"b","text":""}"#]);
        let mut opts = LoadOptions::default();
        opts.allow_empty = true;
        let docs: Vec<_> = load_corpus(f.path(), &opts).unwrap().collect();
        assert!(docs[0].as_ref().unwrap().text.is_empty());
    }

    #[test]
    fn unreadable_path_fails_upfront() {
        let err = load_corpus("/nonexistent/corpus.jsonl", &LoadOptions::default())
            .err()
            .unwrap();
        assert!(err.to_string().contains("/nonexistent/corpus.jsonl"));
    }

    #[test]
    fn textdir_lexicographic() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("b.txt"), "bee").unwrap();
        fs::write(dir.path().join("a.txt"), "ay").unwrap();
        fs::write(dir.path().join("notes.md"), "ignored").unwrap();
        let docs: Vec<_> = load_corpus(dir.path(), &LoadOptions::new(CorpusFormat::Textdir))
            .unwrap()
            .map(|d| d.unwrap().id)
            .collect();
        assert_eq!(docs, ["a", "b"]);
    }

    #[test]
    fn word_counts() {
        assert_eq!(count_words(&[]), 0);
        assert_eq!(count_words(&[Document::new("1", "a b c")]), 3);
        let big = vec!["w"; 1000].join(" ");
        let docs = [Document::new("1", big.clone()), Document::new("2", big)];
        assert_eq!(count_words(&docs), 2000);
    }

    proptest! {
        #[test]
        fn count_is_additive(a in proptest::collection::vec("\\PC{0,30}", 0..5),
                             b in proptest::collection::vec("\\PC{0,30}", 0..5)) {
            let da: Vec<_> = a.iter().enumerate().map(|(i, t)| Document::new(i.to_string(), t.clone())).collect();
            let db: Vec<_> = b.iter().enumerate().map(|(i, t)| Document::new(i.to_string(), t.clone())).collect();
            let both = count_words(da.iter().chain(db.iter()));
            prop_assert_eq!(both, count_words(&da) + count_words(&db));
        }

        #[test]
        fn textdir_roundtrip(texts in proptest::collection::vec("\\PC{1,40}", 1..6)) {
            let dir = tempfile::tempdir().unwrap();
            let docs: Vec<_> = texts.iter().enumerate()
                .map(|(i, t)| Document::new(format!("d{i:03}"), t.clone()))
                .collect();
            write_textdir(dir.path(), &docs).unwrap();
            let back: Vec<_> = load_corpus(dir.path(), &LoadOptions::new(CorpusFormat::Textdir))
                .unwrap()
                .map(|d| d.unwrap())
                .collect();
            prop_assert_eq!(back.len(), docs.len());
            for (a, b) in docs.iter().zip(&back) {
                prop_assert_eq!(&a.id, &b.id);
                prop_assert_eq!(&a.text, &b.text);
            }
        }
    }
}
