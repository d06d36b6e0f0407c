//! TOML run configuration for the aggregation pipeline.
//!
//! ```toml
//! markers = "markers.tsv"          # optional, default lexicon otherwise
//!
//! [dedup]
//! ngram = 6
//! threshold = 0.75
//!
//! [classifier]
//! je_ratio_threshold = 0.16
//!
//! [output]
//! corpus = "umbrella.jsonl"
//! report = "report.csv"
//!
//! [[source]]
//! name = "srWaC"
//! path = "srwac.jsonl"
//! lang = "sr"
//!
//! [[source]]
//! name = "HPLT"
//! path = "hplt"
//! format = "textdir"
//! split = true
//! ```
//!
//! Sources are deduplicated in the order they are listed. Relative paths
//! resolve against the directory holding the config file.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::corpus::{CorpusFormat, Lang};
use crate::dedup::DedupConfig;
use crate::error::{Error, Result};
use crate::variant::ClassifierConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceFormat {
    #[default]
    Jsonl,
    Textdir,
}

impl From<SourceFormat> for CorpusFormat {
    fn from(f: SourceFormat) -> Self {
        match f {
            SourceFormat::Jsonl => CorpusFormat::Jsonl,
            SourceFormat::Textdir => CorpusFormat::Textdir,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub name: String,
    pub path: PathBuf,
    #[serde(default)]
    pub format: SourceFormat,
    #[serde(default)]
    pub lang: Lang,
    /// Route through the Serbian/Croatian classifier first; the halves get
    /// their own report rows, `<name>-sr` and `<name>-hr`.
    #[serde(default)]
    pub split: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub corpus: PathBuf,
    pub report: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub markers: Option<PathBuf>,
    #[serde(default)]
    pub dedup: DedupConfig,
    #[serde(default)]
    pub classifier: ClassifierConfig,
    pub output: OutputPaths,
    #[serde(rename = "source")]
    pub sources: Vec<SourceSpec>,
    /// Skip malformed records instead of failing.
    #[serde(default)]
    pub skip_malformed: bool,
}

impl PipelineConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: PipelineConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.resolve(base_dir);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<(Self, String)> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let cfg = Self::parse(&text, base)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Ok((cfg, text))
    }

    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for s in &mut self.sources {
            fix(&mut s.path);
        }
        if let Some(m) = &mut self.markers {
            fix(m);
        }
        fix(&mut self.output.corpus);
        fix(&mut self.output.report);
    }

    pub fn validate(&self) -> Result<()> {
        if self.sources.is_empty() {
            return Err(Error::Config("no [[source]] entries".into()));
        }
        let mut names = HashSet::new();
        for s in &self.sources {
            if s.name.is_empty() {
                return Err(Error::Config("source with empty name".into()));
            }
            let mut row_names = vec![s.name.clone()];
            if s.split {
                row_names = vec![format!("{}-sr", s.name), format!("{}-hr", s.name)];
            }
            for n in row_names {
                if !names.insert(n.clone()) {
                    return Err(Error::Config(format!("duplicate source name {n:?}")));
                }
            }
        }
        self.dedup.validate()?;
        self.classifier.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CFG: &str = r#"
markers = "m.tsv"

[dedup]
ngram = 5

[output]
corpus = "out/u.jsonl"
report = "/abs/r.csv"

[[source]]
name = "a"
path = "a.jsonl"
lang = "sr"

[[source]]
name = "H"
path = "h"
format = "textdir"
split = true
"#;

    #[test]
    fn parses_and_resolves() {
        let c = PipelineConfig::parse(CFG, Path::new("/base")).unwrap();
        assert_eq!(c.dedup.ngram, 5);
        assert_eq!(c.dedup.threshold, 0.75);
        assert_eq!(c.classifier.je_ratio_threshold, 0.16);
        assert_eq!(c.sources[0].path, PathBuf::from("/base/a.jsonl"));
        assert_eq!(c.sources[0].lang, Lang::Sr);
        assert_eq!(c.sources[1].format, SourceFormat::Textdir);
        assert!(c.sources[1].split);
        assert_eq!(c.markers.as_deref(), Some(Path::new("/base/m.tsv")));
        assert_eq!(c.output.report, PathBuf::from("/abs/r.csv"));
    }

    #[test]
    fn rejects_duplicates_and_bad_values() {
        let dup = CFG.replace("name = \"H\"", "name = \"a\"").replace("split = true", "");
        assert!(PipelineConfig::parse(&dup, Path::new(".")).is_err());
        // a split source's halves collide with a plain source named a-sr
        let collide = CFG.replace("name = \"a\"", "name = \"H-sr\"");
        assert!(PipelineConfig::parse(&collide, Path::new(".")).is_err());
        let bad = CFG.replace("ngram = 5", "ngram = 0");
        assert!(PipelineConfig::parse(&bad, Path::new(".")).is_err());
        let unknown = CFG.replace("ngram = 5", "ngramz = 5");
        assert!(PipelineConfig::parse(&unknown, Path::new(".")).is_err());
    }
}
