use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use crate::corpus::{load_corpus, CorpusFormat, LoadOptions};
use crate::error::{Error, Result};
use crate::freq::{frequency_table, sample_excerpt, ExcerptSpec, TopProfile};
use crate::similarity::{compare_profiles, FeatureSet, SimilarityMatrix};

use super::output::{io_err, OutputSet};

#[derive(Debug, Clone, PartialEq)]
pub enum EvalInput {
    /// A raw corpus to profile.
    Corpus {
        name: String,
        path: PathBuf,
        format: CorpusFormat,
    },
    /// A profile TSV written by `freq`.
    Profile { name: String, path: PathBuf },
}

impl EvalInput {
    pub fn name(&self) -> &str {
        match self {
            EvalInput::Corpus { name, .. } | EvalInput::Profile { name, .. } => name,
        }
    }
}

/// Corpus name from a path: the file stem, or `name=path` when given.
pub fn split_named(arg: &str) -> (String, PathBuf) {
    if let Some((n, p)) = arg.split_once('=') {
        if !n.is_empty() && !n.contains(['/', '\\']) {
            return (n.to_string(), PathBuf::from(p));
        }
    }
    let p = PathBuf::from(arg);
    let name = p
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| arg.to_string());
    (name, p)
}

#[derive(Debug, Clone)]
pub struct EvalParams {
    pub excerpt: ExcerptSpec,
    pub top_k: usize,
    pub power: i32,
    pub matrix_out: Option<PathBuf>,
    pub graph_out: Option<PathBuf>,
    pub ranking_out: Option<PathBuf>,
    /// Also write each computed profile as `<dir>/<name>.tsv`.
    pub profiles_out: Option<PathBuf>,
}

impl Default for EvalParams {
    fn default() -> Self {
        EvalParams {
            excerpt: ExcerptSpec::default(),
            top_k: 1000,
            power: 10,
            matrix_out: None,
            graph_out: None,
            ranking_out: None,
            profiles_out: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvalSummary {
    pub profiles: Vec<TopProfile>,
    pub features: FeatureSet,
    pub matrix: SimilarityMatrix,
}

/// Top-K profile of one corpus excerpt.
pub fn profile_corpus(name: &str, path: &Path, format: CorpusFormat, excerpt: &ExcerptSpec, k: usize) -> Result<TopProfile> {
    let docs = load_corpus(path, &LoadOptions { allow_empty: true, ..LoadOptions::new(format) })?;
    let tokens = sample_excerpt(docs, excerpt)?;
    frequency_table(name, &tokens).top_profile(k)
}

pub fn read_profile(name: &str, path: &Path, k: usize) -> Result<TopProfile> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut p = TopProfile::read_tsv(name, BufReader::new(f))?;
    p.truncate(k);
    Ok(p)
}

/// Profile (or load) every input, compare them and write the requested
/// artifacts together.
pub fn run_eval(inputs: &[EvalInput], params: &EvalParams) -> Result<EvalSummary> {
    if inputs.len() < 2 {
        return Err(Error::TooFewCorpora(inputs.len()));
    }
    if params.top_k == 0 {
        return Err(Error::Config("top-k must be >= 1".into()));
    }
    let mut seen = std::collections::HashSet::new();
    for i in inputs {
        if !seen.insert(i.name()) {
            return Err(Error::Config(format!("duplicate corpus name {:?}", i.name())));
        }
    }

    let profiles = inputs
        .iter()
        .map(|input| match input {
            EvalInput::Corpus { name, path, format } => {
                log::info!("freq: profiling {name}");
                profile_corpus(name, path, *format, &params.excerpt, params.top_k)
            }
            EvalInput::Profile { name, path } => read_profile(name, path, params.top_k),
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.in_stage("freq"))?;

    let (features, matrix) = compare_profiles(&profiles, params.power).map_err(|e| e.in_stage("sim"))?;
    log::info!("sim: {} corpora, {} features", matrix.len(), features.len());

    write_artifacts(&profiles, &matrix, params).map_err(|e| e.in_stage("write"))?;
    Ok(EvalSummary {
        profiles,
        features,
        matrix,
    })
}

fn write_artifacts(profiles: &[TopProfile], matrix: &SimilarityMatrix, params: &EvalParams) -> Result<()> {
    let mut out = OutputSet::new();
    if let Some(p) = &params.matrix_out {
        out.write(p, |w| matrix.write_csv(w))?;
    }
    if let Some(p) = &params.ranking_out {
        out.write(p, |w| matrix.write_ranking_csv(w))?;
    }
    if let Some(p) = &params.graph_out {
        out.write(p, |w| w.write_all(matrix.to_dot().as_bytes()).map_err(io_err(p)))?;
    }
    if let Some(dir) = &params.profiles_out {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for prof in profiles {
            let p = dir.join(format!("{}.tsv", prof.corpus_name));
            out.write(&p, |w| prof.write_tsv(w).map_err(io_err(&p)))?;
        }
    }
    out.commit()
}
