//! Corpus similarity from top-K frequency profiles.
//!
//! The K most frequent words of every corpus are merged into one feature
//! list. Each corpus becomes a vector of per-million frequencies over that
//! list, where a word outside the corpus' own top-K is 0 even if the corpus
//! contains it. Pairwise cosines raised to a power (10 by default) form the
//! similarity matrix; a corpus with a low average similarity to the rest is
//! the most distinctive.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::freq::TopProfile;

/// Sorted union of all top-K word lists.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeatureSet {
    words: Vec<String>,
}

impl FeatureSet {
    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

pub fn feature_union<L, W>(top_lists: L) -> FeatureSet
where
    L: IntoIterator,
    L::Item: IntoIterator<Item = W>,
    W: AsRef<str>,
{
    let set: BTreeSet<String> = top_lists
        .into_iter()
        .flat_map(|l| l.into_iter().map(|w| w.as_ref().to_string()))
        .collect();
    FeatureSet {
        words: set.into_iter().collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileVector {
    pub corpus_name: String,
    pub values: Vec<f64>,
}

impl ProfileVector {
    pub fn nonzeros(&self) -> usize {
        self.values.iter().filter(|v| **v != 0.0).count()
    }
}

/// Per-million frequencies of the profile's own top words, aligned to
/// `features`; every other feature is 0.
pub fn profile_vector(profile: &TopProfile, features: &FeatureSet) -> ProfileVector {
    let top: HashMap<&str, f64> = profile
        .entries
        .iter()
        .map(|e| (e.word.as_str(), e.per_million))
        .collect();
    let values = features
        .words
        .iter()
        .map(|w| top.get(w.as_str()).copied().unwrap_or(0.0))
        .collect();
    ProfileVector {
        corpus_name: profile.corpus_name.clone(),
        values,
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `(u·v / (|u||v|))^p`, clamped to [0, 1].
pub fn cosine_pow(u: &[f64], v: &[f64], p: i32) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::Config(format!(
            "vector lengths differ: {} vs {}",
            u.len(),
            v.len()
        )));
    }
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 {
        return Err(Error::EmptyProfile("first vector is zero".into()));
    }
    if nv == 0.0 {
        return Err(Error::EmptyProfile("second vector is zero".into()));
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let cos = (dot / (nu * nv)).clamp(0.0, 1.0);
    Ok(cos.powi(p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    pub names: Vec<String>,
    pub power: i32,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    /// Build from a full row-major square matrix.
    pub fn from_rows(names: Vec<String>, power: i32, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = names.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Config(format!("matrix is not {n}x{n}")));
        }
        Ok(SimilarityMatrix {
            names,
            power,
            values: rows.into_iter().flatten().collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.values[i * n..(i + 1) * n]
    }

    /// Mean similarity of corpus `i` to every other corpus.
    pub fn row_average(&self, i: usize) -> f64 {
        let n = self.len();
        let sum: f64 = (0..n).filter(|&j| j != i).map(|j| self.get(i, j)).sum();
        sum / (n - 1) as f64
    }

    /// Mean over all off-diagonal unordered pairs.
    pub fn global_average(&self) -> f64 {
        let n = self.len();
        let mut sum = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                sum += self.get(i, j);
            }
        }
        sum / (n * (n - 1) / 2) as f64
    }

    /// Corpus names by ascending row average (most distinctive first);
    /// equal averages ordered by name.
    pub fn uniqueness_ranking(&self) -> Vec<(String, f64)> {
        let mut v: Vec<(String, f64)> = (0..self.len())
            .map(|i| (self.names[i].clone(), self.row_average(i)))
            .collect();
        v.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        v
    }

    /// Header row and column of corpus names, values at full precision.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec!["corpus".to_string()];
        header.extend(self.names.iter().cloned());
        wr.write_record(&header)?;
        for i in 0..self.len() {
            let mut rec = vec![self.names[i].clone()];
            rec.extend(self.row(i).iter().map(|v| format!("{v:?}")));
            wr.write_record(&rec)?;
        }
        wr.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(r: R, power: i32) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let names: Vec<String> = rd.headers()?.iter().skip(1).map(String::from).collect();
        let mut rows = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .skip(1)
                .map(|v| v.parse::<f64>().map_err(|e| Error::Config(format!("matrix value {v:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::from_rows(names, power, rows)
    }

    /// `rank,corpus,average` CSV of the uniqueness ranking.
    pub fn write_ranking_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["rank", "corpus", "average"])?;
        for (i, (name, avg)) in self.uniqueness_ranking().into_iter().enumerate() {
            wr.write_record([(i + 1).to_string(), name, format!("{avg:?}")])?;
        }
        wr.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    /// Complete weighted graph in DOT. Edges carry `distance = 1 - similarity`;
    /// nodes carry their row average as `avg`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph similarity {\n");
        for i in 0..self.len() {
            let _ = writeln!(
                out,
                "  {} [avg={:.6}];",
                dot_id(&self.names[i]),
                self.row_average(i)
            );
        }
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let s = self.get(i, j);
                let _ = writeln!(
                    out,
                    "  {} -- {} [distance={:.6}, similarity={:.6}];",
                    dot_id(&self.names[i]),
                    dot_id(&self.names[j]),
                    1.0 - s,
                    s
                );
            }
        }
        out.push_str("}\n");
        out
    }

    /// Matrix rounded to two decimals with an average row, for terminals.
    pub fn human_report(&self) -> String {
        let n = self.len();
        let w = self.names.iter().map(|s| s.chars().count()).max().unwrap_or(0).max(7);
        let mut out = String::new();
        let _ = write!(out, "{:w$}", "", w = w);
        for name in &self.names {
            let _ = write!(out, " {:>w$}", name, w = w);
        }
        out.push('\n');
        for i in 0..n {
            let _ = write!(out, "{:w$}", self.names[i], w = w);
            for j in 0..n {
                if i == j {
                    let _ = write!(out, " {:>w$}", "", w = w);
                } else {
                    let _ = write!(out, " {:>w$.2}", self.get(i, j), w = w);
                }
            }
            out.push('\n');
        }
        let _ = write!(out, "{:w$}", "Average", w = w);
        for i in 0..n {
            let _ = write!(out, " {:>w$.2}", self.row_average(i), w = w);
        }
        out.push('\n');
        let _ = writeln!(out, "global average: {:.2}", self.global_average());
        out
    }
}

fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Pairwise powered cosine similarities. The diagonal is 1.
pub fn similarity_matrix(vectors: &[ProfileVector], power: i32) -> Result<SimilarityMatrix> {
    let n = vectors.len();
    if n < 2 {
        return Err(Error::TooFewCorpora(n));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let sims = pairs
        .par_iter()
        .map(|&(i, j)| {
            cosine_pow(&vectors[i].values, &vectors[j].values, power).map_err(|e| match e {
                Error::EmptyProfile(_) => {
                    let empty = if norm(&vectors[i].values) == 0.0 { i } else { j };
                    Error::EmptyProfile(vectors[empty].corpus_name.clone())
                }
                other => other,
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = 1.0;
    }
    for (&(i, j), s) in pairs.iter().zip(sims) {
        values[i * n + j] = s;
        values[j * n + i] = s;
    }
    Ok(SimilarityMatrix {
        names: vectors.iter().map(|v| v.corpus_name.clone()).collect(),
        power,
        values,
    })
}

/// Union, vectors and matrix from a set of top-K profiles.
pub fn compare_profiles(profiles: &[TopProfile], power: i32) -> Result<(FeatureSet, SimilarityMatrix)> {
    let features = feature_union(profiles.iter().map(|p| p.words()));
    let vectors: Vec<ProfileVector> = profiles.iter().map(|p| profile_vector(p, &features)).collect();
    let m = similarity_matrix(&vectors, power)?;
    Ok((features, m))
}
