//! Fixed-size excerpts and top-K word-frequency profiles.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::token::{tokenize, TokenStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExcerptStrategy {
    /// Documents in stream order.
    #[default]
    Head,
    /// Documents permuted with a seeded RNG, then taken in that order.
    /// Needs the whole corpus in memory.
    Shuffled { seed: u64 },
}

impl FromStr for ExcerptStrategy {
    type Err = String;

    /// `head`, `shuffled` (seed 0) or `shuffled:<seed>`.
    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            None if s == "head" => Ok(ExcerptStrategy::Head),
            None if s == "shuffled" => Ok(ExcerptStrategy::Shuffled { seed: 0 }),
            Some(("shuffled", seed)) => seed
                .parse()
                .map(|seed| ExcerptStrategy::Shuffled { seed })
                .map_err(|e| format!("bad seed {seed:?}: {e}")),
            _ => Err(format!("unknown strategy {s:?} (head, shuffled[:seed])")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExcerptSpec {
    pub size_words: usize,
    pub strategy: ExcerptStrategy,
    /// Return the whole corpus instead of failing when it is too small.
    pub allow_short: bool,
}

impl Default for ExcerptSpec {
    fn default() -> Self {
        ExcerptSpec {
            size_words: 1_000_000,
            strategy: ExcerptStrategy::Head,
            allow_short: false,
        }
    }
}

fn take_tokens<I>(docs: I, size: usize, allow_short: bool) -> Result<TokenStream>
where
    I: IntoIterator<Item = Result<Document>>,
{
    let mut out = TokenStream::with_capacity(size.min(1 << 24));
    for doc in docs {
        let doc = doc?;
        for tok in tokenize(&doc.text) {
            out.push(tok);
            if out.len() == size {
                return Ok(out);
            }
        }
    }
    if allow_short {
        Ok(out)
    } else {
        Err(Error::InsufficientTokens {
            available: out.len(),
            required: size,
        })
    }
}

/// Exactly `spec.size_words` tokens taken from the front of the (possibly
/// shuffled) document sequence; the last document used is truncated.
pub fn sample_excerpt<I>(docs: I, spec: &ExcerptSpec) -> Result<TokenStream>
where
    I: IntoIterator<Item = Result<Document>>,
{
    if spec.size_words == 0 {
        return Err(Error::Config("excerpt size must be >= 1".into()));
    }
    match spec.strategy {
        ExcerptStrategy::Head => take_tokens(docs, spec.size_words, spec.allow_short),
        ExcerptStrategy::Shuffled { seed } => {
            let mut all = docs.into_iter().collect::<Result<Vec<_>>>()?;
            all.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            take_tokens(all.into_iter().map(Ok), spec.size_words, spec.allow_short)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopEntry {
    pub word: String,
    pub count: u64,
    pub per_million: f64,
}

/// Word counts of one excerpt.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FrequencyProfile {
    pub corpus_name: String,
    pub total_tokens: u64,
    pub counts: HashMap<String, u64>,
}

/// Exact multiset counts of `tokens`.
pub fn frequency_table<'a>(
    corpus_name: impl Into<String>,
    tokens: impl IntoIterator<Item = &'a String>,
) -> FrequencyProfile {
    let mut counts: HashMap<String, u64> = HashMap::new();
    let mut total = 0;
    for t in tokens {
        total += 1;
        if let Some(c) = counts.get_mut(t.as_str()) {
            *c += 1;
        } else {
            counts.insert(t.clone(), 1);
        }
    }
    FrequencyProfile {
        corpus_name: corpus_name.into(),
        total_tokens: total,
        counts,
    }
}

impl FrequencyProfile {
    /// Words sorted by count descending, ties by word ascending.
    fn ranked(&self) -> Vec<(&str, u64)> {
        let mut v: Vec<(&str, u64)> = self.counts.iter().map(|(w, c)| (w.as_str(), *c)).collect();
        v.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v
    }

    /// The `k` most frequent words; ties at the cut resolved lexicographically.
    pub fn top_k(&self, k: usize) -> Vec<String> {
        self.ranked().into_iter().take(k).map(|(w, _)| w.to_string()).collect()
    }

    pub fn per_million(&self, word: &str) -> Result<f64> {
        if self.total_tokens == 0 {
            return Err(Error::EmptyProfile(self.corpus_name.clone()));
        }
        let c = self.counts.get(word).copied().unwrap_or(0);
        Ok(c as f64 * 1_000_000.0 / self.total_tokens as f64)
    }

    /// Top-`k` list with per-million frequencies.
    pub fn top_profile(&self, k: usize) -> Result<TopProfile> {
        if self.total_tokens == 0 {
            return Err(Error::EmptyProfile(self.corpus_name.clone()));
        }
        let scale = 1_000_000.0 / self.total_tokens as f64;
        let entries = self
            .ranked()
            .into_iter()
            .take(k)
            .map(|(w, c)| TopEntry {
                word: w.to_string(),
                count: c,
                per_million: c as f64 * scale,
            })
            .collect();
        Ok(TopProfile {
            corpus_name: self.corpus_name.clone(),
            entries,
        })
    }
}

/// A corpus reduced to its K most frequent words.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TopProfile {
    pub corpus_name: String,
    pub entries: Vec<TopEntry>,
}

impl TopProfile {
    pub fn words(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.word.clone()).collect()
    }

    /// Keep only the first `k` entries.
    pub fn truncate(&mut self, k: usize) {
        self.entries.truncate(k);
    }

    /// TSV with header `rank	word	count	per_million`. Frequencies are
    /// written at full precision so they read back bit-identical.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "rank\tword\tcount\tper_million")?;
        for (i, e) in self.entries.iter().enumerate() {
            writeln!(w, "{}\t{}\t{}\t{:?}", i + 1, e.word, e.count, e.per_million)?;
        }
        w.flush()
    }

    pub fn read_tsv<R: BufRead>(corpus_name: impl Into<String>, r: R) -> Result<Self> {
        let corpus_name = corpus_name.into();
        let bad = |line: usize, msg: String| Error::Config(format!("profile {corpus_name}: line {line}: {msg}"));
        let mut entries = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| bad(i + 1, e.to_string()))?;
            if i == 0 {
                if line.trim_end() != "rank\tword\tcount\tper_million" {
                    return Err(bad(1, "missing header rank\\tword\\tcount\\tper_million".into()));
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 4 {
                return Err(bad(i + 1, format!("expected 4 columns, got {}", cols.len())));
            }
            let rank: usize = cols[0].parse().map_err(|e| bad(i + 1, format!("rank: {e}")))?;
            if rank != entries.len() + 1 {
                return Err(bad(i + 1, format!("rank {rank} out of sequence")));
            }
            entries.push(TopEntry {
                word: cols[1].to_string(),
                count: cols[2].parse().map_err(|e| bad(i + 1, format!("count: {e}")))?,
                per_million: cols[3].parse().map_err(|e| bad(i + 1, format!("per_million: {e}")))?,
            });
        }
        Ok(TopProfile {
            corpus_name,
            entries,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn profile(pairs: &[(&str, u64)]) -> FrequencyProfile {
        let toks: Vec<String> = pairs
            .iter()
            .flat_map(|(w, c)| std::iter::repeat(w.to_string()).take(*c as usize))
            .collect();
        frequency_table("t", &toks)
    }

    fn doc_of(n: usize, tag: &str) -> Document {
        let text = (0..n).map(|i| format!("{tag}{i}")).collect::<Vec<_>>().join(" ");
        Document::new(tag, text)
    }

    #[test]
    fn counts() {
        let t: Vec<String> = ["a", "b", "a"].iter().map(|s| s.to_string()).collect();
        let p = frequency_table("x", &t);
        assert_eq!(p.total_tokens, 3);
        assert_eq!(p.counts["a"], 2);
        assert_eq!(p.counts["b"], 1);
        let e = frequency_table("x", &Vec::<String>::new());
        assert_eq!(e.total_tokens, 0);
        assert!(e.counts.is_empty());
    }

    #[test]
    fn top_k_ties() {
        assert_eq!(profile(&[("a", 5), ("b", 5), ("c", 1)]).top_k(2), ["a", "b"]);
        assert_eq!(profile(&[("b", 5), ("a", 5), ("c", 9)]).top_k(2), ["c", "a"]);
        assert_eq!(profile(&[("x", 1), ("y", 2), ("z", 3)]).top_k(1000).len(), 3);
    }

    #[test]
    fn per_million_values() {
        let mut p = FrequencyProfile { corpus_name: "x".into(), total_tokens: 1_000_000, counts: HashMap::new() };
        p.counts.insert("w".into(), 5);
        assert_eq!(p.per_million("w").unwrap(), 5.0);
        assert_eq!(p.per_million("absent").unwrap(), 0.0);
        p.total_tokens = 500_000;
        p.counts.insert("v".into(), 3);
        assert_eq!(p.per_million("v").unwrap(), 6.0);
        assert!(FrequencyProfile::default().per_million("w").is_err());
    }

    #[test]
    fn excerpt_exact_and_truncated() {
        let spec = ExcerptSpec { size_words: 1000, ..Default::default() };
        let one = sample_excerpt(vec![Ok(doc_of(1000, "a"))], &spec).unwrap();
        assert_eq!(one.len(), 1000);

        let two = sample_excerpt(vec![Ok(doc_of(600, "a")), Ok(doc_of(600, "b"))], &spec).unwrap();
        assert_eq!(two.len(), 1000);
        assert_eq!(two[599], "a599");
        assert_eq!(two[600], "b0");
        assert_eq!(two[999], "b399");
    }

    #[test]
    fn excerpt_too_short() {
        let spec = ExcerptSpec { size_words: 1_000_000, ..Default::default() };
        let err = sample_excerpt(vec![Ok(doc_of(500_000, "a"))], &spec).unwrap_err();
        assert_eq!(err.to_string(), "corpus has 500000 < 1000000 tokens");
        let short = ExcerptSpec { allow_short: true, ..spec };
        assert_eq!(sample_excerpt(vec![Ok(doc_of(10, "a"))], &short).unwrap().len(), 10);
    }

    #[test]
    fn shuffled_is_seeded() {
        let docs = || (0..20).map(|i| Ok(doc_of(10, &format!("d{i}x")))).collect::<Vec<_>>();
        let spec = ExcerptSpec { size_words: 50, strategy: ExcerptStrategy::Shuffled { seed: 7 }, allow_short: false };
        let a = sample_excerpt(docs(), &spec).unwrap();
        let b = sample_excerpt(docs(), &spec).unwrap();
        assert_eq!(a, b);
        let head = sample_excerpt(docs(), &ExcerptSpec { strategy: ExcerptStrategy::Head, ..spec }).unwrap();
        assert_ne!(a, head);
        assert_eq!("shuffled:7".parse::<ExcerptStrategy>().unwrap(), spec.strategy);
    }

    #[test]
    fn tsv_roundtrip() {
        let p = profile(&[("a", 3), ("b", 2), ("c", 2)]).top_profile(2).unwrap();
        let mut buf = Vec::new();
        p.write_tsv(&mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("rank\tword\tcount\tper_million\n1\ta\t3\t"));
        let back = TopProfile::read_tsv("t", &buf[..]).unwrap();
        assert_eq!(back, p);
        assert!(TopProfile::read_tsv("t", &b"1\ta\t3\t1.0\n"[..]).is_err());
    }

    proptest! {
        #[test]
        fn per_million_sums_to_a_million(words in proptest::collection::vec("[a-e]{1,2}", 1..200)) {
            let p = frequency_table("p", &words);
            let sum: f64 = p.counts.keys().map(|w| p.per_million(w).unwrap()).sum();
            prop_assert!((sum - 1e6).abs() <= 1e-6 * 1e6);
            prop_assert_eq!(p.counts.values().sum::<u64>(), p.total_tokens);
        }

        #[test]
        fn top_k_prefix_stable(words in proptest::collection::vec("[a-h]{1,2}", 1..200), k1 in 1usize..20, extra in 0usize..20) {
            let p = frequency_table("p", &words);
            let short = p.top_k(k1);
            let long = p.top_k(k1 + extra);
            prop_assert_eq!(&long[..short.len()], &short[..]);
        }
    }
}
