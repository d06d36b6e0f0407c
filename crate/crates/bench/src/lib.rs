//! Synthetic corpora for benchmarks.
//!
//! Word ids are drawn from a Zipf-like distribution over a fixed vocabulary
//! so that n-gram and frequency statistics resemble running text. A share of
//! documents is built from splices of earlier documents to exercise the
//! duplicate path.

use corpkit::corpus::Document;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Generator {
    rng: ChaCha8Rng,
    vocab: Vec<String>,
    cdf: Vec<f64>,
    recent: Vec<String>,
    next_id: u64,
    dup_share: f64,
}

impl Generator {
    pub fn new(seed: u64, vocab_size: usize, dup_share: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vocab = (0..vocab_size).map(|_| syllables(&mut rng)).collect();
        let mut acc = 0.0;
        let cdf = (1..=vocab_size)
            .map(|r| {
                acc += 1.0 / r as f64;
                acc
            })
            .collect::<Vec<_>>();
        let total = acc;
        Generator {
            rng,
            vocab,
            cdf: cdf.into_iter().map(|c| c / total).collect(),
            recent: Vec::new(),
            next_id: 0,
            dup_share,
        }
    }

    fn word(&mut self) -> &str {
        let u: f64 = self.rng.gen();
        let i = self.cdf.partition_point(|&c| c < u).min(self.vocab.len() - 1);
        &self.vocab[i]
    }

    /// A fresh text of `words` words.
    pub fn text(&mut self, words: usize) -> String {
        let mut s = String::with_capacity(words * 7);
        for i in 0..words {
            if i > 0 {
                s.push(if i % 17 == 0 { '\n' } else { ' ' });
            }
            let w = self.word().to_string();
            s.push_str(&w);
        }
        s
    }

    pub fn document(&mut self, words: usize) -> Document {
        let id = format!("d{}", self.next_id);
        self.next_id += 1;
        let text = if !self.recent.is_empty() && self.rng.gen_bool(self.dup_share) {
            let src = self.recent[self.rng.gen_range(0..self.recent.len())].clone();
            let cut = src.len() / 10;
            let tail = self.text(words / 10);
            format!("{} {tail}", &src[..floor_char(&src, src.len() - cut)])
        } else {
            self.text(words)
        };
        if self.recent.len() < 64 {
            self.recent.push(text.clone());
        } else {
            let i = self.rng.gen_range(0..64);
            self.recent[i] = text.clone();
        }
        Document::new(id, text).with_source("synthetic")
    }

    /// Documents of 50..2000 words until about `bytes` of text.
    pub fn corpus(&mut self, bytes: usize) -> Vec<Document> {
        let mut out = Vec::new();
        let mut total = 0;
        while total < bytes {
            let n = self.rng.gen_range(50..2000);
            let d = self.document(n);
            total += d.text.len();
            out.push(d);
        }
        out
    }
}

fn floor_char(s: &str, mut i: usize) -> usize {
    while !s.is_char_boundary(i) {
        i -= 1;
    }
    i
}

fn syllables(rng: &mut ChaCha8Rng) -> String {
    const ONSET: [&str; 16] = ["b", "c", "č", "d", "đ", "g", "j", "k", "l", "m", "n", "p", "r", "s", "š", "v"];
    const NUCLEUS: [&str; 6] = ["a", "e", "i", "o", "u", "ije"];
    let n = rng.gen_range(1..=4);
    (0..n)
        .map(|_| format!("{}{}", ONSET[rng.gen_range(0..16)], NUCLEUS[rng.gen_range(0..6)]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_sized() {
        let a = Generator::new(7, 5000, 0.2).corpus(100_000);
        let b = Generator::new(7, 5000, 0.2).corpus(100_000);
        assert_eq!(a, b);
        assert!(a.iter().map(|d| d.text.len()).sum::<usize>() >= 100_000);
    }
}
