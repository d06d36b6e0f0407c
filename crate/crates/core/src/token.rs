//! Word tokenizer shared by every counting and fingerprinting stage.
//!
//! A token is a maximal run of characters for which [`char::is_alphanumeric`]
//! holds, lowercased with [`char::to_lowercase`]. Cyrillic and Latin are kept
//! as they are; there is no transliteration. The same scanner drives string
//! tokenization, allocation-free counting and streaming token hashing, so the
//! three views always agree on token boundaries.

use std::ops::Deref;
use std::sync::OnceLock;

/// Ordered sequence of lowercase word tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenStream(Vec<String>);

impl TokenStream {
    pub fn new() -> Self {
        TokenStream(Vec::new())
    }

    pub fn with_capacity(n: usize) -> Self {
        TokenStream(Vec::with_capacity(n))
    }

    pub fn push(&mut self, token: String) {
        debug_assert!(!token.is_empty());
        self.0.push(token);
    }

    pub fn into_inner(self) -> Vec<String> {
        self.0
    }

    pub fn join(&self, sep: &str) -> String {
        self.0.join(sep)
    }
}

impl Deref for TokenStream {
    type Target = [String];

    fn deref(&self) -> &[String] {
        &self.0
    }
}

impl From<Vec<String>> for TokenStream {
    fn from(v: Vec<String>) -> Self {
        TokenStream(v)
    }
}

impl IntoIterator for TokenStream {
    type Item = String;
    type IntoIter = std::vec::IntoIter<String>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a TokenStream {
    type Item = &'a String;
    type IntoIter = std::slice::Iter<'a, String>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

trait Sink {
    fn byte(&mut self, b: u8);
    fn end(&mut self);

    #[inline]
    fn bytes(&mut self, bs: &[u8]) {
        for &b in bs {
            self.byte(b);
        }
    }
}

/// Class of each code point below U+0800 (one- and two-byte UTF-8), derived
/// once from the std predicates: `NOT_WORD`, `SLOW` (lowercases to several
/// chars or to a longer encoding), or the UTF-8 bytes of the lowercase char
/// as `len << 16 | b1 << 8 | b0`.
const NOT_WORD: u32 = u32::MAX;
const SLOW: u32 = u32::MAX - 1;

fn short_table() -> &'static [u32; 0x800] {
    static TABLE: OnceLock<Box<[u32; 0x800]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Box::new([NOT_WORD; 0x800]);
        for (cp, slot) in t.iter_mut().enumerate() {
            let Some(c) = char::from_u32(cp as u32) else { continue };
            if !c.is_alphanumeric() {
                continue;
            }
            let mut lower = c.to_lowercase();
            *slot = match (lower.next(), lower.next()) {
                (Some(l), None) if l.is_alphanumeric() && l.len_utf8() <= 2 => {
                    let mut buf = [0u8; 4];
                    let enc = l.encode_utf8(&mut buf).as_bytes();
                    (enc.len() as u32) << 16 | (buf[1] as u32) << 8 | buf[0] as u32
                }
                _ => SLOW,
            };
        }
        t
    })
}

#[inline]
fn scan<S: Sink>(text: &str, sink: &mut S) {
    let bytes = text.as_bytes();
    let table = short_table();
    let mut in_token = false;
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b < 0x80 {
            if b.is_ascii_alphanumeric() {
                sink.byte(b.to_ascii_lowercase());
                in_token = true;
            } else if in_token {
                sink.end();
                in_token = false;
            }
            i += 1;
            continue;
        }
        // i is always on a char boundary here
        let (class, width) = if b < 0xE0 {
            let cp = ((b as u32 & 0x1F) << 6) | (bytes[i + 1] as u32 & 0x3F);
            (table[cp as usize], 2)
        } else {
            (SLOW, 0)
        };
        match class {
            NOT_WORD => {
                if in_token {
                    sink.end();
                    in_token = false;
                }
                i += width;
            }
            SLOW => {
                let c = text[i..].chars().next().unwrap();
                if c.is_alphanumeric() {
                    let mut buf = [0u8; 4];
                    // 'İ' lowercases to 'i' + U+0307; drop the combining mark so
                    // tokens stay stable under re-tokenization
                    for lc in c.to_lowercase().filter(|lc| lc.is_alphanumeric()) {
                        sink.bytes(lc.encode_utf8(&mut buf).as_bytes());
                        in_token = true;
                    }
                } else if in_token {
                    sink.end();
                    in_token = false;
                }
                i += c.len_utf8();
            }
            lower => {
                sink.byte(lower as u8);
                if lower >> 16 == 2 {
                    sink.byte((lower >> 8) as u8);
                }
                in_token = true;
                i += width;
            }
        }
    }
    if in_token {
        sink.end();
    }
}

struct StringSink {
    cur: Vec<u8>,
    out: TokenStream,
}

impl Sink for StringSink {
    #[inline]
    fn byte(&mut self, b: u8) {
        self.cur.push(b);
    }

    fn end(&mut self) {
        // only whole lowercase chars are ever pushed
        let tok = String::from_utf8(std::mem::take(&mut self.cur)).expect("utf-8 token");
        self.out.push(tok);
    }
}

struct CountSink(usize);

impl Sink for CountSink {
    #[inline]
    fn byte(&mut self, _: u8) {}

    #[inline]
    fn end(&mut self) {
        self.0 += 1;
    }
}

/// Token hash state: bytes are packed eight at a time into a word, so the
/// per-byte work is a shift and an or; full words are folded in with one
/// multiply.
#[derive(Clone, Copy)]
struct WordHasher {
    h: u64,
    acc: u64,
    n: u32,
}

impl WordHasher {
    const SEED: u64 = 0xcbf2_9ce4_8422_2325;
    const K: u64 = 0x9fb2_1c65_1e98_df25;

    #[inline]
    fn new() -> Self {
        WordHasher { h: Self::SEED, acc: 0, n: 0 }
    }

    #[inline]
    fn byte(&mut self, b: u8) {
        self.acc |= (b as u64) << ((self.n & 7) * 8);
        self.n += 1;
        if self.n & 7 == 0 {
            self.h = (self.h ^ self.acc).wrapping_mul(Self::K).rotate_left(29);
            self.acc = 0;
        }
    }

    #[inline]
    fn finish(self) -> u64 {
        mix64((self.h ^ self.acc).wrapping_mul(Self::K) ^ self.n as u64)
    }
}

struct HashSink<'a> {
    h: WordHasher,
    out: &'a mut Vec<u64>,
}

impl Sink for HashSink<'_> {
    #[inline]
    fn byte(&mut self, b: u8) {
        self.h.byte(b);
    }

    #[inline]
    fn end(&mut self) {
        self.out.push(self.h.finish());
        self.h = WordHasher::new();
    }
}

/// splitmix64 finalizer.
#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Split `text` into lowercase letter/digit runs.
pub fn tokenize(text: &str) -> TokenStream {
    let mut sink = StringSink {
        cur: Vec::new(),
        out: TokenStream::new(),
    };
    scan(text, &mut sink);
    sink.out
}

/// Number of tokens `tokenize(text)` would produce, without allocating them.
pub fn count_tokens(text: &str) -> usize {
    let mut sink = CountSink(0);
    scan(text, &mut sink);
    sink.0
}

/// Hash of a single already-tokenized word.
pub fn hash_token(token: &str) -> u64 {
    let mut h = WordHasher::new();
    for &b in token.as_bytes() {
        h.byte(b);
    }
    h.finish()
}

/// Append the hash of every token of `text` to `out`.
///
/// Equivalent to `tokenize(text).iter().map(|t| hash_token(t))` but never
/// materializes the token strings.
pub fn token_hashes(text: &str, out: &mut Vec<u64>) {
    let mut sink = HashSink { h: WordHasher::new(), out };
    scan(text, &mut sink);
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s).into_inner()
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").is_empty());
        assert_eq!(count_tokens(""), 0);
    }

    #[test]
    fn punctuation_and_case() {
        assert_eq!(toks("Ko je, uslov?"), ["ko", "je", "uslov"]);
    }

    #[test]
    fn cyrillic_is_kept() {
        assert_eq!(toks("Уопште - da!"), ["уопште", "da"]);
    }

    #[test]
    fn diacritics_and_digits() {
        assert_eq!(toks("Što ŠTA 2024.godine"), ["što", "šta", "2024", "godine"]);
        assert_eq!(toks("  \n\t"), Vec::<String>::new());
    }

    proptest! {
        #[test]
        fn join_roundtrip(s in "\\PC{0,80}") {
            let t = tokenize(&s);
            prop_assert_eq!(tokenize(&t.join(" ")), t);
        }

        #[test]
        fn views_agree(s in "\\PC{0,80}") {
            let t = tokenize(&s);
            prop_assert_eq!(count_tokens(&s), t.len());
            prop_assert!(t.iter().all(|w| !w.is_empty() && w.chars().all(|c| !c.is_whitespace())));
            let mut hs = Vec::new();
            token_hashes(&s, &mut hs);
            let expected: Vec<u64> = t.iter().map(|w| hash_token(w)).collect();
            prop_assert_eq!(hs, expected);
        }
    }
}
