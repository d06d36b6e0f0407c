//! Order-dependent fuzzy deduplication over word n-grams.
//!
//! Documents are visited in stream order. Each one is fingerprinted as the
//! set of hashes of its word n-grams ("shingles") and compared against a
//! single index of shingles from every document kept so far. A document
//! whose duplicated fraction is strictly greater than the threshold is
//! dropped; otherwise it is kept and its shingles join the index. The index
//! holds hashes only, never document text.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::token::{mix64, token_hashes};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DedupConfig {
    /// n-gram length in words.
    pub ngram: usize,
    /// Documents with a duplication ratio strictly above this are dropped.
    pub threshold: f64,
    /// Width of the stored shingle hashes, 1..=64.
    pub hash_bits: u32,
}

impl Default for DedupConfig {
    fn default() -> Self {
        DedupConfig {
            ngram: 6,
            threshold: 0.75,
            hash_bits: 64,
        }
    }
}

impl DedupConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ngram == 0 {
            return Err(Error::Config("dedup ngram must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::Config(format!(
                "dedup threshold {} outside [0, 1]",
                self.threshold
            )));
        }
        if !(1..=64).contains(&self.hash_bits) {
            return Err(Error::Config(format!(
                "hash_bits {} outside 1..=64",
                self.hash_bits
            )));
        }
        Ok(())
    }

    fn mask(&self) -> u64 {
        if self.hash_bits >= 64 {
            u64::MAX
        } else {
            (1u64 << self.hash_bits) - 1
        }
    }
}

/// Global set of shingle hashes seen in kept documents.
///
/// Open addressing with linear probing over a power-of-two table of raw
/// hashes; 0 marks an empty slot and the hash 0 itself is tracked apart.
/// A lookup reports the slot where a missing hash would go, so keeping a
/// document costs no second probe of the (cache-cold) table.
pub struct ShingleIndex {
    slots: Vec<u64>,
    len: usize,
    has_zero: bool,
    shift: u32,
}

const MIN_SLOTS_LOG2: u32 = 10;

impl Default for ShingleIndex {
    fn default() -> Self {
        ShingleIndex {
            slots: vec![0; 1 << MIN_SLOTS_LOG2],
            len: 0,
            has_zero: false,
            shift: 64 - MIN_SLOTS_LOG2,
        }
    }
}

impl ShingleIndex {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    fn home(&self, h: u64) -> usize {
        // multiplicative spread: masked hashes have empty high bits
        (h.wrapping_mul(0x9e37_79b9_7f4a_7c15) >> self.shift) as usize
    }

    /// Slot holding `h` (true), or the empty slot ending its probe run.
    /// `h` must be nonzero.
    #[inline]
    fn probe_from(&self, h: u64, mut i: usize) -> (usize, bool) {
        let mask = self.slots.len() - 1;
        loop {
            match self.slots[i] {
                0 => return (i, false),
                s if s == h => return (i, true),
                _ => i = (i + 1) & mask,
            }
        }
    }

    #[inline]
    fn prefetch(&self, h: u64) {
        #[cfg(target_arch = "x86_64")]
        {
            let i = self.home(h);
            // SAFETY: `home` is always < slots.len(); prefetch has no
            // architectural effect
            unsafe {
                use std::arch::x86_64::{_mm_prefetch, _MM_HINT_T0};
                _mm_prefetch::<_MM_HINT_T0>(self.slots.as_ptr().add(i) as *const i8);
            }
        }
        #[cfg(not(target_arch = "x86_64"))]
        let _ = h;
    }

    /// Grow so that `extra` more hashes fit under a 1/2 load factor.
    fn reserve(&mut self, extra: usize) {
        let mut cap = self.slots.len();
        while (self.len + extra) * 2 > cap {
            cap *= 2;
        }
        if cap == self.slots.len() {
            return;
        }
        let old = std::mem::replace(&mut self.slots, zeroed_table(cap));
        self.shift = 64 - cap.trailing_zeros();
        for h in old.into_iter().filter(|&h| h != 0) {
            let (i, _) = self.probe_from(h, self.home(h));
            self.slots[i] = h;
        }
    }

    pub fn insert(&mut self, h: u64) -> bool {
        if h == 0 {
            return !std::mem::replace(&mut self.has_zero, true);
        }
        self.reserve(1);
        let (i, found) = self.probe_from(h, self.home(h));
        if !found {
            self.slots[i] = h;
            self.len += 1;
        }
        !found
    }

    pub fn contains(&self, h: u64) -> bool {
        if h == 0 {
            self.has_zero
        } else {
            self.probe_from(h, self.home(h)).1
        }
    }

    pub fn len(&self) -> usize {
        self.len + self.has_zero as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Heap footprint in bytes.
    pub fn heap_bytes(&self) -> usize {
        self.slots.capacity() * std::mem::size_of::<u64>()
    }

    /// Look up every hash of `distinct` (no repeats), recording in `pending`
    /// the hashes that are missing with the slot each would take. Returns
    /// the number found.
    fn lookup_all(&self, distinct: &[u64], pending: &mut Vec<(u64, usize)>) -> usize {
        const AHEAD: usize = 16;
        pending.clear();
        let mut hits = 0;
        for (k, &h) in distinct.iter().enumerate() {
            if let Some(&next) = distinct.get(k + AHEAD) {
                self.prefetch(next);
            }
            if h == 0 {
                hits += self.has_zero as usize;
                if !self.has_zero {
                    pending.push((0, 0));
                }
                continue;
            }
            let (i, found) = self.probe_from(h, self.home(h));
            if found {
                hits += 1;
            } else {
                pending.push((h, i));
            }
        }
        hits
    }

    /// Insert the misses of the last `lookup_all`, made with no resize since.
    fn insert_pending(&mut self, pending: &[(u64, usize)]) {
        for &(h, i) in pending {
            if h == 0 {
                self.has_zero = true;
                continue;
            }
            // an earlier hash of the same batch may have taken the slot; the
            // run before it still holds neither `h` nor a gap
            let (i, _) = self.probe_from(h, i);
            self.slots[i] = h;
            self.len += 1;
        }
    }
}

/// Zeroed table; large ones are backed by huge pages where the kernel
/// allows it, since lookups land on random pages.
fn zeroed_table(cap: usize) -> Vec<u64> {
    let v = vec![0u64; cap];
    #[cfg(target_os = "linux")]
    {
        const HUGE: usize = 2 << 20;
        let bytes = cap * std::mem::size_of::<u64>();
        if bytes >= 2 * HUGE {
            let start = v.as_ptr() as usize;
            let aligned = (start + HUGE - 1) & !(HUGE - 1);
            let len = (start + bytes - aligned) & !(HUGE - 1);
            // SAFETY: the range lies inside the allocation; madvise only
            // changes paging policy, and failure is harmless
            unsafe {
                libc::madvise(aligned as *mut libc::c_void, len, libc::MADV_HUGEPAGE);
            }
        }
    }
    v
}

#[inline]
fn window_hash(window: &[u64], mask: u64) -> u64 {
    let mut h: u64 = 0x9e37_79b9_7f4a_7c15;
    for &t in window {
        h = (h.rotate_left(23) ^ t).wrapping_mul(0xff51_afd7_ed55_8ccd);
    }
    mix64(h) & mask
}

/// Scratch set for dropping repeated shingles within one document.
#[derive(Default)]
struct LocalSet {
    slots: Vec<u64>,
}

impl LocalSet {
    /// Append the distinct values of `items` to `out`, in first-seen order.
    fn distinct_into(&mut self, items: impl ExactSizeIterator<Item = u64>, out: &mut Vec<u64>) {
        let cap = (items.len() * 2).next_power_of_two().max(16);
        self.slots.clear();
        self.slots.resize(cap, 0);
        let mask = cap - 1;
        let shift = 64 - cap.trailing_zeros();
        let mut zero_seen = false;
        for h in items {
            if h == 0 {
                if !std::mem::replace(&mut zero_seen, true) {
                    out.push(0);
                }
                continue;
            }
            let mut i = (h.wrapping_mul(0x9e37_79b9_7f4a_7c15) >> shift) as usize;
            loop {
                match self.slots[i] {
                    0 => {
                        self.slots[i] = h;
                        out.push(h);
                        break;
                    }
                    s if s == h => break,
                    _ => i = (i + 1) & mask,
                }
            }
        }
    }
}

/// Fill `out` with the distinct shingle hashes of `text`, in first-seen order.
fn shingle_hashes_into(text: &str, n: usize, mask: u64, toks: &mut Vec<u64>, local: &mut LocalSet, out: &mut Vec<u64>) {
    toks.clear();
    out.clear();
    token_hashes(text, toks);
    if toks.len() < n {
        return;
    }
    local.distinct_into(toks.windows(n).map(|w| window_hash(w, mask)), out);
}

/// Set of hashes of every n-token window of the document.
pub fn shingles(doc: &Document, n: usize) -> HashSet<u64> {
    assert!(n >= 1, "n-gram length must be >= 1");
    let mut toks = Vec::new();
    let mut out = Vec::new();
    shingle_hashes_into(&doc.text, n, u64::MAX, &mut toks, &mut LocalSet::default(), &mut out);
    out.into_iter().collect()
}

/// Fraction of the document's distinct shingles already in `index`.
/// Documents without shingles score 0.
pub fn duplication_ratio(doc: &Document, index: &ShingleIndex, n: usize) -> f64 {
    let sh: Vec<u64> = shingles(doc, n).into_iter().collect();
    if sh.is_empty() {
        return 0.0;
    }
    let hit = sh.iter().filter(|&&h| index.contains(h)).count();
    hit as f64 / sh.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub kept: bool,
    pub ratio: f64,
    pub shingles: usize,
    pub words: usize,
}

/// Incremental deduplicator: feed documents one at a time, in order.
pub struct Deduplicator {
    config: DedupConfig,
    mask: u64,
    index: ShingleIndex,
    toks: Vec<u64>,
    local: LocalSet,
    hashes: Vec<u64>,
    pending: Vec<(u64, usize)>,
    report: ReportBuilder,
}

impl Deduplicator {
    pub fn new(config: DedupConfig) -> Result<Self> {
        config.validate()?;
        Ok(Deduplicator {
            mask: config.mask(),
            config,
            index: ShingleIndex::new(),
            toks: Vec::new(),
            local: LocalSet::default(),
            hashes: Vec::new(),
            pending: Vec::new(),
            report: ReportBuilder::default(),
        })
    }

    pub fn config(&self) -> &DedupConfig {
        &self.config
    }

    pub fn index(&self) -> &ShingleIndex {
        &self.index
    }

    /// Decide on `doc`, updating the index and the per-source tallies.
    pub fn process(&mut self, doc: &Document) -> Decision {
        shingle_hashes_into(
            &doc.text,
            self.config.ngram,
            self.mask,
            &mut self.toks,
            &mut self.local,
            &mut self.hashes,
        );
        let words = self.toks.len();
        // grow first so the slots recorded by the lookup stay valid
        self.index.reserve(self.hashes.len());
        let hits = self.index.lookup_all(&self.hashes, &mut self.pending);
        let ratio = if self.hashes.is_empty() {
            0.0
        } else {
            hits as f64 / self.hashes.len() as f64
        };
        let kept = !(ratio > self.config.threshold);
        if kept {
            self.index.insert_pending(&self.pending);
        }
        self.report.add(&doc.source, words as u64, kept);
        Decision {
            kept,
            ratio,
            shingles: self.hashes.len(),
            words,
        }
    }

    /// Register a source with no documents so it still gets a report row.
    pub fn declare_source(&mut self, source: &str) {
        self.report.row_mut(source);
    }

    pub fn finish(self) -> DedupReport {
        self.report.build()
    }
}

/// Deduplicate `docs` in order, handing every kept document to `on_kept`.
pub fn dedup_stream<I, F>(docs: I, config: DedupConfig, mut on_kept: F) -> Result<DedupReport>
where
    I: IntoIterator<Item = Result<Document>>,
    F: FnMut(Document) -> Result<()>,
{
    let mut d = Deduplicator::new(config)?;
    for doc in docs {
        let doc = doc?;
        if d.process(&doc).kept {
            on_kept(doc)?;
        }
    }
    Ok(d.finish())
}

/// In-memory convenience wrapper around [`dedup_stream`].
pub fn dedup_docs(docs: Vec<Document>, config: DedupConfig) -> Result<(Vec<Document>, DedupReport)> {
    let mut kept = Vec::new();
    let report = dedup_stream(docs.into_iter().map(Ok), config, |d| {
        kept.push(d);
        Ok(())
    })?;
    Ok((kept, report))
}

#[derive(Default)]
struct ReportBuilder {
    rows: Vec<SourceRow>,
    by_name: HashMap<String, usize>,
}

impl ReportBuilder {
    fn row_mut(&mut self, source: &str) -> &mut SourceRow {
        let i = match self.by_name.get(source) {
            Some(&i) => i,
            None => {
                self.rows.push(SourceRow {
                    source: source.to_string(),
                    words_before: 0,
                    words_after: 0,
                });
                self.by_name.insert(source.to_string(), self.rows.len() - 1);
                self.rows.len() - 1
            }
        };
        &mut self.rows[i]
    }

    fn add(&mut self, source: &str, words: u64, kept: bool) {
        let row = self.row_mut(source);
        row.words_before += words;
        if kept {
            row.words_after += words;
        }
    }

    fn build(self) -> DedupReport {
        DedupReport { rows: self.rows }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceRow {
    pub source: String,
    pub words_before: u64,
    pub words_after: u64,
}

/// Per-source word counts before and after deduplication, in the order
/// sources were first seen.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DedupReport {
    pub rows: Vec<SourceRow>,
}

impl DedupReport {
    pub fn from_rows(rows: Vec<SourceRow>) -> Self {
        DedupReport { rows }
    }

    pub fn total_before(&self) -> u64 {
        self.rows.iter().map(|r| r.words_before).sum()
    }

    pub fn total_after(&self) -> u64 {
        self.rows.iter().map(|r| r.words_after).sum()
    }

    /// Share of `row` in the final corpus, in percent.
    pub fn share_percent(&self, row: &SourceRow) -> f64 {
        let total = self.total_after();
        if total == 0 {
            0.0
        } else {
            row.words_after as f64 * 100.0 / total as f64
        }
    }

    pub fn source_order(&self) -> Vec<&str> {
        self.rows.iter().map(|r| r.source.as_str()).collect()
    }

    /// CSV with columns `source,words_before,words_after,share_percent`,
    /// one row per source followed by a `Total` row.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["source", "words_before", "words_after", "share_percent"])?;
        for r in &self.rows {
            wr.write_record([
                r.source.clone(),
                r.words_before.to_string(),
                r.words_after.to_string(),
                self.share_percent(r).to_string(),
            ])?;
        }
        let total_share = if self.total_after() == 0 { 0.0 } else { 100.0 };
        wr.write_record([
            "Total".to_string(),
            self.total_before().to_string(),
            self.total_after().to_string(),
            total_share.to_string(),
        ])?;
        wr.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    /// Parse a report written by [`DedupReport::write_csv`].
    pub fn read_csv<R: std::io::Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let mut rows = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            if &rec[0] == "Total" {
                continue;
            }
            let parse = |i: usize| {
                rec[i]
                    .parse::<u64>()
                    .map_err(|e| Error::Config(format!("report column {i}: {e}")))
            };
            rows.push(SourceRow {
                source: rec[0].to_string(),
                words_before: parse(1)?,
                words_after: parse(2)?,
            });
        }
        Ok(DedupReport { rows })
    }
}

fn thousands(n: u64) -> String {
    let s = n.to_string();
    let mut out = String::with_capacity(s.len() + s.len() / 3);
    for (i, c) in s.chars().enumerate() {
        if i > 0 && (s.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    out
}

/// Human-readable share table: input order rows, then the totals row.
pub fn share_report(report: &DedupReport) -> String {
    let mut rows: Vec<[String; 4]> = vec![[
        "Name".into(),
        "Size before".into(),
        "Size after".into(),
        "Share".into(),
    ]];
    for r in &report.rows {
        rows.push([
            r.source.clone(),
            thousands(r.words_before),
            thousands(r.words_after),
            format!("{:.2}%", report.share_percent(r)),
        ]);
    }
    let total_share = if report.total_after() == 0 { 0.0 } else { 100.0 };
    rows.push([
        "Total".into(),
        thousands(report.total_before()),
        thousands(report.total_after()),
        format!("{total_share:.2}%"),
    ]);
    let mut widths = [0usize; 4];
    for r in &rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    for (i, r) in rows.iter().enumerate() {
        if i == rows.len() - 1 {
            let _ = writeln!(out, "{}", "-".repeat(widths.iter().sum::<usize>() + 9));
        }
        let _ = write!(out, "{:<w$}", r[0], w = widths[0]);
        for (c, w) in r[1..].iter().zip(&widths[1..]) {
            let _ = write!(out, "   {:>w$}", c, w = *w);
        }
        out.push('\n');
    }
    out
}
