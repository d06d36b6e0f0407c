use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion, Throughput};

use corpkit::dedup::{DedupConfig, Deduplicator};
use corpkit::token::{token_hashes, tokenize};
use corpkit_bench::Generator;

fn tokenizer(c: &mut Criterion) {
    let text = Generator::new(1, 50_000, 0.0).text(200_000);
    let mut g = c.benchmark_group("tokenize");
    g.throughput(Throughput::Bytes(text.len() as u64));
    g.bench_function("strings", |b| b.iter(|| tokenize(black_box(&text)).len()));
    let mut out = Vec::new();
    g.bench_function("hashes", |b| {
        b.iter(|| {
            out.clear();
            token_hashes(black_box(&text), &mut out);
            out.len()
        })
    });
    g.finish();
}

fn dedup(c: &mut Criterion) {
    let docs = Generator::new(2, 50_000, 0.25).corpus(8 << 20);
    let bytes: usize = docs.iter().map(|d| d.text.len()).sum();
    let mut g = c.benchmark_group("dedup");
    g.sample_size(10);
    g.throughput(Throughput::Bytes(bytes as u64));
    g.bench_function("stream_8mb", |b| {
        b.iter_batched(
            || Deduplicator::new(DedupConfig::default()).unwrap(),
            |mut d| docs.iter().filter(|doc| d.process(doc).kept).count(),
            BatchSize::LargeInput,
        )
    });
    g.finish();
}

criterion_group!(benches, tokenizer, dedup);
criterion_main!(benches);
