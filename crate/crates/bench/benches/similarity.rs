use criterion::{black_box, criterion_group, criterion_main, Criterion};

use corpkit::freq::{frequency_table, TopProfile};
use corpkit::similarity::compare_profiles;
use corpkit::token::tokenize;
use corpkit_bench::Generator;

fn profiles(n: usize, words: usize, k: usize) -> Vec<TopProfile> {
    (0..n)
        .map(|i| {
            let text = Generator::new(100 + i as u64, 20_000, 0.0).text(words);
            frequency_table(&format!("c{i}"), &tokenize(&text)).top_profile(k).unwrap()
        })
        .collect()
}

fn frequency(c: &mut Criterion) {
    let tokens = tokenize(&Generator::new(3, 50_000, 0.0).text(1_000_000));
    c.bench_function("frequency_table_1m", |b| {
        b.iter(|| frequency_table("x", black_box(&tokens)).top_profile(1000).unwrap())
    });
}

fn matrix(c: &mut Criterion) {
    let ps = profiles(10, 200_000, 1000);
    c.bench_function("compare_10x1000", |b| b.iter(|| compare_profiles(black_box(&ps), 10).unwrap()));
}

criterion_group!(benches, frequency, matrix);
criterion_main!(benches);
