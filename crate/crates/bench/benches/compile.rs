use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use tscg_bench::synthetic;
use tscg_core::{compile, PipelineConfig, Profile, TokenCounter};

fn bench_compile(c: &mut Criterion) {
    let catalogs = synthetic().expect("fixtures load");
    let gpt2 = TokenCounter::gpt2();
    // tokenizer load is a one-off; keep it out of the timings
    gpt2.count("warm up");

    let mut group = c.benchmark_group("compile");
    for (name, cat) in &catalogs {
        group.throughput(Throughput::Elements(cat.len() as u64));
        for profile in [Profile::Conservative, Profile::Balanced, Profile::Aggressive] {
            let cfg = PipelineConfig::for_profile(profile);
            group.bench_with_input(BenchmarkId::new(profile.tag(), name), cat, |b, cat| {
                b.iter(|| compile(cat, &cfg, gpt2).expect("compiles"))
            });
        }
    }
    group.finish();
}

fn bench_count(c: &mut Criterion) {
    let catalogs = synthetic().expect("fixtures load");
    let gpt2 = TokenCounter::gpt2();
    let mut group = c.benchmark_group("count");
    for (name, cat) in &catalogs {
        let src = cat.source_json();
        group.throughput(Throughput::Bytes(src.len() as u64));
        group.bench_with_input(BenchmarkId::from_parameter(name), src, |b, src| {
            b.iter(|| gpt2.count(src))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_compile, bench_count);
criterion_main!(benches);
