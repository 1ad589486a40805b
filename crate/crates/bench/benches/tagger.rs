use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use gradtag_core::synthetic::{SyntheticConfig, SyntheticCorpus};
use gradtag_core::tagger::{build_constraints, tag_document, train, train_on, TrainConfig};

fn bench_inference(c: &mut Criterion) {
    let corpus = SyntheticCorpus::generate(&SyntheticConfig::default()).unwrap();
    let model = train(&corpus.train, &TrainConfig::default()).unwrap();
    let words = &corpus.words;
    let mut group = c.benchmark_group("inference");
    for length in [10, 100, 1000] {
        let forms: Vec<&str> = (0..length).map(|i| words[(i * 17) % words.len()].as_str()).collect();
        let observations = model.observe(forms.iter().copied());
        group.throughput(Throughput::Elements(length as u64));
        group.bench_with_input(BenchmarkId::new("forward_backward", length), &length, |bench, _| {
            bench.iter(|| model.posteriors(black_box(&observations), None).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("viterbi", length), &length, |bench, _| {
            bench.iter(|| model.viterbi(black_box(&observations), None).unwrap())
        });
    }
    group.finish();

    let document = &corpus.test.documents[0];
    c.bench_function("tag_document", |bench| {
        bench.iter(|| tag_document(&model, black_box(document), 0.5).unwrap())
    });
}

fn bench_training(c: &mut Criterion) {
    let corpus = SyntheticCorpus::generate(&SyntheticConfig::default()).unwrap();
    let data = build_constraints(&corpus.train).unwrap();
    let mut group = c.benchmark_group("training");
    group.sample_size(10);
    for iterations in [1, 10] {
        let config = TrainConfig {
            max_iterations: iterations,
            tolerance: f64::MIN_POSITIVE,
            ..TrainConfig::default()
        };
        group.bench_with_input(
            BenchmarkId::new("em_iterations", iterations),
            &config,
            |bench, config| bench.iter(|| train_on(black_box(&data), config).unwrap()),
        );
    }
    group.finish();
}

criterion_group!(benches, bench_inference, bench_training);
criterion_main!(benches);
