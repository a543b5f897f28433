use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use beliefmine_core::augment::{augment_batch, AugmentConfig};
use beliefmine_core::community::{build_graph, layout, louvain_best_of, GraphOptions, LayoutConfig, LouvainConfig};
use beliefmine_core::parsemedian::{distance_matrix, DistanceMode};
use beliefmine_core::sentiment::ValenceLexicon;
use beliefmine_core::synth::{fixture_corpus, fixture_embeddings, margin_parse_corpus};
use beliefmine_core::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn distances(c: &mut Criterion) {
    let strings: Vec<String> = margin_parse_corpus(100, 1).into_iter().map(|(p, _)| p.text).collect();
    let mut g = c.benchmark_group("distance_matrix_200");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| distance_matrix(black_box(&strings), DistanceMode::Char, exec))
        });
    }
    g.finish();
}

fn augmentation(c: &mut Criterion) {
    let table = fixture_embeddings(1);
    let lexicon = ValenceLexicon::bundled();
    let items: Vec<_> = fixture_corpus(1)
        .into_iter()
        .filter_map(|t| t.belief_label().map(|l| (t, l)))
        .collect();
    let mut g = c.benchmark_group("augment_batch");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| augment_batch(black_box(&items), AugmentConfig::default(), &table, &lexicon, exec).unwrap())
        });
    }
    g.finish();
}

fn communities(c: &mut Criterion) {
    let graph = build_graph(&fixture_corpus(1), GraphOptions::default());
    let seeds: Vec<u64> = (0..16).collect();
    let mut g = c.benchmark_group("louvain_16_seeds");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| louvain_best_of(black_box(&graph), &seeds, &LouvainConfig::default(), exec).unwrap())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("layout_50_iterations");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| layout(black_box(&graph), &LayoutConfig::default(), exec))
        });
    }
    g.finish();
}

criterion_group!(benches, distances, augmentation, communities);
criterion_main!(benches);
