use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use newsmine_bench::synthetic_corpus;
use newsmine_core::associate::{derive_rules, find_associations, mine_itemsets};
use newsmine_core::cloud::layout_cloud;
use newsmine_core::cluster::{agglomerate, term_distances};
use newsmine_core::matrix::{build_tdm, remove_sparse_terms, term_frequencies};
use newsmine_core::preprocess::preprocess_corpus;
use newsmine_core::{CloudConfig, Linkage, PreprocessConfig, TermDocumentMatrix};

fn tdm(n: usize) -> TermDocumentMatrix {
    let corpus = synthetic_corpus(n, 7);
    build_tdm(&preprocess_corpus(&corpus, &PreprocessConfig::default()).unwrap()).unwrap()
}

fn preprocess(c: &mut Criterion) {
    let mut group = c.benchmark_group("preprocess");
    for n in [326, 5_000] {
        let corpus = synthetic_corpus(n, 7);
        let cfg = PreprocessConfig::default();
        group.bench_with_input(BenchmarkId::new("tokenize+tdm", n), &corpus, |b, corpus| {
            b.iter(|| build_tdm(&preprocess_corpus(black_box(corpus), &cfg).unwrap()).unwrap())
        });
    }
    group.finish();
}

fn associations(c: &mut Criterion) {
    let mut group = c.benchmark_group("associate");
    for n in [326, 5_000] {
        let m = tdm(n);
        group.bench_with_input(BenchmarkId::new("find_associations", n), &m, |b, m| {
            b.iter(|| find_associations(black_box(m), "child", 0.25).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("apriori+rules", n), &m, |b, m| {
            b.iter(|| derive_rules(&mine_itemsets(black_box(m), 0.05).unwrap(), 0.5).unwrap())
        });
    }
    group.finish();
}

fn clustering(c: &mut Criterion) {
    let mut group = c.benchmark_group("cluster");
    let m = remove_sparse_terms(&tdm(2_000), 0.99).unwrap();
    let dist = term_distances(&m).unwrap();
    for linkage in Linkage::ALL {
        group.bench_function(BenchmarkId::new(linkage.to_string(), dist.len()), |b| {
            b.iter(|| agglomerate(black_box(&dist), linkage).unwrap())
        });
    }
    group.finish();
}

fn cloud(c: &mut Criterion) {
    let stats = term_frequencies(&tdm(5_000));
    let mut group = c.benchmark_group("cloud");
    for words in [50, 200] {
        let cfg = CloudConfig {
            max_words: words,
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::new("layout", words), &cfg, |b, cfg| {
            b.iter(|| layout_cloud(black_box(&stats), cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, preprocess, associations, clustering, cloud);
criterion_main!(benches);
