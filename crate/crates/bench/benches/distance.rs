use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use phylo_bench::tree_pair;
use phylo_core::{
    cophenetic_vector, interleaving_distance, parse_newick, phtree_distance_closed_form,
    serialize, to_phylo, HeightConvention, LcaIndex, NodeId, PhTreePoset,
};
use std::hint::black_box;

fn lca(c: &mut Criterion) {
    let mut group = c.benchmark_group("lca");
    for n in [1_000usize, 10_000] {
        let (a, _) = tree_pair(n, 1);
        group.bench_with_input(BenchmarkId::new("build", n), &a, |b, t| {
            b.iter(|| LcaIndex::build(black_box(t.tree())))
        });
        let idx = LcaIndex::build(a.tree());
        let leaves: Vec<NodeId> = a.labels().to_vec();
        group.throughput(Throughput::Elements(leaves.len() as u64));
        group.bench_with_input(BenchmarkId::new("join_row", n), &leaves, |b, leaves| {
            b.iter(|| {
                let first = leaves[0];
                leaves.iter().map(|&l| idx.join(first, l).index()).sum::<usize>()
            })
        });
    }
    group.finish();
}

fn cophenetic(c: &mut Criterion) {
    let mut group = c.benchmark_group("closed_form");
    group.sample_size(10);
    for n in [500usize, 1_000, 2_000, 4_000] {
        let (a, b) = tree_pair(n, 2);
        group.throughput(Throughput::Elements((n * (n + 1) / 2) as u64));
        group.bench_with_input(BenchmarkId::new("vector", n), &a, |bench, t| {
            let idx = LcaIndex::build(t.tree());
            bench.iter(|| cophenetic_vector(black_box(t), &idx))
        });
        group.bench_with_input(BenchmarkId::new("distance", n), &(a, b), |bench, (a, b)| {
            bench.iter(|| phtree_distance_closed_form(black_box(a), black_box(b)).unwrap())
        });
    }
    group.finish();
}

fn bisection(c: &mut Criterion) {
    let (a, b) = tree_pair(8, 3);
    c.bench_function("bisection_8_leaves", |bench| {
        bench.iter(|| interleaving_distance(&PhTreePoset, &a, &b, 1e-9, 200.0).unwrap())
    });
}

fn newick(c: &mut Criterion) {
    let (a, _) = tree_pair(5_000, 4);
    let text = serialize(&a);
    let mut group = c.benchmark_group("newick");
    group.throughput(Throughput::Bytes(text.len() as u64));
    group.bench_function("parse_5000", |b| {
        b.iter(|| {
            let trees = parse_newick(black_box(&text)).unwrap();
            to_phylo(&trees[0], HeightConvention::ExplicitHeights).unwrap()
        })
    });
    group.bench_function("serialize_5000", |b| b.iter(|| serialize(black_box(&a))));
    group.finish();
}

criterion_group!(benches, lca, cophenetic, bisection, newick);
criterion_main!(benches);
