use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use refgraph_core::conjecture::{find_injection, SearchConfig};
use refgraph_core::construction::yablo_truncation;
use refgraph_core::logic::dnf::{negate_dnf, Dnf, Literal};
use refgraph_core::semantics::{models_of, node_model_expression, Polarity};

fn models(c: &mut Criterion) {
    let mut group = c.benchmark_group("models_of");
    for n in [8usize, 12, 16] {
        let g = yablo_truncation(n).unwrap();
        let x0 = "x0".into();
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| models_of(g, &x0, Polarity::Neg).unwrap())
        });
    }
    group.finish();
}

fn expressions(c: &mut Criterion) {
    let g = yablo_truncation(10).unwrap();
    let x0 = "x0".into();
    c.bench_function("node_model_expression/10", |b| b.iter(|| node_model_expression(&g, &x0).unwrap()));
}

fn injection(c: &mut Criterion) {
    let mut group = c.benchmark_group("find_injection");
    for (size, n) in [(5usize, 3usize), (6, 4)] {
        let target = yablo_truncation(size).unwrap().to_bare();
        group.bench_with_input(BenchmarkId::new(format!("truncation{size}"), n), &target, |b, t| {
            b.iter(|| find_injection(t, n, SearchConfig::default()).unwrap())
        });
    }
    group.finish();
}

/// `(a0 ∧ ¬b0) ∨ ... ∨ (ak ∧ ¬bk)`: negation yields 2^k conjuncts.
fn product_dnf(k: usize) -> Dnf {
    Dnf::from_conjuncts((0..k).map(|i| {
        [
            format!("a{i}").parse::<Literal>().unwrap(),
            format!("!b{i}").parse::<Literal>().unwrap(),
        ]
    }))
}

fn negation(c: &mut Criterion) {
    let mut group = c.benchmark_group("negate_dnf");
    for k in [4usize, 8, 12] {
        let d = product_dnf(k);
        group.bench_with_input(BenchmarkId::from_parameter(k), &d, |b, d| b.iter(|| negate_dnf(d).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, models, expressions, injection, negation);
criterion_main!(benches);
