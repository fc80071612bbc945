use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use riesz_bench::{corpus_sample, pair};
use riesz_core::constructions::CenteringConfig;
use riesz_core::density::{shape_asymmetry, AsymmetryConfig, DeficitEvaluator};
use riesz_core::spectral::eigenvalue_closed_form;
use riesz_core::{center, competitor, gap_constant, ShapeQuadrature, SpectralParams};

fn spectral(c: &mut Criterion) {
    let mut g = c.benchmark_group("spectral");
    for dim in [2, 4, 6] {
        let p = SpectralParams::new(dim, 0.5, 200).unwrap();
        g.bench_with_input(BenchmarkId::new("closed_form_l200", dim), &p, |b, p| {
            b.iter(|| eigenvalue_closed_form(black_box(p), 200))
        });
        g.bench_with_input(BenchmarkId::new("gap_constant", dim), &p, |b, p| {
            b.iter(|| gap_constant(black_box(p)).unwrap())
        });
    }
    g.finish();
}

fn geometry(c: &mut Criterion) {
    let mut g = c.benchmark_group("geometry");
    for dim in [2, 3, 6] {
        let p = pair(dim);
        g.bench_with_input(BenchmarkId::new("phi", dim), &p, |b, p| {
            b.iter(|| p.phi(black_box(0.73)))
        });
    }
    g.finish();
}

fn functionals(c: &mut Criterion) {
    let mut g = c.benchmark_group("functionals");
    g.sample_size(10);
    for dim in [2, 3] {
        // Entry 1 is a perturbed ball.
        let (shape, _) = corpus_sample(dim, 1);
        let eval = DeficitEvaluator::new(&pair(dim), &ShapeQuadrature::for_dim(dim)).unwrap();
        g.bench_with_input(BenchmarkId::new("deficit", dim), &shape, |b, s| {
            b.iter(|| eval.deficit(black_box(s)).unwrap())
        });
        let cfg = AsymmetryConfig {
            random_starts: 2,
            max_evaluations: 600,
            ..AsymmetryConfig::default()
        };
        g.bench_with_input(BenchmarkId::new("asymmetry", dim), &shape, |b, s| {
            b.iter(|| shape_asymmetry(black_box(s), 8, &cfg).unwrap())
        });
    }
    g.finish();
}

fn constructions(c: &mut Criterion) {
    let mut g = c.benchmark_group("constructions");
    for dim in [2, 3] {
        let (_, rho) = corpus_sample(dim, 1);
        g.bench_with_input(BenchmarkId::new("competitor", dim), &rho, |b, r| {
            b.iter(|| competitor(black_box(r), 0.2).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("center", dim), &rho, |b, r| {
            b.iter(|| center(black_box(r), &CenteringConfig::default()).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, spectral, geometry, functionals, constructions);
criterion_main!(benches);
