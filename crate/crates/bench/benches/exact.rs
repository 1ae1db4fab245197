use std::hint::black_box;

use cardguess::limits::{convergence_distance, RegimeSpec};
use cardguess::moments::factorial_moment_w;
use cardguess::oracles::{enumerate_decks, DEFAULT_ENUMERATION_CAP};
use cardguess::simulate::{simulate_many, SimulationConfig};
use cardguess::{joint_pmf_wt, marginal_w, DeckComposition};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn deck(m1: u32, m2: u32) -> DeckComposition {
    DeckComposition::new(m1, m2).expect("valid deck")
}

fn exact_laws(c: &mut Criterion) {
    let mut group = c.benchmark_group("joint_pmf_wt");
    for m in [20u32, 60, 120] {
        group.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, &m| {
            b.iter(|| joint_pmf_wt(black_box(&deck(m, m - 5))))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("marginal_w");
    for m in [100u32, 1000, 4000] {
        group.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, &m| {
            b.iter(|| marginal_w(black_box(&deck(m, m))))
        });
    }
    group.finish();
}

fn moments(c: &mut Criterion) {
    let d = deck(10_000, 10_000);
    c.bench_function("factorial_moment_w m=1e4 s=3", |b| {
        b.iter(|| factorial_moment_w(black_box(&d), 3).unwrap())
    });
}

fn enumeration(c: &mut Criterion) {
    let d = deck(8, 8);
    c.bench_function("enumerate_decks (8,8)", |b| {
        b.iter(|| enumerate_decks(black_box(&d), DEFAULT_ENUMERATION_CAP).unwrap())
    });
}

fn limits(c: &mut Criterion) {
    let d = deck(6400, 6400);
    c.bench_function("convergence_distance small-d m=6400", |b| {
        b.iter(|| convergence_distance(black_box(&d), &RegimeSpec::WNearDiagonalSmallD).unwrap())
    });
}

fn simulation(c: &mut Criterion) {
    let config = SimulationConfig::new(deck(50, 40), 100_000, 1);
    c.bench_function("simulate_many (50,40) 1e5 trials", |b| {
        b.iter(|| simulate_many(black_box(&config)).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = exact_laws, moments, enumeration, limits, simulation
}
criterion_main!(benches);
