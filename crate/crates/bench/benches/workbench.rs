use std::hint::black_box;
use std::path::Path;

use criterion::{criterion_group, criterion_main, Criterion};

use repfree_bench::{interleaving_system, match_system, sim_pair};
use repfree_core::lts::{explore, explore_with_universe, is_visible_lts, ExplorationBounds};
use repfree_core::sim::sim_omega;
use repfree_core::sos::{transitions, Universe};
use repfree_core::surface::{parse_unchecked, pretty};
use repfree_core::witness::run_corpus;

fn bench_transitions(c: &mut Criterion) {
    let (term, profile) = interleaving_system();
    c.bench_function("transitions/ccs interleaving", |b| {
        b.iter(|| transitions(black_box(&term), &profile).unwrap())
    });
    let (term, profile) = match_system();
    c.bench_function("transitions/pi match context", |b| {
        b.iter(|| transitions(black_box(&term), &profile).unwrap())
    });
}

fn bench_explore(c: &mut Criterion) {
    let bounds = ExplorationBounds::default();
    let (term, profile) = interleaving_system();
    c.bench_function("explore/ccs interleaving", |b| {
        b.iter(|| explore(black_box(&term), &profile, &bounds).unwrap())
    });
    let (term, profile) = match_system();
    c.bench_function("explore+visible/pi match context", |b| {
        b.iter(|| {
            let lts = explore(black_box(&term), &profile, &bounds).unwrap();
            is_visible_lts(&lts)
        })
    });
}

fn bench_sim(c: &mut Criterion) {
    let bounds = ExplorationBounds::default();
    let (q, p, profile) = sim_pair();
    let uni = Universe::for_terms(&[&q, &p]);
    let lq = explore_with_universe(&q, &profile, &bounds, &uni).unwrap();
    let lp = explore_with_universe(&p, &profile, &bounds, &uni).unwrap();
    c.bench_function("sim_omega/ccs pair", |b| {
        b.iter(|| sim_omega(black_box(&lq), black_box(&lp)).unwrap())
    });
}

fn bench_surface(c: &mut Criterion) {
    let src = "((a.0 + {a}:b.'c.0) | 'b.0 | (new x)(x?(w).[w=b] y!<c> | x!<b>))\\{a,b}";
    c.bench_function("parse/mixed term", |b| {
        b.iter(|| parse_unchecked(black_box(src)).unwrap())
    });
    let term = parse_unchecked(src).unwrap();
    c.bench_function("pretty/mixed term", |b| b.iter(|| pretty(black_box(&term))));
}

fn bench_corpus(c: &mut Criterion) {
    let dir = Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus"));
    c.bench_function("corpus/verify all witnesses", |b| {
        b.iter(|| {
            let summary = run_corpus(black_box(dir), None);
            assert!(summary.all_matched());
            summary
        })
    });
}

criterion_group!(
    benches,
    bench_transitions,
    bench_explore,
    bench_sim,
    bench_surface,
    bench_corpus
);
criterion_main!(benches);
