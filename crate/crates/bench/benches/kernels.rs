use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use pzeta_bench::{carlitz, point_ideal};
use pzeta_core::drinfeld::{build_hayes_module, exp_coeffs, lattice_sums};
use pzeta_core::shtuka::reconstruct_dual_shtuka;
use pzeta_core::special::{build_omega, SpecialContext};
use pzeta_core::zeta::zeta_full;

fn zeta(c: &mut Criterion) {
    let a = carlitz(3);
    let p = point_ideal();
    c.bench_function("zeta_full q=3 N=128", |b| b.iter(|| zeta_full(black_box(&a), 128)));
    c.bench_function("zeta_full point N=128", |b| b.iter(|| zeta_full(black_box(&p), 128)));
}

fn shtuka(c: &mut Criterion) {
    let p = point_ideal();
    c.bench_function("reconstruct point N=128", |b| b.iter(|| reconstruct_dual_shtuka(black_box(&p), 128).unwrap()));
}

fn drinfeld(c: &mut Criterion) {
    let p = point_ideal();
    let ds = reconstruct_dual_shtuka(&p, 112).unwrap();
    let gens = p.curve().generators();
    c.bench_function("hayes module point N=96", |b| b.iter(|| build_hayes_module(black_box(&ds), &gens, 112).unwrap()));
    let m = build_hayes_module(&ds, &gens, 112).unwrap();
    c.bench_function("exp coefficients point k=8", |b| b.iter(|| exp_coeffs(black_box(&m), 8, 104).unwrap()));
    c.bench_function("lattice sums point k=2", |b| b.iter(|| lattice_sums(black_box(&p), 2, 96).unwrap()));
}

fn special(c: &mut Criterion) {
    let p = point_ideal();
    let ctx = SpecialContext::new(&p, 96).unwrap();
    c.bench_function("omega point N=96", |b| b.iter(|| build_omega(black_box(&ctx.df.f), 96).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = zeta, shtuka, drinfeld, special
}
criterion_main!(benches);
