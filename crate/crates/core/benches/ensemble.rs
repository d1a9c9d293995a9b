use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ringlab::par;
use ringlab::qmaps::{diagonalize, kicked_rotor_matrix, KickedRotorParams};
use ringlab::sampler::{run, run_chain, SamplerConfig};
use ringlab::stats::{r2_estimate, BinSpec, DensitySource};
use ringlab::Potential;

fn chain_config(n: usize) -> SamplerConfig {
    let mut cfg = SamplerConfig::new(Potential::quartic(2.0), n, 1);
    cfg.burn_sweeps = 20;
    cfg.sample_sweeps = 40;
    cfg.thin = 10;
    cfg
}

fn chains(c: &mut Criterion) {
    let mut group = c.benchmark_group("chains");
    group.sample_size(10);
    for n in [100usize, 300] {
        let cfg = chain_config(n);
        group.bench_with_input(BenchmarkId::new("parallel", n), &cfg, |b, cfg| {
            b.iter(|| par::map_indexed(4, |i| run_chain(cfg, i as u64).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &cfg, |b, cfg| {
            b.iter(|| par::sequential::map_indexed(4, |i| run_chain(cfg, i as u64).unwrap()))
        });
    }
    group.finish();
}

fn histograms(c: &mut Criterion) {
    let mut cfg = chain_config(400);
    cfg.chains = 2;
    cfg.sample_sweeps = 80;
    let spectra = run(&cfg).unwrap();
    let density = DensitySource::analytic(&cfg.potential, cfg.n).unwrap();
    let bins = BinSpec::default();
    let mut group = c.benchmark_group("r2_histograms");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| par::map_slice(&spectra, |s| r2_estimate(std::slice::from_ref(s), &density, bins).unwrap()))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| par::sequential::map_slice(&spectra, |s| r2_estimate(std::slice::from_ref(s), &density, bins).unwrap()))
    });
    group.finish();
}

fn diagonalization(c: &mut Criterion) {
    let base = KickedRotorParams::new(101).with_alpha(1e-3);
    let member = |j: usize| {
        let prm = KickedRotorParams { kappa: base.kappa + j as f64, ..base };
        diagonalize(&kicked_rotor_matrix(&prm).unwrap(), "kicked-rotor", j as u64, vec![]).unwrap()
    };
    let mut group = c.benchmark_group("kicked_rotor_members");
    group.sample_size(10);
    group.bench_function("parallel", |b| b.iter(|| black_box(par::map_indexed(8, member))));
    group.bench_function("sequential", |b| b.iter(|| black_box(par::sequential::map_indexed(8, member))));
    group.finish();
}

criterion_group!(benches, chains, histograms, diagonalization);
criterion_main!(benches);
