use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use lagdelta::campaign::{run_campaign, CampaignConfig};
use lagdelta::immersion::lemma1_roundtrip;
use lagdelta::quadratic::{build_m, critical_c, ThresholdCase};
use lagdelta::{delta_coordinate_oracle, delta_invariant, AmbientConstant, OptimizerOptions};
use lagdelta_bench::fixture;

fn oracle(c: &mut Criterion) {
    for (n, blocks) in [(4, vec![2, 2]), (6, vec![2, 2]), (8, vec![3, 3])] {
        let (h, p) = fixture(n, &blocks, 1);
        c.bench_function(&format!("oracle n={n} {}", p.label()), |b| {
            b.iter(|| delta_coordinate_oracle(black_box(&h), AmbientConstant::FLAT, &p).unwrap())
        });
    }
}

fn optimizer(c: &mut Criterion) {
    let opts = OptimizerOptions {
        restarts: 4,
        ..Default::default()
    };
    for (n, blocks) in [(4, vec![2]), (6, vec![2, 3])] {
        let (h, p) = fixture(n, &blocks, 2);
        c.bench_function(&format!("optimizer n={n} {}", p.label()), |b| {
            b.iter(|| delta_invariant(black_box(&h), AmbientConstant::FLAT, &p, &opts).unwrap())
        });
    }
}

fn quadratic(c: &mut Criterion) {
    let (_, p) = fixture(12, &[2, 3, 4], 0);
    let crit = critical_c(&p, 0, ThresholdCase::StatementI).unwrap();
    c.bench_function("build_m n=12 (2,3,4)", |b| {
        b.iter(|| build_m(black_box(&p), 0, crit).unwrap())
    });
}

fn immersion(c: &mut Criterion) {
    let (h, _) = fixture(6, &[2], 3);
    let x = [0.1; 6];
    c.bench_function("lemma1 roundtrip n=6", |b| {
        b.iter(|| lemma1_roundtrip(black_box(&h), &x).unwrap())
    });
}

fn campaign(c: &mut Criterion) {
    let cfg = CampaignConfig {
        samples: 1000,
        seed: 42,
        ..Default::default()
    };
    c.bench_function("campaign 1000 samples", |b| b.iter(|| run_campaign(black_box(&cfg)).unwrap()));
}

criterion_group!(benches, oracle, optimizer, quadratic, immersion, campaign);
criterion_main!(benches);
