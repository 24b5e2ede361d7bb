use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::hint::black_box;

use kmer_pinv::pinv::{materialize_w_with, PinvOperator};
use kmer_pinv::spectra::build_system_with;
use kmer_pinv::{AlphabetProfile, Execution, WordSpace};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn materialize(c: &mut Criterion) {
    let p = AlphabetProfile::new(vec![3, 3, 3, 3]).unwrap();
    let mut g = c.benchmark_group("materialize_w b=3 l=4 k=2");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| materialize_w_with(black_box(&p), 2, exec).unwrap())
        });
    }
    g.finish();
}

fn spectrum(c: &mut Criterion) {
    let p = AlphabetProfile::uniform(4, 6).unwrap();
    let mut g = c.benchmark_group("build_system b=4 l=6 k=3");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| build_system_with(black_box(&p), 3, exec).unwrap())
        });
    }
    g.finish();
}

fn apply(c: &mut Criterion) {
    let p = AlphabetProfile::uniform(2, 12).unwrap();
    let k = 2;
    let rows = WordSpace::gapped(&p, k).unwrap().len();
    let counts: Vec<BigRational> = (0..rows)
        .map(|i| BigRational::from_integer(BigInt::from((i * 37) % 11)))
        .collect();
    let mut g = c.benchmark_group("apply_w b=2 l=12 k=2");
    g.sample_size(10);
    for (name, exec) in MODES {
        let op = PinvOperator::with_execution(&p, k, exec).unwrap();
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| op.apply_w(black_box(&counts)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, materialize, spectrum, apply);
criterion_main!(benches);
