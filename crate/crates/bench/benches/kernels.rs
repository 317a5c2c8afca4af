//! Benchmarks for the hot kernels: GF(2) vector ops, the polar transform,
//! list decoding and quantization at the production block lengths, the
//! coset-leader table build, and the scalar bound evaluations.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use wzkey_core::bounds::{rcu_bound_bsc, sphere_packing_ratio};
use wzkey_core::channel::{sample_bsc, SeedSpec};
use wzkey_core::linear::NestedLinearCode;
use wzkey_core::polar::{
    construct_reliabilities, polar_transform, quantize, scl_decode, LlrVector, PolarCodePair,
};
use wzkey_core::{mat_vec, xor, BitVector, BscParam, Gf2Matrix};

fn bench_gf2(c: &mut Criterion) {
    let a = BitVector::random(4096, &SeedSpec::new(1, 0));
    let b = BitVector::random(4096, &SeedSpec::new(1, 1));
    c.bench_function("gf2/xor_4096", |bench| {
        bench.iter(|| xor(black_box(&a), black_box(&b)).unwrap())
    });
    let m = Gf2Matrix::random(64, 1024, &SeedSpec::new(1, 2));
    let v = BitVector::random(1024, &SeedSpec::new(1, 3));
    c.bench_function("gf2/syndrome_64x1024", |bench| {
        bench.iter(|| mat_vec(black_box(&v), black_box(&m), true).unwrap())
    });
}

fn bench_polar(c: &mut Criterion) {
    let u = BitVector::random(1024, &SeedSpec::new(2, 0));
    c.bench_function("polar/transform_1024", |bench| {
        bench.iter(|| polar_transform(black_box(&u)).unwrap())
    });

    let p = BscParam::new(0.1819).unwrap();
    let order = construct_reliabilities(1024, p).unwrap();
    let code = PolarCodePair::from_ordering(1024, order, 128).unwrap();
    let x = polar_transform(&BitVector::zeros(1024)).unwrap();
    let y = sample_bsc(&x, p, &SeedSpec::new(2, 1));
    let llr = LlrVector::from_hard_bsc(&y, p);
    let frozen = BitVector::zeros(code.m1());
    c.bench_function("polar/scl8_decode_1024", |bench| {
        bench.iter(|| scl_decode(black_box(&llr), &code, &frozen, 8).unwrap())
    });

    // Quantizer with a partially frozen inner code.
    let keep = code.frozen().len() - 500;
    let f1: Vec<u32> = code.frozen()[..keep].to_vec();
    let qcode = code.with_inner(f1).unwrap();
    let v = BitVector::zeros(qcode.m1());
    let src = BitVector::random(1024, &SeedSpec::new(2, 2));
    let q = BscParam::new(0.0456).unwrap();
    c.bench_function("polar/quantize_1024", |bench| {
        bench.iter(|| quantize(black_box(&src), &qcode, &v, q, 8).unwrap())
    });

    c.bench_function("polar/construct_reliabilities_2048", |bench| {
        bench.iter(|| construct_reliabilities(2048, p).unwrap())
    });
}

fn bench_linear(c: &mut Criterion) {
    c.bench_function("linear/build_nested_12_4_4", |bench| {
        bench.iter(|| NestedLinearCode::build(12, 4, 4, &SeedSpec::new(3, 0)).unwrap())
    });
    let code = NestedLinearCode::build(12, 4, 4, &SeedSpec::new(3, 0)).unwrap();
    let x = BitVector::random(12, &SeedSpec::new(3, 1));
    c.bench_function("linear/enroll_gs_12", |bench| {
        bench.iter(|| wzkey_core::linear::enroll_gs(black_box(&x), &code).unwrap())
    });
}

fn bench_bounds(c: &mut Criterion) {
    let p = BscParam::new(0.15).unwrap();
    c.bench_function("bounds/rcu_1024_128", |bench| {
        bench.iter(|| rcu_bound_bsc(1024, 128, black_box(p)).unwrap())
    });
    c.bench_function("bounds/sphere_packing_1024", |bench| {
        bench.iter(|| sphere_packing_ratio(1024, black_box(1e-6), p).unwrap())
    });
}

criterion_group!(benches, bench_gf2, bench_polar, bench_linear, bench_bounds);
criterion_main!(benches);
