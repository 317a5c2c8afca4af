// Temporary development probe: SCL throughput, rough p_c location, and
// quantizer distortion for both F1 removal directions.

use std::time::Instant;
use wzkey_core::channel::{sample_bsc, BscParam, SeedSpec};
use wzkey_core::gf2::BitVector;
use wzkey_core::polar::{
    assemble_u, construct_reliabilities, polar_transform, quantize, scl_decode, LlrVector,
    PolarCodePair,
};

fn measure_pb(code: &PolarCodePair, p: f64, trials: u64, seed: u64) -> (f64, f64) {
    let ch = BscParam::new(p).unwrap();
    let frozen = BitVector::zeros(code.m1() + code.m2());
    let t0 = Instant::now();
    let mut errors = 0u64;
    for t in 0..trials {
        let s = BitVector::random(code.message_len(), &SeedSpec::new(seed, 2 * t));
        let u = assemble_u(
            code,
            &BitVector::zeros(code.m1()),
            &BitVector::zeros(code.m2()),
            &s,
        )
        .unwrap();
        let x = polar_transform(&u).unwrap();
        let y = sample_bsc(&x, ch, &SeedSpec::new(seed, 2 * t + 1));
        let llr = LlrVector::from_hard_bsc(&y, ch);
        let out = scl_decode(&llr, code, &frozen, 8).unwrap();
        if out.u_hat.select(code.key_indices()) != s {
            errors += 1;
        }
    }
    let dt = t0.elapsed().as_secs_f64();
    (errors as f64 / trials as f64, dt / trials as f64)
}

fn measure_distortion(
    code: &PolarCodePair,
    q: f64,
    trials: u64,
    seed: u64,
) -> (f64, f64) {
    let qd = BscParam::new(q).unwrap();
    let v = BitVector::zeros(code.m1());
    let t0 = Instant::now();
    let mut total = 0u64;
    for t in 0..trials {
        let x = BitVector::random(code.n(), &SeedSpec::new(seed, t));
        let out = quantize(&x, code, &v, qd, 8).unwrap();
        total += (out.distortion * code.n() as f64).round() as u64;
    }
    let dt = t0.elapsed().as_secs_f64();
    (
        total as f64 / (trials as f64 * code.n() as f64),
        dt / trials as f64,
    )
}

fn main() {
    let n = 1024usize;
    let key = 128usize;
    let order = construct_reliabilities(n, BscParam::new(0.1819).unwrap()).unwrap();
    let code = PolarCodePair::from_ordering(n, order.clone(), key).unwrap();

    println!("== decode-C timing and P_B sweep (n=1024, rate 128/1024, SCL8) ==");
    for p in [0.17, 0.18, 0.19, 0.20, 0.21, 0.22] {
        let (pb, per) = measure_pb(&code, p, 2000, 1000 + (p * 1e4) as u64);
        println!("p={p:.3}  P_B={pb:.4}  {:.2} ms/decode", per * 1e3);
    }

    println!("== quantizer distortion at n-m1=778, q_design=0.0456 ==");
    // F = least reliable 896 (first entries of `order`). Removal candidates
    // ordered by reliability within F.
    let f = &order[..n - key];
    let keep = n - 778; // |F1| = 246
    // Direction A (spec text): remove least reliable first -> F1 = most
    // reliable 246 indices of F = last 246 entries of `order` restricted to F.
    let f1_a: Vec<u32> = f[f.len() - keep..].to_vec();
    // Direction B: remove most reliable first -> F1 = least reliable 246.
    let f1_b: Vec<u32> = f[..keep].to_vec();

    let code_a = code.with_inner(f1_a).unwrap();
    let code_b = code.with_inner(f1_b).unwrap();
    let (da, ta) = measure_distortion(&code_a, 0.0456, 800, 77);
    println!("remove-least-reliable-first: E[q] = {da:.4}  ({:.2} ms/quantize)", ta * 1e3);
    let (db, tb) = measure_distortion(&code_b, 0.0456, 800, 77);
    println!("remove-most-reliable-first:  E[q] = {db:.4}  ({:.2} ms/quantize)", tb * 1e3);
}
