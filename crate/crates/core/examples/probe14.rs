// Temporary probe: (a) distortion anchors with pure Z-recursion orderings,
// (b) p_c ballparks at n=1024 and n=2048.

use wzkey_core::channel::{sample_bsc, BscParam, SeedSpec};
use wzkey_core::gf2::BitVector;
use wzkey_core::polar::{
    assemble_u, construct_reliabilities, polar_transform, quantize, scl_decode, LlrVector,
    PolarCodePair,
};

fn measure_pb(code: &PolarCodePair, p: f64, trials: u64, seed: u64) -> f64 {
    let ch = BscParam::new(p).unwrap();
    let frozen = BitVector::zeros(code.m1() + code.m2());
    let mut errors = 0u64;
    for t in 0..trials {
        let s = BitVector::random(code.message_len(), &SeedSpec::new(seed, 2 * t));
        let u = assemble_u(code, &BitVector::zeros(code.m1()), &BitVector::zeros(code.m2()), &s)
            .unwrap();
        let x = polar_transform(&u).unwrap();
        let y = sample_bsc(&x, ch, &SeedSpec::new(seed, 2 * t + 1));
        let llr = LlrVector::from_hard_bsc(&y, ch);
        let out = scl_decode(&llr, code, &frozen, 8).unwrap();
        if out.u_hat.select(code.key_indices()) != s {
            errors += 1;
        }
    }
    errors as f64 / trials as f64
}

fn distortion(code: &PolarCodePair, q: f64, trials: u64, seed: u64) -> f64 {
    let qd = BscParam::new(q).unwrap();
    let v = BitVector::zeros(code.m1());
    let mut total = 0u64;
    for t in 0..trials {
        let x = BitVector::random(code.n(), &SeedSpec::new(seed, t));
        let out = quantize(&x, code, &v, qd, 8).unwrap();
        total += (out.distortion * code.n() as f64).round() as u64;
    }
    total as f64 / (trials as f64 * code.n() as f64)
}

fn main() {
    for (n, nm1, q, pcs) in [
        (1024usize, 778usize, 0.0456, [0.19f64, 0.20, 0.21, 0.22]),
        (2048, 739, 0.1689, [0.28, 0.29, 0.30, 0.31]),
    ] {
        let design_p = if n == 1024 { 0.1819 } else { 0.2682 };
        let ord_pc = construct_reliabilities(n, BscParam::new(design_p).unwrap()).unwrap();
        let code = PolarCodePair::from_ordering(n, ord_pc.clone(), 128).unwrap();
        let f_set: std::collections::HashSet<u32> = code.frozen().iter().copied().collect();

        // F1 = least reliable (n - nm1) indices at design q, restricted to F.
        let ord_q = construct_reliabilities(n, BscParam::new(q).unwrap()).unwrap();
        let keep = n - nm1;
        let f1: Vec<u32> = ord_q.iter().copied().filter(|i| f_set.contains(i)).take(keep).collect();
        let code_q = code.with_inner(f1).unwrap();
        let d = distortion(&code_q, q, 1500, 77);
        println!("n={n}: distortion at n-m1={nm1} (Z ordering at q): {d:.4}");

        for p in pcs {
            let pb = measure_pb(&code, p, 10_000, 900 + (p * 1e4) as u64);
            println!("  n={n} p={p:.3}: P_B={pb:.5}");
        }
    }
}
