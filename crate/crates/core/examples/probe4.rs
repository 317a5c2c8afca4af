// Temporary probe: Monte-Carlo genie construction quality at n=1024:
// P_B sweep for extrapolating p_c, and distortion at n-m1=778.

use wzkey_core::channel::{sample_bsc, BscParam, SeedSpec};
use wzkey_core::gf2::BitVector;
use wzkey_core::polar::{
    assemble_u, bhattacharyya_parameters, polar_transform, quantize, scl_decode, LlrVector,
    PolarCodePair,
};

/// Genie SC pass with random true bits; counts per-channel decision errors.
fn genie_pass(llr: &[f64], u_true: &[u8], err: &mut [u32]) {
    fn f(a: f64, b: f64) -> f64 {
        let (aa, ab) = (a.abs(), b.abs());
        let base = if (a < 0.0) != (b < 0.0) { -aa.min(ab) } else { aa.min(ab) };
        let sum = aa + ab;
        let diff = (aa - ab).abs();
        let mut c = base;
        if sum < 30.0 { c += (-sum).exp().ln_1p(); }
        if diff < 30.0 { c -= (-diff).exp().ln_1p(); }
        c
    }
    // returns codeword of true bits
    fn rec(llr: &[f64], u_true: &[u8], err: &mut [u32], base: usize) -> Vec<u8> {
        let n = llr.len();
        if n == 1 {
            let dec = u8::from(llr[0] < 0.0);
            if dec != u_true[0] {
                err[base] += 1;
            }
            return vec![u_true[0]];
        }
        let half = n / 2;
        let fl: Vec<f64> = (0..half).map(|j| f(llr[j], llr[j + half])).collect();
        let ca = rec(&fl, &u_true[..half], err, base);
        let gl: Vec<f64> = (0..half)
            .map(|j| if ca[j] == 1 { llr[j + half] - llr[j] } else { llr[j + half] + llr[j] })
            .collect();
        let cb = rec(&gl, &u_true[half..], err, base + half);
        let mut cw: Vec<u8> = (0..half).map(|j| ca[j] ^ cb[j]).collect();
        cw.extend(cb);
        cw
    }
    rec(llr, u_true, err, 0);
}

fn mc_order(n: usize, design_p: f64, trials: u64, seed: u64) -> Vec<u32> {
    let ch = BscParam::new(design_p).unwrap();
    let mut err = vec![0u32; n];
    for t in 0..trials {
        let u = BitVector::random(n, &SeedSpec::new(seed, 2 * t));
        let ub: Vec<u8> = u.iter().map(u8::from).collect();
        let x = polar_transform(&u).unwrap();
        let y = sample_bsc(&x, ch, &SeedSpec::new(seed, 2 * t + 1));
        let llr = LlrVector::from_hard_bsc(&y, ch);
        genie_pass(&llr.0, &ub, &mut err);
    }
    let z = bhattacharyya_parameters(n, ch).unwrap();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&a, &b| {
        err[b as usize]
            .cmp(&err[a as usize])
            .then(z[b as usize].partial_cmp(&z[a as usize]).unwrap())
            .then(a.cmp(&b))
    });
    order
}

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

fn main() {
    let n = 1024usize;
    let t0 = std::time::Instant::now();
    let order = mc_order(n, 0.1819, 100_000, 4242);
    println!("mc construction took {:.1}s", t0.elapsed().as_secs_f64());
    let code = PolarCodePair::from_ordering(n, order.clone(), 128).unwrap();

    println!("== P_B sweep (mc construction, SCL8) ==");
    for p in [0.19, 0.20, 0.21, 0.215, 0.22, 0.225, 0.23] {
        let pb = measure_pb(&code, p, 4000, 1000 + (p * 1e4) as u64);
        println!("p={p:.3}  P_B={pb:.5}");
    }

    println!("== distortion at n-m1=778, most-reliable-first removal ==");
    let f = &order[..n - 128];
    let keep = n - 778;
    let f1: Vec<u32> = f[..keep].to_vec();
    let code_q = code.with_inner(f1).unwrap();
    let v = BitVector::zeros(code_q.m1());
    let qd = BscParam::new(0.0456).unwrap();
    let mut total = 0u64;
    let trials = 2000u64;
    for t in 0..trials {
        let x = BitVector::random(n, &SeedSpec::new(77, t));
        let out = quantize(&x, &code_q, &v, qd, 8).unwrap();
        total += (out.distortion * n as f64).round() as u64;
    }
    println!("E[q] = {:.4}", total as f64 / (trials as f64 * n as f64));
}
