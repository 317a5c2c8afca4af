// Temporary probe: controlled comparison of construction variants at n=1024.

use wzkey_core::channel::{sample_bsc, BscParam, SeedSpec};
use wzkey_core::gf2::BitVector;
use wzkey_core::polar::{
    assemble_u, bhattacharyya_parameters, construct_reliabilities, polar_transform, quantize,
    scl_decode, LlrVector, PolarCodePair,
};

fn f_exact(a: f64, b: f64) -> f64 {
    let (aa, ab) = (a.abs(), b.abs());
    let base = if (a < 0.0) != (b < 0.0) { -aa.min(ab) } else { aa.min(ab) };
    let sum = aa + ab;
    let diff = (aa - ab).abs();
    let mut c = base;
    if sum < 30.0 {
        c += (-sum).exp().ln_1p();
    }
    if diff < 30.0 {
        c -= (-diff).exp().ln_1p();
    }
    c
}

/// Genie SC pass; counts decision errors and exact-zero-LLR ties per leaf.
fn genie_pass(llr: &[f64], u_true: &[u8], err: &mut [u32], tie: &mut [u32]) {
    fn rec(llr: &[f64], u_true: &[u8], err: &mut [u32], tie: &mut [u32], base: usize) -> Vec<u8> {
        let n = llr.len();
        if n == 1 {
            if llr[0] == 0.0 {
                tie[base] += 1;
            }
            let dec = u8::from(llr[0] < 0.0);
            if dec != u_true[0] {
                err[base] += 1;
            }
            return vec![u_true[0]];
        }
        let half = n / 2;
        let fl: Vec<f64> = (0..half).map(|j| f_exact(llr[j], llr[j + half])).collect();
        let ca = rec(&fl, &u_true[..half], err, tie, base);
        let gl: Vec<f64> = (0..half)
            .map(|j| if ca[j] == 1 { llr[j + half] - llr[j] } else { llr[j + half] + llr[j] })
            .collect();
        let cb = rec(&gl, &u_true[half..], err, tie, base + half);
        let mut cw: Vec<u8> = (0..half).map(|j| ca[j] ^ cb[j]).collect();
        cw.extend(cb);
        cw
    }
    rec(llr, u_true, err, tie, 0);
}

fn order_from_counts(err: &[u32], z: &[f64]) -> Vec<u32> {
    let n = err.len();
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
    let design_p = 0.1819;
    let ch = BscParam::new(design_p).unwrap();
    let z = bhattacharyya_parameters(n, ch).unwrap();
    let trials = 30_000u64;

    // Fair genie: random true bits.
    let mut err_fair = vec![0u32; n];
    let mut tie_fair = vec![0u32; n];
    // Lucky genie: all-zero true bits (ties silently "correct").
    let mut err_zero = vec![0u32; n];
    let mut tie_zero = vec![0u32; n];
    for t in 0..trials {
        let u = BitVector::random(n, &SeedSpec::new(31, 2 * t));
        let ub: Vec<u8> = u.iter().map(u8::from).collect();
        let x = polar_transform(&u).unwrap();
        let y = sample_bsc(&x, ch, &SeedSpec::new(31, 2 * t + 1));
        let llr = LlrVector::from_hard_bsc(&y, ch);
        genie_pass(&llr.0, &ub, &mut err_fair, &mut tie_fair);

        let zeros = vec![0u8; n];
        let y0 = sample_bsc(&BitVector::zeros(n), ch, &SeedSpec::new(31, 2 * t + 1));
        let llr0 = LlrVector::from_hard_bsc(&y0, ch);
        genie_pass(&llr0.0, &zeros, &mut err_zero, &mut tie_zero);
    }
    let ord_fair = order_from_counts(&err_fair, &z);
    let ord_zero = order_from_counts(&err_zero, &z);
    let ord_z = construct_reliabilities(n, ch).unwrap();

    for (name, ord) in [("fair", &ord_fair), ("zero", &ord_zero), ("zrec", &ord_z)] {
        let key: Vec<u32> = ord[n - 128..].to_vec();
        let sum_fair: f64 = key
            .iter()
            .map(|&i| (err_fair[i as usize] as f64 + 0.0) / trials as f64)
            .sum();
        let sum_tie: f64 = key
            .iter()
            .map(|&i| tie_fair[i as usize] as f64 / trials as f64)
            .sum();
        println!(
            "{name}: key fair-err union bound = {sum_fair:.5}, key tie mass sum = {sum_tie:.5}"
        );
    }

    for (name, ord) in [("fair", &ord_fair), ("zero", &ord_zero)] {
        let code = PolarCodePair::from_ordering(n, ord.clone(), 128).unwrap();
        print!("{name}-built code P_B:");
        for p in [0.17, 0.18, 0.19] {
            print!("  p={p}: {:.5}", measure_pb(&code, p, 2000, 555));
        }
        println!();
    }

    // Distortion probe at n-m1 = 778 under three F1 choices.
    let ord = &ord_fair;
    let f: Vec<u32> = ord[..n - 128].to_vec();
    let keep = n - 778;
    let f_set: std::collections::HashSet<u32> = f.iter().copied().collect();
    // (a) least-reliable-at-design_p kept frozen
    let f1_a: Vec<u32> = f[..keep].to_vec();
    // (b) least-reliable-at-q kept frozen (q-ordering restricted to F)
    let mut err_q = vec![0u32; n];
    let mut tie_q = vec![0u32; n];
    let chq = BscParam::new(0.0456).unwrap();
    let zq = bhattacharyya_parameters(n, chq).unwrap();
    for t in 0..30_000u64 {
        let u = BitVector::random(n, &SeedSpec::new(32, 2 * t));
        let ub: Vec<u8> = u.iter().map(u8::from).collect();
        let x = polar_transform(&u).unwrap();
        let y = sample_bsc(&x, chq, &SeedSpec::new(32, 2 * t + 1));
        let llr = LlrVector::from_hard_bsc(&y, chq);
        genie_pass(&llr.0, &ub, &mut err_q, &mut tie_q);
    }
    let ord_q = order_from_counts(&err_q, &zq);
    let f1_b: Vec<u32> = ord_q.iter().copied().filter(|i| f_set.contains(i)).take(keep).collect();

    let code = PolarCodePair::from_ordering(n, ord.clone(), 128).unwrap();
    for (name, f1) in [("at-pc", f1_a), ("at-q", f1_b)] {
        let code_q = code.with_inner(f1).unwrap();
        let v = BitVector::zeros(code_q.m1());
        let mut total = 0u64;
        let trials = 1500u64;
        for t in 0..trials {
            let x = BitVector::random(n, &SeedSpec::new(77, t));
            let out = quantize(&x, &code_q, &v, chq, 8).unwrap();
            total += (out.distortion * n as f64).round() as u64;
        }
        println!(
            "distortion n-m1=778, F1 {name}: E[q] = {:.4}",
            total as f64 / (trials as f64 * n as f64)
        );
    }
}
