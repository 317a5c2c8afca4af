// Temporary probe: reconcile genie statistics with actual SC first-error
// positions on the fair-genie-built code.

use wzkey_core::channel::{sample_bsc, BscParam, SeedSpec};
use wzkey_core::gf2::BitVector;
use wzkey_core::polar::{
    assemble_u, bhattacharyya_parameters, polar_transform, LlrVector, PolarCodePair,
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

fn sc(llr: &[f64], frozen: &[Option<bool>], out_u: &mut Vec<u8>) -> Vec<u8> {
    let n = llr.len();
    if n == 1 {
        let bit = match frozen[0] {
            Some(b) => u8::from(b),
            None => u8::from(llr[0] < 0.0),
        };
        out_u.push(bit);
        return vec![bit];
    }
    let half = n / 2;
    let fl: Vec<f64> = (0..half).map(|j| f_exact(llr[j], llr[j + half])).collect();
    let ca = sc(&fl, &frozen[..half], out_u);
    let gl: Vec<f64> = (0..half)
        .map(|j| if ca[j] == 1 { llr[j + half] - llr[j] } else { llr[j + half] + llr[j] })
        .collect();
    let cb = sc(&gl, &frozen[half..], out_u);
    let mut cw: Vec<u8> = (0..half).map(|j| ca[j] ^ cb[j]).collect();
    cw.extend(cb);
    cw
}

fn genie_counts(n: usize, p: f64, trials: u64, seed: u64) -> (Vec<f64>, Vec<u32>) {
    let ch = BscParam::new(p).unwrap();
    let mut err = vec![0.0f64; n];
    let mut tie = vec![0u32; n];
    fn rec(llr: &[f64], u_true: &[u8], err: &mut [f64], tie: &mut [u32], base: usize) -> Vec<u8> {
        let n = llr.len();
        if n == 1 {
            if llr[0] == 0.0 {
                tie[base] += 1;
                err[base] += 0.5;
            } else if u8::from(llr[0] < 0.0) != u_true[0] {
                err[base] += 1.0;
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
    for t in 0..trials {
        let u = BitVector::random(n, &SeedSpec::new(seed, 2 * t));
        let ub: Vec<u8> = u.iter().map(u8::from).collect();
        let x = polar_transform(&u).unwrap();
        let y = sample_bsc(&x, ch, &SeedSpec::new(seed, 2 * t + 1));
        let llr = LlrVector::from_hard_bsc(&y, ch);
        rec(&llr.0, &ub, &mut err, &mut tie, 0);
    }
    (err, tie)
}

fn main() {
    let n = 1024usize;
    let p = 0.1819;
    let trials = 30_000u64;
    let (err, tie) = genie_counts(n, p, trials, 31);
    let z = bhattacharyya_parameters(n, BscParam::new(p).unwrap()).unwrap();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&a, &b| {
        err[b as usize]
            .partial_cmp(&err[a as usize])
            .unwrap()
            .then(z[b as usize].partial_cmp(&z[a as usize]).unwrap())
            .then(a.cmp(&b))
    });
    let code = PolarCodePair::from_ordering(n, order, 128).unwrap();
    println!("worst key channels by genie err:");
    let mut keys: Vec<u32> = code.key_indices().to_vec();
    keys.sort_by(|&a, &b| err[b as usize].partial_cmp(&err[a as usize]).unwrap());
    for &i in keys.iter().take(5) {
        println!(
            "  i={i} err={:.5} ties={} Z={:.3e}",
            err[i as usize] / trials as f64,
            tie[i as usize],
            z[i as usize]
        );
    }

    // Actual SC failures: first-error positions.
    let mut frozen_opt = vec![None; n];
    for &i in code.frozen() {
        frozen_opt[i as usize] = Some(false);
    }
    let ch = BscParam::new(p).unwrap();
    let mut hist: std::collections::HashMap<usize, u32> = std::collections::HashMap::new();
    let mut failures = 0u32;
    for t in 0..2000u64 {
        let s = BitVector::random(128, &SeedSpec::new(555, 2 * t));
        let u = assemble_u(&code, &BitVector::zeros(code.m1()), &BitVector::zeros(code.m2()), &s)
            .unwrap();
        let x = polar_transform(&u).unwrap();
        let y = sample_bsc(&x, ch, &SeedSpec::new(555, 2 * t + 1));
        let llr = LlrVector::from_hard_bsc(&y, ch);
        let mut got = Vec::with_capacity(n);
        sc(&llr.0, &frozen_opt, &mut got);
        let truth: Vec<u8> = u.iter().map(u8::from).collect();
        if got != truth {
            failures += 1;
            let first = (0..n).find(|&i| got[i] != truth[i]).unwrap();
            *hist.entry(first).or_default() += 1;
        }
    }
    println!("SC failures: {failures}/2000; top first-error positions:");
    let mut entries: Vec<(usize, u32)> = hist.into_iter().collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1));
    for (pos, cnt) in entries.iter().take(8) {
        println!(
            "  pos={pos} count={cnt} genie_err={:.5} tie={} Z={:.3e} frozen={}",
            err[*pos] / trials as f64,
            tie[*pos],
            z[*pos],
            code.frozen().contains(&(*pos as u32))
        );
    }
}
