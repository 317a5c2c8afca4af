// Temporary probe: construction candidates scored by P_B at p=0.19
// (n=1024, rate 1/8, SCL8).

use wzkey_core::channel::{sample_bsc, BscParam, SeedSpec};
use wzkey_core::design::measure_block_errors;
use wzkey_core::gf2::BitVector;
use wzkey_core::polar::{
    bhattacharyya_parameters, construct_reliabilities, polar_transform, LlrVector, PolarCodePair,
};

fn f_exact(a: f64, b: f64) -> f64 {
    let (aa, ab) = (a.abs(), b.abs());
    let base = if (a < 0.0) != (b < 0.0) { -aa.min(ab) } else { aa.min(ab) };
    let sum = (a + b).abs();
    let diff = (a - b).abs();
    let mut c = base;
    if sum < 30.0 {
        c += (-sum).exp().ln_1p();
    }
    if diff < 30.0 {
        c -= (-diff).exp().ln_1p();
    }
    c
}

fn genie_rec(llr: &[f64], u_true: &[u8], err: &mut [f64], base: usize) -> Vec<u8> {
    let n = llr.len();
    if n == 1 {
        if llr[0] == 0.0 {
            err[base] += 0.5;
        } else if u8::from(llr[0] < 0.0) != u_true[0] {
            err[base] += 1.0;
        }
        return vec![u_true[0]];
    }
    let half = n / 2;
    let fl: Vec<f64> = (0..half).map(|j| f_exact(llr[j], llr[j + half])).collect();
    let ca = genie_rec(&fl, &u_true[..half], err, base);
    let gl: Vec<f64> = (0..half)
        .map(|j| if ca[j] == 1 { llr[j + half] - llr[j] } else { llr[j + half] + llr[j] })
        .collect();
    let cb = genie_rec(&gl, &u_true[half..], err, base + half);
    let mut cw: Vec<u8> = (0..half).map(|j| ca[j] ^ cb[j]).collect();
    cw.extend(cb);
    cw
}

fn genie_order(n: usize, p: f64, trials: u64, seed: u64) -> Vec<u32> {
    let ch = BscParam::new(p).unwrap();
    let z = bhattacharyya_parameters(n, ch).unwrap();
    let mut err = vec![0.0f64; n];
    for t in 0..trials {
        let u = BitVector::random(n, &SeedSpec::new(seed, 2 * t));
        let ub: Vec<u8> = u.iter().map(u8::from).collect();
        let x = polar_transform(&u).unwrap();
        let y = sample_bsc(&x, ch, &SeedSpec::new(seed, 2 * t + 1));
        let llr = LlrVector::from_hard_bsc(&y, ch);
        genie_rec(&llr.0, &ub, &mut err, 0);
    }
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&a, &b| {
        err[b as usize]
            .partial_cmp(&err[a as usize])
            .unwrap()
            .then(z[b as usize].partial_cmp(&z[a as usize]).unwrap())
            .then(a.cmp(&b))
    });
    order
}

/// Weight-profile hybrid: information set prefers high kernel-row weight,
/// breaking weight ties by Bhattacharyya reliability.
fn rm_polar_order(n: usize, p: f64) -> Vec<u32> {
    let z = bhattacharyya_parameters(n, BscParam::new(p).unwrap()).unwrap();
    let mut order: Vec<u32> = (0..n as u32).collect();
    // least reliable first: lowest weight first, then highest Z
    order.sort_by(|&a, &b| {
        a.count_ones()
            .cmp(&b.count_ones())
            .then(z[b as usize].partial_cmp(&z[a as usize]).unwrap())
            .then(a.cmp(&b))
    });
    order
}

fn main() {
    let n = 1024usize;
    let score = |name: &str, order: Vec<u32>| {
        let code = PolarCodePair::from_ordering(n, order, 128).unwrap();
        let trials = 300_000u64;
        let errs = measure_block_errors(
            &code,
            BscParam::new(0.19).unwrap(),
            8,
            trials,
            4242,
            17,
            0,
        );
        println!(
            "{name}: P_B(0.19) = {:.3e} ({errs}/{trials})",
            errs as f64 / trials as f64
        );
    };

    score("z@0.1819        ", construct_reliabilities(n, BscParam::new(0.1819).unwrap()).unwrap());
    score("z@0.25          ", construct_reliabilities(n, BscParam::new(0.25).unwrap()).unwrap());
    score("z@0.30          ", construct_reliabilities(n, BscParam::new(0.30).unwrap()).unwrap());
    score("genie@0.1819 1e6", genie_order(n, 0.1819, 1_000_000, 91));
    score("genie@0.22  3e5 ", genie_order(n, 0.22, 300_000, 92));
    score("rm-polar@0.1819 ", rm_polar_order(n, 0.1819));
}
