// Temporary probe: dissect oracle-vs-SCL(1) divergence on one trial.

use wzkey_core::channel::{sample_bsc, BscParam, SeedSpec};
use wzkey_core::gf2::BitVector;
use wzkey_core::polar::{
    assemble_u, construct_reliabilities, polar_transform, scl_decode, LlrVector, PolarCodePair,
};

fn f_exact(a: f64, b: f64) -> f64 {
    let (aa, ab) = (a.abs(), b.abs());
    let base = if (a < 0.0) != (b < 0.0) { -aa.min(ab) } else { aa.min(ab) };
    if aa == f64::INFINITY || ab == f64::INFINITY {
        return base;
    }
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

fn sc_trace(llr: &[f64], frozen: &[Option<bool>], base: usize, leaf: &mut [f64]) -> (Vec<u8>, Vec<u8>) {
    let n = llr.len();
    if n == 1 {
        leaf[base] = llr[0];
        let bit = match frozen[0] {
            Some(b) => u8::from(b),
            None => u8::from(llr[0] < 0.0),
        };
        return (vec![bit], vec![bit]);
    }
    let half = n / 2;
    let fl: Vec<f64> = (0..half).map(|j| f_exact(llr[j], llr[j + half])).collect();
    let (ua, ca) = sc_trace(&fl, &frozen[..half], base, leaf);
    let gl: Vec<f64> = (0..half)
        .map(|j| if ca[j] == 1 { llr[j + half] - llr[j] } else { llr[j + half] + llr[j] })
        .collect();
    let (ub, cb) = sc_trace(&gl, &frozen[half..], base + half, leaf);
    let mut u = ua;
    u.extend(ub);
    let mut cw: Vec<u8> = (0..half).map(|j| ca[j] ^ cb[j]).collect();
    cw.extend(cb);
    (u, cw)
}

fn main() {
    let n = 128;
    let order = construct_reliabilities(n, BscParam::new(0.12).unwrap()).unwrap();
    let code = PolarCodePair::from_ordering(n, order, 40).unwrap();
    let frozen_vals = BitVector::zeros(code.m1());
    let mut frozen = vec![None; n];
    for &i in code.frozen() {
        frozen[i as usize] = Some(false);
    }
    let ch = BscParam::new(0.12).unwrap();
    let trial = 862u64;
    let s = BitVector::random(40, &SeedSpec::new(7, 2 * trial));
    let u = assemble_u(&code, &BitVector::zeros(code.m1()), &BitVector::zeros(code.m2()), &s)
        .unwrap();
    let x = polar_transform(&u).unwrap();
    let y = sample_bsc(&x, ch, &SeedSpec::new(7, 2 * trial + 1));
    let llr = LlrVector::from_hard_bsc(&y, ch);

    let mut leaf = vec![0.0; n];
    let (oracle_u, _) = sc_trace(&llr.0, &frozen, 0, &mut leaf);
    let ours = scl_decode(&llr, &code, &frozen_vals, 1).unwrap();

    for i in 0..n {
        let o = oracle_u[i];
        let m = u8::from(ours.u_hat.get(i));
        if o != m {
            println!(
                "first divergence at {i}: oracle={o} ours={m} oracle_leaf_llr={:+.3e} frozen={}",
                leaf[i],
                frozen[i].is_some()
            );
            break;
        }
    }
}
