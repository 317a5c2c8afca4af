// Temporary probe: same trials, three decoders — scl_decode(L=1),
// scl_decode(L=8), and an independent recursive SC — on the fair-genie code.

use wzkey_core::channel::{sample_bsc, BscParam, SeedSpec};
use wzkey_core::gf2::BitVector;
use wzkey_core::polar::{
    assemble_u, bhattacharyya_parameters, polar_transform, scl_decode, LlrVector, PolarCodePair,
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

/// Plain recursive SC with frozen bits.
fn sc(llr: &[f64], frozen: &[Option<bool>]) -> (Vec<u8>, Vec<u8>) {
    let n = llr.len();
    if n == 1 {
        let bit = match frozen[0] {
            Some(b) => u8::from(b),
            None => u8::from(llr[0] < 0.0),
        };
        return (vec![bit], vec![bit]);
    }
    let half = n / 2;
    let fl: Vec<f64> = (0..half).map(|j| f_exact(llr[j], llr[j + half])).collect();
    let (ua, ca) = sc(&fl, &frozen[..half]);
    let gl: Vec<f64> = (0..half)
        .map(|j| if ca[j] == 1 { llr[j + half] - llr[j] } else { llr[j + half] + llr[j] })
        .collect();
    let (ub, cb) = sc(&gl, &frozen[half..]);
    let mut u = ua;
    u.extend(ub);
    let mut cw: Vec<u8> = (0..half).map(|j| ca[j] ^ cb[j]).collect();
    cw.extend(cb);
    (u, cw)
}

fn genie_order(n: usize, p: f64, trials: u64, seed: u64) -> Vec<u32> {
    let ch = BscParam::new(p).unwrap();
    let z = bhattacharyya_parameters(n, ch).unwrap();
    let mut err = vec![0.0f64; n];
    fn rec(llr: &[f64], u_true: &[u8], err: &mut [f64], base: usize) -> Vec<u8> {
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
        let ca = rec(&fl, &u_true[..half], err, base);
        let gl: Vec<f64> = (0..half)
            .map(|j| if ca[j] == 1 { llr[j + half] - llr[j] } else { llr[j + half] + llr[j] })
            .collect();
        let cb = rec(&gl, &u_true[half..], err, base + half);
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
        rec(&llr.0, &ub, &mut err, 0);
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

fn main() {
    let n = 1024usize;
    let order = genie_order(n, 0.1819, 30_000, 31);
    let code = PolarCodePair::from_ordering(n, order, 128).unwrap();
    let mut frozen_opt = vec![None; n];
    for &i in code.frozen() {
        frozen_opt[i as usize] = Some(false);
    }
    let frozen_vals = BitVector::zeros(code.m1());

    for p in [0.17f64, 0.1819] {
        let ch = BscParam::new(p).unwrap();
        let trials = 3000u64;
        let (mut e_sc, mut e_l1, mut e_l8) = (0u64, 0u64, 0u64);
        let mut l1_neq_sc = 0u64;
        for t in 0..trials {
            let s = BitVector::random(128, &SeedSpec::new(555, 2 * t));
            let u = assemble_u(
                &code,
                &BitVector::zeros(code.m1()),
                &BitVector::zeros(code.m2()),
                &s,
            )
            .unwrap();
            let x = polar_transform(&u).unwrap();
            let y = sample_bsc(&x, ch, &SeedSpec::new(555, 2 * t + 1));
            let llr = LlrVector::from_hard_bsc(&y, ch);

            let (u_sc, _) = sc(&llr.0, &frozen_opt);
            let sc_bits = BitVector::from_bits(u_sc.iter().map(|&b| b == 1));
            if sc_bits.select(code.key_indices()) != s {
                e_sc += 1;
            }
            let d1 = scl_decode(&llr, &code, &frozen_vals, 1).unwrap();
            if d1.u_hat.select(code.key_indices()) != s {
                e_l1 += 1;
            }
            if d1.u_hat != sc_bits {
                l1_neq_sc += 1;
            }
            let d8 = scl_decode(&llr, &code, &frozen_vals, 8).unwrap();
            if d8.u_hat.select(code.key_indices()) != s {
                e_l8 += 1;
            }
        }
        println!(
            "p={p}: SC err={e_sc}/{trials}  SCL1 err={e_l1}  SCL8 err={e_l8}  (SCL1!=SC on {l1_neq_sc})"
        );
    }
}
