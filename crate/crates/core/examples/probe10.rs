// Temporary probe: same (u, y), genie leaf LLRs vs SC leaf LLRs, position 479.

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

/// Records the leaf llr seen at every position, using supplied per-leaf
/// "decisions" (true bits for genie mode, frozen/sign decisions for SC).
fn walk(
    llr: &[f64],
    base: usize,
    decide: &mut dyn FnMut(usize, f64) -> u8,
    leaf_llrs: &mut [f64],
) -> Vec<u8> {
    let n = llr.len();
    if n == 1 {
        leaf_llrs[base] = llr[0];
        let bit = decide(base, llr[0]);
        return vec![bit];
    }
    let half = n / 2;
    let fl: Vec<f64> = (0..half).map(|j| f_exact(llr[j], llr[j + half])).collect();
    let ca = walk(&fl, base, decide, leaf_llrs);
    let gl: Vec<f64> = (0..half)
        .map(|j| if ca[j] == 1 { llr[j + half] - llr[j] } else { llr[j + half] + llr[j] })
        .collect();
    let cb = walk(&gl, base + half, decide, leaf_llrs);
    let mut cw: Vec<u8> = (0..half).map(|j| ca[j] ^ cb[j]).collect();
    cw.extend(cb);
    cw
}

fn main() {
    let n = 1024usize;
    let p = 0.1819;
    let ch = BscParam::new(p).unwrap();
    // Rebuild the same fair-genie code as probe9.
    let z = bhattacharyya_parameters(n, ch).unwrap();
    let mut err = vec![0.0f64; n];
    for t in 0..30_000u64 {
        let u = BitVector::random(n, &SeedSpec::new(31, 2 * t));
        let ub: Vec<u8> = u.iter().map(u8::from).collect();
        let x = polar_transform(&u).unwrap();
        let y = sample_bsc(&x, ch, &SeedSpec::new(31, 2 * t + 1));
        let llr = LlrVector::from_hard_bsc(&y, ch);
        let mut leaf = vec![0.0; n];
        let mut k = 0usize;
        walk(
            &llr.0,
            0,
            &mut |i, l| {
                if l == 0.0 {
                    err[i] += 0.5;
                } else if u8::from(l < 0.0) != ub[i] {
                    err[i] += 1.0;
                }
                k += 1;
                ub[i]
            },
            &mut leaf,
        );
        assert_eq!(k, n);
    }
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&a, &b| {
        err[b as usize]
            .partial_cmp(&err[a as usize])
            .unwrap()
            .then(z[b as usize].partial_cmp(&z[a as usize]).unwrap())
            .then(a.cmp(&b))
    });
    let code = PolarCodePair::from_ordering(n, order, 128).unwrap();
    let is_frozen: Vec<bool> = {
        let mut v = vec![false; n];
        for &i in code.frozen() {
            v[i as usize] = true;
        }
        v
    };
    println!("pos 479 frozen: {}", is_frozen[479]);

    // One operational trial.
    let mut found = 0;
    for t in 0..200u64 {
        let s = BitVector::random(128, &SeedSpec::new(555, 2 * t));
        let u = assemble_u(&code, &BitVector::zeros(code.m1()), &BitVector::zeros(code.m2()), &s)
            .unwrap();
        let ub: Vec<u8> = u.iter().map(u8::from).collect();
        let x = polar_transform(&u).unwrap();
        let y = sample_bsc(&x, ch, &SeedSpec::new(555, 2 * t + 1));
        let llr = LlrVector::from_hard_bsc(&y, ch);

        // Genie walk on the operational (u, y).
        let mut leaf_genie = vec![0.0; n];
        walk(&llr.0, 0, &mut |i, _l| ub[i], &mut leaf_genie);

        // SC walk (frozen -> 0, info -> sign decision).
        let mut leaf_sc = vec![0.0; n];
        let sc_u = {
            let mut got = vec![0u8; n];
            let cw = walk(
                &llr.0,
                0,
                &mut |i, l| {
                    let b = if is_frozen[i] { 0 } else { u8::from(l < 0.0) };
                    got[i] = b;
                    b
                },
                &mut leaf_sc,
            );
            let _ = cw;
            got
        };
        // first error
        if let Some(first) = (0..n).find(|&i| sc_u[i] != ub[i]) {
            if found < 5 {
                println!(
                    "trial {t}: first SC error at {first}; genie_llr={:.4} sc_llr={:.4} true_bit={} genie_bits_before_equal={}",
                    leaf_genie[first],
                    leaf_sc[first],
                    ub[first],
                    (0..first).all(|i| sc_u[i] == ub[i]),
                );
                found += 1;
            }
        }
    }
    println!("done");
}
