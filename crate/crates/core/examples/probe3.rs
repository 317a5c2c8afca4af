// Temporary probe: inspect genie error counts vs Z ordering at n=1024.

use wzkey_core::channel::{sample_bsc, BscParam, SeedSpec};
use wzkey_core::gf2::BitVector;
use wzkey_core::polar::{
    assemble_u, bhattacharyya_parameters, construct_reliabilities, polar_transform, scl_decode,
    LlrVector, PolarCodePair,
};

fn genie_sc(llr: &[f64], err_counts: &mut [u32]) {
    fn rec(llr: &[f64], errs: &mut [u32], base: usize) {
        let n = llr.len();
        if n == 1 {
            if llr[0] < 0.0 {
                errs[base] += 1;
            }
            return;
        }
        let half = n / 2;
        let f: Vec<f64> = (0..half)
            .map(|j| {
                let (a, b) = (llr[j], llr[j + half]);
                let (aa, ab) = (a.abs(), b.abs());
                let base_v = if (a < 0.0) != (b < 0.0) { -aa.min(ab) } else { aa.min(ab) };
                let mut c = base_v;
                let sum = aa + ab;
                let diff = (aa - ab).abs();
                if sum < 30.0 { c += (-sum).exp().ln_1p(); }
                if diff < 30.0 { c -= (-diff).exp().ln_1p(); }
                c
            })
            .collect();
        rec(&f, errs, base);
        let g: Vec<f64> = (0..half).map(|j| llr[j] + llr[j + half]).collect();
        rec(&g, errs, base + half);
    }
    rec(llr, err_counts, 0);
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
    let p = 0.17;
    let ch = BscParam::new(p).unwrap();
    let trials = 3000u64;
    let mut err_counts = vec![0u32; n];
    let x = BitVector::zeros(n);
    for t in 0..trials {
        let y = sample_bsc(&x, ch, &SeedSpec::new(900, t));
        let llr = LlrVector::from_hard_bsc(&y, ch);
        genie_sc(&llr.0, &mut err_counts);
    }
    let zero = err_counts.iter().filter(|&&c| c == 0).count();
    println!("channels with zero genie errors: {zero}/1024");

    let z = bhattacharyya_parameters(n, ch).unwrap();
    // Genie order with Z as tie-break.
    let mut genie_order: Vec<u32> = (0..n as u32).collect();
    genie_order.sort_by(|&a, &b| {
        err_counts[b as usize]
            .cmp(&err_counts[a as usize])
            .then(z[b as usize].partial_cmp(&z[a as usize]).unwrap())
            .then(a.cmp(&b))
    });
    let z_order = construct_reliabilities(n, ch).unwrap();

    // Key sets
    let key_genie: std::collections::HashSet<u32> = genie_order[n - 128..].iter().copied().collect();
    let key_z: std::collections::HashSet<u32> = z_order[n - 128..].iter().copied().collect();
    println!("key overlap: {}", key_genie.intersection(&key_z).count());
    let only_genie: Vec<u32> = key_genie.difference(&key_z).copied().collect();
    let only_z: Vec<u32> = key_z.difference(&key_genie).copied().collect();
    println!("genie-only keys (errcount, Z): {:?}",
        only_genie.iter().map(|&i| (i, err_counts[i as usize], z[i as usize])).collect::<Vec<_>>());
    println!("z-only keys (errcount, Z): {:?}",
        only_z.iter().map(|&i| (i, err_counts[i as usize], z[i as usize])).collect::<Vec<_>>());

    let code_genie = PolarCodePair::from_ordering(n, genie_order, 128).unwrap();
    let code_z = PolarCodePair::from_ordering(n, z_order, 128).unwrap();
    println!("P_B at 0.17 genie(z-tiebreak): {}", measure_pb(&code_genie, p, 2000, 901));
    println!("P_B at 0.17 z-order          : {}", measure_pb(&code_z, p, 2000, 901));
}
