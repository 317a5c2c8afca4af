// Temporary probe: find a seed whose (7,4)/(7,1) draw has a perfect
// (Hamming-structured) C1, giving exactly uniform quantized words.

use wzkey_core::channel::{BscParam, SeedSpec};
use wzkey_core::gf2::BitVector;
use wzkey_core::linear::{audit_leakage, AuditMode, NestedLinearCode};

fn main() {
    for seed in 0u64..3000 {
        let Ok(code) = NestedLinearCode::build(7, 3, 3, &SeedSpec::new(seed, 0)) else {
            continue;
        };
        // H1 columns all distinct and nonzero <=> perfect (7,4) code.
        let mut cols = std::collections::HashSet::new();
        let mut ok = true;
        for i in 0..7 {
            let mut c = 0u8;
            for j in 0..3 {
                if code.h1().get(j, i) {
                    c |= 1 << j;
                }
            }
            if c == 0 || !cols.insert(c) {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        let wt = code.generator().row(0).weight();
        let gs = audit_leakage(&code, BscParam::new(0.0).unwrap(), AuditMode::Gs).unwrap();
        let cs = audit_leakage(&code, BscParam::new(0.0).unwrap(), AuditMode::Cs).unwrap();
        // weight<=1 all leaders?
        let leaders_ok = (0u32..128).filter(|w| w.count_ones() <= 1).all(|w| {
            let x = BitVector::from_u64(w as u64, 7);
            let syn = wzkey_core::gf2::mat_vec(&x, code.h(), true).unwrap();
            code.coset_leader(&syn).unwrap() == x
        });
        println!(
            "seed {seed}: perfect C1, gen wt {wt}, leaders_ok {leaders_ok}, I(S;W)={:.2e}, I(S';W')={:.2e}, H(S)/n={:.4}",
            gs.secrecy_leakage_rate * 7.0,
            cs.secrecy_leakage_rate * 7.0,
            gs.key_entropy_rate
        );
        if leaders_ok && wt >= 3 {
            println!("  -> candidate");
        }
    }
}
