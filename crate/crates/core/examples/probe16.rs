// Temporary probe: find a seed whose (7,4)/(7,1) nesting has a
// repetition-like subcode (generator weight >= 3).

use wzkey_core::channel::SeedSpec;
use wzkey_core::linear::NestedLinearCode;

fn main() {
    for seed in 0u64..40 {
        let code = NestedLinearCode::build(7, 3, 3, &SeedSpec::new(seed, 0)).unwrap();
        let wt = code.generator().row(0).weight();
        println!("seed {seed}: generator weight {wt}");
        if wt >= 3 {
            // also check all weight<=1 words are coset leaders
            let ok = (0u32..128)
                .filter(|w| w.count_ones() <= 1)
                .all(|w| {
                    let x = wzkey_core::gf2::BitVector::from_u64(w as u64, 7);
                    let syn = wzkey_core::gf2::mat_vec(&x, code.h(), true).unwrap();
                    code.coset_leader(&syn).unwrap() == x
                });
            println!("   weight<=1 all leaders: {ok}");
        }
    }
}
