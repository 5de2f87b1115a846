//! Couples a lookdown genealogy with a forward neutral one and shows where the
//! base vertices land.

use lookdown::coupling::lookdown_coupling;
use lookdown::model::FamilySpec;
use lookdown::rng::SeedSpec;

fn main() {
    let spec = FamilySpec::moran(5, 6).expand().expect("valid family");
    let pair = lookdown_coupling(&spec, SeedSpec::new(7));
    println!("lookdown:\n{}", pair.lookdown.to_text());
    println!("forward:\n{}", pair.forward.to_text());
    for n in 0..spec.tau() {
        let ranks: Vec<usize> = (0..spec.size(n)).map(|i| pair.rank(n, i) + 1).collect();
        println!("generation {n}: base vertex is forward #{}, lookdown ranks {ranks:?}", pair.base_preimage(n) + 1);
    }
}
