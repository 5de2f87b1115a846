//! Spinal Galton-Watson trees: diagnostics, a sample, and the exact agreement
//! with the lookdown construction on a size-biased skeleton.

use lookdown::gw::{exact_lookdown_spine_law, exact_spinal_law, sample_spinal, spine_diagnostics, OffspringDistribution};
use lookdown::rng::SeedSpec;
use lookdown::samplers::default_budget;

fn main() {
    let d = OffspringDistribution::from_strs(&["1/2", "0", "1/2"]).expect("valid pmf");
    println!("{:?}", spine_diagnostics(&d));
    let tree = sample_spinal(&d, SeedSpec::new(11), 5).expect("valid tree");
    println!("{}", tree.to_text());
    let a = exact_spinal_law(&d, 3, default_budget()).expect("within budget");
    let b = exact_lookdown_spine_law(&d, 3, default_budget()).expect("within budget");
    println!("{} spinal classes, laws equal: {}", a.len(), a == b);
}
