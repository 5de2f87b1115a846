//! Size-biased orders of a partition: the product formula next to the two
//! ordering algorithms, both enumerated exactly.

use lookdown::genealogy::GenerationPartition;
use lookdown::samplers::default_budget;
use lookdown::sbo::{exact_algorithm_size_law, exact_sbo_size_law, size_biased_order_discovery, size_biased_order_scramble};

fn main() {
    let sizes = [3, 1, 2];
    let p = GenerationPartition::contiguous(&sizes);
    let oracle = exact_sbo_size_law(&sizes).expect("small partition");
    let discovery = exact_algorithm_size_law(&p, default_budget(), size_biased_order_discovery).expect("within budget");
    let scramble = exact_algorithm_size_law(&p, default_budget(), size_biased_order_scramble).expect("within budget");
    println!("{:>10}  {:>8}  {:>8}  {:>8}", "order", "formula", "discover", "scramble");
    for (order, q) in &oracle {
        println!("{:>10}  {:>8}  {:>8}  {:>8}", format!("{order:?}"), q, discovery[order], scramble[order]);
    }
    assert_eq!(oracle, discovery);
    assert_eq!(oracle, scramble);
}
