//! Exact laws of the forward, lookdown and completely neutral samplers on a
//! small model, compared class by class.

use lookdown::model::{Horizon, ModelSpec};
use lookdown::samplers::{default_budget, exact_unlabelled_distribution, SamplerKind};
use lookdown::testing::exact_equality;

fn main() {
    let spec = ModelSpec::new(Horizon::Finite, vec![2, 3, 4], vec![vec![2, 1], vec![2, 0, 2]]).expect("valid spec");
    println!("model: {spec}");
    let laws: Vec<_> = SamplerKind::ALL
        .iter()
        .map(|k| exact_unlabelled_distribution(&spec, *k, default_budget()).expect("within budget"))
        .collect();
    for (class, p) in &laws[0] {
        println!("{class:>30}  {p:>6}  {:>6}  {:>6}", laws[1][class], laws[2][class]);
    }
    for (i, j) in [(0, 1), (1, 2)] {
        let r = exact_equality(&format!("{} vs {}", SamplerKind::ALL[i].name(), SamplerKind::ALL[j].name()), &laws[i], &laws[j]);
        println!("{}: {:?}", r.test, r.decision);
    }
}
