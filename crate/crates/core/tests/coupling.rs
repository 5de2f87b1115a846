
use num_rational::BigRational;
use num_traits::Zero;

use lookdown::coupling::{lookdown_coupling, lookdown_coupling_with, uniformity_diagnostic, PermutationSample};
use lookdown::model::{FamilySpec, Horizon, ModelSpec};
use lookdown::rng::{exact_law, par_replicates, ratio, Law, SeedSpec};
use lookdown::samplers::{default_budget, exact_labelled_distribution, SamplerKind};
use lookdown::testing::Decision;

fn spec_233() -> ModelSpec {
    ModelSpec::new(Horizon::Finite, vec![2, 3, 3], vec![vec![2, 1], vec![2, 1, 0]]).unwrap()
}

fn marginal<K: Ord + Clone, A: Ord + Clone>(law: &Law<K>, f: impl Fn(&K) -> A) -> Law<A> {
    let mut out = Law::new();
    for (k, p) in law {
        *out.entry(f(k)).or_insert_with(BigRational::zero) += p;
    }
    out
}

#[test]
fn sigma_is_uniform_and_independent_of_early_edges() {
    let spec = spec_233();
    let joint = exact_law(default_budget(), |e| {
        let pair = lookdown_coupling_with(&spec, e);
        (pair.sigma.generation(1).to_vec(), pair.forward.parents_of_generation(1).to_vec())
    })
    .unwrap();
    let sigma = marginal(&joint, |k| k.0.clone());
    let early = marginal(&joint, |k| k.1.clone());
    assert_eq!(sigma.len(), 6);
    assert!(sigma.values().all(|p| *p == ratio(1, 6)));
    for ((s, e), p) in &joint {
        assert_eq!(*p, &sigma[s] * &early[e]);
    }
}

#[test]
fn base_preimage_is_uniform() {
    let spec = spec_233();
    for n in 0..spec.tau() {
        let law = exact_law(default_budget(), |e| lookdown_coupling_with(&spec, e).base_preimage(n)).unwrap();
        let x = spec.size(n) as i64;
        assert_eq!(law.len() as i64, x);
        assert!(law.values().all(|p| *p == ratio(1, x)), "generation {n}: {law:?}");
    }
}

#[test]
fn coupled_sides_have_the_sampler_laws() {
    let spec = spec_233();
    let joint = exact_law(default_budget(), |e| {
        let pair = lookdown_coupling_with(&spec, e);
        (pair.forward.into_parent_maps(), pair.lookdown.into_parent_maps())
    })
    .unwrap();
    let forward = marginal(&joint, |k| k.0.clone());
    let lookdown = marginal(&joint, |k| k.1.clone());
    assert_eq!(forward, exact_labelled_distribution(&spec, SamplerKind::Forward, default_budget()).unwrap());
    assert_eq!(lookdown, exact_labelled_distribution(&spec, SamplerKind::Lookdown, default_budget()).unwrap());
}

#[test]
fn diagnostic_accepts_coupled_permutations() {
    let spec = FamilySpec::moran(3, 4).expand().unwrap();
    let samples = par_replicates(SeedSpec::new(99), 3000, |s| {
        let pair = lookdown_coupling(&spec, s);
        PermutationSample {
            sigma: pair.sigma.generation(2).to_vec(),
            early: pair.forward.out_degrees(0).iter().position(|&k| k == 2).unwrap(),
        }
    });
    let r = uniformity_diagnostic(&samples, 0.001).unwrap();
    assert_eq!(r.decision, Decision::Accept, "{:?}", r);
}

#[test]
fn diagnostic_rejects_biased_permutations() {
    let perms = [[0u32, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    // Identity three times as often as the others.
    let biased: Vec<PermutationSample> = (0..3000)
        .map(|i| PermutationSample {
            sigma: perms[if i % 8 < 3 { 0 } else { 1 + i % 5 }].to_vec(),
            early: i % 2,
        })
        .collect();
    assert_eq!(uniformity_diagnostic(&biased, 0.001).unwrap().decision, Decision::Reject);
    // Uniform marginal, but the permutation determines the summary.
    let dependent: Vec<PermutationSample> = (0..3000)
        .map(|i| PermutationSample {
            sigma: perms[i % 6].to_vec(),
            early: usize::from(i % 6 < 3),
        })
        .collect();
    let r = uniformity_diagnostic(&dependent, 0.001).unwrap();
    assert_eq!(r.goodness_of_fit.decision, Decision::Accept);
    assert_eq!(r.independence.decision, Decision::Reject);
}
