//! The three neutral samplers and their exact enumeration.

use serde::{Deserialize, Serialize};

use crate::canonical::{canonical_form, CanonicalForest};
use crate::coupling::{scramble_unchecked, GenerationPermutation};
use crate::error::EnumerationError;
use crate::genealogy::Genealogy;
use crate::model::ModelSpec;
use crate::rng::{exact_law, Draw, Law, Randomness, SeedSpec, Seeded, Stream};

/// Default cap on the number of enumerated configurations.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 10_000_000;

/// Environment variable overriding [`DEFAULT_ENUMERATION_BUDGET`].
pub const BUDGET_ENV: &str = "LOOKDOWN_ENUM_BUDGET";

pub fn default_budget() -> u64 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_ENUMERATION_BUDGET)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    Forward,
    Lookdown,
    CompletelyNeutral,
}

impl SamplerKind {
    pub const ALL: [SamplerKind; 3] = [SamplerKind::Forward, SamplerKind::Lookdown, SamplerKind::CompletelyNeutral];

    pub fn sample_with<R: Randomness>(self, spec: &ModelSpec, r: &mut R) -> Genealogy {
        match self {
            SamplerKind::Forward => forward_with(spec, r),
            SamplerKind::Lookdown => lookdown_with(spec, r),
            SamplerKind::CompletelyNeutral => completely_neutral_with(spec, r),
        }
    }

    pub fn sample(self, spec: &ModelSpec, seed: SeedSpec) -> Genealogy {
        self.sample_with(spec, &mut Seeded::new(seed))
    }

    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::Forward => "forward",
            SamplerKind::Lookdown => "lookdown",
            SamplerKind::CompletelyNeutral => "completely-neutral",
        }
    }
}

/// Children assigned to parents in contiguous index blocks, in parent order.
pub fn planar_parents(out_degrees: &[usize]) -> Vec<u32> {
    let mut p = Vec::with_capacity(out_degrees.iter().sum());
    for (i, &k) in out_degrees.iter().enumerate() {
        p.extend(std::iter::repeat_n(i as u32, k));
    }
    p
}

/// Forward neutral model: `K_n = k_n o sigma_n` with independent uniform
/// `sigma_n`, children placed by [`planar_parents`].
pub fn forward_with<R: Randomness>(spec: &ModelSpec, r: &mut R) -> Genealogy {
    let mut parents = Vec::with_capacity(spec.tau().saturating_sub(1));
    for n in 0..spec.tau() - 1 {
        let mut k = spec.litters(n).to_vec();
        r.stream(Stream::Forward, n as u64).shuffle(&mut k);
        parents.push(planar_parents(&k));
    }
    Genealogy::from_parts(spec.clone(), parents)
}

/// Lookdown construction. The fixed partition `xi_n` is scrambled by a
/// uniform permutation of the children and its blocks are handed to parents
/// `(n, 1), (n, 2), ...` in increasing order of least element.
pub fn lookdown_with<R: Randomness>(spec: &ModelSpec, r: &mut R) -> Genealogy {
    let mut parents = Vec::with_capacity(spec.tau().saturating_sub(1));
    for n in 0..spec.tau() - 1 {
        let mut labels: Vec<u32> = Vec::with_capacity(spec.size(n + 1));
        for (b, &k) in spec.litters(n).iter().enumerate().take_while(|(_, &k)| k > 0) {
            labels.extend(std::iter::repeat_n(b as u32, k));
        }
        r.stream(Stream::Lookdown, n as u64).shuffle(&mut labels);
        parents.push(rank_by_first_occurrence(&labels, spec.parents_with_children(n)));
    }
    Genealogy::from_parts(spec.clone(), parents)
}

// Relabels block labels by order of first occurrence: scanning children in
// index order discovers blocks in increasing order of least element.
fn rank_by_first_occurrence(labels: &[u32], blocks: usize) -> Vec<u32> {
    let mut rank = vec![u32::MAX; blocks];
    let mut next = 0;
    labels
        .iter()
        .map(|&l| {
            let slot = &mut rank[l as usize];
            if *slot == u32::MAX {
                *slot = next;
                next += 1;
            }
            *slot
        })
        .collect()
}

/// Completely neutral model, realised as a uniform scramble of the lookdown.
pub fn completely_neutral_with<R: Randomness>(spec: &ModelSpec, r: &mut R) -> Genealogy {
    let g = lookdown_with(spec, r);
    let sigma = GenerationPermutation::uniform_with(spec, r, Stream::Scramble);
    scramble_unchecked(&g, &sigma)
}

pub fn sample_forward(spec: &ModelSpec, seed: SeedSpec) -> Genealogy {
    forward_with(spec, &mut Seeded::new(seed))
}

pub fn build_lookdown(spec: &ModelSpec, seed: SeedSpec) -> Genealogy {
    lookdown_with(spec, &mut Seeded::new(seed))
}

pub fn sample_completely_neutral(spec: &ModelSpec, seed: SeedSpec) -> Genealogy {
    completely_neutral_with(spec, &mut Seeded::new(seed))
}

fn factorial(n: usize) -> Option<u128> {
    (1..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k))
}

/// Number of equally weighted leaves the enumerator visits for `kind`
/// (`None` on overflow). Each shuffle of length `L` contributes `L!`.
pub fn enumeration_size(spec: &ModelSpec, kind: SamplerKind) -> Option<u128> {
    let gens = 0..spec.tau() - 1;
    let lookdown = || gens.clone().try_fold(1u128, |acc, n| acc.checked_mul(factorial(spec.size(n + 1))?));
    match kind {
        SamplerKind::Forward => gens.clone().try_fold(1u128, |acc, n| acc.checked_mul(factorial(spec.size(n))?)),
        SamplerKind::Lookdown => lookdown(),
        SamplerKind::CompletelyNeutral => {
            let scramble = spec.sizes().iter().try_fold(1u128, |acc, &x| acc.checked_mul(factorial(x)?))?;
            lookdown()?.checked_mul(scramble)
        }
    }
}

pub(crate) fn check_budget(size: Option<u128>, budget: u64) -> Result<(), EnumerationError> {
    match size {
        Some(s) if s <= budget as u128 => Ok(()),
        _ => Err(EnumerationError::BudgetExceeded { budget }),
    }
}

/// Exact law of the unlabelled graph produced by `kind`, by enumerating all
/// permutation tuples the sampler can draw.
pub fn exact_unlabelled_distribution(
    spec: &ModelSpec,
    kind: SamplerKind,
    budget: u64,
) -> Result<Law<CanonicalForest>, EnumerationError> {
    check_budget(enumeration_size(spec, kind), budget)?;
    exact_law(budget, |e| canonical_form(&kind.sample_with(spec, e)))
}

/// Exact law of the labelled parent maps produced by `kind`.
pub fn exact_labelled_distribution(
    spec: &ModelSpec,
    kind: SamplerKind,
    budget: u64,
) -> Result<Law<Vec<Vec<u32>>>, EnumerationError> {
    check_budget(enumeration_size(spec, kind), budget)?;
    exact_law(budget, |e| kind.sample_with(spec, e).into_parent_maps())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FamilySpec, Horizon};
    use crate::rng::{map_law, ratio, total_mass};

    fn spec(sizes: Vec<usize>, litters: Vec<Vec<usize>>) -> ModelSpec {
        ModelSpec::new(Horizon::Finite, sizes, litters).unwrap()
    }

    #[test]
    fn forward_single_parent_is_deterministic() {
        let s = spec(vec![1, 2], vec![vec![2]]);
        let law = exact_labelled_distribution(&s, SamplerKind::Forward, 100).unwrap();
        assert_eq!(law.len(), 1);
        assert_eq!(law.keys().next().unwrap(), &vec![vec![0, 0]]);
    }

    #[test]
    fn forward_two_parents_half_each() {
        let s = spec(vec![2, 2], vec![vec![2, 0]]);
        let law = exact_labelled_distribution(&s, SamplerKind::Forward, 100).unwrap();
        assert_eq!(law[&vec![vec![0, 0]]], ratio(1, 2));
        assert_eq!(law[&vec![vec![1, 1]]], ratio(1, 2));
    }

    #[test]
    fn forward_moran_litter_holder_uniform() {
        let s = FamilySpec::moran(3, 2).expand().unwrap();
        let law = exact_law(100, |e| {
            let g = forward_with(&s, e);
            g.out_degrees(0).iter().position(|&k| k == 2).unwrap()
        })
        .unwrap();
        for i in 0..3 {
            assert_eq!(law[&i], ratio(1, 3));
        }
    }

    #[test]
    fn lookdown_base_path_always_present() {
        let s = FamilySpec::moran(4, 6).expand().unwrap();
        for seed in 0..50 {
            let g = build_lookdown(&s, SeedSpec::new(seed));
            for n in 1..s.tau() {
                assert_eq!(g.parents_of_generation(n)[0], 0);
            }
        }
    }

    #[test]
    fn lookdown_single_block_goes_to_first_parent() {
        let s = spec(vec![2, 2], vec![vec![2, 0]]);
        let law = exact_labelled_distribution(&s, SamplerKind::Lookdown, 100).unwrap();
        assert_eq!(law.len(), 1);
        assert_eq!(law.keys().next().unwrap(), &vec![vec![0, 0]]);
    }

    #[test]
    fn lookdown_first_parent_gets_pair_two_thirds() {
        let s = spec(vec![2, 3], vec![vec![2, 1]]);
        let law = exact_law(1000, |e| {
            let g = lookdown_with(&s, e);
            assert_eq!(g.parents_of_generation(1)[0], 0);
            g.out_degrees(0)[0]
        })
        .unwrap();
        assert_eq!(law[&2], ratio(2, 3));
        assert_eq!(law[&1], ratio(1, 3));
    }

    #[test]
    fn completely_neutral_matchings_equally_likely() {
        let s = spec(vec![2, 2], vec![vec![1, 1]]);
        let law = exact_labelled_distribution(&s, SamplerKind::CompletelyNeutral, 1000).unwrap();
        assert_eq!(law.len(), 2);
        assert!(law.values().all(|p| *p == ratio(1, 2)));
    }

    #[test]
    fn completely_neutral_single_root_unique() {
        let s = spec(vec![1, 4], vec![vec![4]]);
        let law = exact_labelled_distribution(&s, SamplerKind::CompletelyNeutral, 10_000).unwrap();
        assert_eq!(law.len(), 1);
    }

    #[test]
    fn completely_neutral_parent_marginals() {
        // Child j sits in the litter of two with probability 2/3, and that
        // litter's parent is uniform over the two roots.
        let s = spec(vec![2, 3], vec![vec![2, 1]]);
        let law = exact_labelled_distribution(&s, SamplerKind::CompletelyNeutral, 10_000).unwrap();
        assert_eq!(total_mass(&law), ratio(1, 1));
        for j in 0..3 {
            for i in 0..2u32 {
                let p = map_law(&law, |g| g[0][j] == i);
                assert_eq!(p[&true], ratio(1, 2));
            }
            let in_pair = map_law(&law, |g| g[0].iter().filter(|&&a| a == g[0][j]).count() == 2);
            assert_eq!(in_pair[&true], ratio(2, 3));
        }
    }

    #[test]
    fn sampler_determinism() {
        let s = FamilySpec::moran(7, 30).expand().unwrap();
        for kind in SamplerKind::ALL {
            let a = kind.sample(&s, SeedSpec::new(42));
            let b = kind.sample(&s, SeedSpec::new(42));
            assert_eq!(a.to_text(), b.to_text());
        }
    }

    #[test]
    fn budget_rejects_large_specs() {
        let s = FamilySpec::moran(12, 4).expand().unwrap();
        let e = exact_unlabelled_distribution(&s, SamplerKind::Forward, 1000).unwrap_err();
        assert_eq!(e, EnumerationError::BudgetExceeded { budget: 1000 });
    }

    #[test]
    fn unlabelled_trivial_cases() {
        let s = spec(vec![1, 2], vec![vec![2]]);
        let law = exact_unlabelled_distribution(&s, SamplerKind::Lookdown, 100).unwrap();
        assert_eq!(law.len(), 1);
        assert_eq!(law.keys().next().unwrap().to_string(), "(()())");
        let s = spec(vec![2, 2], vec![vec![2, 0]]);
        for kind in SamplerKind::ALL {
            let law = exact_unlabelled_distribution(&s, kind, 1000).unwrap();
            assert_eq!(law.len(), 1);
            assert_eq!(law.values().next().unwrap(), &ratio(1, 1));
        }
    }
}
