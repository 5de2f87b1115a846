//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach the output.
//! The process fails when a criterion fails unexpectedly; criterion 8 is
//! known to be unattainable as stated and only reports.

use std::time::Instant;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lookdown::coupling::lookdown_coupling;
use lookdown::experiments::{detect_fixation, estimate_base_identification, fixation_experiment, rank_recovery_by_extinction, Fixation};
use lookdown::gw::{exact_lookdown_spine_law, exact_spinal_law, OffspringDistribution};
use lookdown::model::{BirthRule, FamilySpec, Horizon, ModelSpec};
use lookdown::rng::{exact_law, par_replicates, ratio, Law, SeedSpec};
use lookdown::samplers::{build_lookdown, default_budget, exact_unlabelled_distribution, SamplerKind};
use lookdown::sbo::random_partition;
use lookdown::stats::{
    ancestral_partition, coalescent_scale, concentration, descendant_table, estimate_base_frequency, expected_base_frequency, frequency_increments,
    monte_carlo_coalescence,
};

struct Outcome {
    pass: bool,
    detail: String,
}

/// Name, check, and whether a failure is expected.
type Criterion = (&'static str, fn() -> Outcome, bool);

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn spec_233() -> ModelSpec {
    ModelSpec::new(Horizon::Finite, vec![2, 3, 3], vec![vec![2, 1], vec![2, 1, 0]]).unwrap()
}

fn to_f64(q: &BigRational) -> f64 {
    let n: f64 = q.numer().to_string().parse().unwrap();
    let d: f64 = q.denom().to_string().parse().unwrap();
    n / d
}

fn neutrality() -> Outcome {
    let spec = spec_233();
    let laws: Vec<_> = SamplerKind::ALL
        .iter()
        .map(|k| exact_unlabelled_distribution(&spec, *k, default_budget()).unwrap())
        .collect();
    let pass = laws[0] == laws[1] && laws[1] == laws[2];
    outcome(pass, format!("{} unlabelled classes", laws[0].len()))
}

/// Law of the size sequence obtained by size-biased sampling without
/// replacement, from the product formula over all orderings.
fn sbo_oracle(sizes: &[usize]) -> Law<Vec<usize>> {
    fn go(rest: &mut Vec<usize>, prefix: &mut Vec<usize>, p: BigRational, out: &mut Law<Vec<usize>>) {
        if rest.is_empty() {
            *out.entry(prefix.clone()).or_insert_with(BigRational::zero) += p;
            return;
        }
        let total: usize = rest.iter().sum();
        for i in 0..rest.len() {
            let s = rest.remove(i);
            prefix.push(s);
            go(rest, prefix, &p * ratio(s as i64, total as i64), out);
            prefix.pop();
            rest.insert(i, s);
        }
    }
    let mut out = Law::new();
    go(&mut sizes.to_vec(), &mut Vec::new(), BigRational::one(), &mut out);
    out
}

fn size_biased_ordering() -> Outcome {
    let spec = spec_233();
    let x0 = spec.size(0);
    // Law of the multiset of block sizes of Xi_{0,2}, from the forward sampler.
    let multisets = exact_law(default_budget(), |e| {
        let g = SamplerKind::Forward.sample_with(&spec, e);
        let mut b = ancestral_partition(&g, 0, 2).unwrap().block_sizes();
        b.sort_unstable();
        b
    })
    .unwrap();
    let mut expected = Law::new();
    for (sizes, w) in &multisets {
        for (order, q) in sbo_oracle(sizes) {
            let mut key = order;
            key.resize(x0, 0);
            *expected.entry(key).or_insert_with(BigRational::zero) += w * q;
        }
    }
    let lookdown = exact_law(default_budget(), |e| {
        let g = SamplerKind::Lookdown.sample_with(&spec, e);
        let t = descendant_table(&g, 0, 2).unwrap();
        (0..x0).map(|i| t.count(2, i)).collect::<Vec<_>>()
    })
    .unwrap();
    outcome(lookdown == expected, format!("{} size sequences", expected.len()))
}

fn coalescence() -> Outcome {
    let spec = FamilySpec::moran(4, 4).expand().unwrap();
    let target = 91.0 / 216.0;
    let e = monte_carlo_coalescence(&spec, 0, 3, 100_000, SeedSpec::new(2024)).unwrap();
    outcome(e.within_se(target, 4.0), format!("estimate {:.5} (se {:.5}), target 91/216 = {target:.5}", e.estimate, e.se))
}

fn martingale() -> Outcome {
    let spec = FamilySpec::moran(6, 21).expand().unwrap();
    let inc = frequency_increments(&spec, 0, 20, 10_000, SeedSpec::new(2025)).unwrap();
    let worst = inc.iter().map(|c| c.mean.abs() / c.se.max(f64::MIN_POSITIVE)).fold(0.0, f64::max);
    let pass = inc.iter().all(|c| c.mean.abs() <= 4.0 * c.se);
    outcome(pass, format!("{} cells, worst |mean|/se = {worst:.2}", inc.len()))
}

fn base_frequency() -> Outcome {
    let spec = FamilySpec::moran(5, 11).expand().unwrap();
    let ms = [2, 5, 10];
    let est = estimate_base_frequency(&spec, 0, &ms, 10_000, SeedSpec::new(2026)).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (m, e) in ms.iter().zip(&est) {
        // 1/X_m + (1 - 1/X_m) p_{0,m} with p_{0,m} = 1 - (1 - 1/10)^m.
        let x = 5.0;
        let p = 1.0 - 0.9f64.powi(*m as i32);
        let target = 1.0 / x + (1.0 - 1.0 / x) * p;
        assert!((target - to_f64(&expected_base_frequency(&spec, 0, *m).unwrap())).abs() < 1e-12);
        pass &= e.within_se(target, 4.0);
        parts.push(format!("m={m}: {:.4} vs {target:.4}", e.estimate));
    }
    outcome(pass, parts.join(", "))
}

fn dichotomy() -> Outcome {
    let moran = FamilySpec::moran(10, 501);
    let rho = estimate_base_identification(&moran, 0, 500, 2000, SeedSpec::new(2027)).unwrap();
    let fix = fixation_experiment(&moran.expand().unwrap(), 0, 2000, SeedSpec::new(2028));
    let a = rho.estimate >= 0.95 && fix.frequency() >= 0.99;

    let doubling = FamilySpec::synchronous(1, 2, 9);
    let mut b = true;
    let mut rhos = Vec::new();
    for n in 0..=5 {
        let e = estimate_base_identification(&doubling, n, 8, 200, SeedSpec::new(2029)).unwrap();
        b &= e.estimate == 1.0 / f64::from(1u32 << n) && e.se == 0.0;
        rhos.push(e.estimate);
    }
    b &= rhos.windows(2).all(|w| w[1] < w[0]) && rhos[5] < 0.05;
    outcome(
        a && b,
        format!(
            "moran(10): rho = {:.4}, fixation {:.4}; doubling rho(u_n) = {rhos:?}",
            rho.estimate,
            fix.frequency()
        ),
    )
}

fn rank_recovery() -> Outcome {
    let spec = FamilySpec::moran(5, 400).expand().unwrap();
    let runs = par_replicates(SeedSpec::new(2030), 1000, |s| {
        let pair = lookdown_coupling(&spec, s);
        let fixed = matches!(detect_fixation(&pair.lookdown, 0), Fixation::At { .. });
        (fixed, rank_recovery_by_extinction(&pair))
    });
    let resolvable: usize = runs.iter().map(|r| r.1.resolvable()).sum();
    let correct: usize = runs.iter().map(|r| r.1.correct()).sum();
    let monotone = runs.iter().all(|r| r.1.monotone);
    let fixed = runs.iter().filter(|r| r.0).count();
    outcome(
        correct == resolvable && monotone && fixed == runs.len(),
        format!("{correct}/{resolvable} resolvable ranks recovered, monotone: {monotone}, fixed by cap: {fixed}/1000"),
    )
}

fn counterexample() -> Outcome {
    let spec = FamilySpec::asynchronous(1, BirthRule::Doubling, 22).expand().unwrap();
    let scale = coalescent_scale(&spec);
    let s = scale.s_f64();
    let stated = |n: i32| {
        let a = 2f64.powi(n);
        let b = 2f64.powi(n + 1);
        a * (a - 1.0) / (b * (b - 1.0))
    };
    let dev = (0..=20).map(|n| (s[n] - stated(n as i32)).abs()).fold(0.0, f64::max);
    let t20 = scale.t_f64()[20];
    let short = FamilySpec::asynchronous(1, BirthRule::Doubling, 14).expand().unwrap();
    let events: usize = par_replicates(SeedSpec::new(2031), 200, |s| {
        let g = build_lookdown(&short, s);
        (0..short.tau()).filter(|&n| matches!(detect_fixation(&g, n), Fixation::At { .. })).count()
    })
    .into_iter()
    .sum();
    outcome(
        dev <= 1e-12 && t20 > 4.0 && events == 0,
        format!(
            "max |s_n - stated| = {dev:.3e} (tolerance 1e-12), s_20 = {:.12} vs stated {:.12}, t_20 = {t20:.4}, fixation events = {events}",
            s[20],
            stated(20)
        ),
    )
}

fn spinal() -> Outcome {
    let d = OffspringDistribution::from_strs(&["1/2", "0", "1/2"]).unwrap();
    let a = exact_spinal_law(&d, 3, default_budget()).unwrap();
    let b = exact_lookdown_spine_law(&d, 3, default_budget()).unwrap();
    outcome(a == b, format!("{} (tree, spine) classes", a.len()))
}

fn concentration_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2032);
    let mut ok = true;
    for i in 0..1000 {
        let len = 2 + i % 11;
        let p = random_partition(len, &mut rng);
        let r = concentration(&p).unwrap();
        let n = p.len() as i64;
        let sizes = p.block_sizes();
        let mean: i64 = sizes.iter().map(|&b| (b * b) as i64).sum();
        let mean = ratio(mean, n);
        let pairs: i64 = sizes.iter().map(|&b| (b * (b - 1)) as i64).sum();
        let c = ratio(pairs, n * (n - 1));
        let k = sizes.len() as i64;
        let bound = (ratio(1, k) - ratio(1, n)) / (BigRational::one() - ratio(1, n));
        ok &= r.value == c && r.size_biased_mean == mean && mean == BigRational::one() + ratio(n - 1, 1) * &c && c >= bound;
    }
    let whole = lookdown::genealogy::GenerationPartition::contiguous(&[7]);
    let singletons = lookdown::genealogy::GenerationPartition::contiguous(&[1; 7]);
    ok &= concentration(&whole).unwrap().value == BigRational::one();
    ok &= concentration(&singletons).unwrap().value == BigRational::zero();
    outcome(ok, "1000 random partitions, sizes 2..=12, plus both edge cases")
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("neutrality equivalence", neutrality, false),
        ("size-biased ordering", size_biased_ordering, false),
        ("coalescence formula", coalescence, false),
        ("martingale frequencies", martingale, false),
        ("base-path mean frequency", base_frequency, false),
        ("dominance dichotomy", dichotomy, false),
        ("rank recovery", rank_recovery, false),
        ("dominance without fixation", counterexample, true),
        ("spinal correspondence", spinal, false),
        ("concentration suite", concentration_suite, false),
    ];
    let mut unexpected = Vec::new();
    for (i, (name, run, known_failure)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict} {name}: {} [{:.1}s]", i + 1, o.detail, start.elapsed().as_secs_f64());
        if !o.pass && !known_failure {
            unexpected.push(i + 1);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
