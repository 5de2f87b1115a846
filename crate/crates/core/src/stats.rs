//! Descendant statistics, ancestral partitions, concentration and the
//! coalescent time scale.

use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::StatsError;
use crate::genealogy::{Genealogy, GenerationPartition};
use crate::model::{Horizon, ModelSpec};
use crate::rng::{par_replicates, Draw, SeedSpec, Stream};
use crate::samplers::{build_lookdown, sample_forward};

fn int(x: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn frac(num: usize, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Extinction time `tau(v)`: the first generation without descendants of
/// `v`, or censored when descendants persist at the cap. Censored times
/// compare as +infinity and tie with each other.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Extinction {
    At(usize),
    Censored,
}

/// Monte Carlo estimate with its standard error and the settings that
/// produced it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateWithCI {
    pub estimate: f64,
    pub se: f64,
    pub reps: usize,
    pub horizon: Option<usize>,
    pub seed: u64,
    pub z: f64,
}

/// Two-sided 1e-4 normal quantile, the default width of reported intervals.
pub const DEFAULT_Z: f64 = 3.89;

impl EstimateWithCI {
    /// Mean and standard error of the mean of `values`.
    pub fn from_values(values: &[f64], horizon: Option<usize>, seed: SeedSpec) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self {
            estimate: mean,
            se: (var / n).sqrt(),
            reps: values.len(),
            horizon,
            seed: seed.root,
            z: DEFAULT_Z,
        }
    }

    pub fn with_z(mut self, z: f64) -> Self {
        self.z = z;
        self
    }

    pub fn half_width(&self) -> f64 {
        self.z * self.se
    }

    pub fn lower(&self) -> f64 {
        self.estimate - self.half_width()
    }

    pub fn upper(&self) -> f64 {
        self.estimate + self.half_width()
    }

    /// True when `x` is within `k` standard errors of the estimate.
    pub fn within_se(&self, x: f64, k: f64) -> bool {
        (self.estimate - x).abs() <= k * self.se + 1e-15
    }
}

/// Descendant counts of the vertices of generation `source` in generations
/// `source..=last`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescendantTable {
    pub source: usize,
    pub last: usize,
    /// `counts[m - source][i] = X_m((source, i + 1))`.
    pub counts: Vec<Vec<usize>>,
    /// `min_paths[m - source][i] = min D_m(v)` (zero-based), `None` if empty.
    pub min_paths: Vec<Vec<Option<usize>>>,
    pub sizes: Vec<usize>,
    /// Extinction times, computed over the whole genealogy.
    pub extinction: Vec<Extinction>,
}

impl DescendantTable {
    pub fn count(&self, m: usize, i: usize) -> usize {
        self.counts[m - self.source][i]
    }

    /// Frequency `x_m(v) = X_m(v) / X_m`.
    pub fn frequency(&self, m: usize, i: usize) -> f64 {
        self.count(m, i) as f64 / self.sizes[m - self.source] as f64
    }

    pub fn frequencies(&self, m: usize) -> Vec<f64> {
        (0..self.counts[0].len()).map(|i| self.frequency(m, i)).collect()
    }

    pub fn max_frequency(&self, m: usize) -> f64 {
        self.frequencies(m).into_iter().fold(0.0, f64::max)
    }

    /// `i -> tau((source, i))` is non-increasing, censored times as +infinity.
    pub fn extinction_non_increasing(&self) -> bool {
        self.extinction.windows(2).all(|w| w[0] >= w[1])
    }

    /// Writes `m,vertex,count,frequency,min_path` rows.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["m", "vertex", "count", "frequency", "min_path"])?;
        for m in self.source..=self.last {
            for i in 0..self.counts[0].len() {
                let mp = self.min_paths[m - self.source][i].map_or_else(|| "inf".to_string(), |x| (x + 1).to_string());
                out.write_record([
                    m.to_string(),
                    (i + 1).to_string(),
                    self.count(m, i).to_string(),
                    format!("{:?}", self.frequency(m, i)),
                    mp,
                ])?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

fn check_range(g: &Genealogy, n: usize, m: usize) -> Result<(), StatsError> {
    if n > m || m >= g.tau() {
        return Err(StatsError::OutOfRange {
            from: n,
            to: m,
            tau: g.tau(),
        });
    }
    Ok(())
}

/// Generation-`n` ancestor of every vertex of generation `m >= n`.
pub fn ancestors(g: &Genealogy, n: usize, m: usize) -> Result<Vec<u32>, StatsError> {
    check_range(g, n, m)?;
    let mut anc: Vec<u32> = (0..g.spec().size(n) as u32).collect();
    for k in n + 1..=m {
        anc = g.parents_of_generation(k).iter().map(|&p| anc[p as usize]).collect();
    }
    Ok(anc)
}

pub fn descendant_table(g: &Genealogy, n: usize, last: usize) -> Result<DescendantTable, StatsError> {
    check_range(g, n, last)?;
    let width = g.spec().size(n);
    let mut anc: Vec<u32> = (0..width as u32).collect();
    let mut counts = Vec::new();
    let mut min_paths = Vec::new();
    let mut extinction = vec![None; width];
    let mut m = n;
    loop {
        let mut c = vec![0usize; width];
        let mut mp = vec![None; width];
        for (j, &a) in anc.iter().enumerate() {
            let a = a as usize;
            c[a] += 1;
            if mp[a].is_none() {
                mp[a] = Some(j);
            }
        }
        for (i, e) in extinction.iter_mut().enumerate() {
            if e.is_none() && c[i] == 0 {
                *e = Some(Extinction::At(m));
            }
        }
        if m <= last {
            counts.push(c);
            min_paths.push(mp);
        }
        if m + 1 == g.tau() {
            break;
        }
        m += 1;
        anc = g.parents_of_generation(m).iter().map(|&p| anc[p as usize]).collect();
    }
    let end = match g.spec().horizon() {
        Horizon::Finite => Extinction::At(g.tau()),
        Horizon::Capped => Extinction::Censored,
    };
    Ok(DescendantTable {
        source: n,
        last,
        counts,
        min_paths,
        sizes: g.spec().sizes()[n..=last].to_vec(),
        extinction: extinction.into_iter().map(|e| e.unwrap_or(end)).collect(),
    })
}

/// Extinction times of every vertex, by a single backward pass:
/// `tau(v)` is `n + 1` for a childless `v` in generation `n` and the largest
/// extinction time among its children otherwise.
pub fn extinction_times(g: &Genealogy) -> Vec<Vec<Extinction>> {
    let tau = g.tau();
    let end = match g.spec().horizon() {
        Horizon::Finite => Extinction::At(tau),
        Horizon::Capped => Extinction::Censored,
    };
    let mut out = vec![Vec::new(); tau];
    out[tau - 1] = vec![end; g.spec().size(tau - 1)];
    for n in (0..tau - 1).rev() {
        let mut e = vec![Extinction::At(n + 1); g.spec().size(n)];
        for (j, &p) in g.parents_of_generation(n + 1).iter().enumerate() {
            let c = out[n + 1][j];
            if c > e[p as usize] {
                e[p as usize] = c;
            }
        }
        out[n] = e;
    }
    out
}

/// Ancestral partition `Xi_{n,m}` of generation `m`, blocks sorted by least
/// element.
pub fn ancestral_partition(g: &Genealogy, n: usize, m: usize) -> Result<GenerationPartition, StatsError> {
    if n >= m {
        return Err(StatsError::OutOfRange {
            from: n,
            to: m,
            tau: g.tau(),
        });
    }
    let anc = ancestors(g, n, m)?;
    let labels: Vec<usize> = anc.iter().map(|&a| a as usize).collect();
    Ok(GenerationPartition::from_labels(&labels))
}

/// Non-empty descendant sets `D_m((n, i))` listed in ancestor order.
pub fn descendant_sets(g: &Genealogy, n: usize, m: usize) -> Result<Vec<Vec<usize>>, StatsError> {
    let anc = ancestors(g, n, m)?;
    let mut sets = vec![Vec::new(); g.spec().size(n)];
    for (j, &a) in anc.iter().enumerate() {
        sets[a as usize].push(j);
    }
    Ok(sets)
}

/// For every `m > n`, `i -> min D_m((n, i))` is strictly increasing over
/// non-empty sets and the empty sets form a suffix.
pub fn min_paths_ordered(g: &Genealogy, n: usize) -> bool {
    let Ok(t) = descendant_table(g, n, g.tau() - 1) else {
        return false;
    };
    t.min_paths.iter().all(|mp| {
        let mut prev: Option<usize> = None;
        let mut seen_empty = false;
        for x in mp {
            match (x, seen_empty) {
                (None, _) => seen_empty = true,
                (Some(_), true) => return false,
                (Some(x), false) => {
                    if prev.is_some_and(|p| p >= *x) {
                        return false;
                    }
                    prev = Some(*x);
                }
            }
        }
        true
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcentrationReport {
    /// `c(P) = sum |B|(|B|-1) / (N(N-1))`.
    pub value: BigRational,
    pub block_sizes: Vec<usize>,
    /// `E|B_I| = 1 + (N-1) c(P)` for a size-biased block `B_I`.
    pub size_biased_mean: BigRational,
    /// `(1/|P| - 1/N) / (1 - 1/N)`.
    pub lower_bound: BigRational,
}

pub fn concentration(p: &GenerationPartition) -> Result<ConcentrationReport, StatsError> {
    let n = p.len();
    if n < 2 {
        return Err(StatsError::TooSmall(n));
    }
    let sizes = p.block_sizes();
    let pairs: usize = sizes.iter().map(|&b| b * (b - 1)).sum();
    let value = frac(pairs, n * (n - 1));
    let size_biased_mean = BigRational::one() + int(n - 1) * &value;
    let lower_bound = (frac(1, sizes.len()) - frac(1, n)) / (BigRational::one() - frac(1, n));
    Ok(ConcentrationReport {
        value,
        block_sizes: sizes,
        size_biased_mean,
        lower_bound,
    })
}

/// `E|B_I|` computed directly as `sum |B|^2 / N`.
pub fn size_biased_block_mean(p: &GenerationPartition) -> BigRational {
    let sq: usize = p.block_sizes().iter().map(|b| b * b).sum();
    frac(sq, p.len())
}

/// The coalescent time scale and its truncated version, exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoalescentScale {
    /// `s_n` for `n < tau - 1`.
    pub s: Vec<BigRational>,
    /// `t_n = sum_{m < n} s_m` for `n < tau`, so `t_0 = 0`.
    pub t: Vec<BigRational>,
    pub s_trunc: Vec<BigRational>,
    pub t_trunc: Vec<BigRational>,
    /// `L_n`: number of litters of size at least two.
    pub multi_litters: Vec<usize>,
}

fn pair_count(x: usize) -> usize {
    x * x.saturating_sub(1)
}

pub fn coalescent_scale(spec: &ModelSpec) -> CoalescentScale {
    let gens = spec.tau() - 1;
    let mut out = CoalescentScale {
        s: Vec::with_capacity(gens),
        t: vec![BigRational::zero()],
        s_trunc: Vec::with_capacity(gens),
        t_trunc: vec![BigRational::zero()],
        multi_litters: Vec::with_capacity(gens),
    };
    let mut t = BigRational::zero();
    let mut to = BigRational::zero();
    for n in 0..gens {
        let pairs = pair_count(spec.size(n + 1));
        let k = spec.litters(n);
        let l = k.iter().filter(|&&x| x >= 2).count();
        let (s, so) = if pairs == 0 {
            (BigRational::zero(), BigRational::zero())
        } else {
            (frac(k.iter().map(|&x| pair_count(x)).sum(), pairs), frac(2 * l, pairs))
        };
        t += &s;
        to += &so;
        out.s.push(s);
        out.s_trunc.push(so);
        out.t.push(t.clone());
        out.t_trunc.push(to.clone());
        out.multi_litters.push(l);
    }
    out
}

/// `b(b-1) / (X(X-1))` for an asynchronous step with `b` births into a
/// generation of size `x_next`.
pub fn asynchronous_s(births: usize, x_next: usize) -> BigRational {
    let pairs = pair_count(x_next);
    if pairs == 0 {
        return BigRational::zero();
    }
    frac(pair_count(births), pairs)
}

impl CoalescentScale {
    pub fn s_f64(&self) -> Vec<f64> {
        self.s.iter().map(|x| x.to_f64().unwrap()).collect()
    }

    pub fn t_f64(&self) -> Vec<f64> {
        self.t.iter().map(|x| x.to_f64().unwrap()).collect()
    }

    /// Writes `n,s_n,t_n,s_n_trunc,t_n_trunc` with exact `p/q` values, one
    /// row per generation with a litter vector.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["n", "s_n", "t_n", "s_n_trunc", "t_n_trunc"])?;
        for n in 0..self.s.len() {
            out.write_record([
                n.to_string(),
                self.s[n].to_string(),
                self.t[n].to_string(),
                self.s_trunc[n].to_string(),
                self.t_trunc[n].to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `p_{n,m} = 1 - prod_{j=n}^{m-1} (1 - s_j)`.
pub fn pairwise_coalescence_probability(spec: &ModelSpec, n: usize, m: usize) -> Result<BigRational, StatsError> {
    if n >= m || m >= spec.tau() {
        return Err(StatsError::OutOfRange {
            from: n,
            to: m,
            tau: spec.tau(),
        });
    }
    let scale = coalescent_scale(spec);
    let keep: BigRational = scale.s[n..m].iter().map(|s| BigRational::one() - s).product();
    Ok(BigRational::one() - keep)
}

/// `E[x_m(u_n)] = 1/X_m + (1 - 1/X_m) p_{n,m}`; equals `1/X_n` when `m = n`.
pub fn expected_base_frequency(spec: &ModelSpec, n: usize, m: usize) -> Result<BigRational, StatsError> {
    if m == n {
        return Ok(frac(1, spec.size(n)));
    }
    let p = pairwise_coalescence_probability(spec, n, m)?;
    let inv = frac(1, spec.size(m));
    Ok(&inv + (BigRational::one() - &inv) * p)
}

/// `s_n >= 1/X_n^2` whenever some litter exceeds one.
pub fn small_population_bound_holds(spec: &ModelSpec) -> bool {
    let scale = coalescent_scale(spec);
    (0..spec.tau() - 1).all(|n| spec.max_litter(n) <= 1 || scale.s[n] >= frac(1, spec.size(n) * spec.size(n)))
}

pub const MIN_REPS: usize = 100;

fn check_reps(reps: usize) -> Result<(), StatsError> {
    if reps < MIN_REPS {
        return Err(StatsError::InsufficientReps {
            needed: MIN_REPS,
            found: reps,
        });
    }
    Ok(())
}

/// Fraction of forward replicates in which a uniform pair of distinct
/// vertices of generation `m` shares its generation-`n` ancestor.
pub fn monte_carlo_coalescence(spec: &ModelSpec, n: usize, m: usize, reps: usize, seed: SeedSpec) -> Result<EstimateWithCI, StatsError> {
    check_reps(reps)?;
    if n >= m || m >= spec.tau() {
        return Err(StatsError::OutOfRange {
            from: n,
            to: m,
            tau: spec.tau(),
        });
    }
    let values = par_replicates(seed, reps, |s| {
        let g = sample_forward(spec, s);
        let x = spec.size(m);
        if x < 2 {
            return 1.0;
        }
        let mut r = s.rng(Stream::Pair, 0);
        let a = r.uniform(x);
        let b = (a + 1 + r.uniform(x - 1)) % x;
        let anc = ancestors(&g, n, m).expect("range checked");
        f64::from(u8::from(anc[a] == anc[b]))
    });
    Ok(EstimateWithCI::from_values(&values, Some(m), seed))
}

/// Monte Carlo summary of the increment `x_{m+1}(v) - x_m(v)` of one vertex.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IncrementSummary {
    /// Zero-based vertex of the source generation.
    pub vertex: usize,
    pub m: usize,
    pub mean: f64,
    pub se: f64,
}

/// One-step frequency increments of every vertex of generation `n` under the
/// forward sampler, for `m` in `n..last`.
pub fn frequency_increments(spec: &ModelSpec, n: usize, last: usize, reps: usize, seed: SeedSpec) -> Result<Vec<IncrementSummary>, StatsError> {
    check_reps(reps)?;
    if n >= last || last >= spec.tau() {
        return Err(StatsError::OutOfRange {
            from: n,
            to: last,
            tau: spec.tau(),
        });
    }
    let width = spec.size(n);
    let steps = last - n;
    let runs: Vec<Vec<f64>> = par_replicates(seed, reps, |s| {
        let t = descendant_table(&sample_forward(spec, s), n, last).expect("range checked");
        let mut d = Vec::with_capacity(steps * width);
        for m in n..last {
            for v in 0..width {
                d.push(t.frequency(m + 1, v) - t.frequency(m, v));
            }
        }
        d
    });
    let mut out = Vec::with_capacity(steps * width);
    for (cell, (m, v)) in (n..last).flat_map(|m| (0..width).map(move |v| (m, v))).enumerate() {
        let values: Vec<f64> = runs.iter().map(|r| r[cell]).collect();
        let e = EstimateWithCI::from_values(&values, Some(m + 1), seed);
        out.push(IncrementSummary {
            vertex: v,
            m,
            mean: e.estimate,
            se: e.se,
        });
    }
    Ok(out)
}

/// Lookdown Monte Carlo estimate of `E[x_m(u_n)]` for each `m` in `ms`.
pub fn estimate_base_frequency(spec: &ModelSpec, n: usize, ms: &[usize], reps: usize, seed: SeedSpec) -> Result<Vec<EstimateWithCI>, StatsError> {
    check_reps(reps)?;
    let last = ms.iter().copied().max().unwrap_or(n);
    if ms.iter().any(|&m| m < n) || last >= spec.tau() {
        return Err(StatsError::OutOfRange {
            from: n,
            to: last,
            tau: spec.tau(),
        });
    }
    let runs: Vec<Vec<f64>> = par_replicates(seed, reps, |s| {
        let t = descendant_table(&build_lookdown(spec, s), n, last).expect("range checked");
        ms.iter().map(|&m| t.frequency(m, 0)).collect()
    });
    Ok((0..ms.len())
        .map(|k| {
            let values: Vec<f64> = runs.iter().map(|r| r[k]).collect();
            EstimateWithCI::from_values(&values, Some(ms[k]), seed)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FamilySpec;
    use crate::rng::ratio;

    fn spec(h: Horizon, sizes: Vec<usize>, litters: Vec<Vec<usize>>) -> ModelSpec {
        ModelSpec::new(h, sizes, litters).unwrap()
    }

    #[test]
    fn single_root_table() {
        let s = spec(Horizon::Finite, vec![1, 2], vec![vec![2]]);
        let g = build_lookdown(&s, SeedSpec::new(0));
        let t = descendant_table(&g, 0, 1).unwrap();
        assert_eq!(t.count(1, 0), 2);
        assert_eq!(t.frequency(1, 0), 1.0);
        assert_eq!(t.extinction, vec![Extinction::At(2)]);
        assert!(descendant_table(&g, 0, 2).is_err());
    }

    #[test]
    fn doubling_frequencies_are_uniform() {
        let s = FamilySpec::synchronous(2, 2, 5).expand().unwrap();
        let g = sample_forward(&s, SeedSpec::new(3));
        let t = descendant_table(&g, 1, 4).unwrap();
        for m in 2..=4 {
            assert!(t.frequencies(m).iter().all(|&x| x == 0.25));
        }
        assert!(t.extinction.iter().all(|&e| e == Extinction::Censored));
    }

    #[test]
    fn lookdown_extinction_is_monotone() {
        let s = FamilySpec::moran(3, 40).expand().unwrap();
        for seed in 0..50 {
            let g = build_lookdown(&s, SeedSpec::new(seed));
            for n in [0, 5, 20] {
                assert!(descendant_table(&g, n, n).unwrap().extinction_non_increasing());
                assert!(min_paths_ordered(&g, n));
            }
        }
    }

    #[test]
    fn extinction_pass_matches_table() {
        let s = FamilySpec::moran(4, 30).expand().unwrap();
        let g = sample_forward(&s, SeedSpec::new(8));
        let all = extinction_times(&g);
        for n in [0, 7, 29] {
            assert_eq!(descendant_table(&g, n, n).unwrap().extinction, all[n]);
        }
        let f = ModelSpec::new(Horizon::Finite, vec![2, 2], vec![vec![2, 0]]).unwrap();
        let g = sample_forward(&f, SeedSpec::new(1));
        let mut e = extinction_times(&g)[0].clone();
        e.sort();
        assert_eq!(e, vec![Extinction::At(1), Extinction::At(2)]);
    }

    #[test]
    fn ancestral_partitions() {
        let s = spec(Horizon::Finite, vec![1, 2, 4], vec![vec![2], vec![2, 2]]);
        let g = build_lookdown(&s, SeedSpec::new(0));
        let p = ancestral_partition(&g, 0, 2).unwrap();
        assert_eq!(p.block_sizes(), vec![4]);
        let s = FamilySpec::moran(4, 6).expand().unwrap();
        let g = build_lookdown(&s, SeedSpec::new(2));
        assert_eq!(ancestral_partition(&g, 2, 3).unwrap().canonical(), g.sibling_partition(2).canonical());
        for n in 0..5 {
            for m in n + 1..6 {
                let sets: Vec<Vec<usize>> = descendant_sets(&g, n, m).unwrap().into_iter().filter(|b| !b.is_empty()).collect();
                assert!(GenerationPartition::new(sets).unwrap().sorted_by_least_element());
            }
        }
        assert!(ancestral_partition(&g, 3, 3).is_err());
    }

    #[test]
    fn concentration_examples() {
        let r = concentration(&GenerationPartition::new(vec![vec![0, 1], vec![2]]).unwrap()).unwrap();
        assert_eq!(r.value, ratio(1, 3));
        assert_eq!(r.size_biased_mean, ratio(5, 3));
        let one = concentration(&GenerationPartition::contiguous(&[4])).unwrap();
        assert_eq!(one.value, ratio(1, 1));
        let zero = concentration(&GenerationPartition::contiguous(&[1; 5])).unwrap();
        assert_eq!(zero.value, ratio(0, 1));
        assert_eq!(concentration(&GenerationPartition::contiguous(&[1])), Err(StatsError::TooSmall(1)));
    }

    #[test]
    fn scale_examples() {
        let s = spec(Horizon::Finite, vec![3, 3], vec![vec![2, 1, 0]]);
        let c = coalescent_scale(&s);
        assert_eq!(c.s[0], ratio(1, 3));
        assert_eq!(c.s_trunc[0], ratio(1, 3));
        let s = spec(Horizon::Finite, vec![2, 4], vec![vec![3, 1]]);
        let c = coalescent_scale(&s);
        assert_eq!(c.s[0], ratio(1, 2));
        assert_eq!(c.s_trunc[0], ratio(1, 6));
        let m = coalescent_scale(&FamilySpec::moran(4, 6).expand().unwrap());
        assert!(m.s.iter().all(|x| *x == ratio(1, 6)));
        assert_eq!(m.s[0], asynchronous_s(2, 4));
        assert_eq!(m.t[0], ratio(0, 1));
        assert_eq!(m.t[5], ratio(5, 6));
        assert_eq!(m.t.len(), 6);
    }

    #[test]
    fn coalescence_probability() {
        let s = FamilySpec::moran(4, 5).expand().unwrap();
        assert_eq!(pairwise_coalescence_probability(&s, 0, 3).unwrap(), ratio(91, 216));
        assert_eq!(pairwise_coalescence_probability(&s, 1, 2).unwrap(), ratio(1, 6));
        let s = spec(Horizon::Finite, vec![3, 3, 3], vec![vec![2, 1, 0], vec![2, 1, 0]]);
        assert_eq!(pairwise_coalescence_probability(&s, 0, 2).unwrap(), ratio(5, 9));
        let s = spec(Horizon::Finite, vec![3, 3, 3], vec![vec![2, 1, 0], vec![1, 1, 1]]);
        assert_eq!(pairwise_coalescence_probability(&s, 0, 2).unwrap(), ratio(1, 3));
        assert!(pairwise_coalescence_probability(&s, 1, 1).is_err());
    }

    #[test]
    fn small_population_bound() {
        for n in 2..8 {
            assert!(small_population_bound_holds(&FamilySpec::moran(n, 5).expand().unwrap()));
        }
    }

    #[test]
    fn single_root_always_coalesces() {
        let s = spec(Horizon::Finite, vec![1, 3, 3], vec![vec![3], vec![1, 1, 1]]);
        let e = monte_carlo_coalescence(&s, 0, 2, 200, SeedSpec::new(1)).unwrap();
        assert_eq!(e.estimate, 1.0);
        assert!(monte_carlo_coalescence(&s, 0, 2, 10, SeedSpec::new(1)).is_err());
    }

    #[test]
    fn scale_csv() {
        let mut buf = Vec::new();
        coalescent_scale(&FamilySpec::moran(4, 3).expand().unwrap()).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "n,s_n,t_n,s_n_trunc,t_n_trunc\n0,1/6,0,1/6,0\n1,1/6,1/6,1/6,1/6\n");
    }
}
