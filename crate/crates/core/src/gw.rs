//! Galton-Watson trees, the spinal representation of the size-biased tree and
//! its realisation as the preimage of the lookdown base path.

use std::fmt::Write as _;
use std::io::BufRead;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::coupling::lookdown_coupling_with;
use crate::error::{EnumerationError, GenealogyError, GwError};
use crate::genealogy::{join, read_with_extras, Genealogy};
use crate::model::{Horizon, ModelSpec};
use crate::rng::{exact_law, one, Draw, Law, Randomness, SeedSpec, Seeded, Stream, Weights};
use crate::samplers::planar_parents;

/// Offspring law with finite support, held exactly.
#[derive(Clone, Debug)]
pub struct OffspringDistribution {
    pmf: Vec<BigRational>,
    approx: Vec<f64>,
}

impl PartialEq for OffspringDistribution {
    fn eq(&self, other: &Self) -> bool {
        self.pmf == other.pmf
    }
}

impl Eq for OffspringDistribution {}

/// Parses `"1/2"`, `"3"` or a decimal such as `"0.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let int: BigInt = if int.is_empty() || int == "-" { BigInt::zero() } else { int.parse().ok()? };
        let frac_val: BigInt = frac.parse().ok()?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let mut num = int.abs() * &scale + frac_val;
        if negative {
            num = -num;
        }
        return Some(BigRational::new(num, scale));
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

impl OffspringDistribution {
    /// `pmf[k]` is the probability of `k` children. Trailing zeros are
    /// dropped.
    pub fn new(mut pmf: Vec<BigRational>) -> Result<Self, GwError> {
        while pmf.len() > 1 && pmf.last().is_some_and(Zero::is_zero) {
            pmf.pop();
        }
        if pmf.is_empty() || pmf.iter().any(|p| p.is_negative()) || pmf.iter().sum::<BigRational>() != one() {
            return Err(GwError::InvalidPmf);
        }
        let approx = pmf.iter().map(|p| p.to_f64().unwrap()).collect();
        Ok(Self { pmf, approx })
    }

    pub fn from_ratios(pmf: &[(i64, i64)]) -> Result<Self, GwError> {
        if pmf.iter().any(|&(_, d)| d == 0) {
            return Err(GwError::InvalidPmf);
        }
        Self::new(pmf.iter().map(|&(n, d)| crate::rng::ratio(n, d)).collect())
    }

    pub fn from_strs<S: AsRef<str>>(pmf: &[S]) -> Result<Self, GwError> {
        let exact: Option<Vec<BigRational>> = pmf.iter().map(|s| parse_rational(s.as_ref())).collect();
        Self::new(exact.ok_or(GwError::InvalidPmf)?)
    }

    /// Point mass on `k` children.
    pub fn deterministic(k: usize) -> Self {
        let mut pmf = vec![BigRational::zero(); k + 1];
        pmf[k] = one();
        Self::new(pmf).unwrap()
    }

    /// Truncated heavy-tail proxy: no children with probability 1/2, and
    /// otherwise `k` children with probability proportional to
    /// `1 / (k^2 (1 + ln k)^exponent)` for `1 <= k <= max`. As `max` grows
    /// with `exponent <= 1` the `k log k` moment diverges; at any finite
    /// `max` it is finite, so this is only an approximation.
    pub fn heavy_tail_proxy(exponent: f64, max: usize) -> Result<Self, GwError> {
        if max == 0 || !exponent.is_finite() {
            return Err(GwError::InvalidPmf);
        }
        let raw: Vec<BigRational> = (1..=max)
            .map(|k| {
                let k = k as f64;
                BigRational::from_float(1.0 / (k * k * (1.0 + k.ln()).powf(exponent))).ok_or(GwError::InvalidPmf)
            })
            .collect::<Result<_, _>>()?;
        let total: BigRational = raw.iter().sum();
        let half = crate::rng::ratio(1, 2);
        let mut pmf = vec![half.clone()];
        pmf.extend(raw.into_iter().map(|w| w / &total * &half));
        Self::new(pmf)
    }

    pub fn pmf(&self) -> &[BigRational] {
        &self.pmf
    }

    pub fn pmf_f64(&self) -> &[f64] {
        &self.approx
    }

    pub fn max_offspring(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn mean(&self) -> BigRational {
        self.pmf
            .iter()
            .enumerate()
            .map(|(k, p)| p * BigRational::from_integer(BigInt::from(k)))
            .sum()
    }

    /// Size-biased law `k p_k / mu`.
    pub fn size_biased(&self) -> Result<Vec<BigRational>, GwError> {
        let mu = self.mean();
        if mu.is_zero() {
            return Err(GwError::DegenerateMean);
        }
        Ok(self
            .pmf
            .iter()
            .enumerate()
            .map(|(k, p)| p * BigRational::from_integer(BigInt::from(k)) / &mu)
            .collect())
    }

    /// `sum_k k log+(k) p_k` with the natural logarithm.
    pub fn k_log_k(&self) -> f64 {
        self.approx
            .iter()
            .enumerate()
            .skip(2)
            .map(|(k, p)| k as f64 * (k as f64).ln() * p)
            .sum()
    }

    fn draw<D: Draw>(&self, d: &mut D) -> usize {
        d.weighted(Weights::Exact {
            exact: &self.pmf,
            approx: &self.approx,
        })
    }
}

/// Galton-Watson tree from a single root, children placed in contiguous
/// blocks, stopped at extinction or after `cap` generations.
pub fn sample_gw_with<R: Randomness>(d: &OffspringDistribution, r: &mut R, cap: usize) -> Genealogy {
    let cap = cap.max(1);
    let mut sizes = vec![1usize];
    let mut litters = Vec::new();
    let mut parents = Vec::new();
    let mut horizon = Horizon::Capped;
    while sizes.len() < cap {
        let n = sizes.len() - 1;
        let s = r.stream(Stream::Offspring, n as u64);
        let k: Vec<usize> = (0..sizes[n]).map(|_| d.draw(s)).collect();
        let next: usize = k.iter().sum();
        if next == 0 {
            horizon = Horizon::Finite;
            break;
        }
        parents.push(planar_parents(&k));
        litters.push(k);
        sizes.push(next);
    }
    let spec = ModelSpec::new(horizon, sizes, litters).expect("consistent by construction");
    Genealogy::from_parts(spec, parents)
}

pub fn sample_gw(d: &OffspringDistribution, seed: SeedSpec, cap: usize) -> Genealogy {
    sample_gw_with(d, &mut Seeded::new(seed), cap)
}

/// A tree with a distinguished path: `spine[n]` is the zero-based index of
/// the spine vertex of generation `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpinalTree {
    pub genealogy: Genealogy,
    pub spine: Vec<usize>,
}

/// Hashable summary `(sizes, parent maps, spine)` used as a law key.
pub type SpinalKey = (Vec<usize>, Vec<Vec<u32>>, Vec<usize>);

impl SpinalTree {
    pub fn key(&self) -> SpinalKey {
        (
            self.genealogy.spec().sizes().to_vec(),
            self.genealogy.parent_maps().to_vec(),
            self.spine.clone(),
        )
    }

    /// Every consecutive spine pair is an edge.
    pub fn is_consistent(&self) -> bool {
        self.spine.len() == self.genealogy.tau()
            && self
                .spine
                .windows(2)
                .enumerate()
                .all(|(n, w)| self.genealogy.parents_of_generation(n + 1)[w[1]] as usize == w[0])
    }

    /// Genealogy text format with an extra 1-based `spine` line.
    pub fn to_text(&self) -> String {
        let mut s = self.genealogy.to_text();
        writeln!(s, "spine {}", join(self.spine.iter().map(|i| i + 1))).unwrap();
        s
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self, GenealogyError> {
        let (genealogy, extras) = read_with_extras(r)?;
        let spine = extras
            .into_iter()
            .find(|(k, _)| k == "spine")
            .map(|(_, v)| v)
            .ok_or(GenealogyError::Format {
                line: 0,
                message: "missing spine line".into(),
            })?;
        if spine.contains(&0) {
            return Err(GenealogyError::Format {
                line: 0,
                message: "spine indices are 1-based".into(),
            });
        }
        let t = SpinalTree {
            genealogy,
            spine: spine.into_iter().map(|i| i - 1).collect(),
        };
        if !t.is_consistent() {
            return Err(GenealogyError::Format {
                line: 0,
                message: "spine is not a path of the genealogy".into(),
            });
        }
        Ok(t)
    }
}

/// Spinal representation of the size-biased tree on `cap` generations.
///
/// Per generation the off-spine vertices draw litters from `(p_k)` in vertex
/// order on the `Offspring` substream, then the spine draws its litter from
/// `k p_k / mu` and its next spine child uniformly on the `Spine` substream.
/// Children are laid out in contiguous blocks, so the new spine index is the
/// number of children of earlier vertices plus the chosen offset.
pub fn sample_spinal_with<R: Randomness>(d: &OffspringDistribution, r: &mut R, cap: usize) -> Result<SpinalTree, GwError> {
    let biased = d.size_biased()?;
    let biased_approx: Vec<f64> = biased.iter().map(|p| p.to_f64().unwrap()).collect();
    let cap = cap.max(1);
    let mut sizes = vec![1usize];
    let mut litters = Vec::new();
    let mut parents = Vec::new();
    let mut spine = vec![0usize];
    for n in 0..cap - 1 {
        let g = spine[n];
        let s = r.stream(Stream::Offspring, n as u64);
        let mut k: Vec<usize> = (0..sizes[n]).map(|i| if i == g { 0 } else { d.draw(s) }).collect();
        let s = r.stream(Stream::Spine, n as u64);
        k[g] = s.weighted(Weights::Exact {
            exact: &biased,
            approx: &biased_approx,
        });
        let offset = s.uniform(k[g]);
        spine.push(k[..g].iter().sum::<usize>() + offset);
        sizes.push(k.iter().sum());
        parents.push(planar_parents(&k));
        litters.push(k);
    }
    let spec = ModelSpec::new(Horizon::Capped, sizes, litters).expect("consistent by construction");
    Ok(SpinalTree {
        genealogy: Genealogy::from_parts(spec, parents),
        spine,
    })
}

pub fn sample_spinal(d: &OffspringDistribution, seed: SeedSpec, cap: usize) -> Result<SpinalTree, GwError> {
    sample_spinal_with(d, &mut Seeded::new(seed), cap)
}

/// Exact law of the size-biased skeleton on `cap` generations: the GW spec
/// law reweighted by `X_{cap-1} / mu^{cap-1}`.
#[derive(Clone, Debug)]
pub struct SizeBiasedSpecLaw {
    specs: Vec<ModelSpec>,
    weights: Vec<(usize, BigRational)>,
    approx: Vec<f64>,
    cap: usize,
}

impl SizeBiasedSpecLaw {
    pub fn new(d: &OffspringDistribution, cap: usize, budget: u64) -> Result<Self, GwError> {
        let mu = d.mean();
        if mu.is_zero() {
            return Err(GwError::DegenerateMean);
        }
        let cap = cap.max(1);
        let law: Law<(Vec<usize>, Vec<Vec<usize>>)> = exact_law(budget, |e| {
            let g = sample_gw_with(d, e, cap);
            (g.spec().sizes().to_vec(), g.spec().all_litters().to_vec())
        })?;
        let norm = num_traits::pow(mu, cap - 1);
        let mut specs = Vec::new();
        let mut weights = Vec::new();
        for ((sizes, litters), p) in law {
            if sizes.len() < cap {
                continue;
            }
            let w = p * BigRational::from_integer(BigInt::from(sizes[cap - 1])) / &norm;
            let spec = ModelSpec::new(Horizon::Capped, sizes, litters).expect("realised spec is valid");
            weights.push((specs.len(), w));
            specs.push(spec);
        }
        let approx = weights.iter().map(|(_, w)| w.to_f64().unwrap()).collect();
        Ok(Self {
            specs,
            weights,
            approx,
            cap,
        })
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Specs with their size-biased probabilities.
    pub fn entries(&self) -> impl Iterator<Item = (&ModelSpec, &BigRational)> {
        self.weights.iter().map(|(i, w)| (&self.specs[*i], w))
    }

    fn draw<D: Draw>(&self, d: &mut D) -> &ModelSpec {
        let exact: Vec<BigRational> = self.weights.iter().map(|(_, w)| w.clone()).collect();
        let i = d.weighted(Weights::Exact {
            exact: &exact,
            approx: &self.approx,
        });
        &self.specs[self.weights[i].0]
    }
}

/// Samples a size-biased skeleton, builds its lookdown coupling and returns
/// the forward tree with the preimage of the base path as spine.
pub fn spine_via_lookdown_with<R: Randomness>(law: &SizeBiasedSpecLaw, r: &mut R) -> SpinalTree {
    let spec = law.draw(r.stream(Stream::SizeBiased, 0)).clone();
    let pair = lookdown_coupling_with(&spec, r);
    let spine = (0..spec.tau()).map(|n| pair.base_preimage(n)).collect();
    SpinalTree {
        genealogy: pair.forward,
        spine,
    }
}

pub fn spine_via_lookdown(d: &OffspringDistribution, seed: SeedSpec, cap: usize, budget: u64) -> Result<SpinalTree, GwError> {
    let law = SizeBiasedSpecLaw::new(d, cap, budget)?;
    Ok(spine_via_lookdown_with(&law, &mut Seeded::new(seed)))
}

/// Exact law of `(tree, spine)` from the spinal construction.
pub fn exact_spinal_law(d: &OffspringDistribution, cap: usize, budget: u64) -> Result<Law<SpinalKey>, GwError> {
    d.size_biased()?;
    Ok(exact_law(budget, |e| sample_spinal_with(d, e, cap).expect("mean checked").key())?)
}

/// Exact law of `(tree, spine)` from the lookdown route.
pub fn exact_lookdown_spine_law(d: &OffspringDistribution, cap: usize, budget: u64) -> Result<Law<SpinalKey>, GwError> {
    let law = SizeBiasedSpecLaw::new(d, cap, budget)?;
    exact_law(budget, |e| spine_via_lookdown_with(&law, e).key()).map_err(|e: EnumerationError| e.into())
}

/// Predicted long-run behaviour of the base path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `mu <= 1`: the tree dies out and the base path fixes.
    Fixation,
    /// Supercritical with infinite `k log k` moment: the spine dominates.
    DominantSpine,
    /// Supercritical with finite `k log k` moment: the base path is not
    /// identifiable in the limit.
    NonIdentifiable,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpineDiagnostics {
    pub mean: String,
    pub mean_f64: f64,
    pub k_log_k: f64,
    pub regime: Regime,
    /// Always false: finite support keeps the `k log k` moment finite.
    pub heavy_tail_reachable: bool,
}

pub fn spine_diagnostics(d: &OffspringDistribution) -> SpineDiagnostics {
    let mu = d.mean();
    let regime = if mu <= one() { Regime::Fixation } else { Regime::NonIdentifiable };
    SpineDiagnostics {
        mean: mu.to_string(),
        mean_f64: mu.to_f64().unwrap(),
        k_log_k: d.k_log_k(),
        regime,
        heavy_tail_reachable: false,
    }
}
