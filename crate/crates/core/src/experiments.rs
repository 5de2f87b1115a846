//! Identification probability, the dominance dichotomy, rank recovery and
//! fixation experiments.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::coupling::{lookdown_coupling, scramble_unchecked, CoupledPair, GenerationPermutation};
use crate::error::{EnumerationError, ExperimentError, SpecError, StatsError};
use crate::genealogy::Genealogy;
use crate::model::{FamilySpec, ModelSpec, VertexRef};
use crate::rng::{exact_law, par_replicates, Law, SeedSpec, Stream};
use crate::samplers::{build_lookdown, check_budget, enumeration_size, lookdown_with, SamplerKind};
use crate::stats::{ancestors, coalescent_scale, extinction_times, EstimateWithCI, MIN_REPS};

pub use crate::stats::DEFAULT_Z;
pub use crate::testing::{distribution_equality_test, Distribution, TestReport};

pub const DEFAULT_REPS: usize = 10_000;
pub const DEFAULT_ALPHA: f64 = 0.01;

/// Exact identification probability `rho(v) = sum_E max_w P(E, sigma(v) = w)`
/// of a vertex of the lookdown, enumerating the lookdown randomness and a
/// uniform scramble.
pub fn exact_identification_probability(spec: &ModelSpec, v: VertexRef, budget: u64) -> Result<BigRational, EnumerationError> {
    check_budget(enumeration_size(spec, SamplerKind::CompletelyNeutral), budget)?;
    assert!(v.exists_in(spec), "vertex {v} is not in the spec");
    let joint: Law<(Vec<Vec<u32>>, usize)> = exact_law(budget, |e| {
        let g = lookdown_with(spec, e);
        let sigma = GenerationPermutation::uniform_with(spec, e, Stream::Scramble);
        let w = sigma.apply(v.generation, v.slot());
        (scramble_unchecked(&g, &sigma).into_parent_maps(), w)
    })?;
    let mut best: BTreeMap<&Vec<Vec<u32>>, BigRational> = BTreeMap::new();
    for ((obs, _), p) in &joint {
        let b = best.entry(obs).or_insert_with(BigRational::zero);
        if p > b {
            *b = p.clone();
        }
    }
    Ok(best.into_values().sum())
}

/// `E[max_{v in V_n} x_M(v)]` under the lookdown with `M` the last stored
/// generation, by the same enumeration.
pub fn exact_expected_max_frequency(spec: &ModelSpec, n: usize, budget: u64) -> Result<BigRational, EnumerationError> {
    check_budget(enumeration_size(spec, SamplerKind::Lookdown), budget)?;
    let last = spec.tau() - 1;
    let law = exact_law(budget, |e| {
        let g = lookdown_with(spec, e);
        max_count(&g, n, last)
    })?;
    let x = BigInt::from(spec.size(last));
    Ok(law
        .into_iter()
        .map(|(c, p)| p * BigRational::new(BigInt::from(c), x.clone()))
        .sum())
}

fn counts(g: &Genealogy, n: usize, m: usize) -> Vec<usize> {
    let mut c = vec![0usize; g.spec().size(n)];
    for a in ancestors(g, n, m).expect("range checked") {
        c[a as usize] += 1;
    }
    c
}

fn max_count(g: &Genealogy, n: usize, m: usize) -> usize {
    counts(g, n, m).into_iter().max().unwrap_or(0)
}

/// Specs for each replicate: expanded once for deterministic families,
/// realised per replicate for random ones, and truncated after `horizon`.
fn replicate_spec(family: &FamilySpec, fixed: Option<&ModelSpec>, seed: SeedSpec, horizon: usize) -> Result<ModelSpec, SpecError> {
    let spec = match fixed {
        Some(s) => s.clone(),
        None => family.realize(seed)?,
    };
    Ok(spec.truncated(horizon + 1))
}

fn check_reps(reps: usize) -> Result<(), StatsError> {
    if reps < MIN_REPS {
        return Err(StatsError::InsufficientReps {
            needed: MIN_REPS,
            found: reps,
        });
    }
    Ok(())
}

/// Monte Carlo estimate of `rho(u_n)` through `E[max_v x_M(v)]` over lookdown
/// replicates. When a replicate's population ends before `M` its last
/// generation is used; the reported horizon is `M`.
pub fn estimate_base_identification(
    family: &FamilySpec,
    n: usize,
    horizon: usize,
    reps: usize,
    seed: SeedSpec,
) -> Result<EstimateWithCI, ExperimentError> {
    check_reps(reps)?;
    let fixed = if family.is_random() { None } else { Some(family.expand()?) };
    let values: Vec<Result<f64, ExperimentError>> = par_replicates(seed, reps, |s| {
        let spec = replicate_spec(family, fixed.as_ref(), s, horizon)?;
        if n >= spec.tau() {
            // The population died out before generation n.
            return Ok(0.0);
        }
        let g = build_lookdown(&spec, s);
        let m = spec.tau() - 1;
        Ok(max_count(&g, n, m) as f64 / spec.size(m) as f64)
    });
    let values: Vec<f64> = values.into_iter().collect::<Result<_, _>>()?;
    Ok(EstimateWithCI::from_values(&values, Some(horizon), seed))
}

/// Success rate of the MAP guess of the base vertex from the scrambled
/// genealogy: the vertex of generation `n` with most descendants at `M`,
/// lowest index on ties. A tie among several maximisers counts as a failure.
pub fn estimate_map_identification(spec: &ModelSpec, n: usize, horizon: usize, reps: usize, seed: SeedSpec) -> Result<EstimateWithCI, StatsError> {
    check_reps(reps)?;
    let spec = spec.truncated(horizon + 1);
    let m = spec.tau() - 1;
    if n > m {
        return Err(StatsError::OutOfRange {
            from: n,
            to: horizon,
            tau: spec.tau(),
        });
    }
    let values = par_replicates(seed, reps, |s| {
        let pair = lookdown_coupling(&spec, s);
        let c = counts(&pair.forward, n, m);
        let best = *c.iter().max().unwrap();
        let guess = c.iter().position(|&x| x == best).unwrap();
        let unique = c.iter().filter(|&&x| x == best).count() == 1;
        f64::from(u8::from(unique && guess == pair.base_preimage(n)))
    });
    Ok(EstimateWithCI::from_values(&values, Some(horizon), seed))
}

#[derive(Clone, Debug, Serialize)]
pub struct DichotomyRow {
    pub n: usize,
    pub t_n: f64,
    pub t_n_trunc: f64,
    pub rho: EstimateWithCI,
}

/// Per `n` in the grid: the coalescent and truncated time scales and the
/// estimated `rho(u_n)` at horizon `M`. Random families report the time
/// scales of the replicate-0 realisation.
pub fn dichotomy_experiment(
    family: &FamilySpec,
    grid: &[usize],
    horizon: usize,
    reps: usize,
    seed: SeedSpec,
) -> Result<Vec<DichotomyRow>, ExperimentError> {
    let spec = if family.is_random() {
        family.realize(seed.replicate(0))?
    } else {
        family.expand()?
    };
    let scale = coalescent_scale(&spec);
    grid.iter()
        .map(|&n| {
            let t = |v: &[BigRational]| v.get(n).map_or(f64::NAN, |x| num_traits::ToPrimitive::to_f64(x).unwrap());
            Ok(DichotomyRow {
                n,
                t_n: t(&scale.t),
                t_n_trunc: t(&scale.t_trunc),
                rho: estimate_base_identification(family, n, horizon, reps, seed)?,
            })
        })
        .collect()
}

/// Outcome of [`detect_fixation`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Fixation {
    /// From `generation` on, only `survivor` (zero-based) has descendants.
    At { generation: usize, survivor: usize },
    /// Generation `n` has a single vertex, so no line can be lost.
    Trivial,
    NotByCap,
}

/// Least `m >= n` at which all but one vertex of generation `n` have no
/// descendants in generation `m`. A fixation event needs at least two
/// vertices in generation `n`.
pub fn detect_fixation(g: &Genealogy, n: usize) -> Fixation {
    if g.spec().size(n) < 2 {
        return Fixation::Trivial;
    }
    let mut anc: Vec<u32> = (0..g.spec().size(n) as u32).collect();
    let mut m = n;
    loop {
        let first = anc[0];
        if anc.iter().all(|&a| a == first) {
            return Fixation::At {
                generation: m,
                survivor: first as usize,
            };
        }
        if m + 1 >= g.tau() {
            return Fixation::NotByCap;
        }
        m += 1;
        anc = g.parents_of_generation(m).iter().map(|&p| anc[p as usize]).collect();
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenerationRecovery {
    pub generation: usize,
    pub vertices: usize,
    /// Vertices whose extinction time is not shared with another vertex.
    pub resolvable: usize,
    /// Resolvable vertices whose inferred rank equals the lookdown rank.
    pub correct: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankRecovery {
    pub generations: Vec<GenerationRecovery>,
    /// `i -> tau((n, i))` is non-increasing in the lookdown for every `n`.
    pub monotone: bool,
}

impl RankRecovery {
    pub fn resolvable(&self) -> usize {
        self.generations.iter().map(|g| g.resolvable).sum()
    }

    pub fn correct(&self) -> usize {
        self.generations.iter().map(|g| g.correct).sum()
    }

    /// Exact-match rate on resolvable vertices (1 when none are resolvable).
    pub fn accuracy(&self) -> f64 {
        match self.resolvable() {
            0 => 1.0,
            r => self.correct() as f64 / r as f64,
        }
    }

    pub fn resolvable_fraction(&self) -> f64 {
        let total: usize = self.generations.iter().map(|g| g.vertices).sum();
        self.resolvable() as f64 / total as f64
    }
}

/// Infers lookdown ranks of the forward vertices from extinction times
/// alone: a vertex whose extinction time is unique in its generation gets the
/// rank equal to the number of vertices that outlive it. Censored times count
/// as +infinity and tie with each other.
pub fn rank_recovery_by_extinction(pair: &CoupledPair) -> RankRecovery {
    let observed = extinction_times(&pair.forward);
    let truth = extinction_times(&pair.lookdown);
    let monotone = truth.iter().all(|e| e.windows(2).all(|w| w[0] >= w[1]));
    let generations = observed
        .iter()
        .enumerate()
        .map(|(n, e)| {
            let mut resolvable = 0;
            let mut correct = 0;
            for (i, t) in e.iter().enumerate() {
                if e.iter().filter(|&u| u == t).count() > 1 {
                    continue;
                }
                resolvable += 1;
                let inferred = e.iter().filter(|&u| u > t).count();
                if inferred == pair.rank(n, i) {
                    correct += 1;
                }
            }
            GenerationRecovery {
                generation: n,
                vertices: e.len(),
                resolvable,
                correct,
            }
        })
        .collect();
    RankRecovery { generations, monotone }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixationSummary {
    /// Per-replicate outcome, in replicate order.
    pub runs: Vec<Fixation>,
    pub fixed: usize,
    /// Replicates in which the fixed line was the base path.
    pub base_path_fixed: usize,
    /// Replicates in which the survivor's frequency was exactly one from the
    /// fixation generation to the cap.
    pub dominant_after_fixation: usize,
    pub mean_fixation_generation: Option<f64>,
}

impl FixationSummary {
    pub fn replicates(&self) -> usize {
        self.runs.len()
    }

    pub fn frequency(&self) -> f64 {
        self.fixed as f64 / self.runs.len() as f64
    }
}

/// Runs `detect_fixation` for generation `n` on lookdown replicates.
pub fn fixation_experiment(spec: &ModelSpec, n: usize, reps: usize, seed: SeedSpec) -> FixationSummary {
    let runs = par_replicates(seed, reps, |s| {
        let g = build_lookdown(spec, s);
        let f = detect_fixation(&g, n);
        let dominant = match f {
            Fixation::At { generation, survivor } => (generation..g.tau()).all(|m| counts(&g, n, m)[survivor] == spec.size(m)),
            Fixation::Trivial | Fixation::NotByCap => false,
        };
        (f, dominant)
    });
    let fixed: Vec<(usize, usize)> = runs
        .iter()
        .filter_map(|(f, _)| match f {
            Fixation::At { generation, survivor } => Some((*generation, *survivor)),
            Fixation::Trivial | Fixation::NotByCap => None,
        })
        .collect();
    FixationSummary {
        fixed: fixed.len(),
        base_path_fixed: fixed.iter().filter(|f| f.1 == 0).count(),
        dominant_after_fixation: runs.iter().filter(|r| r.1).count(),
        mean_fixation_generation: if fixed.is_empty() {
            None
        } else {
            Some(fixed.iter().map(|f| f.0 as f64).sum::<f64>() / fixed.len() as f64)
        },
        runs: runs.into_iter().map(|r| r.0).collect(),
    }
}
