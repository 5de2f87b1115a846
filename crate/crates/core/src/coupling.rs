//! Scrambling, arranging, and the forward/lookdown permutation coupling.

use crate::error::CouplingError;
use crate::genealogy::Genealogy;
use crate::model::ModelSpec;
use crate::rng::{Draw, Randomness, SeedSpec, Seeded, Stream};
use crate::samplers::{lookdown_with, planar_parents};
use crate::testing::{chi_square_goodness_of_fit, contingency_independence, Decision, TestReport};

/// One bijection per generation; `perms[n][i]` is the image of vertex `i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenerationPermutation {
    perms: Vec<Vec<u32>>,
}

impl GenerationPermutation {
    pub fn identity(spec: &ModelSpec) -> Self {
        Self {
            perms: spec.sizes().iter().map(|&x| (0..x as u32).collect()).collect(),
        }
    }

    /// Independent uniform permutations of every generation.
    pub fn uniform_with<R: Randomness>(spec: &ModelSpec, r: &mut R, stream: Stream) -> Self {
        let perms = spec
            .sizes()
            .iter()
            .enumerate()
            .map(|(n, &x)| {
                let mut p: Vec<u32> = (0..x as u32).collect();
                r.stream(stream, n as u64).shuffle(&mut p);
                p
            })
            .collect();
        Self { perms }
    }

    pub fn uniform(spec: &ModelSpec, seed: SeedSpec) -> Self {
        Self::uniform_with(spec, &mut Seeded::new(seed), Stream::Scramble)
    }

    /// Validates that every entry is a bijection.
    pub fn from_vecs(perms: Vec<Vec<u32>>) -> Option<Self> {
        for p in &perms {
            let mut seen = vec![false; p.len()];
            for &x in p {
                if (x as usize) >= p.len() || std::mem::replace(&mut seen[x as usize], true) {
                    return None;
                }
            }
        }
        Some(Self { perms })
    }

    pub fn generations(&self) -> usize {
        self.perms.len()
    }

    pub fn generation(&self, n: usize) -> &[u32] {
        &self.perms[n]
    }

    pub fn apply(&self, n: usize, i: usize) -> usize {
        self.perms[n][i] as usize
    }

    pub fn inverse(&self) -> Self {
        let perms = self
            .perms
            .iter()
            .map(|p| {
                let mut inv = vec![0u32; p.len()];
                for (i, &x) in p.iter().enumerate() {
                    inv[x as usize] = i as u32;
                }
                inv
            })
            .collect();
        Self { perms }
    }

    /// `self o other`, applying `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.perms.len(), other.perms.len());
        let perms = self
            .perms
            .iter()
            .zip(&other.perms)
            .map(|(a, b)| b.iter().map(|&x| a[x as usize]).collect())
            .collect();
        Self { perms }
    }

    fn fits(&self, g: &Genealogy) -> Result<(), CouplingError> {
        for n in 0..g.tau().max(self.perms.len()) {
            if n >= g.tau() || n >= self.perms.len() || self.perms[n].len() != g.spec().size(n) {
                return Err(CouplingError::DimensionMismatch { generation: n });
            }
        }
        Ok(())
    }
}

/// `sigma(E) = {(sigma(v), sigma(w)) : (v, w) in E}`.
pub fn scramble(g: &Genealogy, sigma: &GenerationPermutation) -> Result<Genealogy, CouplingError> {
    sigma.fits(g)?;
    Ok(scramble_unchecked(g, sigma))
}

pub(crate) fn scramble_unchecked(g: &Genealogy, sigma: &GenerationPermutation) -> Genealogy {
    let parents = g
        .parent_maps()
        .iter()
        .enumerate()
        .map(|(n, p)| {
            let mut out = vec![0u32; p.len()];
            for (j, &a) in p.iter().enumerate() {
                out[sigma.perms[n + 1][j] as usize] = sigma.perms[n][a as usize];
            }
            out
        })
        .collect();
    Genealogy::from_parts(g.spec().clone(), parents)
}

/// Law targeted by [`arrange_coupling`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArrangeTarget {
    /// Forward neutral with contiguous child blocks: the conditional law of
    /// the edges given the out-degrees is a point mass.
    Planar,
    /// Forward neutral with exchangeable offspring: given the out-degrees the
    /// child assignment is uniform over all compatible assignments.
    Exchangeable,
}

/// Arranges a forward neutral genealogy into one with the target law.
///
/// `alpha_0` is the identity. Given `alpha_n`, the out-degrees are carried
/// over (`K'_n(alpha_n(i)) = K_n(i)`), target edges for generation `n` are
/// drawn from the target's conditional law using the `Arrange` substream of
/// generation `n`, and `alpha_{n+1}` matches each source litter to its target
/// litter in increasing index order. `alpha_{n+1}` therefore depends only on
/// source generations up to `n` and arrange streams up to `n`.
pub fn arrange_with<R: Randomness>(
    source: &Genealogy,
    target: ArrangeTarget,
    r: &mut R,
) -> (GenerationPermutation, Genealogy) {
    let spec = source.spec();
    let mut alpha: Vec<Vec<u32>> = vec![(0..spec.size(0) as u32).collect()];
    let mut parents = Vec::with_capacity(spec.tau().saturating_sub(1));
    for n in 0..spec.tau() - 1 {
        let a = &alpha[n];
        let source_children = source.children(n);
        let mut target_degrees = vec![0usize; spec.size(n)];
        for (i, c) in source_children.iter().enumerate() {
            target_degrees[a[i] as usize] = c.len();
        }
        let assignment = match target {
            ArrangeTarget::Planar => planar_parents(&target_degrees),
            ArrangeTarget::Exchangeable => {
                let mut labels = planar_parents(&target_degrees);
                r.stream(Stream::Arrange, n as u64).shuffle(&mut labels);
                labels
            }
        };
        let mut target_children = vec![Vec::new(); spec.size(n)];
        for (j, &p) in assignment.iter().enumerate() {
            target_children[p as usize].push(j as u32);
        }
        let mut next = vec![0u32; spec.size(n + 1)];
        for (i, c) in source_children.iter().enumerate() {
            for (&from, &to) in c.iter().zip(&target_children[a[i] as usize]) {
                next[from] = to;
            }
        }
        alpha.push(next);
        parents.push(assignment);
    }
    (
        GenerationPermutation { perms: alpha },
        Genealogy::from_parts(spec.clone(), parents),
    )
}

pub fn arrange_coupling(source: &Genealogy, target: ArrangeTarget, aux: SeedSpec) -> (GenerationPermutation, Genealogy) {
    arrange_with(source, target, &mut Seeded::new(aux))
}

/// A forward neutral genealogy and the lookdown with
/// `lookdown = sigma(forward)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoupledPair {
    pub forward: Genealogy,
    pub lookdown: Genealogy,
    pub sigma: GenerationPermutation,
}

impl CoupledPair {
    /// Index in the forward genealogy of the base-path vertex `(n, 1)`.
    pub fn base_preimage(&self, n: usize) -> usize {
        self.sigma.perms[n].iter().position(|&x| x == 0).unwrap()
    }

    /// Lookdown rank (zero-based) of forward vertex `i` of generation `n`.
    pub fn rank(&self, n: usize, i: usize) -> usize {
        self.sigma.apply(n, i)
    }
}

/// Builds the coupling by scrambling a lookdown with an independent uniform
/// `beta`, arranging the result into the planar forward model with `alpha`,
/// and returning `sigma = (alpha o beta)^-1`.
pub fn lookdown_coupling_with<R: Randomness>(spec: &ModelSpec, r: &mut R) -> CoupledPair {
    let lookdown = lookdown_with(spec, r);
    let beta = GenerationPermutation::uniform_with(spec, r, Stream::Scramble);
    let scrambled = scramble_unchecked(&lookdown, &beta);
    let (alpha, forward) = arrange_with(&scrambled, ArrangeTarget::Planar, r);
    let sigma = alpha.compose(&beta).inverse();
    CoupledPair {
        forward,
        lookdown,
        sigma,
    }
}

pub fn lookdown_coupling(spec: &ModelSpec, seed: SeedSpec) -> CoupledPair {
    lookdown_coupling_with(spec, &mut Seeded::new(seed))
}

/// Lehmer-code rank of a permutation in `0..len!`.
pub fn permutation_rank(p: &[u32]) -> usize {
    let n = p.len();
    let mut rank = 0usize;
    for i in 0..n {
        let smaller = p[i + 1..].iter().filter(|&&x| x < p[i]).count();
        rank = rank * (n - i) + smaller;
    }
    rank
}

/// One observation for [`uniformity_diagnostic`]: a permutation of one
/// generation and a discretised summary of earlier forward edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationSample {
    pub sigma: Vec<u32>,
    pub early: usize,
}

#[derive(Clone, Debug)]
pub struct UniformityReport {
    pub goodness_of_fit: TestReport,
    pub independence: TestReport,
    pub decision: Decision,
}

pub const MIN_DIAGNOSTIC_SAMPLES: usize = 1000;

/// Chi-square goodness of fit of the permutations against the uniform law,
/// and a contingency test of independence between permutation and early
/// summary. Independence across generations is deliberately not tested.
pub fn uniformity_diagnostic(samples: &[PermutationSample], alpha: f64) -> Result<UniformityReport, CouplingError> {
    if samples.len() < MIN_DIAGNOSTIC_SAMPLES {
        return Err(CouplingError::InsufficientSamples {
            needed: MIN_DIAGNOSTIC_SAMPLES,
            found: samples.len(),
        });
    }
    let width = samples[0].sigma.len();
    let cells = (1..=width).product::<usize>();
    let mut counts = vec![0u64; cells];
    let mut pairs = Vec::with_capacity(samples.len());
    for s in samples {
        assert_eq!(s.sigma.len(), width, "mixed permutation sizes");
        let r = permutation_rank(&s.sigma);
        counts[r] += 1;
        pairs.push((r, s.early));
    }
    let expected = vec![1.0 / cells as f64; cells];
    let goodness_of_fit = chi_square_goodness_of_fit("sigma-uniformity", &counts, &expected, alpha);
    let independence = contingency_independence("sigma-past-independence", &pairs, alpha);
    let decision = if goodness_of_fit.decision == Decision::Reject || independence.decision == Decision::Reject {
        Decision::Reject
    } else {
        Decision::Accept
    };
    Ok(UniformityReport {
        goodness_of_fit,
        independence,
        decision,
    })
}
