//! Model specifications: population sizes, litter sizes and the parametric
//! families that generate them.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::SpecError;
use crate::gw::OffspringDistribution;
use crate::rng::SeedSpec;

/// How the last stored generation relates to the extinction time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Horizon {
    /// The population is extinct after the last stored generation.
    Finite,
    /// The population continues; the last stored generation is a cap.
    Capped,
}

/// The deterministic skeleton `(tau, X_n, k_n)` consumed by every sampler.
///
/// `sizes[n]` is the population size of generation `n` and `litters[n]` the
/// litter sizes of generation `n`, stored in non-increasing order. There is
/// one litter vector per generation except the last. Cloning is cheap.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModelSpec {
    horizon: Horizon,
    sizes: Arc<[usize]>,
    litters: Arc<[Vec<usize>]>,
}

impl ModelSpec {
    /// Validates the consistency conditions and sorts each litter vector.
    pub fn new(horizon: Horizon, sizes: Vec<usize>, litters: Vec<Vec<usize>>) -> Result<Self, SpecError> {
        if sizes.is_empty() {
            return Err(SpecError::NoGenerations);
        }
        if let Some(generation) = sizes.iter().position(|&x| x == 0) {
            return Err(SpecError::EmptyGeneration { generation });
        }
        if litters.len() + 1 != sizes.len() {
            return Err(SpecError::LitterGenerations {
                sizes: sizes.len(),
                expected: sizes.len() - 1,
                found: litters.len(),
            });
        }
        let mut sorted = Vec::with_capacity(litters.len());
        for (n, mut k) in litters.into_iter().enumerate() {
            if k.len() != sizes[n] {
                return Err(SpecError::LitterCount {
                    generation: n,
                    expected: sizes[n],
                    found: k.len(),
                });
            }
            let total: usize = k.iter().sum();
            if total != sizes[n + 1] {
                return Err(SpecError::SizeMismatch {
                    generation: n,
                    expected: sizes[n + 1],
                    found: total,
                });
            }
            k.sort_unstable_by(|a, b| b.cmp(a));
            sorted.push(k);
        }
        Ok(Self {
            horizon,
            sizes: sizes.into(),
            litters: sorted.into(),
        })
    }

    /// Builds a spec from litters alone, starting from `initial` vertices.
    pub fn from_litters(horizon: Horizon, initial: usize, litters: Vec<Vec<usize>>) -> Result<Self, SpecError> {
        let mut sizes = vec![initial];
        for k in &litters {
            sizes.push(k.iter().sum());
        }
        Self::new(horizon, sizes, litters)
    }

    /// Number of stored generations.
    pub fn tau(&self) -> usize {
        self.sizes.len()
    }

    pub fn horizon(&self) -> Horizon {
        self.horizon
    }

    pub fn size(&self, n: usize) -> usize {
        self.sizes[n]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn litters(&self, n: usize) -> &[usize] {
        &self.litters[n]
    }

    pub fn all_litters(&self) -> &[Vec<usize>] {
        &self.litters
    }

    /// Number of parents with at least one child in generation `n`.
    pub fn parents_with_children(&self, n: usize) -> usize {
        self.litters[n].iter().take_while(|&&k| k > 0).count()
    }

    pub fn max_litter(&self, n: usize) -> usize {
        self.litters[n].first().copied().unwrap_or(0)
    }

    /// The spec restricted to generations `0..generations`, marked as capped.
    pub fn truncated(&self, generations: usize) -> ModelSpec {
        let g = generations.clamp(1, self.tau());
        if g == self.tau() {
            return self.clone();
        }
        ModelSpec {
            horizon: Horizon::Capped,
            sizes: self.sizes[..g].into(),
            litters: self.litters[..g - 1].into(),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X={:?}", self.sizes)?;
        if !self.litters.is_empty() {
            write!(f, " k={:?}", self.litters)?;
        }
        Ok(())
    }
}

/// A vertex `(n, i)` with 1-based index `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexRef {
    pub generation: usize,
    pub index: usize,
}

impl VertexRef {
    pub fn new(generation: usize, index: usize) -> Self {
        assert!(index >= 1, "vertex indices are 1-based");
        Self { generation, index }
    }

    /// Vertex `(n, 1)` on the base path.
    pub fn base(generation: usize) -> Self {
        Self::new(generation, 1)
    }

    /// Zero-based slot in the generation's vectors.
    pub fn slot(&self) -> usize {
        self.index - 1
    }

    pub fn exists_in(&self, spec: &ModelSpec) -> bool {
        self.generation < spec.tau() && self.index <= spec.size(self.generation)
    }
}

impl fmt::Display for VertexRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.generation, self.index)
    }
}

/// Birth counts `b_n` of an asynchronous family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum BirthRule {
    Constant(usize),
    Sequence(Vec<usize>),
    /// `b_n = X_n + 1`: one parent gets `X_n + 1` children and no one dies,
    /// so the population doubles every generation.
    Doubling,
}

impl BirthRule {
    fn births(&self, n: usize, current: usize) -> Option<usize> {
        match self {
            BirthRule::Constant(b) => Some(*b),
            BirthRule::Sequence(bs) => bs.get(n).copied(),
            BirthRule::Doubling => Some(current + 1),
        }
    }
}

/// Parametric families of model specs.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilyKind {
    Explicit {
        horizon: Horizon,
        sizes: Vec<usize>,
        litters: Vec<Vec<usize>>,
    },
    /// One individual dies or gives birth each generation:
    /// `k_n = (b_n, 1, ..., 1)` and `X_{n+1} = X_n + b_n - 1`.
    Asynchronous { initial: usize, births: BirthRule },
    /// Every individual has `litter` children.
    Synchronous { initial: usize, litter: usize },
    /// Constant population `N`: each generation one vertex has two children,
    /// one has none and the rest have one, so `k_n = (2, 1, ..., 1, 0)`.
    Moran { population: usize },
    GaltonWatson { offspring: OffspringDistribution },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    /// Maximum number of generations; ignored by explicit families.
    pub cap: usize,
}

impl FamilySpec {
    pub fn moran(population: usize, cap: usize) -> Self {
        Self {
            kind: FamilyKind::Moran { population },
            cap,
        }
    }

    pub fn asynchronous(initial: usize, births: BirthRule, cap: usize) -> Self {
        Self {
            kind: FamilyKind::Asynchronous { initial, births },
            cap,
        }
    }

    pub fn synchronous(initial: usize, litter: usize, cap: usize) -> Self {
        Self {
            kind: FamilyKind::Synchronous { initial, litter },
            cap,
        }
    }

    pub fn galton_watson(offspring: OffspringDistribution, cap: usize) -> Self {
        Self {
            kind: FamilyKind::GaltonWatson { offspring },
            cap,
        }
    }

    pub fn explicit(spec: &ModelSpec) -> Self {
        Self {
            kind: FamilyKind::Explicit {
                horizon: spec.horizon(),
                sizes: spec.sizes().to_vec(),
                litters: spec.all_litters().to_vec(),
            },
            cap: spec.tau(),
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(self.kind, FamilyKind::GaltonWatson { .. })
    }

    /// Expands a deterministic family into its model spec.
    pub fn expand(&self) -> Result<ModelSpec, SpecError> {
        if self.cap == 0 {
            return Err(SpecError::InvalidParameter("cap"));
        }
        match &self.kind {
            FamilyKind::Explicit {
                horizon,
                sizes,
                litters,
            } => ModelSpec::new(*horizon, sizes.clone(), litters.clone()),
            FamilyKind::Asynchronous { initial, births } => expand_asynchronous(*initial, births, self.cap),
            FamilyKind::Moran { population } => {
                if *population < 2 {
                    return Err(SpecError::InvalidParameter("N"));
                }
                let n = *population;
                let mut k = vec![1; n];
                k[0] = 2;
                k[n - 1] = 0;
                ModelSpec::new(Horizon::Capped, vec![n; self.cap], vec![k; self.cap - 1])
            }
            FamilyKind::Synchronous { initial, litter } => {
                if *initial == 0 {
                    return Err(SpecError::InvalidParameter("x0"));
                }
                let mut sizes = vec![*initial];
                let mut litters = Vec::new();
                let mut horizon = Horizon::Capped;
                while sizes.len() < self.cap {
                    let x = *sizes.last().unwrap();
                    let next = x.checked_mul(*litter).ok_or(SpecError::InvalidParameter("cap"))?;
                    if next == 0 {
                        horizon = Horizon::Finite;
                        break;
                    }
                    litters.push(vec![*litter; x]);
                    sizes.push(next);
                }
                ModelSpec::new(horizon, sizes, litters)
            }
            FamilyKind::GaltonWatson { .. } => Err(SpecError::RandomFamily),
        }
    }

    /// Expands the family, sampling a Galton-Watson skeleton when the family
    /// is random.
    pub fn realize(&self, seed: SeedSpec) -> Result<ModelSpec, SpecError> {
        match &self.kind {
            FamilyKind::GaltonWatson { offspring } => {
                if self.cap == 0 {
                    return Err(SpecError::InvalidParameter("cap"));
                }
                Ok(crate::gw::sample_gw(offspring, seed, self.cap).spec().clone())
            }
            _ => self.expand(),
        }
    }
}

fn expand_asynchronous(initial: usize, births: &BirthRule, cap: usize) -> Result<ModelSpec, SpecError> {
    if initial == 0 {
        return Err(SpecError::InvalidParameter("x0"));
    }
    let mut sizes = vec![initial];
    let mut litters = Vec::new();
    let mut horizon = Horizon::Capped;
    while sizes.len() < cap {
        let n = sizes.len() - 1;
        let x = sizes[n];
        let Some(b) = births.births(n, x) else {
            break;
        };
        if b == 1 {
            return Err(SpecError::UnitBirth { generation: n });
        }
        let next = x + b - 1;
        if next == 0 {
            horizon = Horizon::Finite;
            break;
        }
        let mut k = vec![1; x];
        k[0] = b;
        litters.push(k);
        sizes.push(next);
    }
    ModelSpec::new(horizon, sizes, litters)
}
