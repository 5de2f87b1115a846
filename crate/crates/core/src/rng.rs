//! Seeded random streams and the exhaustive enumerator.
//!
//! Every sampler in this crate draws its randomness through [`Randomness`],
//! asking for a named substream per generation. Two implementations exist:
//!
//! * [`Seeded`] derives an independent ChaCha stream from
//!   `(root seed, stream label, index)` through a fixed 64-bit mixer, so a
//!   `(spec, seed)` pair always produces the same output and generations can
//!   be regenerated independently of each other.
//! * [`Enumerator`] replays the sampler once per leaf of its choice tree and
//!   yields every outcome together with its exact probability. This is how the
//!   exact laws used throughout the test-suite are obtained: the enumerated
//!   code is the production sampler itself.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::EnumerationError;

/// Exact probability law over outcomes of type `K`.
pub type Law<K> = BTreeMap<K, BigRational>;

/// Root seed of a run. Substreams are derived, never shared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub root: u64,
}

/// Labels of the independent substreams consumed by the samplers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stream {
    Forward,
    Lookdown,
    Scramble,
    Arrange,
    Replicate,
    Pair,
    Offspring,
    Spine,
    SizeBiased,
    Partition,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Forward => 0x01,
            Stream::Lookdown => 0x02,
            Stream::Scramble => 0x03,
            Stream::Arrange => 0x04,
            Stream::Replicate => 0x05,
            Stream::Pair => 0x06,
            Stream::Offspring => 0x07,
            Stream::Spine => 0x08,
            Stream::SizeBiased => 0x09,
            Stream::Partition => 0x0a,
        }
    }
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl SeedSpec {
    pub fn new(root: u64) -> Self {
        Self { root }
    }

    pub fn substream_seed(&self, label: Stream, index: u64) -> u64 {
        mix64(mix64(mix64(self.root) ^ label.tag()) ^ index)
    }

    pub fn rng(&self, label: Stream, index: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.substream_seed(label, index))
    }

    /// Seed of replicate `index`; replicates are independent of each other and
    /// of the parent seed's own streams.
    pub fn replicate(&self, index: u64) -> SeedSpec {
        SeedSpec::new(self.substream_seed(Stream::Replicate, index))
    }
}

/// Weights for a categorical draw. Exact weights are used when enumerating,
/// floating weights when sampling.
#[derive(Clone, Copy, Debug)]
pub enum Weights<'a> {
    Float(&'a [f64]),
    Exact {
        exact: &'a [BigRational],
        approx: &'a [f64],
    },
}

impl Weights<'_> {
    fn len(&self) -> usize {
        match self {
            Weights::Float(w) => w.len(),
            Weights::Exact { approx, .. } => approx.len(),
        }
    }

    fn approx(&self) -> &[f64] {
        match self {
            Weights::Float(w) => w,
            Weights::Exact { approx, .. } => approx,
        }
    }

    fn exact(&self, i: usize) -> BigRational {
        match self {
            Weights::Float(w) => BigRational::from_float(w[i]).expect("finite weight"),
            Weights::Exact { exact, .. } => exact[i].clone(),
        }
    }
}

/// A single source of draws.
pub trait Draw {
    /// Uniform index in `0..n`; `n` must be positive.
    fn uniform(&mut self, n: usize) -> usize;

    /// Index drawn with probability proportional to its weight. The total
    /// weight must be positive.
    fn weighted(&mut self, weights: Weights<'_>) -> usize;

    /// Uniform random permutation of `xs` in place.
    fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.uniform(i + 1);
            xs.swap(i, j);
        }
    }
}

impl<R: RngCore> Draw for R {
    fn uniform(&mut self, n: usize) -> usize {
        self.random_range(0..n)
    }

    fn weighted(&mut self, weights: Weights<'_>) -> usize {
        let w = weights.approx();
        let total: f64 = w.iter().sum();
        let mut u = self.random::<f64>() * total;
        let mut last = 0;
        for (i, &x) in w.iter().enumerate() {
            if x > 0.0 {
                if u < x {
                    return i;
                }
                u -= x;
                last = i;
            }
        }
        last
    }

    fn shuffle<T>(&mut self, xs: &mut [T]) {
        xs.shuffle(self);
    }
}

/// Hands out one [`Draw`] per `(stream, index)`. Requesting a stream restarts
/// it, so a sampler must finish with one substream before asking for another.
pub trait Randomness {
    type Source: Draw;

    fn stream(&mut self, label: Stream, index: u64) -> &mut Self::Source;
}

/// Seeded implementation of [`Randomness`].
#[derive(Clone, Debug)]
pub struct Seeded {
    seed: SeedSpec,
    current: ChaCha8Rng,
}

impl Seeded {
    pub fn new(seed: SeedSpec) -> Self {
        Self {
            current: seed.rng(Stream::Replicate, u64::MAX),
            seed,
        }
    }

    pub fn seed(&self) -> SeedSpec {
        self.seed
    }
}

impl Randomness for Seeded {
    type Source = ChaCha8Rng;

    fn stream(&mut self, label: Stream, index: u64) -> &mut ChaCha8Rng {
        self.current = self.seed.rng(label, index);
        &mut self.current
    }
}

/// Walks the full choice tree of a sampler, one leaf per call of the sampler.
///
/// Uniform choices contribute `1/n` to the leaf weight, weighted choices their
/// exact normalised weight. Zero-weight options are never visited.
#[derive(Debug, Default)]
pub struct Enumerator {
    // (position in support, support size, support indices for weighted draws)
    path: Vec<Choice>,
    cursor: usize,
    uniform_denominator: u128,
    factor: Option<BigRational>,
}

#[derive(Debug)]
struct Choice {
    taken: usize,
    arity: usize,
    support: Option<Vec<usize>>,
}

impl Enumerator {
    fn start_leaf(&mut self) {
        self.cursor = 0;
        self.uniform_denominator = 1;
        self.factor = None;
    }

    fn next_choice(&mut self, arity: usize, support: Option<Vec<usize>>) -> usize {
        assert!(arity > 0, "choice with empty support");
        if self.cursor < self.path.len() {
            let c = &self.path[self.cursor];
            assert_eq!(c.arity, arity, "sampler is not deterministic given its draws");
            self.cursor += 1;
            match &c.support {
                Some(s) => s[c.taken],
                None => c.taken,
            }
        } else {
            let first = support.as_ref().map_or(0, |s| s[0]);
            self.path.push(Choice {
                taken: 0,
                arity,
                support,
            });
            self.cursor += 1;
            first
        }
    }

    /// Advance the odometer; false once every leaf was visited.
    fn advance(&mut self) -> bool {
        self.path.truncate(self.cursor);
        while let Some(last) = self.path.last_mut() {
            if last.taken + 1 < last.arity {
                last.taken += 1;
                return true;
            }
            self.path.pop();
        }
        false
    }

    fn leaf_weight(&self) -> LeafWeight {
        LeafWeight {
            denominator: self.uniform_denominator,
            factor: self.factor.clone(),
        }
    }
}

impl Draw for Enumerator {
    fn uniform(&mut self, n: usize) -> usize {
        let c = self.next_choice(n, None);
        self.uniform_denominator = self
            .uniform_denominator
            .checked_mul(n as u128)
            .expect("enumeration depth overflow");
        c
    }

    fn weighted(&mut self, weights: Weights<'_>) -> usize {
        let support: Vec<usize> = (0..weights.len())
            .filter(|&i| !weights.exact(i).is_zero())
            .collect();
        let total: BigRational = support.iter().map(|&i| weights.exact(i)).sum();
        let i = self.next_choice(support.len(), Some(support));
        let w = weights.exact(i) / total;
        self.factor = Some(match self.factor.take() {
            Some(f) => f * w,
            None => w,
        });
        i
    }
}

impl Randomness for Enumerator {
    type Source = Enumerator;

    fn stream(&mut self, _label: Stream, _index: u64) -> &mut Enumerator {
        self
    }
}

#[derive(Clone, Debug)]
struct LeafWeight {
    denominator: u128,
    factor: Option<BigRational>,
}

// Sums leaf weights without big-rational arithmetic on the common path where
// every draw on a leaf was uniform.
#[derive(Default)]
struct WeightAccumulator {
    by_denominator: BTreeMap<u128, u128>,
    weighted: Option<BigRational>,
}

impl WeightAccumulator {
    fn add(&mut self, w: LeafWeight) {
        match w.factor {
            None => *self.by_denominator.entry(w.denominator).or_insert(0) += 1,
            Some(f) => {
                let term = f / BigRational::from_integer(BigInt::from(w.denominator));
                self.weighted = Some(match self.weighted.take() {
                    Some(acc) => acc + term,
                    None => term,
                });
            }
        }
    }

    fn total(self) -> BigRational {
        let mut acc = self.weighted.unwrap_or_else(BigRational::zero);
        for (d, c) in self.by_denominator {
            acc += BigRational::new(BigInt::from(c), BigInt::from(d));
        }
        acc
    }
}

/// Visit every leaf of `sampler`'s choice tree, passing the outcome and its
/// exact probability to `visit`. Fails once more than `budget` leaves are
/// visited.
pub fn enumerate_each<T, F, V>(budget: u64, mut sampler: F, mut visit: V) -> Result<u64, EnumerationError>
where
    F: FnMut(&mut Enumerator) -> T,
    V: FnMut(T, BigRational),
{
    let mut e = Enumerator::default();
    let mut leaves = 0u64;
    loop {
        leaves += 1;
        if leaves > budget {
            return Err(EnumerationError::BudgetExceeded { budget });
        }
        e.start_leaf();
        let out = sampler(&mut e);
        let w = e.leaf_weight();
        let mut acc = WeightAccumulator::default();
        acc.add(w);
        visit(out, acc.total());
        if !e.advance() {
            return Ok(leaves);
        }
    }
}

/// Exact law of `sampler`'s output, obtained by exhaustive enumeration.
pub fn exact_law<K, F>(budget: u64, mut sampler: F) -> Result<Law<K>, EnumerationError>
where
    K: Ord,
    F: FnMut(&mut Enumerator) -> K,
{
    let mut e = Enumerator::default();
    let mut acc: BTreeMap<K, WeightAccumulator> = BTreeMap::new();
    let mut leaves = 0u64;
    loop {
        leaves += 1;
        if leaves > budget {
            return Err(EnumerationError::BudgetExceeded { budget });
        }
        e.start_leaf();
        let key = sampler(&mut e);
        acc.entry(key).or_default().add(e.leaf_weight());
        if !e.advance() {
            break;
        }
    }
    Ok(acc.into_iter().map(|(k, w)| (k, w.total())).collect())
}

/// Push a law forward through `f`.
pub fn map_law<K, J, F>(law: &Law<K>, mut f: F) -> Law<J>
where
    J: Ord,
    F: FnMut(&K) -> J,
{
    let mut out: Law<J> = BTreeMap::new();
    for (k, p) in law {
        *out.entry(f(k)).or_insert_with(BigRational::zero) += p;
    }
    out
}

/// Total mass of a law; exactly one for any law produced by [`exact_law`].
pub fn total_mass<K>(law: &Law<K>) -> BigRational {
    law.values().cloned().sum()
}

/// Draw a value from an exact law by inverse transform on its floating
/// approximation.
pub fn sample_law<'a, K, D: Draw>(law: &'a [(K, BigRational)], approx: &[f64], draw: &mut D) -> &'a K {
    let exact: Vec<BigRational> = law.iter().map(|(_, p)| p.clone()).collect();
    let i = draw.weighted(Weights::Exact {
        exact: &exact,
        approx,
    });
    &law[i].0
}

/// Runs `f` on replicates `0..reps` in parallel; results are in replicate
/// order, each computed from its own [`SeedSpec::replicate`] seed.
pub fn par_replicates<T, F>(seed: SeedSpec, reps: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(SeedSpec) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..reps as u64).into_par_iter().map(|i| f(seed.replicate(i))).collect()
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn one() -> BigRational {
    BigRational::one()
}
