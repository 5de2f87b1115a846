use thiserror::Error;

/// Rejections raised while building a [`crate::model::ModelSpec`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("generation {generation}: litters sum to {found} but the next generation has {expected} vertices")]
    SizeMismatch {
        generation: usize,
        expected: usize,
        found: usize,
    },
    #[error("generation {generation} is empty")]
    EmptyGeneration { generation: usize },
    #[error("generation {generation}: {found} litter sizes given for {expected} vertices")]
    LitterCount {
        generation: usize,
        expected: usize,
        found: usize,
    },
    #[error("{sizes} population sizes need {expected} litter vectors, got {found}")]
    LitterGenerations {
        sizes: usize,
        expected: usize,
        found: usize,
    },
    #[error("a model needs at least one generation")]
    NoGenerations,
    #[error("generation {generation}: asynchronous birth count must differ from 1")]
    UnitBirth { generation: usize },
    #[error("family parameter `{0}` is invalid")]
    InvalidParameter(&'static str),
    #[error("Galton-Watson families are random; realize them with a seed")]
    RandomFamily,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenealogyError {
    #[error("generation {generation}: expected {expected} parent entries, got {found}")]
    ParentCount {
        generation: usize,
        expected: usize,
        found: usize,
    },
    #[error("vertex ({generation},{index}) has parent {parent} outside the previous generation")]
    ParentOutOfRange {
        generation: usize,
        index: usize,
        parent: usize,
    },
    #[error("generation {generation}: out-degrees are not a permutation of the litter sizes")]
    LitterProfile { generation: usize },
    #[error("generation {generation} is outside 0..{tau}")]
    OutOfRange { generation: usize, tau: usize },
    #[error("malformed genealogy file, line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Spec(#[from] SpecError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("enumeration needs more than {budget} configurations")]
    BudgetExceeded { budget: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SboError {
    #[error("the multiset is empty")]
    EmptyInput,
    #[error("weights must be finite and non-negative")]
    InvalidWeight,
    #[error("exact size-biased orderings are limited to {limit} elements, got {found}")]
    BudgetExceeded { limit: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CouplingError {
    #[error("permutation dimensions do not match the genealogy at generation {generation}")]
    DimensionMismatch { generation: usize },
    #[error("a permutation test needs at least {needed} samples, got {found}")]
    InsufficientSamples { needed: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("generations {from}..={to} are outside the genealogy (tau = {tau})")]
    OutOfRange { from: usize, to: usize, tau: usize },
    #[error("concentration needs at least two elements, got {0}")]
    TooSmall(usize),
    #[error("at least {needed} replicates are required, got {found}")]
    InsufficientReps { needed: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GwError {
    #[error("offspring probabilities must be non-negative and sum to one")]
    InvalidPmf,
    #[error("the offspring mean is zero; the size-biased law is undefined")]
    DegenerateMean,
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TestError {
    #[error("sample category {0} has probability zero under the reference law")]
    UnmatchedSupport(String),
    #[error("empty sample")]
    EmptySample,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}
