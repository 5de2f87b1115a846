//! Neutral genealogy models, the lookdown representation and the
//! permutation couplings between them, size-biased ordering, coalescent time
//! scales and Galton-Watson spines.
//!
//! Vertices are stored with zero-based indices; [`model::VertexRef`] uses
//! the 1-based `(n, i)` labels for display and I/O.

pub mod canonical;
pub mod cli;
pub mod coupling;
pub mod error;
pub mod experiments;
pub mod genealogy;
pub mod gw;
pub mod model;
pub mod rng;
pub mod samplers;
pub mod sbo;
pub mod stats;
pub mod testing;

pub use canonical::{canonical_form, CanonicalForest};
pub use coupling::{lookdown_coupling, scramble, CoupledPair, GenerationPermutation};
pub use genealogy::{Genealogy, GenerationPartition};
pub use model::{BirthRule, FamilySpec, Horizon, ModelSpec, VertexRef};
pub use rng::{Law, SeedSpec};
pub use samplers::{build_lookdown, sample_completely_neutral, sample_forward, SamplerKind};
