//! Restricted partitions into distinct parts `floor(a^alpha)`, `0 < alpha < 1`:
//! part spectra, the Boltzmann log generating function, saddle points,
//! exact counts and their asymptotic comparisons.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod boltzmann;
pub mod error;
pub mod estimate;
pub mod exact;
pub mod quad;
pub mod saddle;
pub mod special;
pub mod spectrum;

pub use boltzmann::{EvalPoint, LowOrder, PartialIndex};
pub use error::{Error, Module, Result};
pub use estimate::{AsymptoticEstimate, Provenance};
pub use exact::{DistributionView, ExactTable};
pub use saddle::{SaddlePoint, SolverConfig};
pub use special::PolylogRequest;
pub use spectrum::{AlphaKind, AlphaParam, Exactness, PartSpectrum};
