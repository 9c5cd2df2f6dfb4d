//! One-shot entanglement manipulation for bipartite quantum channels.
//!
//! The crate is organised bottom up:
//!
//! * [`linalg`] dense complex matrices, partial traces and transposes, norms.
//! * [`sdp`] a primal-dual interior point solver for Hermitian block SDPs.
//! * [`channel`] bipartite channels stored through normalized Choi matrices.
//! * [`measures`] robustness, max-divergence, diamond norm and hypothesis testing quantities.
//! * [`superchannel`] superchannels, the twisted twirl and the dilution/distillation/catalysis constructions.
//!
//! All Choi matrices are normalized to unit trace and ordered
//! `(A0, B0, A1, B1)`: inputs first, then outputs. The entanglement cut
//! separates `A0 A1` from `B0 B1`.

pub mod channel;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod report;
pub mod rng;
pub mod sdp;
pub mod superchannel;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityOperator, C64};

/// Library version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
