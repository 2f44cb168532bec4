//! Quantum channels in the Choi picture and their entanglement-degradation
//! classes.
//!
//! The crate builds channels from Kraus or Choi data, runs the Choi calculus
//! (construction, application, tensor products, duals, star-product
//! concatenation), and classifies channels as PPT-inducing,
//! distillation-prohibiting, entanglement-breaking or entanglement-binding.
//! Heuristic searches (see-saw block-positivity refutation, worst-case input
//! search, one-copy distillability witnesses) are seeded and deterministic;
//! only exact spectral checks ever certify.

pub mod bipartite;
pub mod channel;
pub mod classify;
pub mod eig;
pub mod entangle;
pub mod error;
pub mod mat;
pub mod random;
pub mod schmidt;

pub use bipartite::{BipartiteDims, Subsystem};
pub use channel::{Channel, ChoiOperator, CompositeChoi};
pub use classify::{ThresholdResult, Verdict, VerdictTag, Witness};
pub use eig::SpectralDecomposition;
pub use entangle::{BlockPositivityVerdict, PptReport, SeesawConfig};
pub use error::{Error, Result};
pub use mat::ComplexMatrix;
pub use schmidt::SchmidtForm;
