//! Numerical toolkit for the standard effect algebra on finite-dimensional
//! complex Hilbert spaces.
//!
//! The crate is layered bottom-up:
//!
//! * [`matcore`]: dense complex matrices, Hermitian eigendecomposition with
//!   eigenvalue clustering, and the Borel functional calculus.
//! * [`quantum`]: validated effects, states and POVMs plus seeded generators.
//! * [`seqprod`]: phase families `f(t) = xi0 * t^(1/2 + i c)`, the general
//!   sequential product `A ⋄ B = f(A) B f(A)*`, Lüders-type channels,
//!   probabilities, conditionals, a sampler and randomized axiom suites.
//! * [`criteria`]: checkers for the three non-disturbance criteria, the
//!   characterization oracles they are compared against, and searches.

pub mod criteria;
mod error;
pub mod matcore;
pub mod quantum;
pub mod rng;
pub mod seqprod;

pub use error::{Error, Result};
pub use matcore::{ComplexMatrix, SpectralDecomposition, Tolerances};
pub use quantum::{DensityOperator, EffectOperator, Povm};
pub use seqprod::PhaseFamily;
