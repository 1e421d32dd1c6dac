//! Exact tensor calculus for Riemannian Π-manifolds presented as Lie groups
//! with left-invariant structure.
//!
//! Everything is computed in a fixed left-invariant frame with exact rational
//! arithmetic, so every identity check is a decision, not a tolerance.

pub mod classifier;
pub mod cli;
pub mod error;
pub mod examples;
pub mod levi_civita;
pub mod natural;
pub mod pi_manifold;
pub mod report;
pub mod spec_file;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
