//! Algebraic quantum field theory on asymptotically flat spacetimes, restricted to Minkowski
//! space: bulk-to-boundary propagation, symplectic pairings, CCR algebras and boundary states.

pub mod algebra;
pub mod boundary_state;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod harmonics;
pub mod lingrav;
pub mod propagation;
pub mod quad;
pub mod report;
pub mod sampling;
pub mod suites;
pub mod symplectic;

pub use error::{Error, Result};
