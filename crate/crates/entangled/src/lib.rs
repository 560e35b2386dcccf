//! Numerical toolkit for entangled multilinear singular integral forms on a
//! discrete torus: quadrilinear multiplier forms, the twisted paraproduct,
//! dyadic and triangular models, symbol decomposition, telescoping-identity
//! verification and adversarial operator-norm probing.

pub mod bump;
pub mod error;
pub mod grid;
pub mod kahan;
pub mod quad;

pub use error::{Error, Result};
