//! Solitary traveling waves of the Whitham equation
//!
//! ```text
//!     c φ − K ∗ φ − φ² = 0,       K = F⁻¹ m,   m(ξ) = √(tanh ξ / ξ)
//! ```
//!
//! The crate evaluates the dispersion symbol and its kernel, solves the
//! discretized equation with a pseudospectral Newton method, follows the
//! solitary-wave branch in amplitude from the KdV regime up to the cusped
//! extreme wave, and checks the computed waves against the qualitative
//! theory (decay rates, integral identity, cusp exponent, Fredholm winding
//! numbers, the center-manifold reduced ODE).

pub mod defaults;
pub mod diagnostics;
pub mod error;
pub mod kernel;
mod quad;
pub mod reduced;
pub mod selftest;
pub mod solver;
pub mod spectral;
pub mod symbol;
pub mod winding;

pub use error::{Error, Result};
pub use solver::{BranchPoint, ContinuationConfig};
pub use spectral::{Grid, WaveProfile};
