//! Geometry of fluctuation space for continuous parametric distributions.
//!
//! The crate treats a one-dimensional density `ρ(I)` as a Riemannian manifold
//! whose chart `s(I) = Φ⁻¹(∫ρ)` turns every density into the standard normal.
//! On top of that it provides fluctuation and uncertainty identities,
//! statistical inference bounds, covariant identities, geodesic flows, density
//! reconstruction and entropy comparisons, each returned as a
//! [`VerificationReport`].

pub mod cli;
pub mod entropy;
pub mod error;
pub mod families;
pub mod fluctuation;
pub mod geometry1d;
pub mod inference;
pub mod numerics;
pub mod report;
pub mod riemann;
pub mod tensor;

pub use error::{Error, Result};
pub use report::{Flag, Identity, Summary, VerificationReport};
