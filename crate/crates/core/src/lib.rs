//! Nonlinear Riesz projection on Hardy spaces of the polytorus.
//!
//! The crate computes `P(|φ|^{p-2} φ)` for analytic polynomials on `𝕋^d`,
//! decides whether a function is a *Hilbert point* of `H^p(𝕋^d)` (a fixed
//! point of the normalized projection up to a positive multiple), runs the
//! fixed-point iteration on 1-homogeneous polynomials, and evaluates the
//! Fourier coefficients and Khintchin constants that go with it.
//!
//! Layout:
//!
//! * [`polyalg`] exact sparse Laurent polynomials, the repository-wide oracle
//!   for even exponents.
//! * [`quadrature`] torus, radial and disc integration plus the closed-form
//!   circle average [`quadrature::ring_integral`].
//! * [`projection`] the projection of 1-homogeneous polynomials.
//! * [`dynamics`] the normalized fixed-point iteration.
//! * [`hilbert`] Hilbert-point verdicts.
//! * [`phi`] the obstruction coefficient `Φ(p)` for `z₁³ + z₂³ + z₁z₂z₃`.
//! * [`khintchin`] Khintchin constants for Steinhaus sums.
//! * [`fourier_tables`] Fourier coefficients of `|ζ₁+⋯+ζ_d|^{p-2}(ζ₁+⋯+ζ_d)`.

pub mod dynamics;
pub mod error;
pub mod fourier_tables;
pub mod hilbert;
pub mod khintchin;
pub mod multinomial;
pub mod phi;
pub mod polyalg;
pub mod projection;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
pub use polyalg::{Coef, CoefVec, ExactComplex, ExponentIndex, LaurentPoly};
pub use quadrature::{Estimate, QuadratureSpec};
