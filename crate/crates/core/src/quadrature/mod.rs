//! Integration over the torus, the radial measure `2r dr`, and the unit disc.
//!
//! Everything here is normalized: `m_k` is the Haar probability measure of
//! `𝕋^k` and `dA` is area measure on `𝔻` scaled so that `A(𝔻) = 1`.

mod disc;
mod gauss_jacobi;
mod mean_power;
mod ring;
mod spec;
mod tanh_sinh;
mod torus;

pub use disc::disc_integrate;
pub use gauss_jacobi::{radial_integrate, radial_rule};
pub use mean_power::torus_mean_power;
pub use ring::{ring_integral, ring_moduli};
pub use spec::{Estimate, QuadratureSpec};
pub use tanh_sinh::{integrate_interval, integrate_pieces, tanh_sinh, QValue};
pub use torus::{torus_integrate, trapezoid_progressive};
pub(crate) use tanh_sinh::level_cap;
