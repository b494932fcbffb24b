//! Quadrature building blocks.

pub mod chebyshev;
pub mod filon;
pub mod gauss;

pub use chebyshev::PiecewiseChebyshev;
pub use filon::{spherical_bessel_j, FilonRule};
pub use gauss::{legendre_values, GaussLegendre};
