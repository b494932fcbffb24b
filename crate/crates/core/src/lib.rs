//! Explicit solutions of the linearized Euler–Boussinesq system around
//! stratified Couette flow on `T × R`, evaluated by singular oscillatory
//! quadrature, cross-checked by a method-of-lines solver and by a
//! limiting-absorption reconstruction, and reduced to decay-rate fits.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix the double-precision instantiation used by the command-line tool.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod damping;
pub mod error;
pub mod explicit;
pub mod kernel;
pub mod lap;
pub mod oscquad;
pub mod params;
pub mod profile;
pub mod quad;
pub mod reference;
pub mod scalar;
pub mod specfun;
#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use kernel::{g_kernel, g_kernel_deta, h_source, KernelContext};
pub use params::{derive_params, sobolev_q, ComplexField, FlowParams, GridSpec, QuadratureSpec};
pub use profile::{InitialDataProfile, Profile, ProfileKind};
pub use scalar::{Real, C};

pub type FlowParams64 = FlowParams<f64>;
pub type GridSpec64 = GridSpec<f64>;
pub type ComplexField64 = ComplexField<f64>;
pub type QuadratureSpec64 = QuadratureSpec<f64>;
pub type InitialDataProfile64 = InitialDataProfile<f64>;
pub type Profile64 = Profile<f64>;
pub type KernelContext64 = KernelContext<f64>;
