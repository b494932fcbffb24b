//! Complex special functions: Gamma, Kummer, Whittaker, Bessel.

pub mod bessel;
pub mod continuation;
pub mod expansion;
pub mod gamma;
pub mod kummer;
pub mod whittaker;

pub use bessel::{bessel_i01, bessel_k0, bessel_k01};
pub use continuation::{continuation_jump, jump_limit};
pub use expansion::{small_arg_expansion, PowerLogTerm, SmallArgExpansion};
pub use gamma::{complex_gamma, recip_gamma};
pub use kummer::{kummer_m, kummer_m_derivs};
pub use whittaker::{
    ode_residual, whittaker_m, whittaker_m_derivs, whittaker_w, whittaker_w_derivs,
    whittaker_w_prime, Whittaker, WhittakerIndex,
};
