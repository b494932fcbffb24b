//! Source kernels built from the initial data.
//!
//! With `z = ξ + y - η`, the kernel is
//! `K(ξ, z) = f(z) - β⁻²(ξ g(z) + 2ω⁰'(z))`, `f = ρ⁰'' - m²ρ⁰`, `g = ω⁰'' - m²ω⁰`.
//! The `2ω⁰'` term is what `Δ_m` produces from the factor `ξ = z - (y - η)`;
//! it makes `G(η, ξ, y)` coincide with `H⁰(ξ + y - η, y - η)`.

use crate::params::FlowParams;
use crate::profile::InitialDataProfile;
use crate::scalar::{cx, Real, C};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelContext<T> {
    pub params: FlowParams<T>,
    pub data: InitialDataProfile<T>,
}

impl<T: Real> KernelContext<T> {
    pub fn new(params: FlowParams<T>, data: InitialDataProfile<T>) -> Self {
        KernelContext { params, data }
    }

    pub fn with_data(&self, data: InitialDataProfile<T>) -> Self {
        KernelContext { data, ..*self }
    }

    /// `∂_z^k K(ξ, z)` for `k ≤ 2`.
    #[inline]
    pub fn kernel_z(&self, xi: T, z: T, k: usize) -> T {
        debug_assert!(k <= 2);
        let m2 = self.params.m_real() * self.params.m_real();
        let ib2 = T::one() / self.params.beta2();
        let r = self.data.rho0.derivs(z);
        let w = self.data.omega0.derivs(z);
        let f = r[k + 2] - m2 * r[k];
        let g = w[k + 2] - m2 * w[k];
        f - ib2 * (xi * g + (w[k + 1] + w[k + 1]))
    }

    /// All three `∂_z^k K(ξ, z)`, sharing the profile evaluations.
    #[inline]
    pub fn kernel_z_all(&self, xi: T, z: T) -> [T; 3] {
        let m2 = self.params.m_real() * self.params.m_real();
        let ib2 = T::one() / self.params.beta2();
        let r = self.data.rho0.derivs(z);
        let w = self.data.omega0.derivs(z);
        [0, 1, 2].map(|k| {
            let f = r[k + 2] - m2 * r[k];
            let g = w[k + 2] - m2 * w[k];
            f - ib2 * (xi * g + (w[k + 1] + w[k + 1]))
        })
    }
}

/// `G(η, ξ, y)`.
pub fn g_kernel<T: Real>(ctx: &KernelContext<T>, eta: T, xi: T, y: T) -> C<T> {
    cx(ctx.kernel_z(xi, xi + y - eta, 0), T::zero())
}

/// `∂_η^k G(η, ξ, y) = (-1)^k ∂_z^k K`, `k ∈ {1, 2}`.
pub fn g_kernel_deta<T: Real>(ctx: &KernelContext<T>, eta: T, xi: T, y: T, order: usize) -> C<T> {
    assert!(order == 1 || order == 2, "order must be 1 or 2");
    let v = ctx.kernel_z(xi, xi + y - eta, order);
    cx(if order == 1 { -v } else { v }, T::zero())
}

/// `H^±_ε(z, y0) = Δ_m ρ⁰(z) - β⁻² Δ_m((z - y0 ± iε) ω⁰(z))`.
pub fn h_source<T: Real>(ctx: &KernelContext<T>, z: T, y0: T, epsilon: T, sign: i32) -> C<T> {
    let m2 = ctx.params.m_real() * ctx.params.m_real();
    let ib2 = T::one() / ctx.params.beta2();
    let r = ctx.data.rho0.derivs(z);
    let w = ctx.data.omega0.derivs(z);
    let s = if sign >= 0 { epsilon } else { -epsilon };
    let lin = cx(z - y0, s);
    let f = r[2] - m2 * r[0];
    let g = w[2] - m2 * w[0];
    cx(f - ib2 * (w[1] + w[1]), T::zero()) - lin * g * ib2
}
