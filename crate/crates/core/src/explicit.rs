//! Closed-form solution of the linearized Boussinesq system for one mode.
//!
//! With `P = -cos(γπ)/(2mπ)` and `O(±, w, k) = ∫ e^{±imηt} w(η) I_{±,k}(η, y) dη`,
//!
//! ```text
//! Ψ_k = P [O(+, W, k) - O(-, W, k)]          ψ = e^{-imyt} Ψ_0
//! ρ   = P e^{-imyt} [O(+, W/η, 0) + O(-, W/η, 0)]
//! ∂_yψ = P e^{-imyt} [O(+, W', 0) + O(-, W', 0)]
//! ω   = e^{-imyt} (-m²t²Ψ_0 - 2imtΨ_1 + Ψ_2 - m²Ψ_0)
//! ```
//!
//! where `I_{±,k}` are the `k`-th `y`-derivatives of the inner integrals. The
//! `∂_yψ` form follows from integrating `∂_y I = ∓∂_η I` by parts; no
//! numerical differentiation is involved anywhere.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::KernelContext;
use crate::oscquad::{Branch, OscEngine, OuterRule};
use crate::params::{ComplexField, GridSpec, QuadratureSpec};
use crate::scalar::{cx, lit, to_f64, Real, C};

/// Accuracy bookkeeping attached to a snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadratureMeta {
    /// Worst panel-tail error estimate relative to the integral of `|integrand|`.
    pub max_rel_error: f64,
    /// Worst trailing Chebyshev coefficient of the inner tables, relative.
    pub table_tail: f64,
    /// Bound on `∫_{η_max}^∞ |W|`.
    pub eta_max_truncation: f64,
    pub outer_nodes: usize,
}

#[derive(Debug, Clone)]
pub struct SolutionSnapshot<T> {
    pub time: T,
    pub psi: ComplexField<T>,
    pub rho: ComplexField<T>,
    pub omega: ComplexField<T>,
    pub ux: ComplexField<T>,
    pub uy: ComplexField<T>,
    pub quadrature_meta: QuadratureMeta,
}

impl<T: Real> SolutionSnapshot<T> {
    pub fn grid(&self) -> &GridSpec<T> {
        &self.psi.grid
    }
}

/// All fields at one `(t, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointFields<T> {
    pub psi: C<T>,
    pub rho: C<T>,
    pub dy_psi: C<T>,
    pub omega: C<T>,
    /// Phase-removed stream function `Ψ = e^{imyt}ψ`.
    pub profile: C<T>,
    pub rel_error: T,
}

// Per-node integrand slots: W·I₊ₖ (k=0..2), W·I₋ₖ, (W/η)·I±₀, W'·I±₀.
const NQ: usize = 10;
const PLUS: [bool; NQ] = [true, true, true, false, false, false, true, false, true, false];

/// Explicit solution evaluator for fixed kernel and quadrature parameters.
/// Reentrant; evaluation at distinct points may run in parallel.
#[derive(Debug, Clone)]
pub struct ExplicitSolver<T> {
    pub engine: OscEngine<T>,
}

impl<T: Real> ExplicitSolver<T> {
    pub fn new(ctx: KernelContext<T>, spec: QuadratureSpec<T>) -> Result<Self> {
        Ok(ExplicitSolver {
            engine: OscEngine::tabulated(ctx, spec)?,
        })
    }

    /// Solver without inner tables; much slower, used for cross-checks.
    pub fn direct(ctx: KernelContext<T>, spec: QuadratureSpec<T>) -> Result<Self> {
        Ok(ExplicitSolver {
            engine: OscEngine::direct(ctx, spec)?,
        })
    }

    pub fn ctx(&self) -> &KernelContext<T> {
        &self.engine.ctx
    }

    pub fn spec(&self) -> &QuadratureSpec<T> {
        &self.engine.spec
    }

    pub fn rule(&self, t: T) -> Result<OuterRule<T>> {
        if !(t >= T::zero()) {
            return Err(Error::Domain {
                op: "explicit solution",
                msg: format!("t must be nonnegative, got {t}"),
            });
        }
        self.engine.outer_rule(t)
    }

    /// Every field at `y` in one pass over the outer nodes of `rule`.
    pub fn point(&self, rule: &OuterRule<T>, y: T) -> Result<PointFields<T>> {
        let e = &self.engine;
        let zero = cx(T::zero(), T::zero());
        let gather = |eta: T, w: [C<T>; 3]| -> [C<T>; NQ] {
            let a = e.inner_values(Branch::Plus, y - eta);
            let b = e.inner_values(Branch::Minus, y + eta);
            [
                w[0] * a[0],
                w[0] * a[1],
                w[0] * a[2],
                w[0] * b[0],
                w[0] * b[1],
                w[0] * b[2],
                w[1] * a[0],
                w[1] * b[0],
                w[2] * a[0],
                w[2] * b[0],
            ]
        };
        let mut sum = gather(T::zero(), rule.tails());
        let mut err = [T::zero(); NQ];
        let mut l1 = [T::zero(); NQ];
        let mut buf: Vec<[C<T>; NQ]> = Vec::with_capacity(32);
        for i in 0..rule.span_count() {
            buf.clear();
            for j in rule.span_range(i) {
                let g = gather(rule.nodes[j], rule.weight_values(j));
                let wp = rule.phase_weight(j);
                let aw = rule.abs_weight(j);
                for q in 0..NQ {
                    sum[q] += if PLUS[q] { wp * g[q] } else { wp.conj() * g[q] };
                    l1[q] += aw * g[q].norm();
                }
                buf.push(g);
            }
            let (r1, r2, half) = rule.span_tail(i);
            for q in 0..NQ {
                let mut c1 = zero;
                let mut c2 = zero;
                for (i, g) in buf.iter().enumerate() {
                    c1 += g[q] * r1[i];
                    c2 += g[q] * r2[i];
                }
                err[q] += half * lit::<T>(2.0) * (c1.norm() + c2.norm());
            }
        }
        let p = e.prefactor;
        let ctx = &e.ctx;
        let m = ctx.params.m_real();
        let t = rule.t;
        let phase = cx(T::zero(), -m * y * t).exp();
        let psi_k = [0, 1, 2].map(|k| p * (sum[k] - sum[k + 3]));
        let rho = p * phase * (sum[6] + sum[7]);
        let dy_psi = p * phase * (sum[8] + sum[9]);
        let omega_prof = psi_k[0] * (-m * m * (t * t + T::one())) + psi_k[1] * cx(T::zero(), -lit::<T>(2.0) * m * t) + psi_k[2];
        let rel_error = (0..NQ)
            .map(|q| if l1[q] > T::zero() { err[q] / l1[q] } else { T::zero() })
            .fold(T::zero(), T::max);
        if rel_error > e.spec.rel_tol {
            return Err(Error::Tolerance {
                op: "explicit solution",
                estimate: to_f64(rel_error),
                target: to_f64(e.spec.rel_tol),
            });
        }
        Ok(PointFields {
            psi: phase * psi_k[0],
            rho,
            dy_psi,
            omega: phase * omega_prof,
            profile: psi_k[0],
            rel_error,
        })
    }

    pub fn fields(&self, t: T, y: T) -> Result<PointFields<T>> {
        self.point(&self.rule(t)?, y)
    }

    pub fn snapshot(&self, t: T, grid: &GridSpec<T>) -> Result<SolutionSnapshot<T>> {
        let rule = self.rule(t)?;
        let ys = grid.nodes();
        let results: Vec<Result<PointFields<T>>> = ys.par_iter().map(|&y| self.point(&rule, y)).collect();
        let mut failures = 0;
        let mut first = None;
        for (y, r) in ys.iter().zip(&results) {
            if let Err(err) = r {
                failures += 1;
                if first.is_none() {
                    first = Some((to_f64(*y), err.clone()));
                }
            }
        }
        if let Some((first_y, err)) = first {
            return Err(Error::PointFailures {
                failures,
                first_y,
                first: Box::new(err),
            });
        }
        let pts: Vec<PointFields<T>> = results.into_iter().map(|r| r.unwrap()).collect();
        let m = self.ctx().params.m_real();
        let field = |f: &dyn Fn(&PointFields<T>) -> C<T>| ComplexField {
            grid: *grid,
            values: pts.iter().map(f).collect(),
            time: t,
        };
        let spec = self.spec();
        let x = lit::<T>(2.0) * m * spec.eta_max;
        let tail_w = self.engine.whittaker.w(cx(x, T::zero()))?.norm() / m;
        Ok(SolutionSnapshot {
            time: t,
            psi: field(&|p| p.psi),
            rho: field(&|p| p.rho),
            omega: field(&|p| p.omega),
            ux: field(&|p| -p.dy_psi),
            uy: field(&|p| p.psi * cx(T::zero(), m)),
            quadrature_meta: QuadratureMeta {
                max_rel_error: pts.iter().map(|p| to_f64(p.rel_error)).fold(0.0, f64::max),
                table_tail: to_f64(self.engine.table_tail()),
                eta_max_truncation: to_f64(tail_w),
                outer_nodes: rule.nodes.len(),
            },
        })
    }

    /// Central-difference residuals of both transport equations at `(t, y)`.
    pub fn pde_residual(&self, t: T, y: T, h_t: T) -> Result<(C<T>, C<T>)> {
        if !(h_t > T::zero() && t >= h_t) {
            return Err(Error::Domain {
                op: "pde_residual",
                msg: format!("need t >= h_t > 0, got t={t}, h_t={h_t}"),
            });
        }
        let a = self.fields(t - h_t, y)?;
        let b = self.fields(t, y)?;
        let c = self.fields(t + h_t, y)?;
        let ctx = self.ctx();
        let m = ctx.params.m_real();
        let imy = cx(T::zero(), m * y);
        let two_h = h_t + h_t;
        let r1 = (c.omega - a.omega) / two_h + imy * b.omega + b.rho * cx(T::zero(), m * ctx.params.beta2());
        let r2 = (c.rho - a.rho) / two_h + imy * b.rho - b.psi * cx(T::zero(), m);
        Ok((r1, r2))
    }
}

pub fn stream_function<T: Real>(ctx: &KernelContext<T>, t: T, y: T, spec: &QuadratureSpec<T>) -> Result<C<T>> {
    Ok(ExplicitSolver::new(*ctx, *spec)?.fields(t, y)?.psi)
}

pub fn density<T: Real>(ctx: &KernelContext<T>, t: T, y: T, spec: &QuadratureSpec<T>) -> Result<C<T>> {
    Ok(ExplicitSolver::new(*ctx, *spec)?.fields(t, y)?.rho)
}

pub fn dy_stream_function<T: Real>(ctx: &KernelContext<T>, t: T, y: T, spec: &QuadratureSpec<T>) -> Result<C<T>> {
    Ok(ExplicitSolver::new(*ctx, *spec)?.fields(t, y)?.dy_psi)
}

pub fn vorticity<T: Real>(ctx: &KernelContext<T>, t: T, y: T, spec: &QuadratureSpec<T>) -> Result<C<T>> {
    Ok(ExplicitSolver::new(*ctx, *spec)?.fields(t, y)?.omega)
}

pub fn snapshot<T: Real>(ctx: &KernelContext<T>, t: T, grid: &GridSpec<T>, spec: &QuadratureSpec<T>) -> Result<SolutionSnapshot<T>> {
    ExplicitSolver::new(*ctx, *spec)?.snapshot(t, grid)
}

pub fn pde_residual<T: Real>(ctx: &KernelContext<T>, t: T, y: T, spec: &QuadratureSpec<T>, h_t: T) -> Result<(C<T>, C<T>)> {
    ExplicitSolver::new(*ctx, *spec)?.pde_residual(t, y, h_t)
}
