//! Limiting-absorption construction at `t = 0`.
//!
//! For `Y = y - y0 ± iε` the resolvent stream function solves the
//! Taylor–Goldstein equation
//! `Δ_m ψ + β²ψ/Y² = ω⁰/Y - β²ρ⁰/Y²`, and splits as
//! `ψ^± = Yω⁰/β² - ρ⁰ + ∫ G^±(y, y0, z) H^±(z, y0) dz`
//! with `G^±` the decaying Green's function built from `W(·) = W_{0,γ}(2m·)`.
//! Stone's formula `ψ = (2πi)⁻¹ ∫ (ψ⁻ - ψ⁺) dy0` then recovers the initial
//! stream function as `ε → 0`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{h_source, KernelContext};
use crate::params::{ComplexField, FlowParams, GridSpec, QuadratureSpec};
use crate::quad::GaussLegendre;
use crate::scalar::{cx, lit, to_f64, Real, C};
use crate::specfun::Whittaker;

/// Default `ε` sequence for the reconstruction.
pub const DEFAULT_EPSILONS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

const GAUSS_ORDER: usize = 20;
const MAX_PANEL: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint<T> {
    pub y0: T,
    pub epsilon: T,
    pub sign: i32,
}

impl<T: Real> SpectralPoint<T> {
    pub fn new(y0: T, epsilon: T, sign: i32) -> Result<Self> {
        if !(epsilon > T::zero()) {
            return Err(Error::Domain {
                op: "SpectralPoint",
                msg: format!("epsilon must be positive, got {epsilon}"),
            });
        }
        if sign != 1 && sign != -1 {
            return Err(Error::Domain {
                op: "SpectralPoint",
                msg: format!("sign must be +1 or -1, got {sign}"),
            });
        }
        Ok(SpectralPoint { y0, epsilon, sign })
    }

    /// `±ε`.
    fn shift(&self) -> T {
        if self.sign > 0 {
            self.epsilon
        } else {
            -self.epsilon
        }
    }

    /// `y - y0 ± iε`.
    pub fn offset(&self, y: T) -> C<T> {
        cx(y - self.y0, self.shift())
    }

    pub fn conjugate(&self) -> Self {
        SpectralPoint {
            sign: -self.sign,
            ..*self
        }
    }
}

fn scaled_w<T: Real>(w: &Whittaker<T>, m: T, z: C<T>) -> Result<C<T>> {
    w.w(z * (m + m))
}

/// Green's function evaluator reusing one Whittaker evaluator.
#[derive(Debug, Clone)]
pub struct Greens<T> {
    m: T,
    whittaker: Whittaker<T>,
}

impl<T: Real> Greens<T> {
    pub fn new(params: &FlowParams<T>) -> Result<Self> {
        Ok(Greens {
            m: params.m_real(),
            whittaker: Whittaker::new(params.gamma)?,
        })
    }

    /// `G^±(y, y0, z)`.
    pub fn eval(&self, pt: &SpectralPoint<T>, y: T, z: T) -> Result<C<T>> {
        let (hi, lo) = if y >= z { (y, z) } else { (z, y) };
        let s = pt.shift();
        let a = scaled_w(&self.whittaker, self.m, cx(pt.y0 - lo, -s))?;
        let b = scaled_w(&self.whittaker, self.m, cx(hi - pt.y0, s))?;
        Ok(a * b * (-T::one() / (self.m + self.m)))
    }
}

/// `G^±(y, y0, z) = -(1/2m) W(y0 - z ∓ iε) W(y - y0 ± iε)` for `y ≥ z`, mirrored for `y < z`.
pub fn greens_function<T: Real>(params: &FlowParams<T>, pt: SpectralPoint<T>, y: T, z: T) -> Result<C<T>> {
    Greens::new(params)?.eval(&pt, y, z)
}

/// Gauss panels on the data support, broken at `y` and graded geometrically
/// toward `y0` down to `ε/4`.
fn z_panels<T: Real>(lo: T, hi: T, y: T, pt: &SpectralPoint<T>) -> Vec<(T, T)> {
    let mut br = vec![lo, hi];
    if y > lo && y < hi {
        br.push(y);
    }
    let mut d = pt.epsilon * lit(0.25);
    br.push(pt.y0 - d);
    br.push(pt.y0 + d);
    while d < lit(MAX_PANEL) {
        d = d + d;
        br.push(pt.y0 - d);
        br.push(pt.y0 + d);
    }
    br.retain(|&b| b >= lo && b <= hi);
    br.sort_by(|a, b| a.partial_cmp(b).unwrap());
    br.dedup();
    let mut panels = Vec::new();
    for w in br.windows(2) {
        let n = ((w[1] - w[0]) / lit(MAX_PANEL)).ceil().max(T::one()).to_usize().unwrap();
        let h = (w[1] - w[0]) / T::from_usize(n).unwrap();
        for i in 0..n {
            let a = w[0] + h * T::from_usize(i).unwrap();
            panels.push((a, if i + 1 == n { w[1] } else { a + h }));
        }
    }
    panels
}

/// `∫ G^± H^± dz` over the data support.
fn convolution<T: Real>(ctx: &KernelContext<T>, greens: &Greens<T>, pt: &SpectralPoint<T>, y: T) -> Result<C<T>> {
    let Some((lo, hi)) = ctx.data.support() else {
        return Ok(cx(T::zero(), T::zero()));
    };
    let gl = GaussLegendre::new(GAUSS_ORDER);
    let mut acc = cx(T::zero(), T::zero());
    for (a, b) in z_panels(lo, hi, y, pt) {
        for (z, w) in gl.mapped(a, b) {
            acc += greens.eval(pt, y, z)? * h_source(ctx, z, pt.y0, pt.epsilon, pt.sign) * w;
        }
    }
    Ok(acc)
}

fn check_quad<T: Real>(ctx: &KernelContext<T>, quad: &QuadratureSpec<T>) -> Result<()> {
    quad.validate(ctx.params.m)
}

/// `ψ^±_ε(y, y0) = Yω⁰/β² - ρ⁰ + ∫ G^± H^± dz`.
pub fn generalized_stream<T: Real>(ctx: &KernelContext<T>, pt: SpectralPoint<T>, y: T, quad: &QuadratureSpec<T>) -> Result<C<T>> {
    check_quad(ctx, quad)?;
    let greens = Greens::new(&ctx.params)?;
    stream_with(ctx, &greens, &pt, y)
}

fn stream_with<T: Real>(ctx: &KernelContext<T>, greens: &Greens<T>, pt: &SpectralPoint<T>, y: T) -> Result<C<T>> {
    let explicit = pt.offset(y) * (ctx.data.omega0.value(y) / ctx.params.beta2()) - cx(ctx.data.rho0.value(y), T::zero());
    Ok(explicit + convolution(ctx, greens, pt, y)?)
}

/// `ρ^±_ε(y, y0) = ω⁰/β² + Y⁻¹ ∫ G^± H^± dz`.
pub fn generalized_density<T: Real>(ctx: &KernelContext<T>, pt: SpectralPoint<T>, y: T, quad: &QuadratureSpec<T>) -> Result<C<T>> {
    check_quad(ctx, quad)?;
    let greens = Greens::new(&ctx.params)?;
    let conv = convolution(ctx, &greens, &pt, y)?;
    Ok(cx(ctx.data.omega0.value(y) / ctx.params.beta2(), T::zero()) + conv / pt.offset(y))
}

/// Taylor–Goldstein residual of [`generalized_stream`] with `Δ_m` by central
/// second differences of step `h`.
pub fn tg_residual<T: Real>(ctx: &KernelContext<T>, pt: SpectralPoint<T>, y: T, quad: &QuadratureSpec<T>, h: T) -> Result<C<T>> {
    if !(h > T::zero() && h <= pt.epsilon / lit(10.0)) {
        return Err(Error::StepTooLarge {
            h: to_f64(h),
            epsilon: to_f64(pt.epsilon),
        });
    }
    check_quad(ctx, quad)?;
    let greens = Greens::new(&ctx.params)?;
    let p = |y: T| stream_with(ctx, &greens, &pt, y);
    let (a, b, c) = (p(y - h)?, p(y)?, p(y + h)?);
    let m2 = ctx.params.m_real() * ctx.params.m_real();
    let b2 = ctx.params.beta2();
    let yy = pt.offset(y);
    let lap = (a + c - b * lit::<T>(2.0)) / (h * h) - b * m2;
    let lhs = lap + b * b2 / (yy * yy);
    let rhs = cx(ctx.data.omega0.value(y), T::zero()) / yy - cx(b2 * ctx.data.rho0.value(y), T::zero()) / (yy * yy);
    Ok(lhs - rhs)
}

/// Reconstruction output with the per-`ε` approximations.
#[derive(Debug, Clone)]
pub struct LapReconstruction<T> {
    pub psi: ComplexField<T>,
    pub epsilons: Vec<T>,
    pub per_epsilon: Vec<ComplexField<T>>,
    /// `‖R_{k+1} - R_k‖₂` between successive linear extrapolants.
    pub extrapolation_deltas: Vec<T>,
    pub y0_range: (T, T),
}

/// Stone-formula approximation at one `ε` on a lattice commensurate with the grid.
///
/// `y`, `y0` and `z` all live on one lattice of step `Δ ≤ ε/8`, so every `W`
/// argument is `dΔ ± iε` for an integer `d` and two tables suffice. The
/// `z`-integrals are trapezoid sums split at `y`.
fn stone_at_epsilon<T: Real>(ctx: &KernelContext<T>, grid: &GridSpec<T>, eps: T, y0_lo: T, y0_hi: T) -> Result<Vec<C<T>>> {
    let n = grid.n_points;
    let zero = cx(T::zero(), T::zero());
    let Some((lo, hi)) = ctx.data.support() else {
        return Ok(vec![zero; n]);
    };
    let hg = grid.spacing();
    let k = (hg / (eps / lit(8.0))).ceil().to_i64().unwrap().max(1);
    let dl = hg / T::from_i64(k).unwrap();
    let origin = grid.y_min;
    let idx = |x: T, up: bool| -> i64 {
        let u = (x - origin) / dl;
        (if up { u.ceil() } else { u.floor() }).to_i64().unwrap()
    };
    let (z0, z1) = (idx(lo, false), idx(hi, true));
    let (q0, q1) = (idx(y0_lo, true), idx(y0_hi, false));
    let (p0, p1) = (0i64, (n as i64 - 1) * k);
    let lat = |p: i64| origin + dl * T::from_i64(p).unwrap();

    // W(2m(dΔ ∓ iε)) for every difference that occurs
    let dmin = (z0.min(p0) - q1).min(q0 - z1.max(p1));
    let dmax = (z1.max(p1) - q0).max(q1 - z0.min(p0));
    let params = &ctx.params;
    let m = params.m_real();
    let wh = Whittaker::new(params.gamma)?;
    let table = |s: T| -> Result<Vec<C<T>>> {
        (dmin..=dmax)
            .into_par_iter()
            .map(|d| scaled_w(&wh, m, cx(dl * T::from_i64(d).unwrap(), s)))
            .collect()
    };
    let wm = table(-eps)?;
    let wp = table(eps)?;
    let at = |t: &Vec<C<T>>, d: i64| t[(d - dmin) as usize];

    // H = h1(z) + (y0 ∓ iε) h2(z)
    let ib2 = T::one() / params.beta2();
    let m2 = m * m;
    let nz = (z1 - z0 + 1) as usize;
    let mut h1 = Vec::with_capacity(nz);
    let mut h2 = Vec::with_capacity(nz);
    for p in z0..=z1 {
        let z = lat(p);
        let r = ctx.data.rho0.derivs(z);
        let w = ctx.data.omega0.derivs(z);
        let g = w[2] - m2 * w[0];
        h1.push(r[2] - m2 * r[0] - ib2 * (w[1] + w[1] + z * g));
        h2.push(ib2 * g);
    }
    let ys = grid.nodes();
    let om: Vec<T> = ys.iter().map(|&y| ctx.data.omega0.value(y) * ib2).collect();
    let rh: Vec<T> = ys.iter().map(|&y| ctx.data.rho0.value(y)).collect();
    let scale = -T::one() / (m + m);
    let half = lit::<T>(0.5);

    let contribution = |q: i64| -> Vec<C<T>> {
        let y0 = lat(q);
        let mut out = vec![zero; n];
        for (sigma, a_tab, b_tab) in [(1i32, &wm, &wp), (-1i32, &wp, &wm)] {
            let s = if sigma > 0 { eps } else { -eps };
            let shift = cx(y0, -s);
            // lower[j] = Σ_{z ≤ y_j} A[y0 - z] H Δ, upper likewise with B[z - y0]
            let mut lower = vec![zero; n];
            let mut upper = vec![zero; n];
            let mut cum = zero;
            let mut j = 0usize;
            let mut total_b = zero;
            let hz: Vec<C<T>> = (0..nz).map(|i| shift * h2[i] + h1[i]).collect();
            for (i, p) in (z0..=z1).enumerate() {
                total_b += at(b_tab, p - q) * hz[i];
            }
            let mut cum_b = zero;
            for (i, p) in (z0..=z1).enumerate() {
                while j < n && (j as i64) * k < p {
                    lower[j] = cum;
                    upper[j] = total_b - cum_b;
                    j += 1;
                }
                let ca = at(a_tab, q - p) * hz[i];
                let cb = at(b_tab, p - q) * hz[i];
                if j < n && (j as i64) * k == p {
                    lower[j] = cum + ca * half;
                    upper[j] = total_b - cum_b - cb * half;
                    j += 1;
                }
                cum += ca;
                cum_b += cb;
            }
            while j < n {
                lower[j] = cum;
                upper[j] = zero;
                j += 1;
            }
            for jj in 0..n {
                let p = jj as i64 * k;
                let mut phi = (at(b_tab, p - q) * lower[jj] + at(a_tab, q - p) * upper[jj]) * (scale * dl);
                // ∂_z G jumps by one at z = y; Euler–Maclaurin correction for the kink
                if p >= z0 && p <= z1 {
                    phi += hz[(p - z0) as usize] * (dl * dl / lit(12.0));
                }
                let psi = cx(ys[jj] - y0, s) * om[jj] - cx(rh[jj], T::zero()) + phi;
                // Stone integrand ψ⁻ - ψ⁺
                out[jj] += if sigma > 0 { -psi } else { psi };
            }
        }
        out
    };
    let sum = (q0..=q1)
        .into_par_iter()
        .map(|q| {
            let w = if q == q0 || q == q1 { half } else { T::one() };
            contribution(q).into_iter().map(|v| v * w).collect::<Vec<_>>()
        })
        .reduce(
            || vec![zero; n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let factor = cx(T::zero(), -dl / (lit::<T>(2.0) * T::PI()));
    Ok(sum.into_iter().map(|v| v * factor).collect())
}

fn l2<T: Real>(a: &[C<T>], b: &[C<T>]) -> T {
    a.iter().zip(b).map(|(x, y)| (*x - *y).norm_sqr()).fold(T::zero(), |s, v| s + v).sqrt()
}

/// Full reconstruction with an explicit `y0` range.
pub fn lap_reconstruct_t0_range<T: Real>(
    ctx: &KernelContext<T>,
    grid: &GridSpec<T>,
    eps_sequence: &[T],
    quad: &QuadratureSpec<T>,
    y0_range: (T, T),
) -> Result<LapReconstruction<T>> {
    check_quad(ctx, quad)?;
    if eps_sequence.len() < 2 {
        return Err(Error::Parameter {
            op: "lap_reconstruct_t0",
            msg: "need at least two epsilon values".into(),
        });
    }
    if eps_sequence.iter().any(|&e| !(e > T::zero())) || eps_sequence.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Parameter {
            op: "lap_reconstruct_t0",
            msg: "epsilon values must be positive and strictly decreasing".into(),
        });
    }
    if !(y0_range.0 < y0_range.1) {
        return Err(Error::Parameter {
            op: "lap_reconstruct_t0",
            msg: "empty y0 range".into(),
        });
    }
    let per: Vec<Vec<C<T>>> = eps_sequence
        .iter()
        .map(|&e| stone_at_epsilon(ctx, grid, e, y0_range.0, y0_range.1))
        .collect::<Result<_>>()?;
    // linear extrapolation in ε through consecutive pairs
    let extrap: Vec<Vec<C<T>>> = (0..per.len() - 1)
        .map(|i| {
            let (e1, e2) = (eps_sequence[i], eps_sequence[i + 1]);
            let w = e1 / (e1 - e2);
            per[i + 1].iter().zip(&per[i]).map(|(b, a)| *b * w + *a * (T::one() - w)).collect()
        })
        .collect();
    let deltas: Vec<T> = extrap.windows(2).map(|w| l2(&w[1], &w[0])).collect();
    let last = extrap.last().unwrap().clone();
    let norm = l2(&last, &vec![cx(T::zero(), T::zero()); last.len()]);
    let settled = quad.rel_tol * norm;
    if deltas.windows(2).any(|w| w[1] >= w[0] && w[1] > settled) {
        return Err(Error::NonConvergence {
            op: "lap_reconstruct_t0",
            terms: eps_sequence.len(),
            at: format!("extrapolation differences {:?}", deltas.iter().map(|d| to_f64(*d)).collect::<Vec<_>>()),
        });
    }
    let field = |v: Vec<C<T>>| ComplexField {
        grid: *grid,
        values: v,
        time: T::zero(),
    };
    Ok(LapReconstruction {
        psi: field(last),
        epsilons: eps_sequence.to_vec(),
        per_epsilon: per.into_iter().map(field).collect(),
        extrapolation_deltas: deltas,
        y0_range,
    })
}

/// `ψ(0, ·)` from the `ε → 0` limit of Stone's formula over the grid's `y0` range.
pub fn lap_reconstruct_t0<T: Real>(
    ctx: &KernelContext<T>,
    grid: &GridSpec<T>,
    eps_sequence: &[T],
    quad: &QuadratureSpec<T>,
) -> Result<ComplexField<T>> {
    Ok(lap_reconstruct_t0_range(ctx, grid, eps_sequence, quad, (grid.y_min, grid.y_max))?.psi)
}
