//! Method-of-lines integrator for the linearized system on a truncated
//! `y`-interval. Independent of the closed-form solution and used to
//! cross-check it at moderate times.

use crate::error::{Error, Result};
use crate::params::{ComplexField, FlowParams, GridSpec};
use crate::scalar::{cx, lit, to_f64, Real, C};

/// Largest `m·t_end·Δy` for which phase mixing stays resolved.
pub const PHASE_MIXING_LIMIT: f64 = 0.3;
/// Largest `dt·m·max|y|` accepted by [`integrate`].
pub const ROTATION_LIMIT: f64 = 0.5;
/// Relative size of `ω` at the grid edges above which the truncation is refused.
pub const EDGE_DECAY: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EllipticScheme {
    /// Fourth-order compact scheme.
    #[default]
    Numerov,
    /// Three-point second-order scheme.
    SecondOrder,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolState<T> {
    pub omega: ComplexField<T>,
    pub rho: ComplexField<T>,
    pub time: T,
}

impl<T: Real> EvolState<T> {
    pub fn new(omega: ComplexField<T>, rho: ComplexField<T>, time: T) -> Result<Self> {
        if omega.grid != rho.grid {
            return Err(Error::Parameter {
                op: "EvolState",
                msg: "omega and rho live on different grids".into(),
            });
        }
        if !(time >= T::zero()) {
            return Err(Error::Domain {
                op: "EvolState",
                msg: format!("time must be nonnegative, got {time}"),
            });
        }
        let omega = ComplexField { time, ..omega };
        let rho = ComplexField { time, ..rho };
        Ok(EvolState { omega, rho, time })
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.omega.grid
    }

    pub fn psi(&self, m: u32) -> ComplexField<T> {
        let values = EllipticSolver::new(self.grid(), m, EllipticScheme::Numerov).solve(&self.omega.values);
        ComplexField {
            grid: *self.grid(),
            values,
            time: self.time,
        }
    }

    /// `u^x = -∂_yψ` by a fourth-order stencil (one-sided at the edges).
    pub fn ux(&self, m: u32) -> ComplexField<T> {
        let psi = self.psi(m);
        let d = derivative4(&psi.values, self.grid().spacing());
        ComplexField {
            values: d.into_iter().map(|v| -v).collect(),
            ..psi
        }
    }
}

fn derivative4<T: Real>(v: &[C<T>], h: T) -> Vec<C<T>> {
    let n = v.len();
    let c = |x: f64| lit::<T>(x) / h;
    (0..n)
        .map(|j| {
            if j >= 2 && j + 2 < n {
                (v[j - 2] - v[j + 2]) * c(1.0 / 12.0) + (v[j + 1] - v[j - 1]) * c(2.0 / 3.0)
            } else if j < 2 {
                v[j] * c(-25.0 / 12.0) + v[j + 1] * c(4.0) - v[j + 2] * c(3.0) + v[j + 3] * c(4.0 / 3.0) - v[j + 4] * c(0.25)
            } else {
                v[j] * c(25.0 / 12.0) - v[j - 1] * c(4.0) + v[j - 2] * c(3.0) - v[j - 3] * c(4.0 / 3.0) + v[j - 4] * c(0.25)
            }
        })
        .collect()
}

/// Factorized tridiagonal operator for `ψ'' - m²ψ = ω` with decaying-root
/// ghost closure at both edges.
///
/// Beyond the grid `ω` is negligible, so the discrete solution continues as
/// `λ^k` with `λ < 1` the decaying root of the homogeneous recurrence. The
/// closure is exact for that solution, which keeps truncation effects at the
/// `e^{-m·width}` level.
#[derive(Debug, Clone)]
pub struct EllipticSolver<T> {
    scheme: EllipticScheme,
    /// Off-diagonal coefficient.
    off: T,
    /// Thomas forward-sweep multipliers and pivots.
    cprime: Vec<T>,
    pivot: Vec<T>,
    h2: T,
}

impl<T: Real> EllipticSolver<T> {
    pub fn new(grid: &GridSpec<T>, m: u32, scheme: EllipticScheme) -> Self {
        assert!(m >= 1, "elliptic solve requires m >= 1");
        let h = grid.spacing();
        let mr = T::from_u32(m).unwrap();
        let mh2 = mr * mr * h * h;
        let two = lit::<T>(2.0);
        let (off, diag) = match scheme {
            EllipticScheme::Numerov => {
                let a = mh2 / lit(12.0);
                (T::one() - a, -(two + a * lit(10.0)))
            }
            EllipticScheme::SecondOrder => (T::one(), -(two + mh2)),
        };
        // λ + 1/λ = -diag/off
        let s = -diag / off;
        let lambda = (s - (s * s - lit(4.0)).sqrt()) / two;
        let n = grid.n_points;
        let mut cprime = vec![T::zero(); n];
        let mut pivot = vec![T::zero(); n];
        for j in 0..n {
            let mut d = diag;
            if j == 0 || j == n - 1 {
                d = d + off * lambda;
            }
            if j > 0 {
                d = d - off * cprime[j - 1];
            }
            assert!(d.abs() > T::epsilon(), "singular elliptic matrix at row {j}");
            pivot[j] = d;
            cprime[j] = off / d;
        }
        EllipticSolver {
            scheme,
            off,
            cprime,
            pivot,
            h2: h * h,
        }
    }

    pub fn solve(&self, omega: &[C<T>]) -> Vec<C<T>> {
        let n = omega.len();
        assert_eq!(n, self.pivot.len());
        let zero = cx(T::zero(), T::zero());
        let at = |j: isize| if j < 0 || j >= n as isize { zero } else { omega[j as usize] };
        let rhs = |j: usize| match self.scheme {
            EllipticScheme::Numerov => {
                let j = j as isize;
                (at(j - 1) + at(j) * lit::<T>(10.0) + at(j + 1)) * (self.h2 / lit(12.0))
            }
            EllipticScheme::SecondOrder => omega[j] * self.h2,
        };
        let mut d = vec![zero; n];
        for j in 0..n {
            let prev = if j > 0 { d[j - 1] * self.off } else { zero };
            d[j] = (rhs(j) - prev) / self.pivot[j];
        }
        for j in (0..n - 1).rev() {
            let next = d[j + 1];
            d[j] -= next * self.cprime[j];
        }
        d
    }
}

fn check_edges<T: Real>(f: &ComplexField<T>, op: &'static str) -> Result<()> {
    let peak = f.values.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let n = f.values.len();
    let edge = f.values[0].norm().max(f.values[n - 1].norm());
    if edge > lit::<T>(EDGE_DECAY) * peak {
        return Err(Error::DomainTooSmall {
            msg: format!("{op}: field at the grid edge is {:e} of its peak", to_f64(edge / peak)),
        });
    }
    Ok(())
}

/// Solves `ψ'' - m²ψ = ω` with decay at both ends (Numerov scheme).
pub fn elliptic_solve<T: Real>(omega: &ComplexField<T>, m: u32) -> Result<ComplexField<T>> {
    elliptic_solve_with(omega, m, EllipticScheme::Numerov)
}

pub fn elliptic_solve_with<T: Real>(omega: &ComplexField<T>, m: u32, scheme: EllipticScheme) -> Result<ComplexField<T>> {
    if m == 0 {
        return Err(Error::Parameter {
            op: "elliptic_solve",
            msg: "m must be at least 1".into(),
        });
    }
    check_edges(omega, "elliptic_solve")?;
    let values = EllipticSolver::new(&omega.grid, m, scheme).solve(&omega.values);
    Ok(ComplexField {
        grid: omega.grid,
        values,
        time: omega.time,
    })
}

struct Rhs<'a, T> {
    params: &'a FlowParams<T>,
    ys: Vec<T>,
    solver: EllipticSolver<T>,
}

impl<T: Real> Rhs<'_, T> {
    fn eval(&self, omega: &[C<T>], rho: &[C<T>]) -> (Vec<C<T>>, Vec<C<T>>) {
        let m = self.params.m_real();
        let psi = self.solver.solve(omega);
        let ib = cx(T::zero(), m * self.params.beta2());
        let im = cx(T::zero(), m);
        let mut dw = Vec::with_capacity(omega.len());
        let mut dr = Vec::with_capacity(omega.len());
        for j in 0..omega.len() {
            let rot = cx(T::zero(), -m * self.ys[j]);
            dw.push(rot * omega[j] - ib * rho[j]);
            dr.push(rot * rho[j] + im * psi[j]);
        }
        (dw, dr)
    }
}

/// Time derivatives `(∂_tω, ∂_tρ)` of the semi-discrete system.
pub fn rhs<T: Real>(state: &EvolState<T>, params: &FlowParams<T>) -> Result<(ComplexField<T>, ComplexField<T>)> {
    let r = Rhs {
        params,
        ys: state.grid().nodes(),
        solver: EllipticSolver::new(state.grid(), params.m, EllipticScheme::Numerov),
    };
    let (dw, dr) = r.eval(&state.omega.values, &state.rho.values);
    let g = *state.grid();
    Ok((
        ComplexField {
            grid: g,
            values: dw,
            time: state.time,
        },
        ComplexField {
            grid: g,
            values: dr,
            time: state.time,
        },
    ))
}

/// Classical fourth-order Runge–Kutta from `state0` to `t_end`, returning the
/// states at each requested output time (sorted, within `(t0, t_end]`) and at `t_end`.
pub fn integrate<T: Real>(state0: &EvolState<T>, params: &FlowParams<T>, t_end: T, dt: T, outputs: &[T]) -> Result<Vec<EvolState<T>>> {
    let grid = *state0.grid();
    let m = params.m_real();
    let h = grid.spacing();
    let max_t = lit::<T>(PHASE_MIXING_LIMIT) / (m * h);
    if t_end > max_t {
        return Err(Error::Resolution {
            msg: format!(
                "m*t_end*dy = {:.3} exceeds {PHASE_MIXING_LIMIT}; refine the grid or shorten the run",
                to_f64(m * t_end * h)
            ),
            max_t_end: to_f64(max_t),
        });
    }
    if !(t_end >= state0.time) {
        return Err(Error::Domain {
            op: "integrate",
            msg: format!("t_end = {t_end} precedes the initial time {}", state0.time),
        });
    }
    let dt_max = lit::<T>(ROTATION_LIMIT) / (m * grid.max_abs_y());
    if !(dt > T::zero() && dt <= dt_max) {
        return Err(Error::Parameter {
            op: "integrate",
            msg: format!("dt = {dt} must lie in (0, {dt_max}] to resolve the imy rotation"),
        });
    }
    check_edges(&state0.omega, "integrate")?;
    let r = Rhs {
        params,
        ys: grid.nodes(),
        solver: EllipticSolver::new(&grid, params.m, EllipticScheme::Numerov),
    };
    let mut stops: Vec<T> = outputs.iter().copied().filter(|&t| t > state0.time && t < t_end).collect();
    stops.sort_by(|a, b| a.partial_cmp(b).unwrap());
    stops.push(t_end);
    let mut w = state0.omega.values.clone();
    let mut p = state0.rho.values.clone();
    let mut t = state0.time;
    let mut out = Vec::with_capacity(stops.len());
    let axpy = |a: &[C<T>], b: &[C<T>], s: T| -> Vec<C<T>> { a.iter().zip(b).map(|(x, y)| *x + *y * s).collect() };
    for &stop in &stops {
        let span = stop - t;
        let n = (span / dt).ceil().to_usize().unwrap_or(0).max(usize::from(span > T::zero()));
        let step = if n > 0 { span / T::from_usize(n).unwrap() } else { T::zero() };
        let half = step * lit(0.5);
        let sixth = step / lit(6.0);
        for _ in 0..n {
            let (k1w, k1r) = r.eval(&w, &p);
            let (k2w, k2r) = r.eval(&axpy(&w, &k1w, half), &axpy(&p, &k1r, half));
            let (k3w, k3r) = r.eval(&axpy(&w, &k2w, half), &axpy(&p, &k2r, half));
            let (k4w, k4r) = r.eval(&axpy(&w, &k3w, step), &axpy(&p, &k3r, step));
            let two = lit::<T>(2.0);
            for j in 0..w.len() {
                w[j] += (k1w[j] + (k2w[j] + k3w[j]) * two + k4w[j]) * sixth;
                p[j] += (k1r[j] + (k2r[j] + k3r[j]) * two + k4r[j]) * sixth;
            }
        }
        t = stop;
        let field = |v: &Vec<C<T>>| ComplexField {
            grid,
            values: v.clone(),
            time: t,
        };
        out.push(EvolState {
            omega: field(&w),
            rho: field(&p),
            time: t,
        });
    }
    Ok(out)
}

/// Trapezoid inner product `∫ conj(a) b dy`.
fn inner<T: Real>(a: &[C<T>], b: &[C<T>], h: T) -> C<T> {
    let n = a.len();
    let mut s = cx(T::zero(), T::zero());
    for j in 0..n {
        let w = if j == 0 || j == n - 1 { lit(0.5) } else { T::one() };
        s += a[j].conj() * b[j] * w;
    }
    s * h
}

/// `β²∫|ρ|² + ∫|u|²`, with `∫|u|² = -∫ conj(ψ) ω`.
pub fn energy<T: Real>(state: &EvolState<T>, params: &FlowParams<T>) -> T {
    let h = state.grid().spacing();
    let psi = state.psi(params.m);
    params.beta2() * inner(&state.rho.values, &state.rho.values, h).re - inner(&psi.values, &state.omega.values, h).re
}

/// Rate of change of [`energy`] computed from [`rhs`].
pub fn energy_rate<T: Real>(state: &EvolState<T>, params: &FlowParams<T>) -> Result<T> {
    let (dw, dr) = rhs(state, params)?;
    let h = state.grid().spacing();
    let psi = state.psi(params.m);
    let two = lit::<T>(2.0);
    Ok(two * params.beta2() * inner(&state.rho.values, &dr.values, h).re - two * inner(&psi.values, &dw.values, h).re)
}

/// The shear-transfer term `2 Re(im ∫ y conj(ψ) ω)`: the only part of the
/// energy rate that the buoyancy exchange does not cancel.
pub fn orr_flux<T: Real>(state: &EvolState<T>, params: &FlowParams<T>) -> T {
    let h = state.grid().spacing();
    let psi = state.psi(params.m);
    let yw: Vec<C<T>> = state.grid().nodes().iter().zip(&state.omega.values).map(|(&y, w)| *w * y).collect();
    let s = inner(&psi.values, &yw, h);
    -lit::<T>(2.0) * params.m_real() * s.im
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::derive_params;

    fn gauss_state(grid: GridSpec<f64>) -> EvolState<f64> {
        let w = ComplexField::from_fn(grid, 0.0, |y| cx((-(y - 0.3) * (y - 0.3)).exp(), 0.0));
        let r = ComplexField::from_fn(grid, 0.0, |y| cx(0.7 * (-(y + 0.2) * (y + 0.2)).exp(), 0.0));
        EvolState::new(w, r, 0.0).unwrap()
    }

    fn manufactured_error(grid: GridSpec<f64>, scheme: EllipticScheme) -> f64 {
        let omega = ComplexField::from_fn(grid, 0.0, |y| cx((4.0 * y * y - 3.0) * (-y * y).exp(), 0.0));
        let psi = elliptic_solve_with(&omega, 1, scheme).unwrap();
        let (mut num, mut den) = (0.0, 0.0);
        for (y, p) in grid.nodes().iter().zip(&psi.values) {
            let e = (-y * y).exp();
            num += (p - e).norm_sqr();
            den += e * e;
        }
        (num / den).sqrt()
    }

    #[test]
    fn manufactured_solution_default_grid() {
        let e = manufactured_error(GridSpec::default_grid(), EllipticScheme::Numerov);
        assert!(e < 1e-6, "{e}");
    }

    #[test]
    fn scheme_orders() {
        let g = GridSpec::new(-12.0, 12.0, 257).unwrap();
        let r2 = manufactured_error(g, EllipticScheme::SecondOrder) / manufactured_error(g.refined(), EllipticScheme::SecondOrder);
        assert!((3.6..=4.4).contains(&r2), "{r2}");
        let r4 = manufactured_error(g, EllipticScheme::Numerov) / manufactured_error(g.refined(), EllipticScheme::Numerov);
        assert!((14.0..=18.0).contains(&r4), "{r4}");
    }

    #[test]
    fn decay_closure_is_exact_for_exponential_tails() {
        // ω supported near the origin: ψ is proportional to e^{-m|y|} away from it
        let g = GridSpec::new(-10.0, 10.0, 2001).unwrap();
        let small = GridSpec::new(-5.0, 5.0, 1001).unwrap();
        let f = |y: f64| cx::<f64>((-4.0 * y * y).exp(), 0.0);
        let big = elliptic_solve(&ComplexField::from_fn(g, 0.0, f), 2).unwrap();
        let cut = EllipticSolver::new(&small, 2, EllipticScheme::Numerov).solve(&ComplexField::from_fn(small, 0.0, f).values);
        for (j, v) in cut.iter().enumerate() {
            assert!((v - big.values[j + 500]).norm() < 1e-12, "{j}");
        }
    }

    #[test]
    fn zero_in_zero_out() {
        let g = GridSpec::new(-5.0, 5.0, 101).unwrap();
        let z = ComplexField::zeros(g, 0.0);
        assert!(elliptic_solve(&z, 1).is_err() || elliptic_solve(&z, 1).unwrap().values.iter().all(|v| v.norm() == 0.0));
        let st = EvolState::new(z.clone(), z.clone(), 0.0).unwrap();
        let p = derive_params(0.4, 1).unwrap();
        let (a, b) = rhs(&st, &p).unwrap();
        assert!(a.values.iter().chain(&b.values).all(|v| v.norm() == 0.0));
        let out = integrate(&st, &p, 1.0, 0.05, &[0.5]).unwrap();
        assert_eq!(out.len(), 2);
        assert!(out[1].omega.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn edge_and_parameter_errors() {
        let g = GridSpec::new(-2.0, 2.0, 101).unwrap();
        let wide = ComplexField::from_fn(g, 0.0, |y: f64| cx((-y * y / 4.0).exp(), 0.0));
        assert!(matches!(elliptic_solve(&wide, 1), Err(Error::DomainTooSmall { .. })));
        assert!(elliptic_solve(&wide, 0).is_err());
        let st = gauss_state(GridSpec::default_grid());
        let p = derive_params(0.4, 1).unwrap();
        match integrate(&st, &p, 40.0, 0.01, &[]) {
            Err(Error::Resolution { max_t_end, .. }) => assert!((max_t_end - 0.3 / (40.0 / 2048.0)).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
        assert!(matches!(integrate(&st, &p, 1.0, 0.1, &[]), Err(Error::Parameter { .. })));
    }

    #[test]
    fn zero_buoyancy_decouples_vorticity() {
        let st = gauss_state(GridSpec::new(-8.0, 8.0, 321).unwrap());
        let mut p = derive_params(0.4, 1).unwrap();
        p.beta = 0.0;
        let (a, _) = rhs(&st, &p).unwrap();
        for (j, y) in st.grid().nodes().iter().enumerate() {
            assert_eq!(a.values[j], cx(0.0, -y) * st.omega.values[j]);
        }
    }

    #[test]
    fn energy_rate_equals_orr_flux() {
        let p = derive_params(0.4, 1).unwrap();
        let st0 = gauss_state(GridSpec::default_grid());
        let out = integrate(&st0, &p, 1.0, 0.01, &[]).unwrap();
        for st in [&st0, &out[0]] {
            let e = energy(st, &p);
            let rate = energy_rate(st, &p).unwrap();
            let flux = orr_flux(st, &p);
            assert!((rate - flux).abs() < 1e-6 * e, "{rate} vs {flux}, E = {e}");
        }
        // zero for real data at t = 0, but not afterwards: the functional is not conserved
        assert!(orr_flux(&out[0], &p).abs() > 1e-3 * energy(&st0, &p));
    }

    #[test]
    fn energy_budget_along_trajectory() {
        let p = derive_params(0.5, 1).unwrap();
        let st0 = gauss_state(GridSpec::new(-12.0, 12.0, 1201).unwrap());
        let times: Vec<f64> = (1..=8).map(|k| k as f64 * 0.125).collect();
        let out = integrate(&st0, &p, 1.0, 0.01, &times).unwrap();
        let mut states = vec![st0.clone()];
        states.extend(out);
        let flux: Vec<f64> = states.iter().map(|s| orr_flux(s, &p)).collect();
        // composite Simpson on 8 intervals
        let h = 0.125;
        let mut integral = flux[0] + flux[8];
        for k in 1..8 {
            integral += if k % 2 == 1 { 4.0 } else { 2.0 } * flux[k];
        }
        integral *= h / 3.0;
        let de = energy(&states[8], &p) - energy(&states[0], &p);
        assert!((de - integral).abs() < 1e-5 * energy(&st0, &p), "{de} vs {integral}");
    }

    #[test]
    fn rk4_is_fourth_order() {
        let g = GridSpec::new(-10.0, 10.0, 257).unwrap();
        let st = gauss_state(g);
        let p = derive_params(0.4, 1).unwrap();
        let run = |dt: f64| integrate(&st, &p, 1.0, dt, &[]).unwrap().pop().unwrap();
        let reference = run(0.05 / 8.0);
        let err = |s: &EvolState<f64>| {
            s.omega
                .values
                .iter()
                .zip(&reference.omega.values)
                .chain(s.rho.values.iter().zip(&reference.rho.values))
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt()
        };
        let ratio = err(&run(0.05)) / err(&run(0.025));
        assert!((14.0..=18.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn ux_matches_analytic_derivative() {
        let g = GridSpec::new(-10.0, 10.0, 801).unwrap();
        let w = ComplexField::from_fn(g, 0.0, |y: f64| cx((4.0 * y * y - 3.0) * (-y * y).exp(), 0.0));
        let st = EvolState::new(w, ComplexField::zeros(g, 0.0), 0.0).unwrap();
        let ux = st.ux(1);
        for (&y, u) in g.nodes().iter().zip(&ux.values) {
            assert!((u.re - 2.0 * y * (-y * y).exp()).abs() < 1e-6_f64, "{y}");
        }
    }
}
