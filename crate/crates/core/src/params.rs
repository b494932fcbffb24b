//! Physical parameters, grids, sampled fields and quadrature settings.

use crate::error::{Error, Result};
use crate::profile::InitialDataProfile;
use crate::scalar::{cx, from_usize, lit, to_f64, Real, C};

/// Buoyancy parameter, x-wavenumber and the derived Whittaker index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowParams<T> {
    pub beta: T,
    pub m: u32,
    /// `sqrt(1/4 - beta^2)` on the principal branch.
    pub gamma: C<T>,
    pub mu: T,
    pub nu: T,
}

impl<T: Real> FlowParams<T> {
    pub fn m_real(&self) -> T {
        T::from_u32(self.m).unwrap()
    }

    pub fn beta2(&self) -> T {
        self.beta * self.beta
    }
}

pub fn derive_params<T: Real>(beta: T, m: u32) -> Result<FlowParams<T>> {
    if !(beta > T::zero()) || !beta.is_finite() {
        return Err(Error::Domain {
            op: "derive_params",
            msg: format!("beta must be positive and finite, got {beta}"),
        });
    }
    if m < 1 {
        return Err(Error::Domain {
            op: "derive_params",
            msg: "m must be at least 1".into(),
        });
    }
    let r = lit::<T>(0.25) - beta * beta;
    let gamma = if r >= T::zero() {
        cx(r.sqrt(), T::zero())
    } else {
        cx(T::zero(), (-r).sqrt())
    };
    Ok(FlowParams {
        beta,
        m,
        gamma,
        mu: gamma.re,
        nu: gamma.im,
    })
}

/// Uniform grid on `[y_min, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub y_min: T,
    pub y_max: T,
    pub n_points: usize,
}

impl<T: Real> GridSpec<T> {
    pub fn new(y_min: T, y_max: T, n_points: usize) -> Result<Self> {
        if !(y_min < y_max) || n_points < 16 {
            return Err(Error::Domain {
                op: "GridSpec",
                msg: format!(
                    "need y_min < y_max and at least 16 nodes, got [{y_min}, {y_max}] with {n_points}"
                ),
            });
        }
        Ok(GridSpec {
            y_min,
            y_max,
            n_points,
        })
    }

    pub fn default_grid() -> Self {
        GridSpec {
            y_min: lit(-20.0),
            y_max: lit(20.0),
            n_points: 2049,
        }
    }

    pub fn spacing(&self) -> T {
        (self.y_max - self.y_min) / from_usize::<T>(self.n_points - 1)
    }

    pub fn node(&self, j: usize) -> T {
        if j + 1 == self.n_points {
            self.y_max
        } else {
            self.y_min + from_usize::<T>(j) * self.spacing()
        }
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.n_points).map(|j| self.node(j)).collect()
    }

    pub fn max_abs_y(&self) -> T {
        self.y_min.abs().max(self.y_max.abs())
    }

    /// Same interval with `2(n-1)+1` nodes.
    pub fn refined(&self) -> Self {
        GridSpec {
            n_points: 2 * (self.n_points - 1) + 1,
            ..*self
        }
    }
}

/// Complex samples of a function of `y` at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField<T> {
    pub grid: GridSpec<T>,
    pub values: Vec<C<T>>,
    pub time: T,
}

impl<T: Real> ComplexField<T> {
    pub fn new(grid: GridSpec<T>, values: Vec<C<T>>, time: T) -> Result<Self> {
        if values.len() != grid.n_points {
            return Err(Error::Parameter {
                op: "ComplexField",
                msg: format!(
                    "{} values for a grid of {} nodes",
                    values.len(),
                    grid.n_points
                ),
            });
        }
        Ok(ComplexField { grid, values, time })
    }

    pub fn zeros(grid: GridSpec<T>, time: T) -> Self {
        ComplexField {
            grid,
            values: vec![C::new(T::zero(), T::zero()); grid.n_points],
            time,
        }
    }

    pub fn from_fn(grid: GridSpec<T>, time: T, f: impl Fn(T) -> C<T>) -> Self {
        let values = grid.nodes().into_iter().map(f).collect();
        ComplexField { grid, values, time }
    }

    pub fn map(&self, f: impl Fn(T, C<T>) -> C<T>) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(j, &v)| f(self.grid.node(j), v))
            .collect();
        ComplexField {
            grid: self.grid,
            values,
            time: self.time,
        }
    }
}

/// Truncation, grading and panel orders for the singular oscillatory integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    pub eta_max: T,
    pub xi_max: T,
    pub delta0: T,
    pub panels_per_decade: usize,
    pub jacobi_order: usize,
    pub filon_order: usize,
    /// Width of the uniform panels beyond `delta0`.
    pub panel_width: T,
    /// Innermost graded breakpoint as a fraction of `delta0`; below it the
    /// leading small-argument terms are integrated in closed form.
    pub endpoint_fraction: T,
    /// Relative tolerance checked against the per-integral error estimate.
    pub rel_tol: T,
}

impl<T: Real> QuadratureSpec<T> {
    pub fn default_for(m: u32) -> Self {
        let mr = T::from_u32(m.max(1)).unwrap();
        QuadratureSpec {
            eta_max: lit::<T>(40.0) / mr,
            xi_max: lit::<T>(40.0) / mr,
            delta0: lit::<T>(0.5) / mr,
            panels_per_decade: 3,
            jacobi_order: 16,
            filon_order: 20,
            panel_width: lit::<T>(0.25).min(lit::<T>(0.5) / mr),
            endpoint_fraction: lit(1e-14),
            rel_tol: lit(1e-9),
        }
    }

    pub fn validate(&self, m: u32) -> Result<()> {
        let mr = T::from_u32(m).unwrap();
        let bad = |msg: String| {
            Err(Error::Parameter {
                op: "QuadratureSpec",
                msg,
            })
        };
        if !(self.delta0 > T::zero()) || self.delta0 > lit::<T>(0.5) / mr * lit(1.0 + 1e-12) {
            return bad(format!("delta0 = {} must lie in (0, 1/(2m)]", self.delta0));
        }
        if !(self.eta_max > self.delta0) || !(self.xi_max > self.delta0) {
            return bad("eta_max and xi_max must exceed delta0".into());
        }
        if self.panels_per_decade < 1
            || self.jacobi_order < 2
            || self.filon_order < 2
            || self.jacobi_order > 64
            || self.filon_order > 64
        {
            return bad("panel orders must lie in [2, 64] and panels_per_decade >= 1".into());
        }
        if !(self.panel_width > T::zero())
            || !(self.endpoint_fraction > T::zero() && self.endpoint_fraction < T::one())
            || !(self.rel_tol > T::zero())
        {
            return bad("panel_width, endpoint_fraction and rel_tol must be positive".into());
        }
        Ok(())
    }

    /// Same truncation with every panel halved.
    pub fn refined(&self) -> Self {
        QuadratureSpec {
            panels_per_decade: self.panels_per_decade * 2,
            panel_width: self.panel_width * lit(0.5),
            ..*self
        }
    }
}

/// Trapezoid approximation of `||rho0||_{H^{2+j}} + ||omega0||_{H^{2+j}}`.
pub fn sobolev_q<T: Real>(data: &InitialDataProfile<T>, j: usize, grid: &GridSpec<T>) -> Result<T> {
    if j > 2 {
        return Err(Error::Parameter {
            op: "sobolev_q",
            msg: format!("j = {j} outside 0..=2"),
        });
    }
    let order = 2 + j;
    let edge_tol = lit::<T>(1e-12);
    let mut total = T::zero();
    for p in [&data.rho0, &data.omega0] {
        for edge in [grid.y_min, grid.y_max] {
            let d = p.derivs(edge);
            if let Some(k) = (0..=order).find(|&k| d[k].abs() >= edge_tol) {
                return Err(Error::DomainTooSmall {
                    msg: format!(
                        "derivative {k} of a profile is {:e} at y = {}",
                        to_f64(d[k]),
                        to_f64(edge)
                    ),
                });
            }
        }
        let h = grid.spacing();
        let mut sq = T::zero();
        for i in 0..grid.n_points {
            let d = p.derivs(grid.node(i));
            let w = if i == 0 || i + 1 == grid.n_points {
                lit(0.5)
            } else {
                T::one()
            };
            sq += w * d[..=order].iter().map(|&v| v * v).sum::<T>();
        }
        total += (sq * h).sqrt();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::Profile;
    use proptest::prelude::*;

    #[test]
    fn derive_params_examples() {
        let p = derive_params(0.4f64, 1).unwrap();
        assert!((p.gamma.re - 0.3).abs() < 1e-15 && p.gamma.im == 0.0);
        let p = derive_params(0.5f64, 2).unwrap();
        assert_eq!(p.gamma, C::new(0.0, 0.0));
        let p = derive_params(1.0f64, 1).unwrap();
        assert!(p.mu == 0.0 && (p.nu - 0.75f64.sqrt()).abs() < 1e-15);
        assert!(derive_params(0.0f64, 1).is_err());
        assert!(derive_params(-1.0f64, 1).is_err());
        assert!(derive_params(1.0f64, 0).is_err());
    }

    #[test]
    fn derive_params_single_precision() {
        let p = derive_params(0.4f32, 1).unwrap();
        assert!((p.gamma.re - 0.3).abs() < 1e-6);
    }

    // Closed form: int (d^k/dy^k e^{-y^2})^2 dy = sqrt(pi/2) * (2k-1)!! for k >= 1.
    fn gaussian_hs(s: usize) -> f64 {
        let mut sum = 0.0;
        let mut dfact = 1.0;
        for k in 0..=s {
            if k >= 1 {
                dfact *= (2 * k - 1) as f64;
            }
            sum += (std::f64::consts::PI / 2.0).sqrt() * dfact;
        }
        sum.sqrt()
    }

    #[test]
    fn sobolev_q_unit_gaussian() {
        let data = InitialDataProfile::<f64>::new(Profile::gaussian(0.0, 1.0, 1.0), Profile::zero());
        let grid = GridSpec::default_grid();
        let q = sobolev_q(&data, 0, &grid).unwrap();
        // independent Richardson oracle at 4x resolution
        let fine = grid.refined().refined();
        let coarse = GridSpec::new(-20.0, 20.0, (fine.n_points - 1) / 2 + 1).unwrap();
        let qf = sobolev_q(&data, 0, &fine).unwrap();
        let qc = sobolev_q(&data, 0, &coarse).unwrap();
        let rich = (4.0 * qf - qc) / 3.0;
        assert!((q - rich).abs() < 1e-12, "{q} vs {rich}");
        assert!((q - gaussian_hs(2)).abs() < 1e-12);
        assert_eq!(sobolev_q(&InitialDataProfile::zero(), 1, &grid).unwrap(), 0.0);
        let narrow = GridSpec::new(-3.0, 3.0, 101).unwrap();
        assert!(matches!(
            sobolev_q(&data, 0, &narrow),
            Err(Error::DomainTooSmall { .. })
        ));
    }

    #[test]
    fn sobolev_q_refinement_stable() {
        use crate::profile::ProfileKind::*;
        for kind in [Gaussian, Bump, Sech2] {
            let data = InitialDataProfile::new(
                Profile::<f64>::new(kind, 0.2, 1.5, 1.0),
                Profile::new(kind, -0.4, 2.0, 0.5),
            );
            let g = GridSpec::new(-40.0, 40.0, 4097).unwrap();
            for j in 0..=2 {
                let a = sobolev_q(&data, j, &g).unwrap();
                let b = sobolev_q(&data, j, &g.refined()).unwrap();
                assert!((a - b).abs() < 0.01 * b, "{kind:?} j={j}: {a} {b}");
            }
        }
    }

    proptest! {
        #[test]
        fn gamma_modulus_identity(beta in 0.01f64..5.0) {
            let p = derive_params(beta, 1).unwrap();
            prop_assert!((p.gamma.norm_sqr() - (0.25 - beta * beta).abs()).abs() < 1e-13 * (1.0 + beta * beta));
            let g2 = p.gamma * p.gamma;
            prop_assert!((g2.re + beta * beta - 0.25).abs() < 1e-13 * (1.0 + beta * beta));
            prop_assert!(p.gamma.re >= 0.0 && p.gamma.im >= 0.0);
            prop_assert!(p.gamma.re == 0.0 || p.gamma.im == 0.0);
        }

        #[test]
        fn sobolev_q_monotone_in_j(c in -1.0f64..1.0, w in 0.6f64..2.0, a in -2.0f64..2.0) {
            let data = InitialDataProfile::new(Profile::gaussian(c, w, a), Profile::gaussian(-c, w, 1.0));
            let g = GridSpec::new(-25.0, 25.0, 2049).unwrap();
            let q: Vec<f64> = (0..=2).map(|j| sobolev_q(&data, j, &g).unwrap()).collect();
            prop_assert!(q[0] <= q[1] && q[1] <= q[2]);
        }
    }
}
