//! Decay of per-mode L² norms and power-law fits.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::explicit::{ExplicitSolver, SolutionSnapshot};
use crate::kernel::KernelContext;
use crate::params::{ComplexField, GridSpec, QuadratureSpec};
use crate::scalar::{lit, to_f64, Real};

/// Largest accepted `|f(edge)|² / max|f|²`, i.e. the relative weight of the
/// truncated tail in `‖f‖²`.
pub const EDGE_ENERGY_FRACTION: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    Ux,
    Uy,
    Rho,
}

impl Quantity {
    pub const ALL: [Quantity; 3] = [Quantity::Ux, Quantity::Uy, Quantity::Rho];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Ux => "ux",
            Quantity::Uy => "uy",
            Quantity::Rho => "rho",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Quantity::ALL.into_iter().find(|q| q.name() == s)
    }

    /// Decay exponent of the norm for `t → ∞` at `Re γ = μ`.
    pub fn expected_exponent(self, mu: f64) -> f64 {
        match self {
            Quantity::Ux | Quantity::Rho => 0.5 - mu,
            Quantity::Uy => 1.5 - mu,
        }
    }

    fn field<T: Real>(self, snap: &SolutionSnapshot<T>) -> &ComplexField<T> {
        match self {
            Quantity::Ux => &snap.ux,
            Quantity::Uy => &snap.uy,
            Quantity::Rho => &snap.rho,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecaySeries {
    pub quantity: Quantity,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// `α` in `norm ≈ A t^{-α}` (times `1 + log t` when `log_factor`).
    pub exponent: f64,
    pub amplitude: f64,
    pub log_factor: bool,
    pub r_squared: f64,
    /// Residual sums of squares of the power and log models (the latter
    /// `None` if not tried).
    pub power_ssr: f64,
    pub log_ssr: Option<f64>,
}

/// Trapezoid `‖f‖_{L²_y}` with a tail check.
pub fn mode_l2<T: Real>(field: &ComplexField<T>) -> Result<T> {
    mode_l2_checked(field, EDGE_ENERGY_FRACTION)
}

pub fn mode_l2_checked<T: Real>(field: &ComplexField<T>, edge_fraction: f64) -> Result<T> {
    let v = &field.values;
    let peak = v.iter().map(|z| z.norm_sqr()).fold(T::zero(), T::max);
    let n = v.len();
    let edge = v[0].norm_sqr().max(v[n - 1].norm_sqr());
    if peak > T::zero() && edge > lit::<T>(edge_fraction) * peak {
        return Err(Error::DomainTooSmall {
            msg: format!(
                "|f|² at the grid edge is {:.2e} of its peak (limit {edge_fraction:e})",
                to_f64(edge / peak)
            ),
        });
    }
    let h = field.grid.spacing();
    let mut s = T::zero();
    for (j, z) in v.iter().enumerate() {
        let w = if j == 0 || j == n - 1 { lit(0.5) } else { T::one() };
        s += z.norm_sqr() * w;
    }
    Ok((s * h).sqrt())
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() || times[0] < 1.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain {
            op: "decay_series",
            msg: "times must be strictly ascending and at least 1".into(),
        });
    }
    Ok(())
}

/// Norm series for every quantity, sharing one snapshot per time.
pub fn decay_series_all<T: Real>(
    solver: &ExplicitSolver<T>,
    times: &[f64],
    grid: &GridSpec<T>,
) -> Result<[DecaySeries; 3]> {
    check_times(times)?;
    let rows: Vec<[f64; 3]> = times
        .par_iter()
        .map(|&t| {
            let snap = solver.snapshot(lit(t), grid)?;
            let mut out = [0.0; 3];
            for (k, q) in Quantity::ALL.iter().enumerate() {
                out[k] = to_f64(mode_l2(q.field(&snap))?);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok([0, 1, 2].map(|k| DecaySeries {
        quantity: Quantity::ALL[k],
        times: times.to_vec(),
        norms: rows.iter().map(|r| r[k]).collect(),
    }))
}

pub fn decay_series<T: Real>(
    ctx: &KernelContext<T>,
    quantity: Quantity,
    times: &[f64],
    grid: &GridSpec<T>,
    spec: &QuadratureSpec<T>,
) -> Result<DecaySeries> {
    let solver = ExplicitSolver::new(*ctx, *spec)?;
    let all = decay_series_all(&solver, times, grid)?;
    Ok(all.into_iter().find(|s| s.quantity == quantity).unwrap())
}

/// Least-squares line `y ≈ a + b x`, returning `(a, b, ssr)`.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(u, v)| (u - mx) * (v - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let ssr = x.iter().zip(y).map(|(u, v)| (v - a - b * u).powi(2)).sum();
    (a, b, ssr)
}

fn r_squared(y: &[f64], ssr: f64) -> f64 {
    let n = y.len() as f64;
    let my = y.iter().sum::<f64>() / n;
    let sst: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    if sst > 0.0 {
        (1.0 - ssr / sst).clamp(0.0, 1.0)
    } else {
        1.0
    }
}

/// Fits `log norm` against `log t`, optionally also with a `log(1 + log t)`
/// offset, and keeps the model with the smaller residual.
pub fn fit_decay(series: &DecaySeries, try_log: bool) -> Result<DecayFit> {
    let (t, v) = (&series.times, &series.norms);
    if t.len() != v.len() {
        return Err(Error::Parameter {
            op: "fit_decay",
            msg: "times and norms differ in length".into(),
        });
    }
    if t.len() < 6 || t.iter().any(|&x| x <= 0.0) || (t[t.len() - 1] / t[0]).log10() < 1.5 {
        return Err(Error::InsufficientSpan {
            msg: format!("need at least 6 points over 1.5 decades, got {} points", t.len()),
        });
    }
    if v.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Domain {
            op: "fit_decay",
            msg: "norms must be positive".into(),
        });
    }
    let lt: Vec<f64> = t.iter().map(|x| x.ln()).collect();
    let lv: Vec<f64> = v.iter().map(|x| x.ln()).collect();
    let (a, b, ssr) = line_fit(&lt, &lv);
    let power = DecayFit {
        exponent: -b,
        amplitude: a.exp(),
        log_factor: false,
        r_squared: r_squared(&lv, ssr),
        power_ssr: ssr,
        log_ssr: None,
    };
    if !try_log {
        return Ok(power);
    }
    let shifted: Vec<f64> = lv.iter().zip(t).map(|(y, x)| y - (1.0 + x.ln()).ln()).collect();
    let (la, lb, lssr) = line_fit(&lt, &shifted);
    if lssr < ssr {
        Ok(DecayFit {
            exponent: -lb,
            amplitude: la.exp(),
            log_factor: true,
            r_squared: r_squared(&shifted, lssr),
            power_ssr: ssr,
            log_ssr: Some(lssr),
        })
    } else {
        Ok(DecayFit {
            log_ssr: Some(lssr),
            ..power
        })
    }
}

/// `n` log-spaced times on `[t0, t1]`.
pub fn log_spaced(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    let (a, b) = (t0.ln(), t1.ln());
    (0..n)
        .map(|k| {
            if k == 0 {
                t0
            } else if k + 1 == n {
                t1
            } else {
                (a + (b - a) * k as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}
