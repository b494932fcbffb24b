//! Whittaker functions `M_{0,±γ}` and `W_{0,γ}` with first and second derivatives.
//!
//! `W` is routed through three independent representations:
//! the connection formula in terms of `M_{0,±γ}` (or the logarithmic series
//! when `γ = 0`) for `|ζ| ≤ 4` and for the left half-plane, a Laplace integral
//! for `Re ζ > 0`, `4 < |ζ| ≤ 40`, and the large-argument expansion beyond.
//! Every route differentiates its own representation, so `W''` never comes
//! from the differential equation.

use super::gamma::{complex_gamma, recip_gamma};
use super::kummer::kummer_m_derivs;
use crate::error::{fmt_c, Error, Result};
use crate::scalar::{cx, euler_gamma, lit, Real, C};

pub const DEGENERACY_THRESHOLD: f64 = 1e-8;
pub const ASYMPTOTIC_RADIUS: f64 = 40.0;
pub const SERIES_RADIUS: f64 = 4.0;

/// Second index of `W_{0,γ}` together with its degeneracy flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhittakerIndex<T> {
    pub gamma: C<T>,
    pub is_degenerate: bool,
}

impl<T: Real> WhittakerIndex<T> {
    pub fn new(gamma: C<T>) -> Result<Self> {
        let r = gamma.norm();
        if r > T::zero() && r < lit(DEGENERACY_THRESHOLD) {
            return Err(Error::NearDegenerate {
                op: "whittaker_w",
                gamma: fmt_c(gamma),
            });
        }
        let two_g = gamma * lit::<T>(2.0);
        if r > T::zero() && two_g.im == T::zero() && two_g.re == two_g.re.round() {
            return Err(Error::DegenerateIndex {
                op: "whittaker_w",
                gamma: fmt_c(gamma),
            });
        }
        Ok(WhittakerIndex {
            gamma,
            is_degenerate: r == T::zero(),
        })
    }
}

/// Value, first and second derivative.
pub type Triple<T> = [C<T>; 3];

pub(crate) fn check_cut<T: Real>(op: &'static str, z: C<T>) -> Result<()> {
    if z.im == T::zero() && z.re <= T::zero() {
        return Err(Error::BranchCut { op, at: fmt_c(z) });
    }
    Ok(())
}

/// `M_{0,sγ}(ζ)` with derivatives; `s = ±1`.
pub fn whittaker_m_derivs<T: Real>(gamma: C<T>, sign: i32, z: C<T>) -> Result<Triple<T>> {
    check_cut("whittaker_m", z)?;
    let g = if sign >= 0 { gamma } else { -gamma };
    let b = g * lit::<T>(2.0) + T::one();
    if b.im == T::zero() && b.re <= T::zero() && b.re == b.re.round() {
        return Err(Error::DegenerateIndex {
            op: "whittaker_m",
            gamma: fmt_c(gamma),
        });
    }
    let a = g + lit::<T>(0.5);
    // M_{0,g}(ζ) = e^{cζ} ζ^a M(a, 2a, dζ), Kummer-transformed in the left half-plane
    let (c, d) = if z.re >= T::zero() {
        (lit::<T>(-0.5), T::one())
    } else {
        (lit::<T>(0.5), -T::one())
    };
    let s = kummer_m_derivs(a, b, z * d)?;
    let e = (z * c + a * z.ln()).exp();
    let zi = z.inv();
    let l = zi * a + c;
    let e1 = e * l;
    let e2 = e * (l * l - a * zi * zi);
    Ok([
        e * s[0],
        e1 * s[0] + e * s[1] * d,
        e2 * s[0] + e1 * s[1] * (d * lit::<T>(2.0)) + e * s[2],
    ])
}

pub fn whittaker_m<T: Real>(gamma: C<T>, sign: i32, z: C<T>) -> Result<C<T>> {
    whittaker_m_derivs(gamma, sign, z).map(|v| v[0])
}

/// Reusable evaluator of `W_{0,γ}` for one index.
#[derive(Debug, Clone)]
pub struct Whittaker<T> {
    pub index: WhittakerIndex<T>,
    /// `Γ(-2γ)/Γ(1/2-γ)`, multiplies `M_{0,γ}`.
    pub coef_plus: C<T>,
    /// `Γ(2γ)/Γ(1/2+γ)`, multiplies `M_{0,-γ}`.
    pub coef_minus: C<T>,
    rgamma: C<T>,
    laplace: Vec<(T, C<T>)>,
    asym: Vec<C<T>>,
}

impl<T: Real> Whittaker<T> {
    pub fn new(gamma: C<T>) -> Result<Self> {
        let index = WhittakerIndex::new(gamma)?;
        let half = lit::<T>(0.5);
        let (coef_plus, coef_minus) = if index.is_degenerate {
            (C::new(T::zero(), T::zero()), C::new(T::zero(), T::zero()))
        } else {
            let two = lit::<T>(2.0);
            (
                complex_gamma(-gamma * two)? * recip_gamma(-gamma + half),
                complex_gamma(gamma * two)? * recip_gamma(gamma + half),
            )
        };
        let rgamma = recip_gamma(gamma + half);
        Ok(Whittaker {
            index,
            coef_plus,
            coef_minus,
            rgamma,
            laplace: laplace_nodes(gamma),
            asym: asymptotic_coefficients(gamma),
        })
    }

    pub fn gamma(&self) -> C<T> {
        self.index.gamma
    }

    pub fn w(&self, z: C<T>) -> Result<C<T>> {
        self.derivs(z).map(|v| v[0])
    }

    /// `[W, W', W'']` at `ζ`.
    pub fn derivs(&self, z: C<T>) -> Result<Triple<T>> {
        check_cut("whittaker_w", z)?;
        let r = z.norm();
        if r > lit(ASYMPTOTIC_RADIUS) {
            Ok(self.asymptotic_derivs(z))
        } else if z.re > T::zero() && r > lit(SERIES_RADIUS) {
            Ok(self.laplace_derivs(z))
        } else {
            self.series_derivs(z)
        }
    }

    /// Connection formula through `M_{0,±γ}`; logarithmic series when `γ = 0`.
    pub fn series_derivs(&self, z: C<T>) -> Result<Triple<T>> {
        check_cut("whittaker_w", z)?;
        if self.index.is_degenerate {
            return Ok(w00_log_series(z));
        }
        let g = self.index.gamma;
        let mp = whittaker_m_derivs(g, 1, z)?;
        let mm = whittaker_m_derivs(g, -1, z)?;
        Ok([0, 1, 2].map(|k| self.coef_plus * mp[k] + self.coef_minus * mm[k]))
    }

    /// `W = e^{-ζ/2}/Γ(1/2+γ) ∫_0^∞ e^{-u} u^{γ-1/2} (1+u/ζ)^{γ-1/2} du`,
    /// valid for `Re ζ > 0`, by an exp-sinh trapezoid rule.
    pub fn laplace_derivs(&self, z: C<T>) -> Triple<T> {
        let p = self.index.gamma - lit::<T>(0.5);
        let pm1 = p - T::one();
        let zi = z.inv();
        let zero = C::new(T::zero(), T::zero());
        let (mut j0, mut j1, mut j2) = (zero, zero, zero);
        for &(u, base) in &self.laplace {
            let v = zi * u;
            let q = v + T::one();
            let qi = q.inv();
            let qp = (p * q.ln()).exp();
            let f = base * qp;
            j0 += f;
            let vq = v * qi;
            j1 += f * vq;
            j2 += f * vq * (pm1 * vq + lit::<T>(2.0));
        }
        // d/dζ (1+u/ζ)^p = -p (u/ζ)(1+u/ζ)^{p-1}/ζ
        let j1 = -p * j1 * zi;
        let j2 = p * j2 * zi * zi;
        let pre = (-z * lit::<T>(0.5)).exp() * self.rgamma;
        let q = lit::<T>(0.25);
        [
            pre * j0,
            pre * (j1 - j0 * lit::<T>(0.5)),
            pre * (j2 - j1 + j0 * q),
        ]
    }

    /// Large-argument expansion truncated at its smallest term.
    pub fn asymptotic_derivs(&self, z: C<T>) -> Triple<T> {
        let zi = z.inv();
        let zero = C::new(T::zero(), T::zero());
        let (mut s0, mut s1, mut s2) = (zero, zero, zero);
        let mut pw = C::new(T::one(), T::zero());
        let eps = T::epsilon() * lit(0.25);
        let mut last = T::infinity();
        for (k, &b) in self.asym.iter().enumerate() {
            let term = b * pw;
            let tn = term.norm();
            if k > 1 && tn > last {
                break;
            }
            let kf = T::from_usize(k).unwrap();
            s0 += term;
            s1 -= term * zi * kf;
            s2 += term * zi * zi * (kf * (kf + T::one()));
            if k > 0 && tn <= eps * s0.norm() {
                break;
            }
            last = tn;
            pw *= zi;
        }
        let e = (-z * lit::<T>(0.5)).exp();
        let q = lit::<T>(0.25);
        [e * s0, e * (s1 - s0 * lit::<T>(0.5)), e * (s2 - s1 + s0 * q)]
    }
}

fn laplace_nodes<T: Real>(gamma: C<T>) -> Vec<(T, C<T>)> {
    // u = exp(x - e^{-x}); the imaginary part of γ narrows the analyticity strip
    let strip = (T::one() / (lit::<T>(2.0) * gamma.im.abs().max(lit(1e-3)))).atan();
    let h = lit::<T>(1.0 / 16.0).min(strip / lit(6.0));
    let (x0, x1) = (lit::<T>(-5.0), lit::<T>(4.3));
    let n = ((x1 - x0) / h).ceil().to_usize().unwrap();
    let a = gamma + lit::<T>(0.5);
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let x = x0 + h * T::from_usize(i).unwrap();
        let emx = (-x).exp();
        let lnu = x - emx;
        let u = lnu.exp();
        // e^{-u} u^{γ+1/2} (1 + e^{-x}) h
        let w = (a * lnu - u).exp() * ((T::one() + emx) * h);
        if w.norm() > lit(1e-300) {
            out.push((u, w));
        }
    }
    out
}

fn asymptotic_coefficients<T: Real>(gamma: C<T>) -> Vec<C<T>> {
    let half = lit::<T>(0.5);
    let mut b = vec![C::new(T::one(), T::zero())];
    for k in 0..70usize {
        let kf = T::from_usize(k).unwrap();
        // (1/2-γ)_k (1/2+γ)_k / k! (-1)^k
        let r = (-gamma + half + kf) * (gamma + half + kf) / (kf + T::one());
        let next = -b[k] * r;
        b.push(next);
    }
    b
}

/// `W_{0,0}(ζ) = sqrt(ζ/π) K0(ζ/2)` with `K0` written as its logarithmic
/// series; the principal logarithm continues it into the left half-plane.
fn w00_log_series<T: Real>(z: C<T>) -> Triple<T> {
    let zero = C::new(T::zero(), T::zero());
    let zi = z.inv();
    let q = z * z * lit::<T>(1.0 / 16.0);
    let (mut p0, mut p1, mut p2) = (C::new(T::one(), T::zero()), zero, zero);
    let (mut q0, mut q1, mut q2) = (zero, zero, zero);
    let mut t = C::new(T::one(), T::zero());
    let mut h = T::zero();
    let eps = T::epsilon() * lit(0.25);
    for k in 1..300usize {
        let kf = T::from_usize(k).unwrap();
        t = t * q / (kf * kf);
        h += T::one() / kf;
        let two_k = kf * lit(2.0);
        let d1 = t * two_k * zi;
        let d2 = t * (two_k * (two_k - T::one())) * zi * zi;
        p0 += t;
        p1 += d1;
        p2 += d2;
        q0 += t * h;
        q1 += d1 * h;
        q2 += d2 * h;
        if kf * kf > q.norm() && t.norm() * (T::one() + h) * (T::one() + two_k * two_k) <= eps * p0.norm() {
            break;
        }
    }
    let l = (z * lit::<T>(0.25)).ln() + euler_gamma::<T>();
    let f0 = -l * p0 + q0;
    let f1 = -p0 * zi - l * p1 + q1;
    let f2 = p0 * zi * zi - p1 * zi * lit::<T>(2.0) - l * p2 + q2;
    let s = (z / T::PI()).sqrt();
    [
        s * f0,
        s * (f0 * zi * lit::<T>(0.5) + f1),
        s * (-f0 * zi * zi * lit::<T>(0.25) + f1 * zi + f2),
    ]
}

pub fn whittaker_w<T: Real>(gamma: C<T>, z: C<T>) -> Result<C<T>> {
    Whittaker::new(gamma)?.w(z)
}

pub fn whittaker_w_prime<T: Real>(gamma: C<T>, z: C<T>) -> Result<C<T>> {
    Whittaker::new(gamma)?.derivs(z).map(|v| v[1])
}

pub fn whittaker_w_derivs<T: Real>(gamma: C<T>, z: C<T>) -> Result<Triple<T>> {
    Whittaker::new(gamma)?.derivs(z)
}

/// `W'' + (-1/4 + (1/4-γ²)/ζ²) W` from independently computed `W` and `W''`.
pub fn ode_residual<T: Real>(gamma: C<T>, d: &Triple<T>, z: C<T>) -> C<T> {
    let coef = (cx(lit::<T>(0.25), T::zero()) - gamma * gamma) / (z * z) - lit::<T>(0.25);
    d[2] + coef * d[0]
}
