use super::whittaker::Whittaker;
use super::gamma::{complex_gamma, recip_gamma};
use crate::scalar::{euler_gamma, lit, Real, C};

/// One term `coef · ζ^power · (log ζ)^{0|1}` of the small-argument behavior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLogTerm<T> {
    pub coef: C<T>,
    pub power: C<T>,
    pub log: bool,
}

impl<T: Real> PowerLogTerm<T> {
    pub fn eval(&self, z: T) -> C<T> {
        let lz = z.ln();
        let v = self.coef * (self.power * lz).exp();
        if self.log {
            v * lz
        } else {
            v
        }
    }

    /// `∫_0^x coef ζ^{power+k} (log ζ)^j dζ` for `k = shift ∈ {-1, 0}`.
    pub fn integral(&self, x: T, shift: i32) -> C<T> {
        let p = self.power + T::from_i32(shift).unwrap() + T::one();
        let lx = x.ln();
        let xp = (p * lx).exp();
        let v = if self.log {
            xp * (p.inv() * lx - (p * p).inv())
        } else {
            xp / p
        };
        self.coef * v
    }
}

/// Leading behavior of `W_{0,γ}` at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallArgExpansion<T> {
    pub exponent: C<T>,
    pub has_log: bool,
    /// Sup over `0 < ζ ≤ 1` of `|W|` divided by the envelope
    /// (`|ζ^{exponent}|`, times `1 + |log ζ|` when logarithmic).
    pub envelope_bound: T,
    /// `W(ζ) = Σ terms + O(ζ^{5/2 - Re γ} log ζ)`.
    pub leading: Vec<PowerLogTerm<T>>,
}

pub fn small_arg_expansion<T: Real>(gamma: C<T>) -> SmallArgExpansion<T> {
    let half = lit::<T>(0.5);
    let has_log = gamma.norm() == T::zero();
    let exponent = C::new(half, T::zero()) - gamma;
    let leading = if has_log {
        let s = T::PI().sqrt().recip();
        vec![
            PowerLogTerm {
                coef: C::new(s * (lit::<T>(4.0).ln() - euler_gamma::<T>()), T::zero()),
                power: C::new(half, T::zero()),
                log: false,
            },
            PowerLogTerm {
                coef: C::new(-s, T::zero()),
                power: C::new(half, T::zero()),
                log: true,
            },
        ]
    } else {
        let two = lit::<T>(2.0);
        let a = complex_gamma(-gamma * two).unwrap_or_default() * recip_gamma(-gamma + half);
        let b = complex_gamma(gamma * two).unwrap_or_default() * recip_gamma(gamma + half);
        vec![
            PowerLogTerm {
                coef: b,
                power: exponent,
                log: false,
            },
            PowerLogTerm {
                coef: a,
                power: gamma + half,
                log: false,
            },
        ]
    };
    let evaluator = Whittaker::new(gamma).ok();
    let mut envelope_bound = T::zero();
    for k in 0..=70 {
        let z = lit::<T>(10.0).powf(-lit::<T>(k as f64) / lit(5.0));
        let w = match &evaluator {
            Some(e) => e.w(C::new(z, T::zero())).unwrap_or_default(),
            None => leading.iter().map(|t| t.eval(z)).sum(),
        };
        let lz = z.ln();
        let mut env = (exponent * lz).exp().norm();
        if has_log {
            env = env * (T::one() + lz.abs());
        }
        envelope_bound = envelope_bound.max(w.norm() / env);
    }
    SmallArgExpansion {
        exponent,
        has_log,
        envelope_bound,
        leading,
    }
}
