//! Filon–Legendre moments: exact integrals of a Legendre interpolant
//! against `e^{iκx}` on `[-1, 1]`.

use super::gauss::{legendre_values, GaussLegendre};
use crate::scalar::{cx, lit, Real, C};

/// Spherical Bessel functions `j_0..j_{n-1}` at real `x`.
pub fn spherical_bessel_j<T: Real>(n: usize, x: T) -> Vec<T> {
    let mut out = vec![T::zero(); n];
    if n == 0 {
        return out;
    }
    let ax = x.abs();
    if ax < lit(1.0) {
        // j_k(x) = x^k/(2k+1)!! Σ_l (-x²/2)^l / (l! (2k+3)(2k+5)...(2k+2l+1))
        let x2 = ax * ax * lit(0.5);
        let mut lead = T::one();
        for (k, o) in out.iter_mut().enumerate() {
            let kf = T::from_usize(k).unwrap();
            if k > 0 {
                lead = lead * ax / (kf + kf + T::one());
            }
            let mut term = T::one();
            let mut sum = T::one();
            for l in 1..60usize {
                let lf = T::from_usize(l).unwrap();
                term = -term * x2 / (lf * (kf + kf + lf + lf + T::one()));
                sum += term;
                if term.abs() < T::epsilon() * sum.abs() {
                    break;
                }
            }
            *o = lead * sum;
        }
    } else if ax >= T::from_usize(n).unwrap() {
        out[0] = ax.sin() / ax;
        if n > 1 {
            out[1] = ax.sin() / (ax * ax) - ax.cos() / ax;
        }
        for k in 2..n {
            let kf = T::from_usize(k - 1).unwrap();
            out[k] = (kf + kf + T::one()) / ax * out[k - 1] - out[k - 2];
        }
    } else {
        // Miller's backward recurrence normalized by j_0 (or j_1 near its zeros)
        let start = n + 20 + ax.to_usize().unwrap_or(0);
        let mut f_next = T::zero();
        let mut f = lit::<T>(1e-30);
        let mut vals = vec![T::zero(); start + 1];
        vals[start] = f;
        for k in (1..=start).rev() {
            let kf = T::from_usize(k).unwrap();
            let prev = (kf + kf + T::one()) / ax * f - f_next;
            f_next = f;
            f = prev;
            vals[k - 1] = f;
            if f.abs() > lit(1e250) {
                for v in vals.iter_mut().skip(k - 1) {
                    *v = *v * lit(1e-250);
                }
                f = f * lit(1e-250);
                f_next = f_next * lit(1e-250);
            }
        }
        let j0 = ax.sin() / ax;
        let j1 = ax.sin() / (ax * ax) - ax.cos() / ax;
        let scale = if j0.abs() > j1.abs() { j0 / vals[0] } else { j1 / vals[1] };
        for k in 0..n {
            out[k] = vals[k] * scale;
        }
    }
    if x < T::zero() {
        for (k, v) in out.iter_mut().enumerate() {
            if k % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

/// Precomputed Legendre projection for an `n`-point Gauss rule.
#[derive(Debug, Clone)]
pub struct FilonRule<T> {
    pub gauss: GaussLegendre<T>,
    /// `proj[k][j] = (2k+1)/2 w_j P_k(x_j)`: Legendre coefficients from samples.
    pub proj: Vec<Vec<T>>,
}

impl<T: Real> FilonRule<T> {
    pub fn new(n: usize) -> Self {
        let gauss = GaussLegendre::new(n);
        let mut proj = vec![vec![T::zero(); n]; n];
        for j in 0..n {
            let p = legendre_values(n, gauss.nodes[j]);
            for k in 0..n {
                let kf = T::from_usize(k).unwrap();
                proj[k][j] = (kf + kf + T::one()) * lit(0.5) * gauss.weights[j] * p[k];
            }
        }
        FilonRule { gauss, proj }
    }

    pub fn len(&self) -> usize {
        self.gauss.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gauss.is_empty()
    }

    /// Weights `μ_j` with `∫_{-1}^{1} e^{iκx} p(x) dx = Σ_j μ_j p(x_j)` for
    /// every polynomial `p` of degree `< n`.
    pub fn moment_weights(&self, kappa: T) -> Vec<C<T>> {
        let n = self.len();
        if kappa == T::zero() {
            return self.gauss.weights.iter().map(|&w| cx(w, T::zero())).collect();
        }
        let jk = spherical_bessel_j(n, kappa);
        // ∫ P_k e^{iκx} = 2 i^k j_k(κ)
        let mom: Vec<C<T>> = (0..n)
            .map(|k| {
                let v = lit::<T>(2.0) * jk[k];
                match k % 4 {
                    0 => cx(v, T::zero()),
                    1 => cx(T::zero(), v),
                    2 => cx(-v, T::zero()),
                    _ => cx(T::zero(), -v),
                }
            })
            .collect();
        (0..n)
            .map(|j| (0..n).fold(cx(T::zero(), T::zero()), |acc, k| acc + mom[k] * self.proj[k][j]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spherical_bessel_against_closed_forms() {
        for &x in &[1e-3f64, 0.3, 0.999, 1.0, 2.5, 7.0, 19.5, 40.0, 123.4, -3.3] {
            let j = spherical_bessel_j(24, x);
            let (s, c) = (x.sin(), x.cos());
            let j2 = (3.0 / (x * x) - 1.0) * s / x - 3.0 * c / (x * x);
            assert!((j[0] - s / x).abs() < 1e-15);
            assert!((j[2] - j2).abs() < 1e-13 * (1.0 + 1.0 / (x * x)).min(1e6), "x={x}: {} {}", j[2], j2);
            // cross-check against the upward recurrence where that is stable
            if x.abs() > 24.0 {
                continue;
            }
            let hi = spherical_bessel_j(24, 50.0 + x.abs());
            assert!(hi.iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn series_and_recurrence_agree() {
        let a = spherical_bessel_j::<f64>(20, 0.9999999);
        let b = spherical_bessel_j::<f64>(20, 1.0000001);
        for k in 0..20 {
            // j_k ~ x^k, so the two arguments differ by about k * 2e-7 relative
            assert!((a[k] - b[k]).abs() <= (k as f64 + 1.0) * 3e-7 * a[k].abs(), "k={k}");
        }
    }

    #[test]
    fn moments_exact_for_polynomials() {
        let f = FilonRule::<f64>::new(12);
        for &kappa in &[0.0, 0.5, 3.0, 40.0, 400.0] {
            let mu = f.moment_weights(kappa);
            // p(x) = x^3 - 2x + 1: closed-form ∫ p e^{iκx} via a dense reference rule
            let p = |x: f64| x.powi(3) - 2.0 * x + 1.0;
            let got: C<f64> = f.gauss.nodes.iter().zip(&mu).map(|(&x, &m)| m * p(x)).sum();
            let g = GaussLegendre::<f64>::new(400);
            let want: C<f64> = g
                .nodes
                .iter()
                .zip(&g.weights)
                .map(|(&x, &w)| C::new(0.0, kappa * x).exp() * p(x) * w)
                .sum();
            assert!((got - want).norm() < 1e-13, "κ={kappa}: {got} {want}");
        }
    }
}
