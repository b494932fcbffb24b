//! Piecewise Chebyshev interpolation on a uniform partition.

use crate::scalar::{lit, Real, C};

#[derive(Debug, Clone)]
pub struct PiecewiseChebyshev<T> {
    lo: T,
    width: T,
    degree: usize,
    /// `coefs[p * (degree + 1) + k]`
    coefs: Vec<C<T>>,
    pieces: usize,
}

impl<T: Real> PiecewiseChebyshev<T> {
    /// Chebyshev points of the first kind on `[-1, 1]`.
    pub fn points(degree: usize) -> Vec<T> {
        let n = degree + 1;
        (0..n)
            .map(|j| {
                let th = T::PI() * (lit::<T>(j as f64) + lit(0.5)) / T::from_usize(n).unwrap();
                th.cos()
            })
            .collect()
    }

    /// Builds the table from samples `values[p][j]` at the mapped points of piece `p`.
    pub fn from_samples(lo: T, width: T, degree: usize, values: &[Vec<C<T>>]) -> Self {
        let n = degree + 1;
        let nf = T::from_usize(n).unwrap();
        let mut coefs = Vec::with_capacity(values.len() * n);
        for v in values {
            assert_eq!(v.len(), n);
            for k in 0..n {
                let mut acc = C::new(T::zero(), T::zero());
                for (j, &f) in v.iter().enumerate() {
                    let th = T::PI() * (lit::<T>(j as f64) + lit(0.5)) / nf;
                    acc += f * (T::from_usize(k).unwrap() * th).cos();
                }
                let scale = if k == 0 { T::one() / nf } else { lit::<T>(2.0) / nf };
                coefs.push(acc * scale);
            }
        }
        PiecewiseChebyshev {
            lo,
            width,
            degree,
            coefs,
            pieces: values.len(),
        }
    }

    pub fn domain(&self) -> (T, T) {
        (self.lo, self.lo + self.width * T::from_usize(self.pieces).unwrap())
    }

    pub fn contains(&self, s: T) -> bool {
        let (a, b) = self.domain();
        s >= a && s <= b
    }

    /// Largest magnitude of the two trailing coefficients over all pieces,
    /// a proxy for the interpolation error.
    pub fn tail_estimate(&self) -> T {
        let n = self.degree + 1;
        (0..self.pieces)
            .map(|p| self.coefs[p * n + n - 1].norm() + self.coefs[p * n + n - 2].norm())
            .fold(T::zero(), T::max)
    }

    #[inline]
    pub fn eval(&self, s: T) -> C<T> {
        let u = (s - self.lo) / self.width;
        let mut p = u.floor().to_isize().unwrap_or(0);
        p = p.clamp(0, self.pieces as isize - 1);
        let x = (u - T::from_isize(p).unwrap()) * lit(2.0) - T::one();
        let n = self.degree + 1;
        let c = &self.coefs[p as usize * n..(p as usize + 1) * n];
        // Clenshaw
        let x2 = x + x;
        let (mut b1, mut b2) = (C::new(T::zero(), T::zero()), C::new(T::zero(), T::zero()));
        for k in (1..n).rev() {
            let b0 = c[k] + b1 * x2 - b2;
            b2 = b1;
            b1 = b0;
        }
        c[0] + b1 * x - b2
    }
}
