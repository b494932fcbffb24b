use crate::error::{fmt_c, Error, Result};
use crate::scalar::{lit, Real, C};

pub const SERIES_RADIUS: f64 = 60.0;
pub const MAX_TERMS: usize = 500;

/// `M(a, b, z)` and its first two z-derivatives, each summed term by term.
pub fn kummer_m_derivs<T: Real>(a: C<T>, b: C<T>, z: C<T>) -> Result<[C<T>; 3]> {
    if b.im == T::zero() && b.re <= T::zero() && b.re == b.re.round() {
        return Err(Error::Parameter {
            op: "kummer_m",
            msg: format!("b = {} is a nonpositive integer", fmt_c(b)),
        });
    }
    if z.norm() > lit(SERIES_RADIUS) {
        return Err(Error::Domain {
            op: "kummer_m",
            msg: format!("|z| = {} exceeds the series radius {SERIES_RADIUS}", z.norm()),
        });
    }
    let zero = C::new(T::zero(), T::zero());
    let one = C::new(T::one(), T::zero());
    let eps = T::epsilon() * lit(0.5);
    let tiny = T::min_positive_value();
    let (an, bn, zn) = (a.norm(), b.norm(), z.norm());
    // t_s = (a)_s/(b)_s z^s/s!; the derivative sums use
    // d_{s+1} = t_s (a+s)/(b+s) and e_{s+2} = d_{s+1} (a+s+1)/(b+s+1)
    let mut t = one;
    let (mut s0, mut s1, mut s2) = (one, zero, zero);
    for s in 0..MAX_TERMS {
        let sf = T::from_usize(s).unwrap();
        let d = t * (a + sf) / (b + sf);
        let e = d * (a + sf + T::one()) / (b + sf + T::one());
        t = d * z / (sf + T::one());
        s0 += t;
        s1 += d;
        s2 += e;
        if sf > bn + lit(2.0) {
            // upper bound on the term ratio of all three sums from here on
            let ratio = zn * (an + sf + lit(3.0)) / ((sf + T::one()) * (sf - bn));
            if ratio < lit(0.5)
                && t.norm() <= eps * s0.norm().max(tiny)
                && d.norm() <= eps * s1.norm().max(tiny)
                && e.norm() <= eps * s2.norm().max(tiny)
            {
                return Ok([s0, s1, s2]);
            }
        }
        if t == zero && d == zero && e == zero {
            return Ok([s0, s1, s2]);
        }
    }
    Err(Error::NonConvergence {
        op: "kummer_m",
        terms: MAX_TERMS,
        at: fmt_c(z),
    })
}

/// Kummer's confluent hypergeometric function by its power series.
pub fn kummer_m<T: Real>(a: C<T>, b: C<T>, z: C<T>) -> Result<C<T>> {
    kummer_m_derivs(a, b, z).map(|v| v[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    #[test]
    fn trivial_values() {
        assert_eq!(kummer_m(c(0.3, 0.1), c(1.2, 0.0), c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        let e = kummer_m(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((e.re - std::f64::consts::E).abs() < 1e-15);
        let z = c(-3.0, 2.0);
        assert!((kummer_m(c(1.0, 0.0), c(1.0, 0.0), z).unwrap() - z.exp()).norm() < 1e-14);
        // M(a, a, z) = e^z also for large |z| within the radius
        let z = c(55.0, -10.0);
        let v = kummer_m(c(0.7, 0.2), c(0.7, 0.2), z).unwrap();
        assert!((v - z.exp()).norm() / z.exp().norm() < 1e-13);
    }

    #[test]
    fn frozen_high_precision_value() {
        let v = kummer_m(c(0.5, 0.3), c(1.0, 0.6), c(2.0, -1.0)).unwrap();
        let want = c(2.2047670944799559208, -2.1279116278861865096);
        assert!((v - want).norm() / want.norm() < 1e-14, "{v}");
    }

    #[test]
    fn derivatives_follow_contiguous_relation() {
        // M'(a,b,z) = (a/b) M(a+1,b+1,z)
        let (a, b, z) = (c(0.5, 0.3), c(1.0, 0.6), c(2.0, -1.0));
        let d = kummer_m_derivs(a, b, z).unwrap();
        let m1 = kummer_m(a + 1.0, b + 1.0, z).unwrap() * a / b;
        let m2 = kummer_m(a + 2.0, b + 2.0, z).unwrap() * a * (a + 1.0) / (b * (b + 1.0));
        assert!((d[1] - m1).norm() < 1e-14 * m1.norm());
        assert!((d[2] - m2).norm() < 1e-14 * m2.norm());
    }

    #[test]
    fn errors() {
        assert!(matches!(
            kummer_m(c(1.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)),
            Err(Error::Parameter { .. })
        ));
        assert!(matches!(
            kummer_m(c(1.0, 0.0), c(1.0, 0.0), c(61.0, 0.0)),
            Err(Error::Domain { .. })
        ));
    }
}
