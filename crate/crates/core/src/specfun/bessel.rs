use crate::error::{fmt_c, Error, Result};
use crate::scalar::{euler_gamma, lit, Real, C};

const SERIES_LIMIT: f64 = 2.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;

/// Modified Bessel function `K0` for `Re z > 0`.
pub fn bessel_k0<T: Real>(z: C<T>) -> Result<C<T>> {
    bessel_k01(z).map(|(k0, _)| k0)
}

/// `(K0(z), K1(z))` for `Re z > 0`: ascending series near the origin,
/// Steed's continued fraction in the middle, Hankel expansion far out.
pub fn bessel_k01<T: Real>(z: C<T>) -> Result<(C<T>, C<T>)> {
    if !(z.re > T::zero()) {
        return Err(Error::Domain {
            op: "bessel_k0",
            msg: format!("Re z must be positive, got {}", fmt_c(z)),
        });
    }
    let r = z.norm();
    Ok(if r <= lit(SERIES_LIMIT) {
        k01_series(z)
    } else if r <= lit(ASYMPTOTIC_LIMIT) {
        k01_steed(z)?
    } else {
        k01_asymptotic(z)
    })
}

/// `(I0(z), I1(z))` by their ascending series (entire).
pub fn bessel_i01<T: Real>(z: C<T>) -> (C<T>, C<T>) {
    let q = z * z * lit::<T>(0.25);
    let one = C::new(T::one(), T::zero());
    let (mut i0, mut i1) = (one, one);
    let (mut t0, mut t1) = (one, one);
    let eps = T::epsilon() * lit(0.5);
    for k in 1..400usize {
        let kf = T::from_usize(k).unwrap();
        t0 = t0 * q / (kf * kf);
        t1 = t1 * q / (kf * (kf + T::one()));
        i0 += t0;
        i1 += t1;
        if kf * kf > q.norm() && t0.norm() <= eps * i0.norm() && t1.norm() <= eps * i1.norm() {
            break;
        }
    }
    (i0, i1 * z * lit::<T>(0.5))
}

pub(crate) fn k01_series<T: Real>(z: C<T>) -> (C<T>, C<T>) {
    let q = z * z * lit::<T>(0.25);
    let one = C::new(T::one(), T::zero());
    let zero = C::new(T::zero(), T::zero());
    let lnh = (z * lit::<T>(0.5)).ln();
    let eg = euler_gamma::<T>();
    let eps = T::epsilon() * lit(0.5);
    // K0 = -(ln(z/2)+gamma) I0 + sum H_k q^k/(k!)^2
    // K1 = 1/z + ln(z/2) I1 - (z/4) sum (psi(k+1)+psi(k+2)) q^k/(k!(k+1)!)
    let (mut i0, mut i1s) = (one, one);
    let (mut s0, mut s1) = (zero, one * (lit::<T>(1.0) - lit::<T>(2.0) * eg));
    let (mut t0, mut t1) = (one, one);
    let mut h = T::zero();
    for k in 1..200usize {
        let kf = T::from_usize(k).unwrap();
        t0 = t0 * q / (kf * kf);
        t1 = t1 * q / (kf * (kf + T::one()));
        h += T::one() / kf;
        i0 += t0;
        i1s += t1;
        s0 += t0 * h;
        let psi_sum = lit::<T>(2.0) * (h - eg) + T::one() / (kf + T::one());
        s1 += t1 * psi_sum;
        if t0.norm() * (T::one() + h) <= eps * s0.norm().max(i0.norm()) && t1.norm() * (T::one() + h) <= eps * i1s.norm() {
            break;
        }
    }
    let i1 = i1s * z * lit::<T>(0.5);
    let k0 = -(lnh + eg) * i0 + s0;
    let k1 = z.inv() + lnh * i1 - z * lit::<T>(0.25) * s1;
    (k0, k1)
}

fn k01_steed<T: Real>(z: C<T>) -> Result<(C<T>, C<T>)> {
    let one = C::new(T::one(), T::zero());
    let a1 = lit::<T>(0.25);
    let mut b = (z + T::one()) * lit::<T>(2.0);
    let mut d = b.inv();
    let mut delh = d;
    let mut h = d;
    let mut q1 = C::new(T::zero(), T::zero());
    let mut q2 = one;
    let mut q = C::new(a1, T::zero());
    let mut c = a1;
    let mut a = -a1;
    let mut s = one + q * delh;
    let eps = T::epsilon() * lit(0.5);
    for i in 1..2000usize {
        let fi = T::from_usize(i).unwrap();
        a -= lit::<T>(2.0) * fi;
        c = -a * c / (fi + T::one());
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += qnew * c;
        b += lit::<T>(2.0);
        d = (b + d * a).inv();
        delh = (b * d - one) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if dels.norm() < eps * s.norm() {
            let k0 = ((z * lit::<T>(2.0)).inv() * T::PI()).sqrt() * (-z).exp() / s;
            let k1 = k0 * (z + lit::<T>(0.5) - h * a1) / z;
            return Ok((k0, k1));
        }
    }
    Err(Error::NonConvergence {
        op: "bessel_k0",
        terms: 2000,
        at: fmt_c(z),
    })
}

fn k01_asymptotic<T: Real>(z: C<T>) -> (C<T>, C<T>) {
    let one = C::new(T::one(), T::zero());
    let eps = T::epsilon() * lit(0.25);
    let zi = z.inv() * lit::<T>(0.125);
    let (mut s0, mut s1) = (one, one);
    let (mut t0, mut t1) = (one, one);
    let (mut last0, mut last1) = (T::infinity(), T::infinity());
    for k in 1..60usize {
        let kf = T::from_usize(k).unwrap();
        let odd = lit::<T>(2.0) * kf - T::one();
        let n0 = t0 * (-(odd * odd)) * zi / kf;
        let n1 = t1 * (lit::<T>(4.0) - odd * odd) * zi / kf;
        if n0.norm() >= last0 || n1.norm() >= last1 {
            break;
        }
        t0 = n0;
        t1 = n1;
        last0 = t0.norm();
        last1 = t1.norm();
        s0 += t0;
        s1 += t1;
        if last0 < eps * s0.norm() && last1 < eps * s1.norm() {
            break;
        }
    }
    let pre = ((z * lit::<T>(2.0)).inv() * T::PI()).sqrt() * (-z).exp();
    (pre * s0, pre * s1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    // K0(z) = int_0^inf exp(-z cosh u) du by a dense trapezoid rule (spectrally accurate).
    pub(crate) fn k0_integral_oracle(z: C<f64>) -> C<f64> {
        let h: f64 = 1.0 / 256.0;
        let mut s = 0.5 * (-z).exp();
        let mut u = h;
        loop {
            let term = (-z * u.cosh()).exp();
            s += term;
            if term.norm() < 1e-300 || u > 40.0 {
                break;
            }
            u += h;
        }
        s * h
    }

    #[test]
    fn frozen_values() {
        let k = bessel_k0(c(0.5, 0.0)).unwrap();
        assert!((k.re - 0.92441907122766586178).abs() < 1e-15);
        let k = bessel_k0(c(3.0, 1.0)).unwrap();
        let want = c(0.013830675060516718502, -0.030989778540318227295);
        assert!((k - want).norm() / want.norm() < 1e-13, "{k}");
    }

    #[test]
    fn integral_oracle_all_regimes() {
        for &z in &[
            c(0.5, 0.0),
            c(1.5, 1.0),
            c(2.1, -0.3),
            c(7.0, 3.0),
            c(19.0, -4.0),
            c(24.0, 0.0),
            c(30.0, 5.0),
        ] {
            let k = bessel_k0(z).unwrap();
            let o = k0_integral_oracle(z);
            assert!((k - o).norm() / o.norm() < 1e-12, "{z}: {k} vs {o}");
        }
    }

    #[test]
    fn regimes_agree_on_boundaries() {
        for &r in &[SERIES_LIMIT, ASYMPTOTIC_LIMIT] {
            for &th in &[0.0f64, 0.6, -1.2] {
                let z = C::from_polar(r, th);
                let inside = if r == SERIES_LIMIT { k01_series(z) } else { k01_steed(z).unwrap() };
                let outside = if r == SERIES_LIMIT { k01_steed(z).unwrap() } else { k01_asymptotic(z) };
                assert!((inside.0 - outside.0).norm() / inside.0.norm() < 1e-12);
                assert!((inside.1 - outside.1).norm() / inside.1.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn k1_is_minus_k0_prime() {
        for &z in &[c(0.7, 0.2), c(4.0, -1.0), c(30.0, 2.0)] {
            let h = 1e-5;
            let fd = (bessel_k0(z + h).unwrap() - bessel_k0(z - h).unwrap()) / (2.0 * h);
            let k1 = bessel_k01(z).unwrap().1;
            assert!((fd + k1).norm() / k1.norm() < 1e-8);
        }
    }

    #[test]
    fn limiting_behaviour() {
        let x = 1e-4;
        let k = bessel_k0(c(x, 0.0)).unwrap().re;
        assert!((k + (x / 2.0f64).ln() + 0.5772156649015329).abs() < 1e-6);
        // leading normalization carries the -1/(8x) correction, 1.2% at x = 10
        let k = bessel_k0(c(10.0, 0.0)).unwrap().re;
        let lead = k * 10f64.exp() * (20.0 / std::f64::consts::PI).sqrt();
        assert!((lead - 1.0).abs() < 0.015);
        assert!((lead / (1.0 - 1.0 / 80.0) - 1.0).abs() < 1e-3);
        assert!(bessel_k0(c(0.0, 1.0)).is_err());
        assert!(bessel_k0(c(-1.0, 0.0)).is_err());
    }

    #[test]
    fn i01_wronskian() {
        for &z in &[c(0.3, 0.1), c(1.9, 0.5), c(5.0, -2.0), c(12.0, 0.0)] {
            let (i0, i1) = bessel_i01(z);
            let (k0, k1) = bessel_k01(z).unwrap();
            let w = i0 * k1 + i1 * k0;
            assert!((w * z - 1.0).norm() < 1e-12, "{z}: {w}");
        }
    }
}
