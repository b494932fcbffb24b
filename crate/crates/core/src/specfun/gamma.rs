use crate::error::{fmt_c, Error, Result};
use crate::scalar::{cx, lit, Real, C};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpositive_integer<T: Real>(z: C<T>) -> bool {
    z.im == T::zero() && z.re <= T::zero() && z.re == z.re.round()
}

/// Gamma function of a complex argument (Lanczos with reflection).
pub fn complex_gamma<T: Real>(z: C<T>) -> Result<C<T>> {
    if is_nonpositive_integer(z) {
        return Err(Error::Pole {
            op: "complex_gamma",
            at: fmt_c(z),
        });
    }
    Ok(gamma_unchecked(z))
}

/// Reciprocal gamma; entire, so poles map to zero.
pub fn recip_gamma<T: Real>(z: C<T>) -> C<T> {
    if is_nonpositive_integer(z) {
        C::new(T::zero(), T::zero())
    } else {
        gamma_unchecked(z).inv()
    }
}

fn gamma_unchecked<T: Real>(z: C<T>) -> C<T> {
    let one = C::new(T::one(), T::zero());
    let pi = T::PI();
    if z.re < lit(0.5) {
        let s = (z * pi).sin();
        return cx(pi, T::zero()) / (s * gamma_unchecked(one - z));
    }
    let zm = z - one;
    let mut x = C::new(lit::<T>(LANCZOS[0]), T::zero());
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += cx(lit::<T>(c), T::zero()) / (zm + T::from_usize(i).unwrap());
    }
    let t = zm + lit::<T>(LANCZOS_G + 0.5);
    let sqrt_2pi = (lit::<T>(2.0) * pi).sqrt();
    // t^(zm+1/2) e^{-t} through one logarithm to stay accurate for large |Im z|
    ((zm + lit::<T>(0.5)) * t.ln() - t).exp() * x * sqrt_2pi
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Stirling series after shifting Re z beyond 20; independent of the Lanczos fit.
    fn stirling_oracle(z: C<f64>) -> C<f64> {
        let mut shift = C::new(1.0, 0.0);
        let mut w = z;
        while w.re < 20.0 {
            shift *= w;
            w += 1.0;
        }
        let b = [
            1.0 / 12.0,
            -1.0 / 360.0,
            1.0 / 1260.0,
            -1.0 / 1680.0,
            1.0 / 1188.0,
            -691.0 / 360360.0,
            1.0 / 156.0,
        ];
        let mut corr = C::new(0.0, 0.0);
        let w2 = w * w;
        let mut p = w;
        for c in b {
            corr += c / p;
            p *= w2;
        }
        let lg = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * std::f64::consts::PI).ln() + corr;
        lg.exp() / shift
    }

    fn rel(a: C<f64>, b: C<f64>) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn classical_values() {
        assert!((complex_gamma(C::new(1.0f64, 0.0)).unwrap().re - 1.0).abs() < 1e-15);
        let h = complex_gamma(C::new(0.5f64, 0.0)).unwrap();
        assert!((h.re - std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert!((complex_gamma(C::new(6.0f64, 0.0)).unwrap().re - 120.0).abs() < 1e-11);
        assert!(matches!(
            complex_gamma(C::new(-3.0f64, 0.0)),
            Err(Error::Pole { .. })
        ));
        assert_eq!(recip_gamma(C::new(0.0f64, 0.0)), C::new(0.0, 0.0));
    }

    #[test]
    fn frozen_high_precision_values() {
        let cases = [
            ((0.5, 0.3), (1.2609927863965769332, -0.73175950569183359549)),
            ((-3.7, 2.0), (-0.00081556406040911064994, 0.00088281749034754493357)),
            ((4.2, -9.0), (-0.0067312859174094052514, 0.00096578415953433949031)),
        ];
        for ((zr, zi), (vr, vi)) in cases {
            let g = complex_gamma(C::new(zr, zi)).unwrap();
            assert!(rel(g, C::new(vr, vi)) < 1e-13, "{zr}+{zi}i: {g}");
        }
    }

    proptest! {
        #[test]
        fn matches_stirling_on_strip(x in -10.0f64..10.0, y in -10.0f64..10.0) {
            prop_assume!((x - x.round()).abs() > 1e-3 || y.abs() > 1e-3);
            let z = C::new(x, y);
            let g = complex_gamma(z).unwrap();
            prop_assert!(rel(g, stirling_oracle(z)) < 1e-12, "z={z} g={g}");
        }

        #[test]
        fn recurrence_and_conjugation(x in -6.0f64..6.0, y in 0.01f64..8.0) {
            let z = C::new(x, y);
            let g = complex_gamma(z).unwrap();
            let g1 = complex_gamma(z + 1.0).unwrap();
            prop_assert!(rel(g1, z * g) < 1e-13);
            prop_assert!(rel(complex_gamma(z.conj()).unwrap(), g.conj()) < 1e-14);
        }
    }
}
