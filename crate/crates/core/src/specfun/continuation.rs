use super::bessel::{bessel_i01, bessel_k01};
use super::whittaker::{whittaker_m, Whittaker, WhittakerIndex};
use crate::error::{Error, Result};
use crate::scalar::{cx, lit, Real, C};

/// `W(-η+iε) - W(-η-iε)` with `W(·) = W_{0,γ}(2m·)`, assembled from values
/// at `2m(η ∓ iε)` in the right half-plane and the continuation factors of
/// `M_{0,±γ}` (or of `K0` when `γ = 0`).
pub fn continuation_jump<T: Real>(gamma: C<T>, eta: T, epsilon: T, m: u32) -> Result<C<T>> {
    if !(eta > T::zero()) || !(epsilon > T::zero() && epsilon < T::one()) {
        return Err(Error::Domain {
            op: "continuation_jump",
            msg: format!("need eta > 0 and 0 < epsilon < 1, got eta = {eta}, epsilon = {epsilon}"),
        });
    }
    let idx = WhittakerIndex::new(gamma)?;
    let two_m = lit::<T>(2.0) * T::from_u32(m).unwrap();
    // -η + iε = (η - iε) e^{iπ},  -η - iε = (η + iε) e^{-iπ}
    let zu = cx(eta, -epsilon) * two_m;
    let zl = cx(eta, epsilon) * two_m;
    let i = cx(T::zero(), T::one());
    if idx.is_degenerate {
        // W00(ζ e^{±iπ}) = ±i sqrt(ζ/π) (K0(ζ/2) ∓ iπ I0(ζ/2))
        let side = |z: C<T>, s: T| -> Result<C<T>> {
            let half = z * lit::<T>(0.5);
            let k0 = bessel_k01(half)?.0;
            let i0 = bessel_i01(half).0;
            Ok(i * s * (z / T::PI()).sqrt() * (k0 - i * s * T::PI() * i0))
        };
        return Ok(side(zu, T::one())? - side(zl, -T::one())?);
    }
    let w = Whittaker::new(gamma)?;
    let pi_g = gamma * T::PI();
    let side = |z: C<T>, s: T| -> Result<C<T>> {
        let mp = whittaker_m(gamma, 1, z)?;
        let mm = whittaker_m(gamma, -1, z)?;
        let fp = i * s * (i * pi_g * s).exp();
        let fm = i * s * (-i * pi_g * s).exp();
        Ok(w.coef_plus * fp * mp + w.coef_minus * fm * mm)
    };
    Ok(side(zu, T::one())? - side(zl, -T::one())?)
}

/// The `ε → 0` limit `2i cos(γπ) W(η)`.
pub fn jump_limit<T: Real>(gamma: C<T>, eta: T, m: u32) -> Result<C<T>> {
    let w = Whittaker::new(gamma)?;
    let z = cx(lit::<T>(2.0) * T::from_u32(m).unwrap() * eta, T::zero());
    Ok(cx(T::zero(), lit::<T>(2.0)) * (gamma * T::PI()).cos() * w.w(z)?)
}
