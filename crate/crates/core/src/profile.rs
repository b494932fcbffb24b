//! Closed-form initial profiles with analytic derivatives up to fourth order.

use crate::scalar::{lit, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileKind {
    /// `a * exp(-s^2)`
    Gaussian,
    /// `a * exp(-1/(1 - s^2))` on `|s| < 1`, zero outside
    Bump,
    /// `a * sech(s)^2`
    Sech2,
}

impl ProfileKind {
    pub fn name(self) -> &'static str {
        match self {
            ProfileKind::Gaussian => "gaussian",
            ProfileKind::Bump => "bump",
            ProfileKind::Sech2 => "sech2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" => Some(ProfileKind::Gaussian),
            "bump" => Some(ProfileKind::Bump),
            "sech2" => Some(ProfileKind::Sech2),
            _ => None,
        }
    }
}

/// A scalar profile `y -> a * f((y - c)/w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Profile<T> {
    pub kind: ProfileKind,
    pub center: T,
    pub width: T,
    pub amplitude: T,
}

// tanh-polynomials of the successive derivatives of sech^2, lowest degree first
const SECH2_POLYS: [[f64; 7]; 5] = [
    [1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, -2.0, 0.0, 2.0, 0.0, 0.0, 0.0],
    [-2.0, 0.0, 8.0, 0.0, -6.0, 0.0, 0.0],
    [0.0, 16.0, 0.0, -40.0, 0.0, 24.0, 0.0],
    [16.0, 0.0, -136.0, 0.0, 240.0, 0.0, -120.0],
];

impl<T: Real> Profile<T> {
    pub fn new(kind: ProfileKind, center: T, width: T, amplitude: T) -> Self {
        Profile {
            kind,
            center,
            width,
            amplitude,
        }
    }

    pub fn gaussian(center: T, width: T, amplitude: T) -> Self {
        Self::new(ProfileKind::Gaussian, center, width, amplitude)
    }

    pub fn zero() -> Self {
        Self::new(ProfileKind::Gaussian, T::zero(), T::one(), T::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == T::zero()
    }

    pub fn scaled(&self, a: T) -> Self {
        Profile {
            amplitude: self.amplitude * a,
            ..*self
        }
    }

    pub fn value(&self, y: T) -> T {
        self.derivs(y)[0]
    }

    /// `[f, f', f'', f''', f'''']` at `y`.
    pub fn derivs(&self, y: T) -> [T; 5] {
        let z = T::zero();
        if self.is_zero() {
            return [z; 5];
        }
        let s = (y - self.center) / self.width;
        let mut d = match self.kind {
            ProfileKind::Gaussian => {
                let g = (-s * s).exp();
                let s2 = s * s;
                let h1 = lit::<T>(2.0) * s;
                let h2 = lit::<T>(4.0) * s2 - lit(2.0);
                let h3 = lit::<T>(8.0) * s2 * s - lit::<T>(12.0) * s;
                let h4 = lit::<T>(16.0) * s2 * s2 - lit::<T>(48.0) * s2 + lit(12.0);
                [g, -h1 * g, h2 * g, -h3 * g, h4 * g]
            }
            ProfileKind::Bump => {
                if s.abs() >= T::one() {
                    return [z; 5];
                }
                let one = T::one();
                let (u, v) = (one / (one - s), one / (one + s));
                let half = lit::<T>(0.5);
                // derivatives of phi(s) = -1/(1 - s^2) = -(u + v)/2
                let p1 = -half * (u * u - v * v);
                let p2 = -half * lit::<T>(2.0) * (u * u * u + v * v * v);
                let p3 = -half * lit::<T>(6.0) * (u.powi(4) - v.powi(4));
                let p4 = -half * lit::<T>(24.0) * (u.powi(5) + v.powi(5));
                let f = (-half * (u + v)).exp();
                let three = lit::<T>(3.0);
                [
                    f,
                    f * p1,
                    f * (p2 + p1 * p1),
                    f * (p3 + three * p1 * p2 + p1.powi(3)),
                    f * (p4
                        + lit::<T>(4.0) * p1 * p3
                        + three * p2 * p2
                        + lit::<T>(6.0) * p1 * p1 * p2
                        + p1.powi(4)),
                ]
            }
            ProfileKind::Sech2 => {
                let th = s.tanh();
                let mut out = [z; 5];
                for (k, poly) in SECH2_POLYS.iter().enumerate() {
                    let mut acc = z;
                    for &c in poly.iter().rev() {
                        acc = acc * th + lit(c);
                    }
                    out[k] = acc;
                }
                out
            }
        };
        let inv_w = T::one() / self.width;
        let mut scale = self.amplitude;
        for v in d.iter_mut() {
            *v = *v * scale;
            scale = scale * inv_w;
        }
        d
    }

    /// Distance from the center beyond which the profile and its first four
    /// derivatives are below roughly `1e-20` of the amplitude scale.
    pub fn negligible_beyond(&self) -> T {
        let r = match self.kind {
            ProfileKind::Gaussian => 7.5,
            ProfileKind::Bump => 1.0,
            ProfileKind::Sech2 => 30.0,
        };
        lit::<T>(r) * self.width
    }
}

/// Initial vorticity and density of a single x-mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialDataProfile<T> {
    pub omega0: Profile<T>,
    pub rho0: Profile<T>,
}

impl<T: Real> InitialDataProfile<T> {
    pub fn new(omega0: Profile<T>, rho0: Profile<T>) -> Self {
        InitialDataProfile { omega0, rho0 }
    }

    pub fn zero() -> Self {
        Self::new(Profile::zero(), Profile::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.omega0.is_zero() && self.rho0.is_zero()
    }

    pub fn scaled(&self, a: T) -> Self {
        Self::new(self.omega0.scaled(a), self.rho0.scaled(a))
    }

    /// Smallest interval outside of which both profiles are negligible.
    pub fn support(&self) -> Option<(T, T)> {
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for p in [&self.omega0, &self.rho0] {
            if !p.is_zero() {
                let r = p.negligible_beyond();
                lo = lo.min(p.center - r);
                hi = hi.max(p.center + r);
            }
        }
        (lo < hi).then_some((lo, hi))
    }
}
