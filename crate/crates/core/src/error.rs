use thiserror::Error;

/// Every failure mode of the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: domain error: {msg}")]
    Domain { op: &'static str, msg: String },
    #[error("{op}: pole at {at}")]
    Pole { op: &'static str, at: String },
    #[error("{op}: invalid parameter: {msg}")]
    Parameter { op: &'static str, msg: String },
    #[error("{op}: no convergence after {terms} terms at {at}")]
    NonConvergence {
        op: &'static str,
        terms: usize,
        at: String,
    },
    #[error("{op}: argument {at} lies on the branch cut (-inf, 0]")]
    BranchCut { op: &'static str, at: String },
    #[error("{op}: index {gamma} is below the degeneracy threshold but nonzero")]
    NearDegenerate { op: &'static str, gamma: String },
    #[error("{op}: index {gamma} makes 1 +/- 2 gamma a nonpositive integer")]
    DegenerateIndex { op: &'static str, gamma: String },
    #[error("{op}: tolerance not met (estimate {estimate:e}, target {target:e})")]
    Tolerance {
        op: &'static str,
        estimate: f64,
        target: f64,
    },
    #[error("{op}: amplification |cos(gamma pi)| = {value:e} exceeds the overflow guard")]
    Overflow { op: &'static str, value: f64 },
    #[error("domain too small: {msg}")]
    DomainTooSmall { msg: String },
    #[error("resolution: {msg} (largest usable t_end on this grid is {max_t_end})")]
    Resolution { msg: String, max_t_end: f64 },
    #[error("step h = {h:e} too large for epsilon = {epsilon:e} (need h <= epsilon/10)")]
    StepTooLarge { h: f64, epsilon: f64 },
    #[error("insufficient span: {msg}")]
    InsufficientSpan { msg: String },
    #[error("singular tridiagonal system at row {row}")]
    SingularMatrix { row: usize },
    #[error("{failures} point(s) failed; first at y = {first_y}: {first}")]
    PointFailures {
        failures: usize,
        first_y: f64,
        first: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn fmt_c<T: crate::Real>(z: num_complex::Complex<T>) -> String {
    format!("{}{:+}i", z.re, z.im)
}
