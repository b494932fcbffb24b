//! Independent oracles shared by unit tests.

use crate::scalar::{cx, C};

/// Tanh-sinh nodes and weights on `[a, b]`, robust to integrable endpoint
/// singularities.
pub fn tanh_sinh_nodes(a: f64, b: f64, h: f64) -> Vec<(f64, f64)> {
    let r = 0.5 * (b - a);
    let hp = std::f64::consts::FRAC_PI_2;
    let n = (6.5 / h).ceil() as i64;
    let mut out = Vec::new();
    for k in -n..=n {
        let t = k as f64 * h;
        let u = hp * t.sinh();
        let ch = u.cosh();
        let w = hp * t.cosh() / (ch * ch);
        // distance to the nearer endpoint, computed without cancellation
        let d = r / (u.abs().exp() * ch);
        if d <= 0.0 || w < 1e-300 {
            continue;
        }
        let x = if u < 0.0 { a + d } else { b - d };
        if x <= a || x >= b {
            continue;
        }
        out.push((x, w * r * h));
    }
    out
}

pub fn tanh_sinh_split_nodes(breaks: &[f64], h: f64) -> Vec<(f64, f64)> {
    breaks.windows(2).flat_map(|w| tanh_sinh_nodes(w[0], w[1], h)).collect()
}

pub fn tanh_sinh_split(f: impl Fn(f64) -> C<f64>, breaks: &[f64], h: f64) -> C<f64> {
    tanh_sinh_split_nodes(breaks, h)
        .into_iter()
        .fold(cx(0.0, 0.0), |s, (x, w)| s + f(x) * w)
}

#[test]
fn tanh_sinh_sqrt_singularity() {
    let v = tanh_sinh_split(|x| cx(x.powf(-0.8), 0.0), &[0.0, 1.0], 1.0 / 64.0);
    assert!((v.re - 5.0).abs() < 1e-10, "{v}");
}
