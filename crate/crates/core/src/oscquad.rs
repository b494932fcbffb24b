//! Singular oscillatory quadrature for the double integrals of the explicit
//! solution.
//!
//! Outer integrals `∫_0^∞ e^{±imηt} w(η) I(η, y) dη` are split at
//! `δ = min(1/(4m max(t,1)), δ0)`: graded Gauss panels on `(0, δ)` absorb the
//! endpoint power singularity of `w`, and Filon–Legendre panels on
//! `[δ, η_max]` integrate the phase exactly against a polynomial interpolant
//! of the amplitude. Below the innermost breakpoint the leading
//! small-argument terms of `W` are integrated in closed form.
//!
//! The inner integrals depend on `(η, y)` only through `s = y ∓ η`, so the
//! engine tabulates them once per kernel by piecewise Chebyshev interpolation.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::KernelContext;
use crate::params::QuadratureSpec;
use crate::quad::{FilonRule, GaussLegendre, PiecewiseChebyshev};
use crate::scalar::{cx, lit, to_f64, Real, C};
use crate::specfun::{small_arg_expansion, SmallArgExpansion, Whittaker};

pub const OVERFLOW_GUARD: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OuterWeight {
    W,
    WOverEta,
    WPrime,
}

impl OuterWeight {
    fn slot(self) -> usize {
        match self {
            OuterWeight::W => 0,
            OuterWeight::WOverEta => 1,
            OuterWeight::WPrime => 2,
        }
    }
}

/// Which reflection of the kernel the inner integral uses:
/// `G(η, ξ, y)` for `Plus`, `G(-η, -ξ, y)` for `Minus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn from_sign(s: i32) -> Self {
        if s >= 0 {
            Branch::Plus
        } else {
            Branch::Minus
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPanel<T> {
    pub a: T,
    pub b: T,
    /// Leading power of the weight at the origin.
    pub exponent: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatoryPanel<T> {
    pub a: T,
    pub b: T,
    pub frequency: T,
}

/// Partition of `(0, η_max]` for one time. The first singular panel starts
/// at zero and is the closed-form endpoint piece.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelPlan<T> {
    pub split_delta: T,
    pub singular_panels: Vec<SingularPanel<T>>,
    pub oscillatory_panels: Vec<OscillatoryPanel<T>>,
}

fn geometric<T: Real>(a: T, b: T, per_decade: usize) -> Vec<T> {
    if !(b > a) {
        return vec![a];
    }
    let decades = (b / a).log10();
    let n = (decades * T::from_usize(per_decade).unwrap()).ceil().max(T::one());
    let n = n.to_usize().unwrap();
    let r = (b / a).powf(T::one() / T::from_usize(n).unwrap());
    let mut v: Vec<T> = (0..n).map(|i| a * r.powi(i as i32)).collect();
    v.push(b);
    v
}

fn uniform<T: Real>(a: T, b: T, width: T) -> Vec<T> {
    let n = ((b - a) / width).ceil().max(T::one()).to_usize().unwrap();
    let h = (b - a) / T::from_usize(n).unwrap();
    let mut v: Vec<T> = (0..n).map(|i| a + h * T::from_usize(i).unwrap()).collect();
    v.push(b);
    v
}

impl<T: Real> PanelPlan<T> {
    pub fn new(m: u32, gamma_re: T, spec: &QuadratureSpec<T>, t: T, weight: OuterWeight) -> Result<Self> {
        spec.validate(m)?;
        if !(t >= T::zero()) {
            return Err(Error::Domain {
                op: "PanelPlan",
                msg: format!("t must be nonnegative, got {t}"),
            });
        }
        let mr = T::from_u32(m).unwrap();
        let delta = (T::one() / (lit::<T>(4.0) * mr * t.max(T::one()))).min(spec.delta0);
        let eta_min = spec.delta0 * spec.endpoint_fraction;
        let half = lit::<T>(0.5);
        let exponent = match weight {
            OuterWeight::W => half - gamma_re,
            _ => -half - gamma_re,
        };
        let mut singular_panels = vec![SingularPanel {
            a: T::zero(),
            b: eta_min,
            exponent,
        }];
        let g = geometric(eta_min, delta, spec.panels_per_decade);
        singular_panels.extend(g.windows(2).map(|w| SingularPanel {
            a: w[0],
            b: w[1],
            exponent,
        }));
        let frequency = mr * t;
        let mut breaks = geometric(delta, spec.delta0, spec.panels_per_decade);
        if spec.delta0 > delta {
            breaks.pop();
        }
        breaks.extend(uniform(spec.delta0, spec.eta_max, spec.panel_width));
        let oscillatory_panels = breaks
            .windows(2)
            .map(|w| OscillatoryPanel {
                a: w[0],
                b: w[1],
                frequency,
            })
            .collect();
        Ok(PanelPlan {
            split_delta: delta,
            singular_panels,
            oscillatory_panels,
        })
    }

    pub fn panel_count(&self) -> usize {
        self.singular_panels.len() + self.oscillatory_panels.len()
    }
}

/// Value with a quadrature error estimate and the integral of `|integrand|`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimate<T> {
    pub value: C<T>,
    pub error: T,
    pub l1: T,
}

#[derive(Debug, Clone, Copy)]
struct PanelSpan<T> {
    start: usize,
    filon: bool,
    half: T,
}

/// Nodes, phase-weighted quadrature weights and outer-weight samples for one time.
#[derive(Debug, Clone)]
pub struct OuterRule<T> {
    pub t: T,
    pub plan: PanelPlan<T>,
    pub nodes: Vec<T>,
    /// Weights for the `e^{+imηt}` phase; the `-` phase uses their conjugates.
    weights: Vec<C<T>>,
    abs_weights: Vec<T>,
    /// `W(η)`, `W(η)/η`, `W'(η)` at the nodes.
    values: [Vec<C<T>>; 3],
    /// `∫_0^{η_min}` of each weight.
    tails: [C<T>; 3],
    spans: Vec<PanelSpan<T>>,
    /// Two highest Legendre projection rows for (graded, Filon) panels.
    rows: [(Vec<T>, Vec<T>); 2],
    orders: [usize; 2],
}

impl<T: Real> OuterRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn span_count(&self) -> usize {
        self.spans.len()
    }

    pub fn span_range(&self, i: usize) -> std::ops::Range<usize> {
        let s = &self.spans[i];
        s.start..s.start + self.orders[s.filon as usize]
    }

    /// Projection rows onto the two highest Legendre modes and the panel half-width.
    pub fn span_tail(&self, i: usize) -> (&[T], &[T], T) {
        let s = &self.spans[i];
        let r = &self.rows[s.filon as usize];
        (&r.0, &r.1, s.half)
    }

    /// Weight for the `e^{+imηt}` phase at node `j`; conjugate it for the `-` phase.
    #[inline]
    pub fn phase_weight(&self, j: usize) -> C<T> {
        self.weights[j]
    }

    /// Non-oscillatory Gauss weight at node `j`.
    #[inline]
    pub fn abs_weight(&self, j: usize) -> T {
        self.abs_weights[j]
    }

    /// `[W, W/η, W']` at node `j`.
    #[inline]
    pub fn weight_values(&self, j: usize) -> [C<T>; 3] {
        [self.values[0][j], self.values[1][j], self.values[2][j]]
    }

    /// Integrals of `[W, W/η, W']` over `(0, η_min)`.
    pub fn tails(&self) -> [C<T>; 3] {
        self.tails
    }
}

/// Gauss rule with the two highest Legendre projection rows, for error estimates.
#[derive(Debug, Clone)]
struct Rule<T> {
    gauss: GaussLegendre<T>,
    filon: FilonRule<T>,
}

impl<T: Real> Rule<T> {
    fn new(n: usize) -> Self {
        let filon = FilonRule::new(n);
        Rule {
            gauss: filon.gauss.clone(),
            filon,
        }
    }

    fn n(&self) -> usize {
        self.gauss.len()
    }

    fn tail_rows(&self) -> (Vec<T>, Vec<T>) {
        let n = self.n();
        (self.filon.proj[n - 1].clone(), self.filon.proj[n - 2].clone())
    }
}

/// Node set for the inner `ξ`-integrals.
#[derive(Debug, Clone)]
pub struct InnerRule<T> {
    pub nodes: Vec<T>,
    /// Quadrature weight times `W(ξ)`.
    pub weights: Vec<C<T>>,
    /// `∫_0^{ξ_min} W(ξ) dξ` from the leading terms.
    pub tail: C<T>,
}

impl<T: Real> InnerRule<T> {
    pub fn new(whit: &Whittaker<T>, exp: &SmallArgExpansion<T>, m: u32, spec: &QuadratureSpec<T>) -> Result<Self> {
        let two_m = lit::<T>(2.0) * T::from_u32(m).unwrap();
        let xi_min = spec.delta0 * spec.endpoint_fraction;
        let mut breaks = geometric(xi_min, spec.delta0, spec.panels_per_decade);
        breaks.pop();
        let n_sing = breaks.len();
        breaks.extend(uniform(spec.delta0, spec.xi_max, spec.panel_width));
        let gj = GaussLegendre::new(spec.jacobi_order);
        let gf = GaussLegendre::new(spec.filon_order);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (i, w) in breaks.windows(2).enumerate() {
            let g = if i < n_sing { &gj } else { &gf };
            for (x, wt) in g.mapped(w[0], w[1]) {
                nodes.push(x);
                weights.push(whit.w(cx(two_m * x, T::zero()))? * wt);
            }
        }
        let tail = exp
            .leading
            .iter()
            .map(|t| t.integral(two_m * xi_min, 0))
            .fold(cx(T::zero(), T::zero()), |a, b| a + b)
            / two_m;
        Ok(InnerRule {
            nodes,
            weights,
            tail,
        })
    }
}

/// Quadrature engine for one kernel and one set of quadrature parameters.
#[derive(Debug, Clone)]
pub struct OscEngine<T> {
    pub ctx: KernelContext<T>,
    pub spec: QuadratureSpec<T>,
    pub whittaker: Whittaker<T>,
    pub expansion: SmallArgExpansion<T>,
    pub inner: InnerRule<T>,
    /// `-cos(γπ)/(2mπ)`.
    pub prefactor: C<T>,
    /// Interval of `z` outside of which the data are negligible.
    support: Option<(T, T)>,
    jacobi: Rule<T>,
    filon: Rule<T>,
    tables: Option<Tables<T>>,
}

#[derive(Debug, Clone)]
struct Tables<T> {
    plus: [PiecewiseChebyshev<T>; 3],
    minus: [PiecewiseChebyshev<T>; 3],
    max_tail: T,
}

impl<T: Real> OscEngine<T> {
    /// Engine evaluating inner integrals directly at every outer node.
    pub fn direct(ctx: KernelContext<T>, spec: QuadratureSpec<T>) -> Result<Self> {
        spec.validate(ctx.params.m)?;
        let gamma = ctx.params.gamma;
        let cos = (gamma * T::PI()).cos();
        if cos.norm() > lit(OVERFLOW_GUARD) {
            return Err(Error::Overflow {
                op: "outer_oscillatory",
                value: to_f64(cos.norm()),
            });
        }
        let whittaker = Whittaker::new(gamma)?;
        let expansion = small_arg_expansion(gamma);
        let inner = InnerRule::new(&whittaker, &expansion, ctx.params.m, &spec)?;
        let mr = ctx.params.m_real();
        let prefactor = -cos / (lit::<T>(2.0) * mr * T::PI());
        Ok(OscEngine {
            ctx,
            spec,
            whittaker,
            expansion,
            inner,
            prefactor,
            support: ctx.data.support(),
            jacobi: Rule::new(spec.jacobi_order),
            filon: Rule::new(spec.filon_order),
            tables: None,
        })
    }

    /// Engine with tabulated inner integrals.
    pub fn tabulated(ctx: KernelContext<T>, spec: QuadratureSpec<T>) -> Result<Self> {
        let mut e = Self::direct(ctx, spec)?;
        e.tables = e.build_tables();
        Ok(e)
    }

    pub fn is_tabulated(&self) -> bool {
        self.tables.is_some()
    }

    /// Largest trailing Chebyshev coefficient over all tables, relative to the table scale.
    pub fn table_tail(&self) -> T {
        self.tables.as_ref().map_or(T::zero(), |t| t.max_tail)
    }

    /// Range of `s` on which the inner integral of a branch can be nonzero.
    fn s_range(&self, branch: Branch) -> Option<(T, T)> {
        let (lo, hi) = self.support?;
        Some(match branch {
            Branch::Plus => (lo - self.spec.xi_max, hi),
            Branch::Minus => (lo, hi + self.spec.xi_max),
        })
    }

    /// `∫ W(ξ) ∂_z^k K dξ` for `k = 0, 1, 2` by the inner rule, plus the
    /// integral of the absolute `k = 0` integrand.
    pub fn inner_direct(&self, branch: Branch, s: T) -> ([C<T>; 3], T) {
        let zero = cx(T::zero(), T::zero());
        let Some((lo, hi)) = self.support else {
            return ([zero; 3], T::zero());
        };
        let nodes = &self.inner.nodes;
        // nodes with z = ±ξ + s inside the data support
        let (a, b) = match branch {
            Branch::Plus => (lo - s, hi - s),
            Branch::Minus => (s - hi, s - lo),
        };
        let i0 = nodes.partition_point(|&x| x < a);
        let i1 = nodes.partition_point(|&x| x <= b);
        let mut acc = [zero; 3];
        let mut l1 = T::zero();
        for i in i0..i1 {
            let xi = nodes[i];
            let k = match branch {
                Branch::Plus => self.ctx.kernel_z_all(xi, xi + s),
                Branch::Minus => self.ctx.kernel_z_all(-xi, s - xi),
            };
            let w = self.inner.weights[i];
            for j in 0..3 {
                acc[j] += w * k[j];
            }
            l1 += w.norm() * k[0].abs();
        }
        if s >= lo && s <= hi {
            let k = self.ctx.kernel_z_all(T::zero(), s);
            for j in 0..3 {
                acc[j] += self.inner.tail * k[j];
            }
        }
        (acc, l1)
    }

    fn build_tables(&self) -> Option<Tables<T>> {
        let build = |branch: Branch| -> Option<([PiecewiseChebyshev<T>; 3], T)> {
            let (lo, hi) = self.s_range(branch)?;
            let mut width = lit::<T>(0.5).min(self.ctx.data.omega0.width.min(self.ctx.data.rho0.width) * lit(0.5));
            let degree = 20;
            let pts = PiecewiseChebyshev::<T>::points(degree);
            for _ in 0..4 {
                let pieces = ((hi - lo) / width).ceil().to_usize().unwrap().max(1);
                let samples: Vec<Vec<[C<T>; 3]>> = (0..pieces)
                    .into_par_iter()
                    .map(|p| {
                        let a = lo + width * T::from_usize(p).unwrap();
                        pts.iter()
                            .map(|&x| self.inner_direct(branch, a + width * (x + T::one()) * lit(0.5)).0)
                            .collect()
                    })
                    .collect();
                let tabs = [0, 1, 2].map(|k| {
                    let v: Vec<Vec<C<T>>> = samples.iter().map(|p| p.iter().map(|s| s[k]).collect()).collect();
                    PiecewiseChebyshev::from_samples(lo, width, degree, &v)
                });
                let scale = |k: usize| {
                    samples
                        .iter()
                        .flat_map(|p| p.iter().map(move |s| s[k].norm()))
                        .fold(T::min_positive_value(), T::max)
                };
                let tail = (0..3).map(|k| tabs[k].tail_estimate() / scale(k)).fold(T::zero(), T::max);
                if tail < lit(1e-13) || width < lit(0.05) {
                    return Some((tabs, tail));
                }
                width = width * lit(0.5);
            }
            None
        };
        let (plus, tp) = build(Branch::Plus)?;
        let (minus, tm) = build(Branch::Minus)?;
        Some(Tables {
            plus,
            minus,
            max_tail: tp.max(tm),
        })
    }

    /// Inner integrals `[I_0, I_1, I_2](s)`, tabulated if available.
    #[inline]
    pub fn inner_values(&self, branch: Branch, s: T) -> [C<T>; 3] {
        let zero = cx(T::zero(), T::zero());
        match &self.tables {
            Some(tabs) => {
                let t = match branch {
                    Branch::Plus => &tabs.plus,
                    Branch::Minus => &tabs.minus,
                };
                if !t[0].contains(s) {
                    return [zero; 3];
                }
                [t[0].eval(s), t[1].eval(s), t[2].eval(s)]
            }
            None => self.inner_direct(branch, s).0,
        }
    }

    /// Outer nodes and weights for time `t`.
    pub fn outer_rule(&self, t: T) -> Result<OuterRule<T>> {
        let params = &self.ctx.params;
        let plan = PanelPlan::new(params.m, params.mu, &self.spec, t, OuterWeight::W)?;
        let mr = params.m_real();
        let two_m = lit::<T>(2.0) * mr;
        let omega = mr * t;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut abs_weights = Vec::new();
        let mut spans = Vec::new();
        for p in plan.singular_panels.iter().skip(1) {
            spans.push(PanelSpan {
                start: nodes.len(),
                filon: false,
                half: (p.b - p.a) * lit(0.5),
            });
            for (x, w) in self.jacobi.gauss.mapped(p.a, p.b) {
                nodes.push(x);
                weights.push(cx(T::zero(), omega * x).exp() * w);
                abs_weights.push(w);
            }
        }
        for p in &plan.oscillatory_panels {
            let half = (p.b - p.a) * lit(0.5);
            let c = (p.a + p.b) * lit(0.5);
            spans.push(PanelSpan {
                start: nodes.len(),
                filon: true,
                half,
            });
            let mu = self.filon.filon.moment_weights(omega * half);
            let ph = cx(T::zero(), omega * c).exp() * half;
            for (j, (x, w)) in self.filon.gauss.mapped(p.a, p.b).enumerate() {
                nodes.push(x);
                weights.push(ph * mu[j]);
                abs_weights.push(w);
            }
        }
        let mut values = [
            Vec::with_capacity(nodes.len()),
            Vec::with_capacity(nodes.len()),
            Vec::with_capacity(nodes.len()),
        ];
        for &x in &nodes {
            let d = self.whittaker.derivs(cx(two_m * x, T::zero()))?;
            values[0].push(d[0]);
            values[1].push(d[0] / x);
            values[2].push(d[1] * two_m);
        }
        let eta_min = plan.singular_panels[0].b;
        let zero = cx(T::zero(), T::zero());
        let lead = &self.expansion.leading;
        let x0 = two_m * eta_min;
        let tails = [
            lead.iter().map(|t| t.integral(x0, 0)).fold(zero, |a, b| a + b) / two_m,
            lead.iter().map(|t| t.integral(x0, -1)).fold(zero, |a, b| a + b),
            self.whittaker.w(cx(x0, T::zero()))?,
        ];
        Ok(OuterRule {
            t,
            plan,
            nodes,
            weights,
            abs_weights,
            values,
            tails,
            spans,
            rows: [self.jacobi.tail_rows(), self.filon.tail_rows()],
            orders: [self.jacobi.n(), self.filon.n()],
        })
    }

    /// `∫_0^∞ e^{phase·imηt} w(η) ∂_y^k I_branch(η, y) dη` (without prefactor).
    pub fn outer(&self, rule: &OuterRule<T>, y: T, weight: OuterWeight, phase: i32, branch: Branch, k: usize) -> Estimate<T> {
        let slot = weight.slot();
        let amp = |eta: T| {
            let s = match branch {
                Branch::Plus => y - eta,
                Branch::Minus => y + eta,
            };
            self.inner_values(branch, s)[k]
        };
        let mut value = rule.tails[slot] * amp(T::zero());
        let mut error = T::zero();
        let mut l1 = T::zero();
        let mut buf: Vec<C<T>> = Vec::with_capacity(64);
        let zero = cx(T::zero(), T::zero());
        for i in 0..rule.span_count() {
            buf.clear();
            for j in rule.span_range(i) {
                let g = rule.values[slot][j] * amp(rule.nodes[j]);
                buf.push(g);
                let w = if phase >= 0 { rule.weights[j] } else { rule.weights[j].conj() };
                value += w * g;
                l1 += rule.abs_weights[j] * g.norm();
            }
            let (r1, r2, half) = rule.span_tail(i);
            let c1 = buf.iter().zip(r1).fold(zero, |a, (g, &p)| a + *g * p);
            let c2 = buf.iter().zip(r2).fold(zero, |a, (g, &p)| a + *g * p);
            error += half * lit::<T>(2.0) * (c1.norm() + c2.norm());
        }
        Estimate { value, error, l1 }
    }
}

/// `∫_0^{ξ_max} W(ξ) G(±η, ±ξ, y) dξ` with a panel-doubling error check.
pub fn inner_integral<T: Real>(ctx: &KernelContext<T>, eta: T, y: T, sign: i32, spec: &QuadratureSpec<T>) -> Result<C<T>> {
    if !(eta >= T::zero()) {
        return Err(Error::Domain {
            op: "inner_integral",
            msg: format!("eta must be nonnegative, got {eta}"),
        });
    }
    let branch = Branch::from_sign(sign);
    let s = match branch {
        Branch::Plus => y - eta,
        Branch::Minus => y + eta,
    };
    let coarse = OscEngine::direct(*ctx, *spec)?;
    let fine = OscEngine::direct(*ctx, spec.refined())?;
    let (a, l1) = coarse.inner_direct(branch, s);
    let (b, _) = fine.inner_direct(branch, s);
    let est = (a[0] - b[0]).norm();
    if est > spec.rel_tol * l1.max(b[0].norm()) {
        return Err(Error::Tolerance {
            op: "inner_integral",
            estimate: to_f64(est / l1.max(T::min_positive_value())),
            target: to_f64(spec.rel_tol),
        });
    }
    Ok(b[0])
}

/// `∫_0^∞ e^{phase·imηt} w(η) ∫_0^∞ W(ξ) G(±η, ±ξ, y) dξ dη` (no prefactor).
pub fn outer_oscillatory<T: Real>(
    ctx: &KernelContext<T>,
    t: T,
    y: T,
    weight: OuterWeight,
    phase_sign: i32,
    arg_sign: i32,
    spec: &QuadratureSpec<T>,
) -> Result<C<T>> {
    let engine = OscEngine::direct(*ctx, *spec)?;
    let rule = engine.outer_rule(t)?;
    let e = engine.outer(&rule, y, weight, phase_sign, Branch::from_sign(arg_sign), 0);
    check_estimate("outer_oscillatory", &e, spec.rel_tol)?;
    Ok(e.value)
}

pub(crate) fn check_estimate<T: Real>(op: &'static str, e: &Estimate<T>, tol: T) -> Result<()> {
    if e.error > tol * e.l1.max(T::min_positive_value()) {
        return Err(Error::Tolerance {
            op,
            estimate: to_f64(e.error / e.l1),
            target: to_f64(tol),
        });
    }
    Ok(())
}
