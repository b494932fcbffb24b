use std::path::PathBuf;

use serde_json::{json, Value};
use thiserror::Error;

use boussinesq::damping::{decay_series_all, fit_decay, Quantity};
use boussinesq::explicit::{ExplicitSolver, SolutionSnapshot};
use boussinesq::lap::{lap_reconstruct_t0_range, tg_residual, SpectralPoint};
use boussinesq::reference::{integrate, EvolState};
use boussinesq::specfun::{bessel_k0, continuation_jump, jump_limit, ode_residual, Whittaker};
use boussinesq::{ComplexField, KernelContext, C};

use crate::config::RunConfig;
use crate::output::{report_json, write, write_table, Check, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Compute {
        context: String,
        source: boussinesq::Error,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 3,
            CliError::Compute { .. } | CliError::Io(_) => 2,
        }
    }
}

trait Context<T> {
    fn at(self, context: impl FnOnce() -> String) -> Result<T, CliError>;
}

impl<T> Context<T> for boussinesq::Result<T> {
    fn at(self, context: impl FnOnce() -> String) -> Result<T, CliError> {
        self.map_err(|source| CliError::Compute {
            context: context(),
            source,
        })
    }
}

pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn ctx(cfg: &RunConfig) -> KernelContext<f64> {
    KernelContext::new(cfg.params, cfg.data)
}

fn l2(a: &[C<f64>]) -> f64 {
    a.iter().map(|y| y.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖a - b‖ / max(‖a‖, ‖b‖, floor)`. The floor keeps fields that vanish
/// identically (ψ at t = 0 for density-only data) from producing 0/0.
fn rel_l2(a: &[C<f64>], b: &[C<f64>], floor: f64) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let den = l2(a).max(l2(b)).max(floor);
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// `1e-10` of the initial data size on the grid.
fn data_floor(cfg: &RunConfig) -> f64 {
    let ys = cfg.grid.nodes();
    let w: f64 = ys.iter().map(|&y| cfg.data.omega0.value(y).powi(2)).sum();
    let r: f64 = ys.iter().map(|&y| cfg.data.rho0.value(y).powi(2)).sum();
    1e-10 * (w.sqrt() + r.sqrt())
}

struct Fields {
    psi: ComplexField<f64>,
    rho: ComplexField<f64>,
    omega: ComplexField<f64>,
    ux: ComplexField<f64>,
    uy: ComplexField<f64>,
}

impl From<SolutionSnapshot<f64>> for Fields {
    fn from(s: SolutionSnapshot<f64>) -> Self {
        Fields {
            psi: s.psi,
            rho: s.rho,
            omega: s.omega,
            ux: s.ux,
            uy: s.uy,
        }
    }
}

const SNAPSHOT_COLUMNS: [&str; 11] = [
    "y", "psi_re", "psi_im", "rho_re", "rho_im", "omega_re", "omega_im", "ux_re", "ux_im", "uy_re", "uy_im",
];

fn snapshot_table(f: &Fields, meta: Vec<(String, String)>) -> Table {
    let ys = f.psi.grid.nodes();
    let rows = ys
        .iter()
        .enumerate()
        .map(|(j, &y)| {
            let mut r = vec![y];
            for v in [&f.psi, &f.rho, &f.omega, &f.ux, &f.uy] {
                r.push(v.values[j].re);
                r.push(v.values[j].im);
            }
            r
        })
        .collect();
    Table {
        columns: SNAPSHOT_COLUMNS.to_vec(),
        rows,
        meta,
    }
}

fn explicit_fields(cfg: &RunConfig) -> Result<Vec<(f64, Fields, Vec<(String, String)>)>, CliError> {
    let solver = ExplicitSolver::new(ctx(cfg), cfg.quad).at(|| "explicit solver setup".into())?;
    cfg.times
        .iter()
        .map(|&t| {
            let snap = solver.snapshot(t, &cfg.grid).at(|| format!("explicit snapshot at t = {t}"))?;
            let q = snap.quadrature_meta;
            let meta = vec![
                ("time".into(), t.to_string()),
                ("max_rel_error".into(), format!("{:e}", q.max_rel_error)),
                ("table_tail".into(), format!("{:e}", q.table_tail)),
                ("eta_max_truncation".into(), format!("{:e}", q.eta_max_truncation)),
                ("outer_nodes".into(), q.outer_nodes.to_string()),
            ];
            Ok((t, Fields::from(snap), meta))
        })
        .collect()
}

fn reference_fields(cfg: &RunConfig) -> Result<Vec<(f64, Fields, Vec<(String, String)>)>, CliError> {
    let m = cfg.params.m;
    let g = cfg.grid;
    let w0 = ComplexField::from_fn(g, 0.0, |y| C::new(cfg.data.omega0.value(y), 0.0));
    let r0 = ComplexField::from_fn(g, 0.0, |y| C::new(cfg.data.rho0.value(y), 0.0));
    let st = EvolState::new(w0, r0, 0.0).at(|| "reference initial state".into())?;
    let t_end = *cfg.times.last().unwrap();
    let mut states = vec![];
    if cfg.times[0] == 0.0 {
        states.push(st.clone());
    }
    if t_end > 0.0 {
        states.extend(integrate(&st, &cfg.params, t_end, cfg.dt, &cfg.times).at(|| format!("reference integration to t = {t_end}"))?);
    }
    let im = C::new(0.0, f64::from(m));
    Ok(states
        .into_iter()
        .map(|s| {
            let psi = s.psi(m);
            let uy = psi.map(|_, v| v * im);
            let meta = vec![("time".into(), s.time.to_string()), ("scheme".into(), "numerov".into())];
            let f = Fields {
                ux: s.ux(m),
                psi,
                rho: s.rho,
                omega: s.omega,
                uy,
            };
            (s.time, f, meta)
        })
        .collect())
}

fn write_snapshots(cfg: &RunConfig, command: &str, prefix: &str, all: Vec<(f64, Fields, Vec<(String, String)>)>) -> Result<Outcome, CliError> {
    let mut files = vec![];
    for (i, (_, f, meta)) in all.into_iter().enumerate() {
        files.push(write_table(command, cfg, &format!("{prefix}_{i:03}"), &snapshot_table(&f, meta), &[])?);
    }
    Ok(Outcome { files, checks: vec![] })
}

pub fn specfun_table(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let gamma = cfg.params.gamma;
    let w = Whittaker::new(gamma).at(|| format!("whittaker setup at gamma = {gamma}"))?;
    let (a, b, n) = cfg.zeta;
    let mut rows = vec![];
    let (mut worst_ode, mut worst_k0) = (0.0f64, None::<f64>);
    for zeta in boussinesq::damping::log_spaced(a, b, n) {
        let z = C::new(zeta, 0.0);
        let d = w.derivs(z).at(|| format!("whittaker_w_derivs at zeta = {zeta}"))?;
        let res = ode_residual(gamma, &d, z).norm() / d[0].norm().max(1e-30);
        let k0 = bessel_k0(z * 0.5).at(|| format!("bessel_k0 at z = {}", zeta / 2.0))?;
        worst_ode = worst_ode.max(res);
        if gamma == C::new(0.0, 0.0) && (0.1..=20.0).contains(&zeta) {
            let via_k0 = (z / std::f64::consts::PI).sqrt() * k0;
            let e = (d[0] - via_k0).norm() / via_k0.norm();
            worst_k0 = Some(worst_k0.unwrap_or(0.0).max(e));
        }
        rows.push(vec![zeta, 0.0, d[0].re, d[0].im, d[1].re, d[1].im, res, k0.re, k0.im]);
    }
    let mut checks = vec![Check::at_most("ode_residual", worst_ode, cfg.ode_tol)];
    if let Some(e) = worst_k0 {
        checks.push(Check::at_most("k0_connection", e, cfg.k0_tol));
    }
    let meta = checks.iter().map(|c| (format!("max_{}", c.name), format!("{:e}", c.value))).collect();
    let table = Table {
        columns: vec!["zeta_re", "zeta_im", "w_re", "w_im", "wp_re", "wp_im", "ode_residual", "k0_re", "k0_im"],
        rows,
        meta,
    };
    let file = write_table("specfun-table", cfg, "specfun", &table, &checks)?;
    Ok(Outcome { files: vec![file], checks })
}

pub fn solve_explicit(cfg: &RunConfig) -> Result<Outcome, CliError> {
    write_snapshots(cfg, "solve-explicit", "explicit", explicit_fields(cfg)?)
}

pub fn solve_reference(cfg: &RunConfig) -> Result<Outcome, CliError> {
    write_snapshots(cfg, "solve-reference", "reference", reference_fields(cfg)?)
}

pub fn compare(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let ex = explicit_fields(cfg)?;
    let re = reference_fields(cfg)?;
    let floor = data_floor(cfg);
    let mut results = vec![];
    let mut checks = vec![];
    for ((t, a, _), (_, b, _)) in ex.iter().zip(&re) {
        let diffs = [
            ("psi", rel_l2(&b.psi.values, &a.psi.values, floor)),
            ("rho", rel_l2(&b.rho.values, &a.rho.values, floor)),
            ("omega", rel_l2(&b.omega.values, &a.omega.values, floor)),
            ("ux", rel_l2(&b.ux.values, &a.ux.values, floor)),
        ];
        let mut row = serde_json::Map::new();
        row.insert("time".into(), json!(t));
        for (name, d) in diffs {
            row.insert(name.into(), json!(d));
            checks.push(Check::at_most(format!("{name}_t{t}"), d, cfg.tolerance));
        }
        results.push(Value::Object(row));
    }
    let body = report_json("compare", cfg, json!({ "relative_l2_difference": results }), &checks);
    let file = write(&cfg.output, "compare.json", &body)?;
    Ok(Outcome { files: vec![file], checks })
}

pub fn decay_study(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if cfg.times[0] < 1.0 {
        return Err(CliError::Config("decay-study: times must be at least 1".into()));
    }
    let solver = ExplicitSolver::new(ctx(cfg), cfg.quad).at(|| "explicit solver setup".into())?;
    let all = decay_series_all(&solver, &cfg.times, &cfg.grid).at(|| "decay series".into())?;
    let rows = (0..cfg.times.len())
        .map(|k| vec![cfg.times[k], all[0].norms[k], all[1].norms[k], all[2].norms[k]])
        .collect();
    let table = Table {
        columns: vec!["t", "ux", "uy", "rho"],
        rows,
        meta: vec![],
    };
    let series_file = write_table("decay-study", cfg, "decay_series", &table, &[])?;

    let mu = cfg.params.mu;
    let log_expected = cfg.params.gamma == C::new(0.0, 0.0);
    let mut fits = serde_json::Map::new();
    let mut checks = vec![];
    let mut exps = [0.0; 3];
    for (k, s) in all.iter().enumerate() {
        let q = s.quantity;
        let f = fit_decay(s, cfg.try_log).at(|| format!("fit_decay for {}", q.name()))?;
        let want = q.expected_exponent(mu);
        exps[k] = f.exponent;
        fits.insert(
            q.name().into(),
            json!({
                "exponent": f.exponent,
                "amplitude": f.amplitude,
                "log_factor": f.log_factor,
                "r_squared": f.r_squared,
                "power_ssr": f.power_ssr,
                "log_ssr": f.log_ssr,
                "expected_exponent": want,
            }),
        );
        checks.push(Check::at_most(format!("exponent_{}", q.name()), (f.exponent - want).abs(), cfg.exponent_tol));
        if let Some(lssr) = f.log_ssr {
            // log_ssr / power_ssr below 1 means the log model wins
            let ratio = lssr / f.power_ssr;
            let name = format!("log_model_{}", q.name());
            checks.push(if log_expected {
                Check::at_most(name, ratio, 1.0)
            } else {
                Check::at_least(name, ratio, 1.0)
            });
        }
    }
    let (ux, uy, rho) = (exps[0], exps[1], exps[2]);
    checks.push(Check::at_most("ordering_uy_minus_ux", (uy - ux - 1.0).abs(), 0.1));
    checks.push(Check::at_most("ordering_rho_vs_ux", (rho - ux).abs(), cfg.exponent_tol));
    let ux_series = &all[0];
    let compensated: Vec<f64> = ux_series
        .times
        .iter()
        .zip(&ux_series.norms)
        .map(|(t, n)| if log_expected { n * t.sqrt() / (1.0 + t.ln()) } else { n * t.powf(Quantity::Ux.expected_exponent(mu)) })
        .collect();
    let results = json!({
        "mu": mu,
        "fits": fits,
        "compensated_ux": compensated,
    });
    let fit_file = write(&cfg.output, "decay_fit.json", &report_json("decay-study", cfg, results, &checks))?;
    Ok(Outcome {
        files: vec![series_file, fit_file],
        checks,
    })
}

pub fn lap_check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.params;
    let c = ctx(cfg);
    let mut checks = vec![];

    let mut jumps = vec![];
    for &eta in &cfg.jump_etas {
        let lim = jump_limit(p.gamma, eta, p.m).at(|| format!("jump_limit at eta = {eta}"))?;
        let errs = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&e| {
                continuation_jump(p.gamma, eta, e, p.m)
                    .map(|j| (j - lim).norm())
                    .at(|| format!("continuation_jump at eta = {eta}, epsilon = {e}"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let worst = (errs[0] / errs[1]).min(errs[1] / errs[2]);
        checks.push(Check::at_least(format!("jump_eta{eta}"), worst, cfg.jump_ratio));
        jumps.push(json!({"eta": eta, "errors": errs}));
    }

    let (eps, y0, y, h) = cfg.tg;
    let mut tg = vec![];
    for sign in [1, -1] {
        let pt = SpectralPoint::new(y0, eps, sign).at(|| format!("spectral point y0 = {y0}, epsilon = {eps}"))?;
        let r = |h: f64| tg_residual(&c, pt, y, &cfg.quad, h).map(|v| v.norm()).at(|| format!("tg_residual at y = {y}, h = {h}"));
        let (a, b) = (r(h)?, r(h / 2.0)?);
        let order = (a / b).log2();
        let label = if sign > 0 { "plus" } else { "minus" };
        checks.push(Check::at_least(format!("tg_order_{label}"), order, 1.8));
        tg.push(json!({"sign": sign, "residual_h": a, "residual_h_half": b, "order": order}));
    }

    let g = cfg.grid;
    let rec = lap_reconstruct_t0_range(&c, &g, &cfg.epsilons, &cfg.quad, (g.y_min, g.y_max)).at(|| "lap_reconstruct_t0".into())?;
    let snap = ExplicitSolver::new(c, cfg.quad)
        .and_then(|s| s.snapshot(0.0, &g))
        .at(|| "explicit snapshot at t = 0".into())?;
    let rel = rel_l2(&rec.psi.values, &snap.psi.values, data_floor(cfg));
    checks.push(Check::at_most("lap_reconstruction", rel, cfg.lap_tol));

    let results = json!({
        "jump": jumps,
        "tg_residual": tg,
        "reconstruction": {
            "relative_l2": rel,
            "extrapolation_deltas": rec.extrapolation_deltas,
            "y0_range": [rec.y0_range.0, rec.y0_range.1],
        },
    });
    let file = write(&cfg.output, "lap_check.json", &report_json("lap-check", cfg, results, &checks))?;
    Ok(Outcome { files: vec![file], checks })
}
