//! Flat `key = value` run configuration.
//!
//! Values come from an optional file and are then overridden by `--set`
//! pairs. Every key has a default, and unknown keys are rejected so that a
//! typo cannot silently fall back to a default.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use boussinesq::damping::log_spaced;
use boussinesq::{derive_params, FlowParams, GridSpec, InitialDataProfile, Profile, ProfileKind, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// `(key, default)`. Quadrature defaults left empty are filled from `m`.
const KEYS: &[(&str, &str)] = &[
    ("beta", "0.4"),
    ("m", "1"),
    ("omega_kind", "gaussian"),
    ("omega_center", "0"),
    ("omega_width", "1"),
    ("omega_amplitude", "0"),
    ("rho_kind", "gaussian"),
    ("rho_center", "0"),
    ("rho_width", "1"),
    ("rho_amplitude", "1"),
    ("y_min", "-20"),
    ("y_max", "20"),
    ("n_points", "2049"),
    ("eta_max", ""),
    ("xi_max", ""),
    ("delta0", ""),
    ("panels_per_decade", ""),
    ("jacobi_order", ""),
    ("filon_order", ""),
    ("panel_width", ""),
    ("endpoint_fraction", ""),
    ("rel_tol", ""),
    ("times", ""),
    ("t_min", "10"),
    ("t_max", "1000"),
    ("t_count", "12"),
    ("output", "."),
    ("format", "csv"),
    ("tolerance", "1e-3"),
    ("dt", ""),
    ("zeta_min", "0.05"),
    ("zeta_max", "30"),
    ("zeta_count", "200"),
    ("ode_tol", "1e-8"),
    ("k0_tol", "1e-10"),
    ("exponent_tol", "0.05"),
    ("try_log", "true"),
    ("epsilons", "0.2,0.1,0.05,0.025"),
    ("lap_tol", "2e-2"),
    ("jump_etas", "0.1,0.7,3"),
    ("jump_ratio", "5"),
    ("tg_epsilon", "0.1"),
    ("tg_y0", "0"),
    ("tg_y", "0.5"),
    ("tg_h", "0.01"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: FlowParams<f64>,
    pub data: InitialDataProfile<f64>,
    pub grid: GridSpec<f64>,
    pub quad: QuadratureSpec<f64>,
    pub times: Vec<f64>,
    pub output: PathBuf,
    pub format: Format,
    pub tolerance: f64,
    pub dt: f64,
    pub zeta: (f64, f64, usize),
    pub ode_tol: f64,
    pub k0_tol: f64,
    pub exponent_tol: f64,
    pub try_log: bool,
    pub epsilons: Vec<f64>,
    pub lap_tol: f64,
    pub jump_etas: Vec<f64>,
    pub jump_ratio: f64,
    pub tg: (f64, f64, f64, f64),
    /// Every key with its resolved value, for provenance headers.
    pub resolved: BTreeMap<String, String>,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        out.push(split_pair(line).map_err(|e| format!("line {}: {e}", n + 1))?);
    }
    Ok(out)
}

pub fn split_pair(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got '{s}'"))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(format!("empty key in '{s}'"));
    }
    Ok((k.to_string(), v.trim().to_string()))
}

fn num(raw: &BTreeMap<String, String>, key: &str) -> Result<f64, String> {
    let v = &raw[key];
    let x: f64 = v.parse().map_err(|_| format!("{key}: '{v}' is not a number"))?;
    if !x.is_finite() {
        return Err(format!("{key}: must be finite"));
    }
    Ok(x)
}

fn int(raw: &BTreeMap<String, String>, key: &str) -> Result<usize, String> {
    let v = &raw[key];
    v.parse().map_err(|_| format!("{key}: '{v}' is not a nonnegative integer"))
}

fn list(raw: &BTreeMap<String, String>, key: &str) -> Result<Vec<f64>, String> {
    raw[key]
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("{key}: '{s}' is not a finite number"))
        })
        .collect()
}

fn positive(key: &str, x: f64) -> Result<f64, String> {
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("{key}: must be positive, got {x}"))
    }
}

fn profile(raw: &BTreeMap<String, String>, prefix: &str) -> Result<Profile<f64>, String> {
    let kind_key = format!("{prefix}_kind");
    let kind = ProfileKind::parse(&raw[&kind_key])
        .ok_or_else(|| format!("{kind_key}: unknown profile '{}' (gaussian, bump, sech2)", raw[&kind_key]))?;
    let width = positive(&format!("{prefix}_width"), num(raw, &format!("{prefix}_width"))?)?;
    Ok(Profile::new(
        kind,
        num(raw, &format!("{prefix}_center"))?,
        width,
        num(raw, &format!("{prefix}_amplitude"))?,
    ))
}

impl RunConfig {
    /// Reads the optional file, applies overrides in order and validates.
    pub fn load(file: Option<&Path>, overrides: &[String]) -> Result<Self, String> {
        let mut pairs = match file {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
                parse_pairs(&text).map_err(|e| format!("{}: {e}", p.display()))?
            }
            None => Vec::new(),
        };
        for o in overrides {
            pairs.push(split_pair(o)?);
        }
        Self::from_pairs(&pairs)
    }

    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self, String> {
        let mut raw: BTreeMap<String, String> = KEYS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        for (k, v) in pairs {
            match raw.get_mut(k) {
                Some(slot) => *slot = v.clone(),
                None => return Err(format!("unknown key '{k}'")),
            }
        }

        let m = int(&raw, "m")?;
        let m = u32::try_from(m).map_err(|_| "m: too large".to_string())?;
        let params = derive_params(num(&raw, "beta")?, m).map_err(|e| e.to_string())?;
        let data = InitialDataProfile::new(profile(&raw, "omega")?, profile(&raw, "rho")?);
        let grid =
            GridSpec::new(num(&raw, "y_min")?, num(&raw, "y_max")?, int(&raw, "n_points")?).map_err(|e| e.to_string())?;

        let d = QuadratureSpec::<f64>::default_for(m);
        let fill = |raw: &mut BTreeMap<String, String>, key: &str, v: String| {
            if raw[key].is_empty() {
                raw.insert(key.to_string(), v);
            }
        };
        fill(&mut raw, "eta_max", d.eta_max.to_string());
        fill(&mut raw, "xi_max", d.xi_max.to_string());
        fill(&mut raw, "delta0", d.delta0.to_string());
        fill(&mut raw, "panels_per_decade", d.panels_per_decade.to_string());
        fill(&mut raw, "jacobi_order", d.jacobi_order.to_string());
        fill(&mut raw, "filon_order", d.filon_order.to_string());
        fill(&mut raw, "panel_width", d.panel_width.to_string());
        fill(&mut raw, "endpoint_fraction", d.endpoint_fraction.to_string());
        fill(&mut raw, "rel_tol", d.rel_tol.to_string());
        let quad = QuadratureSpec {
            eta_max: num(&raw, "eta_max")?,
            xi_max: num(&raw, "xi_max")?,
            delta0: num(&raw, "delta0")?,
            panels_per_decade: int(&raw, "panels_per_decade")?,
            jacobi_order: int(&raw, "jacobi_order")?,
            filon_order: int(&raw, "filon_order")?,
            panel_width: num(&raw, "panel_width")?,
            endpoint_fraction: num(&raw, "endpoint_fraction")?,
            rel_tol: num(&raw, "rel_tol")?,
        };
        quad.validate(m).map_err(|e| e.to_string())?;

        let times = if raw["times"].is_empty() {
            let (t0, t1) = (num(&raw, "t_min")?, num(&raw, "t_max")?);
            let n = int(&raw, "t_count")?;
            if !(t0 > 0.0 && t1 > t0 && n >= 2) {
                return Err("t_min, t_max, t_count: need 0 < t_min < t_max and t_count >= 2".into());
            }
            log_spaced(t0, t1, n)
        } else {
            list(&raw, "times")?
        };
        if times.is_empty() || times[0] < 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err("times: must be nonnegative and strictly ascending".into());
        }
        raw.insert(
            "times".into(),
            times.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","),
        );

        let format = match raw["format"].as_str() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return Err(format!("format: expected csv or json, got '{other}'")),
        };
        let dt = if raw["dt"].is_empty() {
            let v = 0.1 / (f64::from(m) * grid.max_abs_y());
            raw.insert("dt".into(), v.to_string());
            v
        } else {
            positive("dt", num(&raw, "dt")?)?
        };

        let (zmin, zmax, zn) = (num(&raw, "zeta_min")?, num(&raw, "zeta_max")?, int(&raw, "zeta_count")?);
        if !(zmin > 0.0 && zmax > zmin && zn >= 2) {
            return Err("zeta_min, zeta_max, zeta_count: need 0 < zeta_min < zeta_max and zeta_count >= 2".into());
        }

        let try_log = match raw["try_log"].as_str() {
            "true" => true,
            "false" => false,
            other => return Err(format!("try_log: expected true or false, got '{other}'")),
        };

        let epsilons = list(&raw, "epsilons")?;
        if epsilons.len() < 2 || epsilons.iter().any(|&e| !(e > 0.0 && e < 1.0)) || epsilons.windows(2).any(|w| !(w[1] < w[0])) {
            return Err("epsilons: need at least two values in (0, 1), strictly decreasing".into());
        }
        let jump_etas = list(&raw, "jump_etas")?;
        if jump_etas.is_empty() || jump_etas.iter().any(|&e| !(e > 0.0)) {
            return Err("jump_etas: need positive values".into());
        }
        let tg_eps = num(&raw, "tg_epsilon")?;
        let tg_h = positive("tg_h", num(&raw, "tg_h")?)?;
        if !(tg_eps > 0.0 && tg_eps < 1.0) || tg_h > tg_eps / 10.0 {
            return Err(format!("tg_epsilon, tg_h: need 0 < tg_epsilon < 1 and tg_h <= tg_epsilon/10, got {tg_eps}, {tg_h}"));
        }

        Ok(RunConfig {
            params,
            data,
            grid,
            quad,
            times,
            output: PathBuf::from(&raw["output"]),
            format,
            tolerance: positive("tolerance", num(&raw, "tolerance")?)?,
            dt,
            zeta: (zmin, zmax, zn),
            ode_tol: positive("ode_tol", num(&raw, "ode_tol")?)?,
            k0_tol: positive("k0_tol", num(&raw, "k0_tol")?)?,
            exponent_tol: positive("exponent_tol", num(&raw, "exponent_tol")?)?,
            try_log,
            epsilons,
            lap_tol: positive("lap_tol", num(&raw, "lap_tol")?)?,
            jump_etas,
            jump_ratio: positive("jump_ratio", num(&raw, "jump_ratio")?)?,
            tg: (tg_eps, num(&raw, "tg_y0")?, num(&raw, "tg_y")?, tg_h),
            resolved: raw,
        })
    }
}
