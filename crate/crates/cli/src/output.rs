//! Byte-stable CSV and JSON writers.
//!
//! Numbers in CSV use `{:.16e}` (17 significant digits, '.' separator);
//! JSON numbers use serde_json's shortest round-trip form. Keys are sorted,
//! lines end in '\n'.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    /// Extra provenance written after the config.
    pub meta: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    /// Passes when `value <= tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            passed: value <= tolerance,
            value,
            tolerance,
        }
    }

    /// Passes when `value >= tolerance`.
    pub fn at_least(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            passed: value >= tolerance,
            value,
            tolerance,
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "status": if self.passed { "pass" } else { "fail" },
            "value": self.value,
            "tolerance": self.tolerance,
        })
    }
}

pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn config_json(command: &str, cfg: &RunConfig) -> Value {
    let mut m: Map<String, Value> = cfg.resolved.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
    m.insert("command".into(), Value::String(command.into()));
    Value::Object(m)
}

pub fn table_csv(command: &str, cfg: &RunConfig, t: &Table) -> String {
    let mut s = String::new();
    writeln!(s, "# command={command}").unwrap();
    for (k, v) in &cfg.resolved {
        writeln!(s, "# {k}={v}").unwrap();
    }
    for (k, v) in &t.meta {
        writeln!(s, "# {k}={v}").unwrap();
    }
    writeln!(s, "{}", t.columns.join(",")).unwrap();
    for row in &t.rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
        writeln!(s, "{}", cells.join(",")).unwrap();
    }
    s
}

pub fn table_json(command: &str, cfg: &RunConfig, t: &Table, checks: &[Check]) -> String {
    let meta: BTreeMap<&str, &str> = t.meta.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
    let doc = json!({
        "config": config_json(command, cfg),
        "results": {"meta": meta, "columns": t.columns, "rows": t.rows},
        "checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(),
    });
    serde_json::to_string_pretty(&doc).unwrap() + "\n"
}

pub fn report_json(command: &str, cfg: &RunConfig, results: Value, checks: &[Check]) -> String {
    let doc = json!({
        "config": config_json(command, cfg),
        "results": results,
        "checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(),
    });
    serde_json::to_string_pretty(&doc).unwrap() + "\n"
}

/// Writes a table in the configured format; `stem` has no extension.
pub fn write_table(command: &str, cfg: &RunConfig, stem: &str, t: &Table, checks: &[Check]) -> std::io::Result<PathBuf> {
    let (ext, body) = match cfg.format {
        Format::Csv => ("csv", table_csv(command, cfg, t)),
        Format::Json => ("json", table_json(command, cfg, t, checks)),
    };
    write(&cfg.output, &format!("{stem}.{ext}"), &body)
}

pub fn write(dir: &Path, name: &str, body: &str) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, body)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_num(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_num(-2.0), "-2.0000000000000000e0");
        for x in [std::f64::consts::PI, 1e-300, -7.25e12] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_layout() {
        let cfg = RunConfig::from_pairs(&[]).unwrap();
        let t = Table {
            columns: vec!["a", "b"],
            rows: vec![vec![1.0, 2.0]],
            meta: vec![("time".into(), "3".into())],
        };
        let s = table_csv("x", &cfg, &t);
        assert!(s.starts_with("# command=x\n# beta=0.4\n"));
        assert!(s.ends_with("# time=3\na,b\n1.0000000000000000e0,2.0000000000000000e0\n"));
        assert!(!s.contains('\r'));
    }

    #[test]
    fn check_status() {
        let c = [Check::at_most("a", 1.0, 2.0), Check::at_least("b", 1.0, 2.0)];
        let s = report_json("x", &RunConfig::from_pairs(&[]).unwrap(), json!({}), &c);
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["checks"][0]["status"], "pass");
        assert_eq!(v["checks"][1]["status"], "fail");
        assert_eq!(v["config"]["command"], "x");
    }
}
