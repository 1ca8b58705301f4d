//! Run configuration: command-line flags layered over an optional JSON file
//! whose keys are the long flag names.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::SolverConfig;
use crate::params::HelfrichParams;

pub const OUTPUT_DIR_ENV: &str = "OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
    Obj,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            "obj" => Ok(Format::Obj),
            _ => Err(format!("unknown format {s:?} (expected csv, json, svg or obj)")),
        }
    }
}

/// One layer of settings. Every field is optional so that layers can be
/// stacked; `None` means "not given here".
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigLayer {
    pub c0: Option<f64>,
    pub lambda: Option<f64>,
    pub p: Option<f64>,
    pub w0p: Option<f64>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub eps_start: Option<f64>,
    pub w_switch: Option<f64>,
    pub r_max: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Vec<Format>>,
    pub sweep_min: Option<f64>,
    pub sweep_max: Option<f64>,
    pub sweep_points: Option<usize>,
    pub segments_theta: Option<usize>,
    pub segments_profile: Option<usize>,
    pub c0_range: Option<String>,
    pub lambda_range: Option<String>,
    pub p_range: Option<String>,
    pub w0p_range: Option<String>,
}

macro_rules! overlay {
    ($hi:expr, $lo:expr, $($f:ident),*) => {
        ConfigLayer { $($f: $hi.$f.or($lo.$f),)* }
    };
}

impl ConfigLayer {
    /// Fields set in `self` win over those in `lower`.
    pub fn over(self, lower: ConfigLayer) -> ConfigLayer {
        overlay!(
            self, lower, c0, lambda, p, w0p, rel_tol, abs_tol, eps_start, w_switch, r_max, out, format, sweep_min,
            sweep_max, sweep_points, segments_theta, segments_profile, c0_range, lambda_range, p_range, w0p_range
        )
    }

    pub fn from_json(text: &str) -> Result<ConfigLayer> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("config file: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<ConfigLayer> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Built-in defaults. `out` comes from `OUTPUT_DIR` when set.
    pub fn defaults(output_dir: Option<PathBuf>) -> ConfigLayer {
        let s = SolverConfig::default();
        ConfigLayer {
            c0: Some(1.0),
            lambda: Some(0.25),
            p: Some(1.0),
            w0p: Some(0.05),
            rel_tol: Some(s.rel_tol),
            abs_tol: Some(s.abs_tol),
            eps_start: None,
            w_switch: Some(s.w_switch),
            r_max: None,
            out: Some(output_dir.unwrap_or_else(|| PathBuf::from("."))),
            format: Some(vec![Format::Csv, Format::Json]),
            sweep_min: Some(1e-4),
            sweep_max: Some(1e-1),
            sweep_points: Some(16),
            segments_theta: Some(128),
            segments_profile: Some(256),
            c0_range: None,
            lambda_range: None,
            p_range: None,
            w0p_range: None,
        }
    }

    pub fn env_defaults() -> ConfigLayer {
        Self::defaults(std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
    }
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunConfig {
    pub params: HelfrichParams,
    pub w0p: f64,
    pub solver: SolverConfig,
    pub out: PathBuf,
    pub formats: BTreeSet<Format>,
    pub sweep_min: f64,
    pub sweep_max: f64,
    pub sweep_points: usize,
    pub segments_theta: usize,
    pub segments_profile: usize,
    /// Sweep axes; each falls back to the single value above.
    pub c0_range: Vec<f64>,
    pub lambda_range: Vec<f64>,
    pub p_range: Vec<f64>,
    pub w0p_range: Vec<f64>,
}

fn range_or(spec: Option<String>, value: f64, flag: &str) -> Result<Vec<f64>> {
    match spec {
        Some(s) => parse_range(&s).map_err(|m| flag_err(flag, m)),
        None => Ok(vec![value]),
    }
}

/// Usage error naming the offending flag.
fn flag_err(flag: &str, msg: String) -> Error {
    Error::InvalidConfig(format!("--{flag}: {msg}"))
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| flag_err(flag, "missing value".into()))
}

fn finite(v: f64, flag: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(flag_err(flag, format!("{v} is not finite")))
    }
}

fn positive(v: f64, flag: &str) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(flag_err(flag, format!("{v} must be positive")))
    }
}

impl RunConfig {
    /// Resolves a fully merged layer, validating each value.
    pub fn resolve(layer: ConfigLayer) -> Result<RunConfig> {
        let params = HelfrichParams::new(
            finite(need(layer.c0, "c0")?, "c0")?,
            finite(need(layer.lambda, "lambda")?, "lambda")?,
            finite(need(layer.p, "p")?, "p")?,
        );
        let w0p = positive(need(layer.w0p, "w0p")?, "w0p")?;
        let base = SolverConfig::default();
        let solver = SolverConfig {
            rel_tol: need(layer.rel_tol, "rel-tol")?,
            abs_tol: need(layer.abs_tol, "abs-tol")?,
            eps_start: layer.eps_start.map(|e| positive(e, "eps-start")).transpose()?,
            w_switch: need(layer.w_switch, "w-switch")?,
            r_max: layer.r_max.map(|r| positive(r, "r-max")).transpose()?,
            ..base
        };
        if !(solver.rel_tol > 0.0 && solver.rel_tol < 1.0) {
            return Err(flag_err("rel-tol", format!("{} must lie in (0, 1)", solver.rel_tol)));
        }
        positive(solver.abs_tol, "abs-tol")?;
        if !(solver.w_switch > 1.0 && solver.w_switch.is_finite()) {
            return Err(flag_err("w-switch", format!("{} must exceed 1", solver.w_switch)));
        }
        solver.validate()?;

        let sweep_min = positive(need(layer.sweep_min, "sweep-min")?, "sweep-min")?;
        let sweep_max = positive(need(layer.sweep_max, "sweep-max")?, "sweep-max")?;
        if sweep_min > sweep_max {
            return Err(flag_err("sweep-min", format!("{sweep_min} exceeds --sweep-max {sweep_max}")));
        }
        let sweep_points = need(layer.sweep_points, "sweep-points")?;
        if sweep_points == 0 {
            return Err(flag_err("sweep-points", "must be at least 1".into()));
        }
        let segments_theta = need(layer.segments_theta, "segments-theta")?;
        if segments_theta < 3 {
            return Err(flag_err("segments-theta", format!("{segments_theta} is below 3")));
        }
        let segments_profile = need(layer.segments_profile, "segments-profile")?;
        if segments_profile < 2 {
            return Err(flag_err("segments-profile", format!("{segments_profile} is below 2")));
        }
        let c0_range = range_or(layer.c0_range, params.c0, "c0-range")?;
        let lambda_range = range_or(layer.lambda_range, params.lambda, "lambda-range")?;
        let p_range = range_or(layer.p_range, params.p, "p-range")?;
        let w0p_range = range_or(layer.w0p_range, w0p, "w0p-range")?;
        if let Some(bad) = w0p_range.iter().find(|w| !(**w > 0.0)) {
            return Err(flag_err("w0p-range", format!("{bad} must be positive")));
        }
        Ok(RunConfig {
            c0_range,
            lambda_range,
            p_range,
            w0p_range,
            params,
            w0p,
            solver,
            out: need(layer.out, "out")?,
            formats: need(layer.format, "format")?.into_iter().collect(),
            sweep_min,
            sweep_max,
            sweep_points,
            segments_theta,
            segments_profile,
        })
    }

    /// `flags > file > defaults`.
    pub fn layered(flags: ConfigLayer, file: Option<ConfigLayer>, defaults: ConfigLayer) -> Result<RunConfig> {
        Self::resolve(flags.over(file.unwrap_or_default()).over(defaults))
    }

    /// Sweep grid for `verify`: geometric from `sweep_max` down to `sweep_min`.
    pub fn sweep_grid(&self) -> Vec<f64> {
        crate::bounds::geometric_grid(self.sweep_max, self.sweep_min, self.sweep_points)
    }
}

/// Parses `"start:stop:count"` (or a single number) into `count` evenly
/// spaced values.
pub fn parse_range(s: &str) -> std::result::Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    match parts.as_slice() {
        [v] => Ok(vec![num(v)?]),
        [a, b, n] => {
            let (a, b) = (num(a)?, num(b)?);
            let n: usize = n.trim().parse().map_err(|e| format!("count {n:?}: {e}"))?;
            if n == 0 {
                return Err("count must be at least 1".into());
            }
            if !a.is_finite() || !b.is_finite() {
                return Err("range ends must be finite".into());
            }
            if n == 1 {
                return Ok(vec![a]);
            }
            Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
        }
        _ => Err(format!("expected start:stop:count, got {s:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        assert!(ConfigLayer::from_json(r#"{"c0": 1.0, "bogus": 2}"#).is_err());
        let l = ConfigLayer::from_json(r#"{"rel-tol": 1e-9, "format": ["svg"]}"#).unwrap();
        assert_eq!(l.rel_tol, Some(1e-9));
        assert_eq!(l.format, Some(vec![Format::Svg]));
    }

    #[test]
    fn error_names_flag() {
        let flags = ConfigLayer { w0p: Some(-1.0), ..Default::default() };
        let e = RunConfig::layered(flags, None, ConfigLayer::defaults(None)).unwrap_err();
        assert!(e.to_string().contains("--w0p"), "{e}");
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_range("2").unwrap(), vec![2.0]);
        assert!(parse_range("0:1:0").is_err());
        assert!(parse_range("0:1").is_err());
    }
}
