//! `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, unknown keys are
//! rejected. Missing keys keep their defaults (resonant parameter set,
//! null-space solver, 181 × 360 resolution, centered baseline, CSV).

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::SystemParams;
use crate::phase::Baseline;
use crate::steady::Solver;
use crate::sweep::SweepParam;

use super::{fmt_f64, Format};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    ParseError { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: invalid value for `{key}`: {reason}")]
    InvalidValue {
        line: usize,
        key: String,
        reason: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    Null,
    Evolve,
}

/// Optional sweep overrides; unset fields fall back to the per-axis defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepOverrides {
    pub axis1: Option<SweepParam>,
    pub axis1_min: Option<f64>,
    pub axis1_max: Option<f64>,
    pub axis1_count: Option<usize>,
    pub delta2_min: Option<f64>,
    pub delta2_max: Option<f64>,
    pub delta2_count: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    pub solver: SolverKind,
    pub dt: f64,
    pub t_end: f64,
    pub n_theta: usize,
    pub n_phi: usize,
    pub baseline: Baseline,
    pub output_path: Option<String>,
    pub format: Format,
    pub sweep: SweepOverrides,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: SystemParams::resonant(),
            solver: SolverKind::Null,
            dt: Solver::DEFAULT_DT,
            t_end: Solver::DEFAULT_T_END,
            n_theta: 181,
            n_phi: 360,
            baseline: Baseline::Centered,
            output_path: None,
            format: Format::Csv,
            sweep: SweepOverrides::default(),
        }
    }
}

pub const KEYS: &[&str] = &[
    "delta1",
    "delta2",
    "epsilon",
    "g",
    "gamma_a_gain",
    "gamma_a_loss",
    "gamma_b_gain",
    "gamma_b_loss",
    "omega_a",
    "omega_b",
    "omega",
    "solver",
    "dt",
    "t_end",
    "n_theta",
    "n_phi",
    "baseline",
    "output_path",
    "format",
    "axis1",
    "axis1_min",
    "axis1_max",
    "axis1_count",
    "delta2_min",
    "delta2_max",
    "delta2_count",
];

fn invalid(line: usize, key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue {
        line,
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn real(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = value
        .parse()
        .map_err(|_| invalid(line, key, format!("`{value}` is not a number")))?;
    if !v.is_finite() {
        return Err(invalid(line, key, "must be finite"));
    }
    Ok(v)
}

fn rate(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    let v = real(line, key, value)?;
    if v < 0.0 {
        return Err(invalid(line, key, "must be non-negative"));
    }
    Ok(v)
}

fn count(line: usize, key: &str, value: &str) -> Result<usize, ConfigError> {
    value.parse().map_err(|_| {
        invalid(
            line,
            key,
            format!("`{value}` is not a non-negative integer"),
        )
    })
}

impl RunConfig {
    /// Applies one assignment. `line` is used for error reporting only.
    pub fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        let p = &mut self.params;
        match key {
            "delta1" => p.delta1 = real(line, key, value)?,
            "delta2" => p.delta2 = real(line, key, value)?,
            "epsilon" => p.epsilon = rate(line, key, value)?,
            "g" => p.g = real(line, key, value)?,
            "gamma_a_gain" => p.gamma_a_gain = rate(line, key, value)?,
            "gamma_a_loss" => p.gamma_a_loss = rate(line, key, value)?,
            "gamma_b_gain" => p.gamma_b_gain = rate(line, key, value)?,
            "gamma_b_loss" => {
                let v = rate(line, key, value)?;
                if v == 0.0 {
                    return Err(invalid(line, key, "the B loss rate must be positive"));
                }
                p.gamma_b_loss = v;
            }
            "omega_a" => p.omega_a = Some(real(line, key, value)?),
            "omega_b" => p.omega_b = Some(real(line, key, value)?),
            "omega" => p.omega = Some(real(line, key, value)?),
            "solver" => {
                self.solver = match value {
                    "null" => SolverKind::Null,
                    "evolve" => SolverKind::Evolve,
                    _ => return Err(invalid(line, key, "expected null or evolve")),
                }
            }
            "dt" => {
                let v = real(line, key, value)?;
                if v <= 0.0 {
                    return Err(invalid(line, key, "must be positive"));
                }
                self.dt = v;
            }
            "t_end" => {
                let v = real(line, key, value)?;
                if v <= 0.0 {
                    return Err(invalid(line, key, "must be positive"));
                }
                self.t_end = v;
            }
            "n_theta" => {
                let n = count(line, key, value)?;
                if n < 3 || n % 2 == 0 {
                    return Err(invalid(line, key, "must be odd and at least 3"));
                }
                self.n_theta = n;
            }
            "n_phi" => {
                let n = count(line, key, value)?;
                if n < 4 {
                    return Err(invalid(line, key, "must be at least 4"));
                }
                self.n_phi = n;
            }
            "baseline" => self.baseline = value.parse().map_err(|e| invalid(line, key, e))?,
            "output_path" => {
                self.output_path = if value.is_empty() {
                    None
                } else {
                    Some(value.to_string())
                }
            }
            "format" => self.format = value.parse().map_err(|e| invalid(line, key, e))?,
            "axis1" => self.sweep.axis1 = Some(value.parse().map_err(|e| invalid(line, key, e))?),
            "axis1_min" => self.sweep.axis1_min = Some(real(line, key, value)?),
            "axis1_max" => self.sweep.axis1_max = Some(real(line, key, value)?),
            "axis1_count" => {
                let n = count(line, key, value)?;
                if n < 2 {
                    return Err(invalid(line, key, "must be at least 2"));
                }
                self.sweep.axis1_count = Some(n);
            }
            "delta2_min" => self.sweep.delta2_min = Some(real(line, key, value)?),
            "delta2_max" => self.sweep.delta2_max = Some(real(line, key, value)?),
            "delta2_count" => {
                let n = count(line, key, value)?;
                if n < 2 {
                    return Err(invalid(line, key, "must be at least 2"));
                }
                self.sweep.delta2_count = Some(n);
            }
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::ParseError {
                    line,
                    text: raw.to_string(),
                });
            };
            let key = key.trim();
            if key.is_empty() {
                return Err(ConfigError::ParseError {
                    line,
                    text: raw.to_string(),
                });
            }
            self.set(key, value.trim(), line)?;
        }
        self.check_consistency()
    }

    /// Cross-field checks that cannot be made one key at a time.
    pub fn check_consistency(&self) -> Result<(), ConfigError> {
        if self.t_end < self.dt {
            return Err(invalid(0, "t_end", "must be at least dt"));
        }
        if let Err(e) = self.params.validate() {
            return Err(invalid(0, "params", e.to_string()));
        }
        Ok(())
    }

    pub fn solver(&self) -> Solver {
        match self.solver {
            SolverKind::Null => Solver::NullSpace,
            SolverKind::Evolve => Solver::Evolve {
                dt: self.dt,
                t_end: self.t_end,
            },
        }
    }

    /// Renders every set field as config text that parses back to `self`.
    pub fn to_config_text(&self) -> String {
        let mut out = String::new();
        let p = &self.params;
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("delta1", fmt_f64(p.delta1));
        put("delta2", fmt_f64(p.delta2));
        put("epsilon", fmt_f64(p.epsilon));
        put("g", fmt_f64(p.g));
        put("gamma_a_gain", fmt_f64(p.gamma_a_gain));
        put("gamma_a_loss", fmt_f64(p.gamma_a_loss));
        put("gamma_b_gain", fmt_f64(p.gamma_b_gain));
        put("gamma_b_loss", fmt_f64(p.gamma_b_loss));
        for (k, v) in [
            ("omega_a", p.omega_a),
            ("omega_b", p.omega_b),
            ("omega", p.omega),
        ] {
            if let Some(v) = v {
                put(k, fmt_f64(v));
            }
        }
        put(
            "solver",
            match self.solver {
                SolverKind::Null => "null".into(),
                SolverKind::Evolve => "evolve".into(),
            },
        );
        put("dt", fmt_f64(self.dt));
        put("t_end", fmt_f64(self.t_end));
        put("n_theta", self.n_theta.to_string());
        put("n_phi", self.n_phi.to_string());
        put("baseline", self.baseline.to_string());
        if let Some(path) = &self.output_path {
            put("output_path", path.clone());
        }
        put("format", self.format.to_string());
        let s = &self.sweep;
        if let Some(a) = s.axis1 {
            put("axis1", a.to_string());
        }
        for (k, v) in [
            ("axis1_min", s.axis1_min),
            ("axis1_max", s.axis1_max),
            ("delta2_min", s.delta2_min),
            ("delta2_max", s.delta2_max),
        ] {
            if let Some(v) = v {
                put(k, fmt_f64(v));
            }
        }
        for (k, v) in [
            ("axis1_count", s.axis1_count),
            ("delta2_count", s.delta2_count),
        ] {
            if let Some(v) = v {
                put(k, v.to_string());
            }
        }
        out
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    cfg.apply_text(text)?;
    Ok(cfg)
}
