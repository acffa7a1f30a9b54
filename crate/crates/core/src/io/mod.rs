//! Configuration, text serialization and heatmap output.

use std::fmt;
use std::str::FromStr;

pub mod config;
pub mod emit;
pub mod heatmap;

pub use config::{parse_config, ConfigError, RunConfig, SolverKind, SweepOverrides};
pub use emit::{emit_qgrid, emit_sdist, emit_steady, emit_sweep};
pub use heatmap::{render_heatmap, write_heatmap};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        ryu::Buffer::new().format_finite(v).to_string()
    }
}
