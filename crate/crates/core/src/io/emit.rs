//! CSV and JSON serialization of states, Q grids, phase distributions and
//! sweep results.
//!
//! CSV: header line, one record per line, `\n` endings, numbers in the
//! shortest form that parses back to the same `f64`. JSON carries the
//! same columns as arrays in one object; NaN becomes `null`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::linalg::DensityMatrix;
use crate::phase::{PhaseDistribution, QGrid};
use crate::steady::UniquenessReport;
use crate::sweep::SweepResult;

use super::{fmt_f64, Format};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QGridRecord {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub q: Vec<f64>,
}

impl From<&QGrid> for QGridRecord {
    fn from(grid: &QGrid) -> Self {
        let mut rec = QGridRecord {
            theta: Vec::new(),
            phi: Vec::new(),
            q: Vec::new(),
        };
        for (t, row) in grid.thetas.iter().zip(&grid.values) {
            for (p, q) in grid.phis.iter().zip(row) {
                rec.theta.push(*t);
                rec.phi.push(*p);
                rec.q.push(*q);
            }
        }
        rec
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdistRecord {
    pub phi: Vec<f64>,
    pub s: Vec<f64>,
    pub s_max: f64,
    pub phi_star: f64,
    pub baseline: String,
}

impl From<&PhaseDistribution> for SdistRecord {
    fn from(d: &PhaseDistribution) -> Self {
        SdistRecord {
            phi: d.phis.clone(),
            s: d.s_values.clone(),
            s_max: d.s_max,
            phi_star: d.phi_star,
            baseline: d.baseline.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub axis1_name: String,
    pub axis2_name: String,
    pub axis1: Vec<f64>,
    pub axis2: Vec<f64>,
    pub value: Vec<Option<f64>>,
    pub null_dim: Vec<usize>,
    pub gap: Vec<Option<f64>>,
    pub residual: Vec<Option<f64>>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl From<&SweepResult> for SweepRecord {
    fn from(r: &SweepResult) -> Self {
        let mut rec = SweepRecord {
            axis1_name: r.spec.axis1.to_string(),
            axis2_name: r.spec.axis2_name().to_string(),
            axis1: Vec::new(),
            axis2: Vec::new(),
            value: Vec::new(),
            null_dim: Vec::new(),
            gap: Vec::new(),
            residual: Vec::new(),
        };
        for (i, a1) in r.axis1_values.iter().enumerate() {
            for (j, a2) in r.axis2_values.iter().enumerate() {
                let d = &r.diagnostics[i][j];
                rec.axis1.push(*a1);
                rec.axis2.push(*a2);
                rec.value.push(finite(r.values[i][j]));
                rec.null_dim.push(d.null_dim);
                rec.gap.push(finite(d.spectral_gap));
                rec.residual.push(finite(d.residual));
            }
        }
        rec
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&DensityMatrix> for MatrixRecord {
    fn from(rho: &DensityMatrix) -> Self {
        let n = rho.dim();
        MatrixRecord {
            re: (0..n)
                .map(|i| (0..n).map(|j| rho.get(i, j).re).collect())
                .collect(),
            im: (0..n)
                .map(|i| (0..n).map(|j| rho.get(i, j).im).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteadyRecord {
    pub rho_ab: MatrixRecord,
    pub rho_b: MatrixRecord,
    pub null_dim: usize,
    pub gap: f64,
    pub residual: f64,
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec(value).expect("records serialize");
    out.push(b'\n');
    out
}

pub fn emit_qgrid(grid: &QGrid, format: Format) -> Vec<u8> {
    match format {
        Format::Json => to_json(&QGridRecord::from(grid)),
        Format::Csv => {
            let mut out = String::from("theta,phi,q\n");
            for (t, row) in grid.thetas.iter().zip(&grid.values) {
                for (p, q) in grid.phis.iter().zip(row) {
                    let _ = writeln!(out, "{},{},{}", fmt_f64(*t), fmt_f64(*p), fmt_f64(*q));
                }
            }
            out.into_bytes()
        }
    }
}

pub fn emit_sdist(d: &PhaseDistribution, format: Format) -> Vec<u8> {
    match format {
        Format::Json => to_json(&SdistRecord::from(d)),
        Format::Csv => {
            let mut out = String::from("phi,s\n");
            for (p, s) in d.phis.iter().zip(&d.s_values) {
                let _ = writeln!(out, "{},{}", fmt_f64(*p), fmt_f64(*s));
            }
            let _ = writeln!(
                out,
                "# s_max={} phi_star={} baseline={}",
                fmt_f64(d.s_max),
                fmt_f64(d.phi_star),
                d.baseline
            );
            out.into_bytes()
        }
    }
}

pub fn emit_sweep(r: &SweepResult, format: Format) -> Vec<u8> {
    match format {
        Format::Json => to_json(&SweepRecord::from(r)),
        Format::Csv => {
            let mut out = String::from("axis1,axis2,value,null_dim,gap,residual\n");
            for (i, a1) in r.axis1_values.iter().enumerate() {
                for (j, a2) in r.axis2_values.iter().enumerate() {
                    let d = &r.diagnostics[i][j];
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        fmt_f64(*a1),
                        fmt_f64(*a2),
                        fmt_f64(r.values[i][j]),
                        d.null_dim,
                        fmt_f64(d.spectral_gap),
                        fmt_f64(d.residual)
                    );
                }
            }
            out.into_bytes()
        }
    }
}

/// Steady state of the pair and of B alone. CSV rows are
/// `system,row,col,re,im`, followed by a diagnostics comment.
pub fn emit_steady(
    rho_ab: &DensityMatrix,
    rho_b: &DensityMatrix,
    report: &UniquenessReport,
    residual: f64,
    format: Format,
) -> Vec<u8> {
    match format {
        Format::Json => to_json(&SteadyRecord {
            rho_ab: rho_ab.into(),
            rho_b: rho_b.into(),
            null_dim: report.null_dim,
            gap: report.spectral_gap,
            residual,
        }),
        Format::Csv => {
            let mut out = String::from("system,row,col,re,im\n");
            for (name, rho) in [("ab", rho_ab), ("b", rho_b)] {
                for i in 0..rho.dim() {
                    for j in 0..rho.dim() {
                        let z = rho.get(i, j);
                        let _ = writeln!(out, "{name},{i},{j},{},{}", fmt_f64(z.re), fmt_f64(z.im));
                    }
                }
            }
            let _ = writeln!(
                out,
                "# null_dim={} gap={} residual={}",
                report.null_dim,
                fmt_f64(report.spectral_gap),
                fmt_f64(residual)
            );
            out.into_bytes()
        }
    }
}
