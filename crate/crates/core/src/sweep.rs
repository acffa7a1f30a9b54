//! Parameter sweeps: S(φ) maps over one parameter and Arnold tongues of
//! the S(φ) peak over a strength and the B detuning.
//!
//! Every grid point is an independent work item. Results are collected by
//! index, so the output does not depend on scheduling or worker count.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Liouvillian, SystemParams};
use crate::phase::{partial_trace_a, phi_grid, s_distribution, Baseline};
use crate::steady::{residual, steady_state, uniqueness_report};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    InvalidSpec(String),
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

/// Parameter varied along the first axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Delta2,
    Epsilon,
    G,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Delta2 => "delta2",
            SweepParam::Epsilon => "epsilon",
            SweepParam::G => "g",
        }
    }

    pub fn apply(self, p: &mut SystemParams, value: f64) {
        match self {
            SweepParam::Delta2 => p.delta2 = value,
            SweepParam::Epsilon => p.epsilon = value,
            SweepParam::G => p.g = value,
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "delta2" => Ok(SweepParam::Delta2),
            "epsilon" => Ok(SweepParam::Epsilon),
            "g" => Ok(SweepParam::G),
            other => Err(format!(
                "unknown sweep axis `{other}` (expected delta2, epsilon or g)"
            )),
        }
    }
}

/// Inclusive, uniformly spaced range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisRange {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == self.count - 1 {
                    self.max
                } else {
                    self.min + i as f64 * step
                }
            })
            .collect()
    }

    fn validate(&self, what: &str) -> Result<(), SweepError> {
        if self.count < 2 {
            return Err(SweepError::InvalidSpec(format!(
                "{what} count must be at least 2"
            )));
        }
        if !self.min.is_finite() || !self.max.is_finite() || self.min > self.max {
            return Err(SweepError::InvalidSpec(format!(
                "{what} range [{}, {}] is not ordered",
                self.min, self.max
            )));
        }
        Ok(())
    }
}

/// Second axis: the φ grid of S(φ), or the B detuning.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SecondAxis {
    /// Uniform over `[−π, π)` with `n_phi` points.
    Phi,
    Delta2(AxisRange),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduce {
    SOfPhi,
    MaxS,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: SystemParams,
    pub axis1: SweepParam,
    pub axis1_range: AxisRange,
    pub axis2: SecondAxis,
    pub n_theta: usize,
    pub n_phi: usize,
    pub baseline: Baseline,
    pub reduce: Reduce,
}

impl SweepSpec {
    pub const DEFAULT_N_THETA: usize = 181;
    pub const DEFAULT_N_PHI: usize = 360;

    /// S(φ) map over one parameter with the default ranges: Δ₂ ∈ [−10, 10],
    /// ε ∈ [0, 30], g ∈ [0, 30], 81 points each.
    pub fn phase_map(base: SystemParams, axis1: SweepParam) -> Self {
        let axis1_range = match axis1 {
            SweepParam::Delta2 => AxisRange::new(-10.0, 10.0, 81),
            SweepParam::Epsilon | SweepParam::G => AxisRange::new(0.0, 30.0, 81),
        };
        Self {
            base,
            axis1,
            axis1_range,
            axis2: SecondAxis::Phi,
            n_theta: Self::DEFAULT_N_THETA,
            n_phi: Self::DEFAULT_N_PHI,
            baseline: Baseline::Centered,
            reduce: Reduce::SOfPhi,
        }
    }

    /// Peak S over (strength, Δ₂) on a 61 × 61 grid: ε ∈ [0, 10] or
    /// g ∈ [0, 16], Δ₂ ∈ [−10, 10].
    pub fn tongue(base: SystemParams, axis1: SweepParam) -> Self {
        let axis1_range = match axis1 {
            SweepParam::G => AxisRange::new(0.0, 16.0, 61),
            _ => AxisRange::new(0.0, 10.0, 61),
        };
        Self {
            base,
            axis1,
            axis1_range,
            axis2: SecondAxis::Delta2(AxisRange::new(-10.0, 10.0, 61)),
            n_theta: Self::DEFAULT_N_THETA,
            n_phi: Self::DEFAULT_N_PHI,
            baseline: Baseline::Centered,
            reduce: Reduce::MaxS,
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        self.base
            .validate()
            .map_err(|e| SweepError::InvalidSpec(e.to_string()))?;
        self.axis1_range.validate("axis1")?;
        if self.n_theta < 3 || self.n_theta.is_multiple_of(2) {
            return Err(SweepError::InvalidSpec(format!(
                "n_theta must be odd and at least 3, got {}",
                self.n_theta
            )));
        }
        if self.n_phi < 4 {
            return Err(SweepError::InvalidSpec(format!(
                "n_phi must be at least 4, got {}",
                self.n_phi
            )));
        }
        match (self.reduce, &self.axis2) {
            (Reduce::SOfPhi, SecondAxis::Phi) => Ok(()),
            (Reduce::MaxS, SecondAxis::Delta2(r)) => {
                if self.axis1 == SweepParam::Delta2 {
                    return Err(SweepError::InvalidSpec(
                        "a max_s sweep needs axis1 = epsilon or g".into(),
                    ));
                }
                r.validate("delta2")
            }
            (Reduce::SOfPhi, _) => Err(SweepError::InvalidSpec(
                "reduce = s_of_phi requires axis2 = phi".into(),
            )),
            (Reduce::MaxS, _) => Err(SweepError::InvalidSpec(
                "reduce = max_s requires axis2 = delta2".into(),
            )),
        }
    }

    pub fn axis1_values(&self) -> Vec<f64> {
        self.axis1_range.values()
    }

    pub fn axis2_values(&self) -> Vec<f64> {
        match &self.axis2 {
            SecondAxis::Phi => phi_grid(self.n_phi),
            SecondAxis::Delta2(r) => r.values(),
        }
    }

    pub fn axis2_name(&self) -> &'static str {
        match self.axis2 {
            SecondAxis::Phi => "phi",
            SecondAxis::Delta2(_) => "delta2",
        }
    }
}

/// Per-point solver diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellDiagnostics {
    pub null_dim: usize,
    pub spectral_gap: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub axis1_values: Vec<f64>,
    pub axis2_values: Vec<f64>,
    /// `values[i][j]` belongs to `(axis1_values[i], axis2_values[j])`.
    /// NaN marks a point whose steady state could not be determined.
    pub values: Vec<Vec<f64>>,
    pub diagnostics: Vec<Vec<CellDiagnostics>>,
}

impl SweepResult {
    /// Grid indices of points with a non-unique or failed steady state.
    pub fn flagged(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, row) in self.diagnostics.iter().enumerate() {
            for (j, d) in row.iter().enumerate() {
                if d.null_dim != 1 || self.values[i][j].is_nan() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Largest finite value and its indices.
    pub fn argmax(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for (i, row) in self.values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v.is_finite() && best.is_none_or(|b| v > b.2) {
                    best = Some((i, j, v));
                }
            }
        }
        best
    }
}

struct PointOutcome {
    row: Vec<f64>,
    diagnostics: CellDiagnostics,
}

/// Solves one parameter point and reduces it to either the full S(φ) row
/// or the single peak value.
fn evaluate(spec: &SweepSpec, params: SystemParams) -> PointOutcome {
    let l = Liouvillian::new(params);
    let report = uniqueness_report(&l);
    let width = match spec.reduce {
        Reduce::SOfPhi => spec.n_phi,
        Reduce::MaxS => 1,
    };
    let failed = |residual: f64| PointOutcome {
        row: vec![f64::NAN; width],
        diagnostics: CellDiagnostics {
            null_dim: report.null_dim,
            spectral_gap: report.spectral_gap,
            residual,
        },
    };
    let rho = match steady_state(&l) {
        Ok(rho) => rho,
        Err(_) => return failed(f64::NAN),
    };
    let res = residual(&l, &rho);
    let dist = partial_trace_a(&rho)
        .and_then(|rho_b| s_distribution(&rho_b, spec.n_phi, spec.n_theta, spec.baseline));
    let dist = match dist {
        Ok(d) => d,
        Err(_) => return failed(res),
    };
    PointOutcome {
        row: match spec.reduce {
            Reduce::SOfPhi => dist.s_values,
            Reduce::MaxS => vec![dist.s_max],
        },
        diagnostics: CellDiagnostics {
            null_dim: report.null_dim,
            spectral_gap: report.spectral_gap,
            residual: res,
        },
    }
}

fn points(spec: &SweepSpec) -> Vec<SystemParams> {
    let a1 = spec.axis1_values();
    let mut out = Vec::new();
    for &v1 in &a1 {
        let mut p = spec.base;
        spec.axis1.apply(&mut p, v1);
        match &spec.axis2 {
            SecondAxis::Phi => out.push(p),
            SecondAxis::Delta2(r) => {
                for v2 in r.values() {
                    let mut q = p;
                    q.delta2 = v2;
                    out.push(q);
                }
            }
        }
    }
    out
}

fn assemble(spec: &SweepSpec, outcomes: Vec<PointOutcome>) -> SweepResult {
    let axis1_values = spec.axis1_values();
    let axis2_values = spec.axis2_values();
    let (values, diagnostics) = match spec.reduce {
        Reduce::SOfPhi => outcomes
            .into_iter()
            .map(|o| {
                let n = o.row.len();
                (o.row, vec![o.diagnostics; n])
            })
            .unzip(),
        Reduce::MaxS => {
            let n2 = axis2_values.len();
            let mut values = Vec::with_capacity(axis1_values.len());
            let mut diags = Vec::with_capacity(axis1_values.len());
            let mut it = outcomes.into_iter();
            for _ in 0..axis1_values.len() {
                let chunk: Vec<PointOutcome> = it.by_ref().take(n2).collect();
                values.push(chunk.iter().map(|o| o.row[0]).collect());
                diags.push(chunk.iter().map(|o| o.diagnostics).collect());
            }
            (values, diags)
        }
    };
    SweepResult {
        spec: spec.clone(),
        axis1_values,
        axis2_values,
        values,
        diagnostics,
    }
}

/// Runs the sweep on the ambient rayon pool.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    spec.validate()?;
    let outcomes = points(spec)
        .into_par_iter()
        .map(|p| evaluate(spec, p))
        .collect();
    Ok(assemble(spec, outcomes))
}

/// Runs the sweep on the calling thread only.
pub fn run_sweep_sequential(spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    spec.validate()?;
    let outcomes = points(spec)
        .into_iter()
        .map(|p| evaluate(spec, p))
        .collect();
    Ok(assemble(spec, outcomes))
}

/// Runs the sweep with `jobs` workers; `jobs = 1` stays on the calling thread.
pub fn run_sweep_with_jobs(spec: &SweepSpec, jobs: usize) -> Result<SweepResult, SweepError> {
    if jobs <= 1 {
        return run_sweep_sequential(spec);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| SweepError::Pool(e.to_string()))?;
    pool.install(|| run_sweep(spec))
}

/// Peak-S map over (strength, Δ₂).
pub fn arnold_tongue(spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    if spec.reduce != Reduce::MaxS {
        return Err(SweepError::InvalidSpec(
            "arnold_tongue needs reduce = max_s".into(),
        ));
    }
    run_sweep(spec)
}

/// Number of Δ₂ samples in each row at or above `threshold`.
pub fn tongue_widths(result: &SweepResult, threshold: f64) -> Vec<usize> {
    result
        .values
        .iter()
        .map(|row| row.iter().filter(|&&v| v >= threshold).count())
        .collect()
}
