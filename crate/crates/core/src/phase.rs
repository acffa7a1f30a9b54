//! Husimi Q function of subsystem B on the Bloch sphere and the phase
//! distribution S(φ) obtained by integrating out θ.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{ComplexMatrix, DensityMatrix, LinalgError, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhaseError {
    #[error("bad resolution: {0}")]
    BadResolution(String),
    #[error("polar angle {0} outside [0, pi]")]
    BadAngle(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Wraps an angle into `[−π, π)`.
pub fn wrap_phi(phi: f64) -> f64 {
    let w = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI {
        -PI
    } else {
        w
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereAngles {
    theta: f64,
    phi: f64,
}

impl SphereAngles {
    pub fn new(theta: f64, phi: f64) -> Result<Self, PhaseError> {
        if !(0.0..=PI).contains(&theta) {
            return Err(PhaseError::BadAngle(theta));
        }
        Ok(Self {
            theta,
            phi: wrap_phi(phi),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Traces out subsystem A (the slow index) of a two-spin state.
pub fn partial_trace_a(rho: &DensityMatrix) -> Result<DensityMatrix, PhaseError> {
    if rho.dim() != 4 {
        return Err(LinalgError::DimensionMismatch {
            expected: "4x4 state".into(),
            got: format!("{0}x{0}", rho.dim()),
        }
        .into());
    }
    let mut out = ComplexMatrix::zeros(2, 2);
    for m in 0..2 {
        for n in 0..2 {
            out[(m, n)] = (0..2).map(|k| rho.get(2 * k + m, 2 * k + n)).sum();
        }
    }
    Ok(DensityMatrix::new(out)?)
}

/// `cos(θ/2)|e⟩ + e^{iφ} sin(θ/2)|g⟩`.
pub fn coherent_state(a: SphereAngles) -> [C64; 2] {
    let (s, c) = (a.theta / 2.0).sin_cos();
    [C64::new(c, 0.0), C64::from_polar(s, a.phi)]
}

#[inline]
fn q_at(rho: &DensityMatrix, cos_half: f64, sin_half: f64, phase: C64) -> f64 {
    // ⟨θφ|ρ|θφ⟩ with |θφ⟩ = (c, s·e^{iφ})
    let ket = [C64::new(cos_half, 0.0), phase * sin_half];
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            acc += ket[i].conj() * rho.get(i, j) * ket[j];
        }
    }
    acc.re / (2.0 * PI)
}

/// `Q(θ, φ) = ⟨θ, φ|ρ_B|θ, φ⟩ / 2π`.
pub fn husimi_q(rho_b: &DensityMatrix, a: SphereAngles) -> f64 {
    assert_eq!(rho_b.dim(), 2, "husimi_q expects a single-spin state");
    let (s, c) = (a.theta / 2.0).sin_cos();
    q_at(rho_b, c, s, C64::from_polar(1.0, a.phi)).max(0.0)
}

/// `n` points spanning `[0, π]` inclusive.
pub fn theta_grid(n: usize) -> Vec<f64> {
    let h = PI / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { PI } else { i as f64 * h })
        .collect()
}

/// `n` uniform points covering `[−π, π)`.
pub fn phi_grid(n: usize) -> Vec<f64> {
    let h = 2.0 * PI / n as f64;
    (0..n).map(|j| -PI + j as f64 * h).collect()
}

fn check_theta_resolution(n_theta: usize) -> Result<(), PhaseError> {
    if n_theta < 3 || n_theta.is_multiple_of(2) {
        return Err(PhaseError::BadResolution(format!(
            "n_theta must be odd and at least 3, got {n_theta}"
        )));
    }
    Ok(())
}

fn check_phi_resolution(n_phi: usize) -> Result<(), PhaseError> {
    if n_phi < 4 {
        return Err(PhaseError::BadResolution(format!(
            "n_phi must be at least 4, got {n_phi}"
        )));
    }
    Ok(())
}

/// Composite Simpson weights for `n` (odd) equally spaced nodes over `[0, π]`.
fn simpson_weights(n: usize) -> Vec<f64> {
    let h = PI / (n - 1) as f64;
    (0..n)
        .map(|i| {
            let w = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect()
}

/// Q sampled on a `θ × φ` grid; `values[i][j]` belongs to `(thetas[i], phis[j])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QGrid {
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl QGrid {
    /// `∫ Q sinθ dθ dφ`, Simpson in θ and the rectangle rule in φ.
    pub fn normalization(&self) -> f64 {
        let w = simpson_weights(self.thetas.len());
        let dphi = 2.0 * PI / self.phis.len() as f64;
        self.values
            .iter()
            .zip(&self.thetas)
            .zip(&w)
            .map(|((row, t), wi)| wi * t.sin() * row.iter().sum::<f64>() * dphi)
            .sum()
    }

    /// Grid indices of the largest value; the first in θ-major order wins ties.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (0, 0);
        let mut best_v = f64::NEG_INFINITY;
        for (i, row) in self.values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v > best_v {
                    best_v = v;
                    best = (i, j);
                }
            }
        }
        best
    }

    /// Largest spread across φ of any θ row.
    pub fn phi_spread(&self) -> f64 {
        self.values
            .iter()
            .map(|row| {
                let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
                hi - lo
            })
            .fold(0.0, f64::max)
    }
}

pub fn q_grid(rho_b: &DensityMatrix, n_theta: usize, n_phi: usize) -> Result<QGrid, PhaseError> {
    check_theta_resolution(n_theta)?;
    check_phi_resolution(n_phi)?;
    let thetas = theta_grid(n_theta);
    let phis = phi_grid(n_phi);
    let values = thetas
        .iter()
        .map(|&t| {
            phis.iter()
                .map(|&p| husimi_q(rho_b, SphereAngles { theta: t, phi: p }))
                .collect()
        })
        .collect();
    Ok(QGrid {
        thetas,
        phis,
        values,
    })
}

/// Flat reference subtracted from the θ-marginal.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Baseline {
    /// `1/2π`, the θ-marginal of the uniform distribution; S vanishes
    /// without phase preference.
    #[default]
    Centered,
    /// `1/4π`, as in the original definition of the measure.
    Paper,
}

impl Baseline {
    pub fn value(self) -> f64 {
        match self {
            Baseline::Centered => 1.0 / (2.0 * PI),
            Baseline::Paper => 1.0 / (4.0 * PI),
        }
    }

    /// Constant Q density whose θ-marginal equals [`Baseline::value`].
    fn density(self) -> f64 {
        self.value() / 2.0
    }

    pub fn name(self) -> &'static str {
        match self {
            Baseline::Centered => "centered",
            Baseline::Paper => "paper",
        }
    }
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Baseline {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "centered" => Ok(Baseline::Centered),
            "paper" => Ok(Baseline::Paper),
            other => Err(format!(
                "unknown baseline `{other}` (expected centered or paper)"
            )),
        }
    }
}

/// Precomputed θ nodes for repeated S(φ) evaluations.
struct ThetaRule {
    cos_half: Vec<f64>,
    sin_half: Vec<f64>,
    /// Simpson weight times sinθ.
    weight: Vec<f64>,
}

impl ThetaRule {
    fn new(n_theta: usize) -> Self {
        let thetas = theta_grid(n_theta);
        let w = simpson_weights(n_theta);
        Self {
            cos_half: thetas.iter().map(|t| (t / 2.0).cos()).collect(),
            sin_half: thetas.iter().map(|t| (t / 2.0).sin()).collect(),
            weight: thetas.iter().zip(&w).map(|(t, wi)| wi * t.sin()).collect(),
        }
    }

    /// `∫₀^π sinθ (Q(θ, φ) − q_flat) dθ`, with `q_flat` integrated alongside
    /// so a φ-independent marginal cancels node by node.
    fn s(&self, rho: &DensityMatrix, phi: f64, baseline: Baseline) -> f64 {
        let phase = C64::from_polar(1.0, phi);
        let flat = baseline.density();
        (0..self.weight.len())
            .map(|i| self.weight[i] * (q_at(rho, self.cos_half[i], self.sin_half[i], phase) - flat))
            .sum()
    }
}

/// `S(φ) = ∫₀^π sinθ Q(θ, φ) dθ − baseline`.
pub fn s_phi(
    rho_b: &DensityMatrix,
    phi: f64,
    n_theta: usize,
    baseline: Baseline,
) -> Result<f64, PhaseError> {
    check_theta_resolution(n_theta)?;
    Ok(ThetaRule::new(n_theta).s(rho_b, phi, baseline))
}

/// `¼ Re(ρ_eg e^{iφ})`, the exact centered S(φ) of a single-spin state.
pub fn s_phi_closed_form(rho_b: &DensityMatrix, phi: f64) -> f64 {
    0.25 * (rho_b.get(0, 1) * C64::from_polar(1.0, phi)).re
}

/// S(φ) sampled on a uniform φ grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseDistribution {
    pub phis: Vec<f64>,
    pub s_values: Vec<f64>,
    pub baseline: Baseline,
    /// Peak of S(φ), refined between grid points.
    pub s_max: f64,
    /// Grid point with the largest sampled S.
    pub phi_star: f64,
    /// Location of the refined peak.
    pub phi_peak: f64,
}

impl PhaseDistribution {
    pub fn grid_step(&self) -> f64 {
        2.0 * PI / self.phis.len() as f64
    }

    /// `Σ S(φ) Δφ`.
    pub fn integral(&self) -> f64 {
        self.s_values.iter().sum::<f64>() * self.grid_step()
    }
}

/// Index of the largest value. Ties go to the smallest `|φ|`, then to the
/// negative side.
fn argmax_with_tiebreak(phis: &[f64], values: &[f64]) -> usize {
    let mut best = 0;
    for k in 1..values.len() {
        let (v, b) = (values[k], values[best]);
        let better = v > b
            || (v == b
                && (phis[k].abs() < phis[best].abs()
                    || (phis[k].abs() == phis[best].abs() && phis[k] < phis[best])));
        if better {
            best = k;
        }
    }
    best
}

/// Golden-section search for the maximum of a unimodal function on `[a, b]`.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..80 {
        if (b - a).abs() < 1e-12 {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

pub fn s_distribution(
    rho_b: &DensityMatrix,
    n_phi: usize,
    n_theta: usize,
    baseline: Baseline,
) -> Result<PhaseDistribution, PhaseError> {
    check_theta_resolution(n_theta)?;
    check_phi_resolution(n_phi)?;
    let rule = ThetaRule::new(n_theta);
    let phis = phi_grid(n_phi);
    let s_values: Vec<f64> = phis.iter().map(|&p| rule.s(rho_b, p, baseline)).collect();
    let k = argmax_with_tiebreak(&phis, &s_values);
    let phi_star = phis[k];
    let step = 2.0 * PI / n_phi as f64;

    // S(φ) is a single harmonic, so the bracket around the grid argmax holds
    // the true peak.
    let (peak, refined) = golden_max(
        |p| rule.s(rho_b, p, baseline),
        phi_star - step,
        phi_star + step,
    );
    let (s_max, phi_peak) = if refined > s_values[k] {
        (refined, wrap_phi(peak))
    } else {
        (s_values[k], phi_star)
    };
    Ok(PhaseDistribution {
        phis,
        s_values,
        baseline,
        s_max,
        phi_star,
        phi_peak,
    })
}
