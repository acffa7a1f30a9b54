//! Steady states of the Liouvillian.
//!
//! The primary route is null-space extraction. Fixed-step RK4 propagation
//! serves as an independent cross-check.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    eigenvalues, null_vector, singular_values, unvec, vec, vec_norm, ComplexMatrix, DensityMatrix,
    LinalgError, C64, NULL_TOL,
};
use crate::model::Liouvillian;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SteadyError {
    #[error("steady state is not unique (null space of dimension {multiplicity})")]
    DegenerateSteadyState { multiplicity: usize },
    #[error("steady state is unphysical: {0}")]
    UnphysicalState(String),
    #[error("integration unstable at t = {time}: trace deviates by {deviation:e}")]
    StepUnstable { time: f64, deviation: f64 },
    #[error("invalid propagation window dt = {dt}, t_end = {t_end}")]
    InvalidStep { dt: f64, t_end: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// How to obtain the steady state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Solver {
    NullSpace,
    Evolve { dt: f64, t_end: f64 },
}

impl Solver {
    pub const DEFAULT_DT: f64 = 1e-3;
    pub const DEFAULT_T_END: f64 = 50.0;

    pub fn evolve_default() -> Self {
        Solver::Evolve {
            dt: Self::DEFAULT_DT,
            t_end: Self::DEFAULT_T_END,
        }
    }
}

/// Hermitizes, then normalizes to unit trace, then validates.
fn to_density(mat: ComplexMatrix) -> Result<DensityMatrix, SteadyError> {
    let herm = mat.hermitian_part();
    let tr = herm.trace().re;
    if tr.abs() == 0.0 || !tr.is_finite() {
        return Err(SteadyError::UnphysicalState(format!("trace {tr}")));
    }
    DensityMatrix::new(herm.scale_real(1.0 / tr)).map_err(|e| match e {
        LinalgError::NotDensityMatrix(msg) => SteadyError::UnphysicalState(msg),
        other => other.into(),
    })
}

pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix, SteadyError> {
    let v = null_vector(&l.mat).map_err(|e| match e {
        LinalgError::DegenerateNullSpace { multiplicity } => {
            SteadyError::DegenerateSteadyState { multiplicity }
        }
        other => other.into(),
    })?;
    to_density(unvec(&v, l.dim())?)
}

/// `‖L vec(ρ)‖₂`.
pub fn residual(l: &Liouvillian, rho: &DensityMatrix) -> f64 {
    vec_norm(&l.mat.mul_vec(&vec(rho.matrix())))
}

/// Integrates `d vec(ρ)/dt = L vec(ρ)` with classical RK4 from `rho0` to
/// `t_end`. The step is shrunk slightly if `t_end` is not a multiple of `dt`.
pub fn propagate(
    rho0: &DensityMatrix,
    l: &Liouvillian,
    dt: f64,
    t_end: f64,
) -> Result<DensityMatrix, SteadyError> {
    if dt.is_nan() || dt <= 0.0 || t_end.is_nan() || t_end < dt || !t_end.is_finite() {
        return Err(SteadyError::InvalidStep { dt, t_end });
    }
    if rho0.dim() != l.dim() {
        return Err(LinalgError::DimensionMismatch {
            expected: format!("{}x{} state", l.dim(), l.dim()),
            got: format!("{}x{}", rho0.dim(), rho0.dim()),
        }
        .into());
    }
    let steps = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    let h = t_end / steps as f64;
    let dim = l.dim();
    let mut y = vec(rho0.matrix());
    let axpy = |y: &[C64], k: &[C64], a: f64| -> Vec<C64> {
        y.iter().zip(k).map(|(yi, ki)| yi + ki * a).collect()
    };

    for step in 1..=steps {
        let k1 = l.mat.mul_vec(&y);
        let k2 = l.mat.mul_vec(&axpy(&y, &k1, h / 2.0));
        let k3 = l.mat.mul_vec(&axpy(&y, &k2, h / 2.0));
        let k4 = l.mat.mul_vec(&axpy(&y, &k3, h));
        for i in 0..y.len() {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        let trace: C64 = (0..dim).map(|i| y[i * dim + i]).sum();
        let deviation = (trace - C64::new(1.0, 0.0)).norm();
        if deviation > 1e-3 || !deviation.is_finite() {
            return Err(SteadyError::StepUnstable {
                time: step as f64 * h,
                deviation,
            });
        }
    }

    let mat = unvec(&y, dim)?;
    let drift = (mat.trace() - C64::new(1.0, 0.0)).norm();
    if drift > 1e-8 {
        return Err(SteadyError::StepUnstable {
            time: t_end,
            deviation: drift,
        });
    }
    to_density(mat)
}

/// Steady state by the chosen route. Propagation starts from `I/4`.
pub fn solve(l: &Liouvillian, solver: Solver) -> Result<DensityMatrix, SteadyError> {
    match solver {
        Solver::NullSpace => steady_state(l),
        Solver::Evolve { dt, t_end } => {
            propagate(&DensityMatrix::maximally_mixed(l.dim()), l, dt, t_end)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    /// Singular values of L at or below `1e-8 · ‖L‖₂`.
    pub null_dim: usize,
    /// `−max Re λ` over eigenvalues with `|λ| > 1e-8`; zero if there are none.
    pub spectral_gap: f64,
}

pub fn uniqueness_report(l: &Liouvillian) -> UniquenessReport {
    let s = singular_values(&l.mat);
    let cutoff = NULL_TOL * s[0];
    let null_dim = s.iter().filter(|&&x| x <= cutoff).count();
    let slowest = eigenvalues(&l.mat)
        .into_iter()
        .filter(|z| z.norm() > 1e-8)
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let spectral_gap = if slowest.is_finite() { -slowest } else { 0.0 };
    UniquenessReport {
        null_dim,
        spectral_gap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SystemParams;
    use approx::assert_abs_diff_eq;

    fn undriven() -> SystemParams {
        SystemParams {
            epsilon: 0.0,
            g: 0.0,
            ..SystemParams::resonant()
        }
    }

    /// Two independent spins, each balancing gain γᵍ/2 against loss γᵈ/2,
    /// so p_e/p_g = γᵍ/γᵈ = 10 on each site.
    fn rate_balance_oracle() -> ComplexMatrix {
        let single = [10.0 / 11.0, 1.0 / 11.0];
        let diag: Vec<f64> = single
            .iter()
            .flat_map(|a| single.iter().map(move |b| a * b))
            .collect();
        ComplexMatrix::from_real_diag(&diag)
    }

    #[test]
    fn undriven_steady_state_is_product_of_rate_balance_states() {
        let rho = steady_state(&Liouvillian::new(undriven())).unwrap();
        let expected =
            ComplexMatrix::from_real_diag(&[100.0, 10.0, 10.0, 1.0]).scale_real(1.0 / 121.0);
        assert!(rate_balance_oracle().max_abs_diff(&expected) <= 1e-15);
        assert!(rho.matrix().max_abs_diff(&expected) <= 1e-12);
    }

    #[test]
    fn single_spin_null_vector_matches_rate_balance() {
        // The 4x4 single-spin generator: gain 10, loss 1, no drive.
        use crate::model::{dissipator_super, pauli, Pauli};
        let l = &dissipator_super(&pauli(Pauli::Plus))
            .unwrap()
            .scale_real(5.0)
            + &dissipator_super(&pauli(Pauli::Minus))
                .unwrap()
                .scale_real(0.5);
        let v = null_vector(&l).unwrap();
        let rho = unvec(&v, 2).unwrap();
        let rho = rho.scale(C64::new(1.0, 0.0) / rho.trace());
        let expected = ComplexMatrix::from_real_diag(&[10.0 / 11.0, 1.0 / 11.0]);
        assert!(rho.max_abs_diff(&expected) <= 1e-14);
        // Column stacking of diag(a, b) is (a, 0, 0, b).
        assert!(v[1].norm() < 1e-15 && v[2].norm() < 1e-15);
    }

    #[test]
    fn steady_state_has_unit_trace_and_is_stationary() {
        for p in [SystemParams::resonant(), SystemParams::detuned()] {
            let l = Liouvillian::new(p);
            let rho = steady_state(&l).unwrap();
            assert_abs_diff_eq!(rho.matrix().trace().re, 1.0, epsilon = 1e-14);
            assert!(residual(&l, &rho) <= 1e-9);
            assert!(rho.min_eigenvalue() >= -1e-9);
            assert!(rho.purity() < 1.0);
        }
    }

    #[test]
    fn zero_generator_is_degenerate() {
        let l = Liouvillian::new(SystemParams::zero());
        assert_eq!(
            steady_state(&l),
            Err(SteadyError::DegenerateSteadyState { multiplicity: 16 })
        );
        assert_eq!(uniqueness_report(&l).null_dim, 16);
    }

    #[test]
    fn propagate_with_zero_generator_is_identity() {
        let l = Liouvillian::new(SystemParams::zero());
        let rho0 = DensityMatrix::pure(&[
            C64::new(0.5, 0.0),
            C64::new(0.0, 0.5),
            C64::new(0.5, 0.0),
            C64::new(0.5, 0.0),
        ])
        .unwrap();
        let out = propagate(&rho0, &l, 0.1, 1.0).unwrap();
        assert!(out.matrix().max_abs_diff(rho0.matrix()) <= 1e-15);
    }

    #[test]
    fn propagate_relaxes_monotonically_toward_rate_balance() {
        let l = Liouvillian::new(undriven());
        let mut rho = DensityMatrix::pure(&[
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        ])
        .unwrap();
        // Excited population of B: ρ_ee,ee + ρ_ge,ge.
        let excited_b = |r: &DensityMatrix| r.get(0, 0).re + r.get(2, 2).re;
        let target = 10.0 / 11.0;
        let mut last = excited_b(&rho);
        for _ in 0..40 {
            rho = propagate(&rho, &l, 1e-3, 0.05).unwrap();
            let now = excited_b(&rho);
            assert!(now >= last - 1e-15 && now <= target + 1e-12);
            last = now;
        }
        assert!((last - target).abs() < 1e-4);
    }

    #[test]
    fn propagation_agrees_with_null_space() {
        let l = Liouvillian::new(SystemParams::resonant());
        let direct = steady_state(&l).unwrap();
        let evolved = solve(&l, Solver::evolve_default()).unwrap();
        assert!(direct.matrix().max_abs_diff(evolved.matrix()) <= 1e-8);
    }

    #[test]
    fn oversized_step_is_reported() {
        let l = Liouvillian::new(SystemParams {
            epsilon: 30.0,
            g: 30.0,
            ..SystemParams::resonant()
        });
        let err = propagate(&DensityMatrix::maximally_mixed(4), &l, 1.0, 50.0).unwrap_err();
        assert!(matches!(err, SteadyError::StepUnstable { .. }));
        assert!(matches!(
            propagate(&DensityMatrix::maximally_mixed(4), &l, 0.0, 1.0),
            Err(SteadyError::InvalidStep { .. })
        ));
    }

    #[test]
    fn resonant_steady_state_is_unique_with_a_gap() {
        let r = uniqueness_report(&Liouvillian::new(SystemParams::resonant()));
        assert_eq!(r.null_dim, 1);
        assert!(r.spectral_gap > 1.0);
    }
}
