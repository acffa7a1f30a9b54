//! Rotating-frame Hamiltonian and Lindblad generator for two coupled
//! two-level systems, subsystem A driven, subsystem B coupled to A only.
//!
//! Single-spin basis: index 0 = |e⟩ (σz = +1), index 1 = |g⟩ (σz = −1).
//! Composite basis: |e_A e_B⟩, |e_A g_B⟩, |g_A e_B⟩, |g_A g_B⟩.
//! All rates and frequencies are in units of the B loss rate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{kron, ComplexMatrix, LinalgError, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("operator must be 2x2, got {rows}x{cols}")]
    NotSingleSpin { rows: usize, cols: usize },
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Physical parameters of the rotating-frame master equation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Detuning of A from the drive, ω_A − ω.
    pub delta1: f64,
    /// Detuning of B from the drive, ω_B − ω.
    pub delta2: f64,
    /// Drive strength on A.
    pub epsilon: f64,
    /// A–B exchange coupling.
    pub g: f64,
    pub gamma_a_gain: f64,
    pub gamma_a_loss: f64,
    pub gamma_b_gain: f64,
    pub gamma_b_loss: f64,
    /// Lab-frame frequencies, recorded for provenance only.
    pub omega_a: Option<f64>,
    pub omega_b: Option<f64>,
    pub omega: Option<f64>,
}

impl SystemParams {
    /// Resonant drive, ε = 5, g = 8, gain/loss ratio 10 on both spins.
    pub fn resonant() -> Self {
        Self {
            delta1: 0.0,
            delta2: 0.0,
            epsilon: 5.0,
            g: 8.0,
            gamma_a_gain: 10.0,
            gamma_a_loss: 1.0,
            gamma_b_gain: 10.0,
            gamma_b_loss: 1.0,
            omega_a: None,
            omega_b: None,
            omega: None,
        }
    }

    /// As [`SystemParams::resonant`] with Δ₁ = 3, Δ₂ = 5.
    pub fn detuned() -> Self {
        Self {
            delta1: 3.0,
            delta2: 5.0,
            ..Self::resonant()
        }
    }

    /// Every rate, detuning and coupling zero.
    pub fn zero() -> Self {
        Self {
            delta1: 0.0,
            delta2: 0.0,
            epsilon: 0.0,
            g: 0.0,
            gamma_a_gain: 0.0,
            gamma_a_loss: 0.0,
            gamma_b_gain: 0.0,
            gamma_b_loss: 0.0,
            omega_a: None,
            omega_b: None,
            omega: None,
        }
    }

    /// Checks the physical invariants. Construction of operators does not
    /// require this, so degenerate parameter sets can still be studied.
    pub fn validate(&self) -> Result<(), ModelError> {
        let fields = [
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("epsilon", self.epsilon),
            ("g", self.g),
            ("gamma_a_gain", self.gamma_a_gain),
            ("gamma_a_loss", self.gamma_a_loss),
            ("gamma_b_gain", self.gamma_b_gain),
            ("gamma_b_loss", self.gamma_b_loss),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(ModelError::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite",
                });
            }
        }
        for (name, value) in &fields[4..] {
            if *value < 0.0 {
                return Err(ModelError::InvalidParameter {
                    name,
                    value: *value,
                    reason: "rates must be non-negative",
                });
            }
        }
        if self.epsilon < 0.0 {
            return Err(ModelError::InvalidParameter {
                name: "epsilon",
                value: self.epsilon,
                reason: "drive strength must be non-negative",
            });
        }
        if self.gamma_b_loss <= 0.0 {
            return Err(ModelError::InvalidParameter {
                name: "gamma_b_loss",
                value: self.gamma_b_loss,
                reason: "the B loss rate is the unit and must be positive",
            });
        }
        if let (Some(wa), Some(wb), Some(w)) = (self.omega_a, self.omega_b, self.omega) {
            if (self.delta1 - (wa - w)).abs() > 1e-12 {
                return Err(ModelError::InvalidParameter {
                    name: "delta1",
                    value: self.delta1,
                    reason: "inconsistent with omega_a - omega",
                });
            }
            if (self.delta2 - (wb - w)).abs() > 1e-12 {
                return Err(ModelError::InvalidParameter {
                    name: "delta2",
                    value: self.delta2,
                    reason: "inconsistent with omega_b - omega",
                });
            }
        }
        Ok(())
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::resonant()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

pub fn pauli(which: Pauli) -> ComplexMatrix {
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let rows = match which {
        Pauli::X => [[o, one], [one, o]],
        Pauli::Y => [[o, -i], [i, o]],
        Pauli::Z => [[one, o], [o, -one]],
        // σ⁺|g⟩ = |e⟩
        Pauli::Plus => [[o, one], [o, o]],
        Pauli::Minus => [[o, o], [one, o]],
    };
    ComplexMatrix::from_rows(&rows.map(|r| r.to_vec()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Site {
    A,
    B,
}

/// Lifts a single-spin operator onto the composite space.
pub fn embed(op: &ComplexMatrix, site: Site) -> Result<ComplexMatrix, ModelError> {
    if op.rows() != 2 || op.cols() != 2 {
        return Err(ModelError::NotSingleSpin {
            rows: op.rows(),
            cols: op.cols(),
        });
    }
    let id = ComplexMatrix::identity(2);
    Ok(match site {
        Site::A => kron(op, &id),
        Site::B => kron(&id, op),
    })
}

fn embedded(which: Pauli, site: Site) -> ComplexMatrix {
    embed(&pauli(which), site).expect("Pauli matrices are 2x2")
}

/// H = Δ₁/2 σz_A + Δ₂/2 σz_B + ε/2 σy_A + i g/2 (σ⁺_A σ⁻_B − σ⁺_B σ⁻_A).
pub fn hamiltonian(p: &SystemParams) -> ComplexMatrix {
    let detuning = &embedded(Pauli::Z, Site::A).scale_real(p.delta1 / 2.0)
        + &embedded(Pauli::Z, Site::B).scale_real(p.delta2 / 2.0);
    let drive = embedded(Pauli::Y, Site::A).scale_real(p.epsilon / 2.0);
    let exchange = &(&embedded(Pauli::Plus, Site::A) * &embedded(Pauli::Minus, Site::B))
        - &(&embedded(Pauli::Plus, Site::B) * &embedded(Pauli::Minus, Site::A));
    let coupling = exchange.scale(C64::new(0.0, p.g / 2.0));
    &(&detuning + &drive) + &coupling
}

/// Superoperator of `ρ ↦ −i[H, ρ]` under column stacking.
pub fn commutator_super(h: &ComplexMatrix) -> ComplexMatrix {
    let id = ComplexMatrix::identity(h.rows());
    (&kron(&id, h) - &kron(&h.transpose(), &id)).scale(C64::new(0.0, -1.0))
}

/// Superoperator of `D[O]ρ = OρO† − ½{O†O, ρ}` under column stacking.
pub fn dissipator_super(o: &ComplexMatrix) -> Result<ComplexMatrix, ModelError> {
    if !o.is_square() {
        return Err(LinalgError::DimensionMismatch {
            expected: "square operator".into(),
            got: format!("{}x{}", o.rows(), o.cols()),
        }
        .into());
    }
    let id = ComplexMatrix::identity(o.rows());
    let odo = &o.adjoint() * o;
    let jump = kron(&o.conj(), o);
    let anti = &kron(&id, &odo) + &kron(&odo.transpose(), &id);
    Ok(&jump - &anti.scale_real(0.5))
}

/// Generator of the master equation acting on column-stacked 4×4 states.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    pub mat: ComplexMatrix,
    pub params: SystemParams,
}

impl Liouvillian {
    pub const DIM: usize = 4;

    pub fn new(params: SystemParams) -> Self {
        let mut mat = commutator_super(&hamiltonian(&params));
        let z = pauli(Pauli::Z);
        // Jump operators σ⁺σz and σ⁻σz, as written in the model.
        let gain_op = &pauli(Pauli::Plus) * &z;
        let loss_op = &pauli(Pauli::Minus) * &z;
        let channels = [
            (Site::A, &gain_op, params.gamma_a_gain),
            (Site::A, &loss_op, params.gamma_a_loss),
            (Site::B, &gain_op, params.gamma_b_gain),
            (Site::B, &loss_op, params.gamma_b_loss),
        ];
        for (site, op, rate) in channels {
            if rate == 0.0 {
                continue;
            }
            let lifted = embed(op, site).expect("2x2 jump operator");
            let d = dissipator_super(&lifted).expect("square jump operator");
            mat = &mat + &d.scale_real(rate / 2.0);
        }
        Self { mat, params }
    }

    pub fn dim(&self) -> usize {
        Self::DIM
    }

    /// Applies the generator to a 4×4 matrix.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let out = self.mat.mul_vec(&crate::linalg::vec(rho));
        crate::linalg::unvec(&out, Self::DIM).expect("16-vector")
    }
}

pub fn liouvillian(p: &SystemParams) -> Liouvillian {
    Liouvillian::new(*p)
}
