//! Invariant suite behind `qsync check`.

use std::fmt::Write as _;

use qsync::io::RunConfig;
use qsync::linalg::{eigenvalues, vec, ComplexMatrix, DensityMatrix, C64};
use qsync::model::Liouvillian;
use qsync::phase::{
    partial_trace_a, phi_grid, q_grid, s_distribution, s_phi, s_phi_closed_form, wrap_phi, Baseline,
};
use qsync::steady::{propagate, residual, steady_state, uniqueness_report};

pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Default)]
pub struct CheckReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl CheckReport {
    fn record(&mut self, name: &'static str, passed: bool, detail: String) {
        self.outcomes.push(CheckOutcome {
            name,
            passed,
            detail,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| !o.passed).count()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for o in &self.outcomes {
            let tag = if o.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{tag} {}: {}", o.name, o.detail);
        }
        let _ = writeln!(
            out,
            "{} of {} checks passed",
            self.outcomes.len() - self.failures(),
            self.outcomes.len()
        );
        out
    }
}

pub fn run(cfg: &RunConfig) -> CheckReport {
    let mut report = CheckReport::default();
    let l = Liouvillian::new(cfg.params);

    let trace_row = vec(&ComplexMatrix::identity(4));
    let left_null = (0..16)
        .map(|j| {
            (0..16)
                .map(|i| trace_row[i].conj() * l.mat[(i, j)])
                .sum::<C64>()
                .norm()
        })
        .fold(0.0, f64::max);
    report.record(
        "trace preservation",
        left_null <= 1e-10,
        format!("max |vec(I)† L| = {left_null:e}"),
    );

    let max_re = eigenvalues(&l.mat)
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    report.record(
        "spectral stability",
        max_re <= 1e-10,
        format!("max Re λ = {max_re:e}"),
    );

    let uniq = uniqueness_report(&l);
    report.record(
        "unique steady state",
        uniq.null_dim == 1 && uniq.spectral_gap > 0.0,
        format!("null_dim = {}, gap = {}", uniq.null_dim, uniq.spectral_gap),
    );

    let rho = match steady_state(&l) {
        Ok(rho) => rho,
        Err(e) => {
            report.record("steady state", false, e.to_string());
            return report;
        }
    };
    let m = rho.matrix();
    let herm = m.hermitian_deviation();
    let tr = (m.trace() - C64::new(1.0, 0.0)).norm();
    let min_eig = rho.min_eigenvalue();
    let res = residual(&l, &rho);
    report.record(
        "steady state is a density matrix",
        herm <= 1e-10 && tr <= 1e-10 && min_eig >= -1e-9,
        format!("hermiticity {herm:e}, trace error {tr:e}, min eigenvalue {min_eig:e}"),
    );
    report.record(
        "steady residual",
        res <= 1e-9,
        format!("‖L vec ρ‖ = {res:e}"),
    );
    let purity = rho.purity();
    report.record(
        "mixed steady state",
        purity < 1.0,
        format!("tr ρ² = {purity}"),
    );

    let starts = [
        DensityMatrix::maximally_mixed(4),
        DensityMatrix::pure(&[
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        ])
        .expect("basis state"),
    ];
    let mut worst: f64 = 0.0;
    let mut failure = None;
    for start in &starts {
        match propagate(start, &l, cfg.dt, cfg.t_end) {
            Ok(evolved) => worst = worst.max(evolved.matrix().max_abs_diff(m)),
            Err(e) => failure = Some(e.to_string()),
        }
    }
    match failure {
        Some(msg) => report.record("propagation agrees with null space", false, msg),
        None => report.record(
            "propagation agrees with null space",
            worst <= 1e-6,
            format!("max elementwise difference {worst:e}"),
        ),
    }

    let rho_b = match partial_trace_a(&rho) {
        Ok(r) => r,
        Err(e) => {
            report.record("reduced state", false, e.to_string());
            return report;
        }
    };
    match q_grid(&rho_b, cfg.n_theta, cfg.n_phi) {
        Ok(grid) => {
            let norm = grid.normalization();
            report.record(
                "Q normalization",
                (norm - 1.0).abs() <= 1e-6,
                format!("∫Q dΩ = {norm}"),
            );
        }
        Err(e) => report.record("Q normalization", false, e.to_string()),
    }

    let mut worst: f64 = 0.0;
    for phi in phi_grid(cfg.n_phi) {
        match s_phi(&rho_b, phi, cfg.n_theta, Baseline::Centered) {
            Ok(s) => worst = worst.max((s - s_phi_closed_form(&rho_b, phi)).abs()),
            Err(_) => worst = f64::INFINITY,
        }
    }
    report.record(
        "S(φ) quadrature matches closed form",
        worst <= 1e-9,
        format!("max deviation {worst:e}"),
    );

    match s_distribution(&rho_b, cfg.n_phi, cfg.n_theta, Baseline::Centered) {
        Ok(d) => {
            let coherence = rho_b.get(0, 1);
            let peak_err = (d.s_max - coherence.norm() / 4.0).abs();
            let phase_err = wrap_phi(d.phi_star + coherence.arg()).abs();
            let locked = coherence.norm() > 1e-12;
            report.record(
                "S peak equals |ρ_eg|/4",
                peak_err <= 1e-9,
                format!("s_max = {}, |ρ_eg|/4 = {}", d.s_max, coherence.norm() / 4.0),
            );
            report.record(
                "locking phase equals −arg ρ_eg",
                !locked || phase_err <= d.grid_step() + 1e-12,
                format!(
                    "phi_star = {}, −arg ρ_eg = {}",
                    d.phi_star,
                    -coherence.arg()
                ),
            );
            let integral = d.integral();
            report.record(
                "centered S has zero mean",
                integral.abs() <= 1e-9,
                format!("Σ S Δφ = {integral:e}"),
            );
        }
        Err(e) => report.record("S distribution", false, e.to_string()),
    }
    report
}
