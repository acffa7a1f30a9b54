//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints its `criterion N: PASS|FAIL` line; the process fails if
//! any criterion does.
//!
//! Run with `cargo test -p qsync-cli --test acceptance`.

use std::f64::consts::PI;
use std::fs;
use std::process::Command;
use std::process::ExitCode;
use std::sync::{Mutex, OnceLock};
use std::time::{Duration, Instant};

use qsync::linalg::{ComplexMatrix, DensityMatrix, C64};
use qsync::model::{Liouvillian, SystemParams};
use qsync::phase::{
    partial_trace_a, q_grid, s_distribution, s_phi, s_phi_closed_form, wrap_phi, Baseline,
};
use qsync::steady::{propagate, residual, steady_state, uniqueness_report};
use qsync::sweep::{
    arnold_tongue, run_sweep, tongue_widths, AxisRange, SweepParam, SweepResult, SweepSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

static VERDICTS: Mutex<Vec<(u32, bool)>> = Mutex::new(Vec::new());

fn verdict(n: u32, passed: bool, elapsed: Duration, budget: Duration, detail: &str) {
    let in_budget = elapsed <= budget;
    let ok = passed && in_budget;
    println!(
        "criterion {n}: {} ({detail}; {:.2}s of {}s budget{})",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs(),
        if in_budget { "" } else { ", over budget" },
    );
    VERDICTS.lock().unwrap().push((n, ok));
}

fn reduced(p: SystemParams) -> DensityMatrix {
    partial_trace_a(&steady_state(&Liouvillian::new(p)).unwrap()).unwrap()
}

fn epsilon_tongue() -> &'static (SweepResult, Duration) {
    static CELL: OnceLock<(SweepResult, Duration)> = OnceLock::new();
    CELL.get_or_init(|| {
        let start = Instant::now();
        let spec = SweepSpec::tongue(SystemParams::resonant(), SweepParam::Epsilon);
        (arnold_tongue(&spec).unwrap(), start.elapsed())
    })
}

fn g_tongue() -> &'static (SweepResult, Duration) {
    static CELL: OnceLock<(SweepResult, Duration)> = OnceLock::new();
    CELL.get_or_init(|| {
        let start = Instant::now();
        let spec = SweepSpec::tongue(SystemParams::resonant(), SweepParam::G);
        (arnold_tongue(&spec).unwrap(), start.elapsed())
    })
}

fn detuning_map() -> &'static (SweepResult, Duration) {
    static CELL: OnceLock<(SweepResult, Duration)> = OnceLock::new();
    CELL.get_or_init(|| {
        let start = Instant::now();
        let spec = SweepSpec::phase_map(SystemParams::resonant(), SweepParam::Delta2);
        (run_sweep(&spec).unwrap(), start.elapsed())
    })
}

fn criterion_01_limit_cycle() {
    let start = Instant::now();
    let rho_b = reduced(SystemParams {
        epsilon: 0.0,
        ..SystemParams::resonant()
    });
    let grid = q_grid(&rho_b, 181, 360).unwrap();
    let spread = grid.phi_spread();
    let oracle_err = grid
        .thetas
        .iter()
        .zip(&grid.values)
        .flat_map(|(t, row)| {
            let q = (11.0 + 9.0 * t.cos()) / (44.0 * PI);
            row.iter().map(move |v| (v - q).abs())
        })
        .fold(0.0, f64::max);
    let norm = grid.normalization();
    verdict(
        1,
        spread <= 1e-12 && oracle_err <= 1e-9 && (norm - 1.0).abs() <= 1e-6,
        start.elapsed(),
        Duration::from_secs(1),
        &format!("phi spread {spread:e}, oracle error {oracle_err:e}, ∫Q = {norm}"),
    );
}

fn criterion_02_resonant_locking() {
    let start = Instant::now();
    let rho_b = reduced(SystemParams::resonant());
    let grid = q_grid(&rho_b, 181, 360).unwrap();
    let (_, j) = grid.argmax();
    let step = 2.0 * PI / 360.0;
    let phi_at_max = grid.phis[j];
    let d = s_distribution(&rho_b, 360, 181, Baseline::Centered).unwrap();
    let target = rho_b.get(0, 1).norm() / 4.0;
    let peak_err = (d.s_max - target).abs();
    verdict(
        2,
        phi_at_max.abs() <= step && peak_err <= 1e-9,
        start.elapsed(),
        Duration::from_secs(1),
        &format!(
            "Q max at phi = {phi_at_max}, s_max = {}, |rho_eg|/4 = {target}",
            d.s_max
        ),
    );
}

fn criterion_03_detuned_locking() {
    let start = Instant::now();
    let rho_b = reduced(SystemParams::detuned());
    let d = s_distribution(&rho_b, 360, 181, Baseline::Centered).unwrap();
    let expected = -rho_b.get(0, 1).arg();
    let err = wrap_phi(d.phi_star - expected).abs();
    verdict(
        3,
        d.phi_star != 0.0 && err <= d.grid_step(),
        start.elapsed(),
        Duration::from_secs(1),
        &format!("phi_star = {}, -arg rho_eg = {expected}", d.phi_star),
    );
}

fn criterion_04_detuning_map() {
    let (map, elapsed) = detuning_map();
    let step = 2.0 * PI / map.spec.n_phi as f64;
    let (i, j, _) = map.argmax().unwrap();
    let (d2_max, phi_max) = (map.axis1_values[i], map.axis2_values[j]);
    let d2_step = map.axis1_values[1] - map.axis1_values[0];
    let at_origin = d2_max.abs() <= d2_step && phi_max.abs() <= step;

    // Row-wise locking phase: grid argmax of S(φ), as a signed angle.
    let row_phase = |row: &[f64]| {
        let k = (0..row.len())
            .max_by(|&a, &b| row[a].total_cmp(&row[b]).then(b.cmp(&a)))
            .unwrap();
        map.axis2_values[k]
    };
    let mut flips = true;
    let mut nonzero = 0;
    for (d2, row) in map.axis1_values.iter().zip(&map.values) {
        let phi = row_phase(row);
        if *d2 != 0.0 && phi != 0.0 {
            nonzero += 1;
            flips &= phi.signum() == d2.signum();
        }
    }
    verdict(
        4,
        at_origin && flips && nonzero > 0,
        *elapsed,
        Duration::from_secs(30),
        &format!(
            "global max at delta2 = {d2_max}, phi = {phi_max}; {nonzero} detuned rows, sign(phi_star) follows sign(delta2): {flips}"
        ),
    );
}

/// Strictly rising up to an interior maximum, then strictly falling.
fn interior_peak(values: &[f64]) -> Option<usize> {
    let k = (0..values.len()).max_by(|&a, &b| values[a].total_cmp(&values[b]))?;
    let rises = values[..=k].windows(2).all(|w| w[1] > w[0]);
    let falls = values[k..].windows(2).all(|w| w[1] < w[0]);
    (k > 0 && k + 1 < values.len() && rises && falls).then_some(k)
}

fn strength_response(param: SweepParam) -> (Vec<f64>, Vec<f64>) {
    let strengths = AxisRange::new(1.0, 30.0, 59).values();
    let peaks = strengths
        .iter()
        .map(|&x| {
            let mut p = SystemParams::resonant();
            param.apply(&mut p, x);
            s_distribution(&reduced(p), 360, 181, Baseline::Centered)
                .unwrap()
                .s_max
        })
        .collect();
    (strengths, peaks)
}

fn criterion_05_non_monotone_response() {
    let start = Instant::now();
    let (eps, eps_peaks) = strength_response(SweepParam::Epsilon);
    let (g, g_peaks) = strength_response(SweepParam::G);
    let eps_k = interior_peak(&eps_peaks);
    let g_k = interior_peak(&g_peaks);
    verdict(
        5,
        eps_k.is_some() && g_k.is_some(),
        start.elapsed(),
        Duration::from_secs(30),
        &format!(
            "epsilon peak at {:?}, g peak at {:?}",
            eps_k.map(|k| eps[k]),
            g_k.map(|k| g[k])
        ),
    );
}

fn criterion_06_edge_law() {
    let start = Instant::now();
    let (eps_map, _) = epsilon_tongue();
    let (g_map, _) = g_tongue();
    let mut worst: f64 = 0.0;
    let mut cells = 0;
    for map in [eps_map, g_map] {
        for (x, row) in map.axis1_values.iter().zip(&map.values) {
            if *x == 0.0 {
                cells += row.len();
                worst = row.iter().fold(worst, |w, v| w.max(*v));
            }
        }
    }
    verdict(
        6,
        cells == 122 && worst <= 1e-10,
        start.elapsed(),
        Duration::from_secs(60),
        &format!("{cells} edge cells, largest max S = {worst:e}"),
    );
}

fn criterion_07_tongue_widening() {
    let (map, elapsed) = epsilon_tongue();
    let (_, _, top) = map.argmax().unwrap();
    let widths = tongue_widths(map, top / 2.0);
    let step = map.axis2_values[1] - map.axis2_values[0];
    let first_drop = widths.windows(2).position(|w| w[1] < w[0]);
    let detail = match first_drop {
        None => format!("widths non-decreasing, final width {}", widths[widths.len() - 1]),
        Some(k) => format!(
            "width falls from {} to {} samples (delta2 span {:.3} to {:.3}) at epsilon = {:.4}; widest {} at epsilon = {:.4}; final {}",
            widths[k],
            widths[k + 1],
            widths[k].saturating_sub(1) as f64 * step,
            widths[k + 1].saturating_sub(1) as f64 * step,
            map.axis1_values[k + 1],
            widths.iter().max().unwrap(),
            map.axis1_values[widths.iter().enumerate().max_by_key(|(_, w)| **w).unwrap().0],
            widths[widths.len() - 1],
        ),
    };
    verdict(
        7,
        first_drop.is_none(),
        *elapsed,
        Duration::from_secs(60),
        &detail,
    );
}

fn figure_draw(rng: &mut ChaCha8Rng) -> SystemParams {
    SystemParams {
        delta2: rng.random_range(-10.0..10.0),
        epsilon: rng.random_range(0.0..30.0),
        g: rng.random_range(0.0..30.0),
        ..SystemParams::resonant()
    }
}

fn criterion_08_solver_cross_validation() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut physical = true;
    for _ in 0..20 {
        let l = Liouvillian::new(figure_draw(&mut rng));
        let direct = steady_state(&l).unwrap();
        let evolved = propagate(&DensityMatrix::maximally_mixed(4), &l, 1e-3, 50.0).unwrap();
        worst = worst.max(direct.matrix().max_abs_diff(evolved.matrix()));
        for rho in [&direct, &evolved] {
            let m = rho.matrix();
            physical &= (m.trace().re - 1.0).abs() <= 1e-10
                && m.hermitian_deviation() <= 1e-10
                && rho.min_eigenvalue() >= -1e-9;
        }
        physical &= residual(&l, &direct) <= 1e-9;
    }

    // Every point of every figure grid: the single-state figures, the
    // three S(φ) maps, and both tongues.
    let mut points = 0;
    let mut non_unique = 0;
    let mut count = |p: SystemParams| {
        points += 1;
        if uniqueness_report(&Liouvillian::new(p)).null_dim != 1 {
            non_unique += 1;
        }
    };
    count(SystemParams {
        epsilon: 0.0,
        ..SystemParams::resonant()
    });
    count(SystemParams::resonant());
    count(SystemParams::detuned());
    for axis in [SweepParam::Delta2, SweepParam::Epsilon, SweepParam::G] {
        let spec = SweepSpec::phase_map(SystemParams::resonant(), axis);
        for x in spec.axis1_values() {
            let mut p = spec.base;
            axis.apply(&mut p, x);
            count(p);
        }
    }
    let flagged = epsilon_tongue().0.flagged().len() + g_tongue().0.flagged().len();
    let tongue_points = 2 * 61 * 61;
    verdict(
        8,
        worst <= 1e-6 && physical && non_unique == 0 && flagged == 0,
        start.elapsed(),
        Duration::from_secs(60),
        &format!(
            "max |null - propagated| = {worst:e}, invariants hold: {physical}, non-unique points {} of {}",
            non_unique + flagged,
            points + tongue_points
        ),
    );
}

fn random_qubit(rng: &mut ChaCha8Rng) -> DensityMatrix {
    let data: Vec<C64> = (0..4)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let a = ComplexMatrix::new(2, 2, data).unwrap();
    let m = &a * &a.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr).hermitian_part()).unwrap()
}

fn criterion_09_measure_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let rho = random_qubit(&mut rng);
        for _ in 0..8 {
            let phi = rng.random_range(-PI..PI);
            let s = s_phi(&rho, phi, 181, Baseline::Centered).unwrap();
            worst = worst.max((s - s_phi_closed_form(&rho, phi)).abs());
        }
    }
    let mut flat_err: f64 = 0.0;
    for _ in 0..20 {
        let p: f64 = rng.random_range(0.0..1.0);
        let rho = DensityMatrix::new(ComplexMatrix::from_real_diag(&[p, 1.0 - p])).unwrap();
        let d = s_distribution(&rho, 360, 181, Baseline::Paper).unwrap();
        for s in &d.s_values {
            flat_err = flat_err.max((s - 1.0 / (4.0 * PI)).abs());
        }
    }
    verdict(
        9,
        worst <= 1e-9 && flat_err <= 1e-9,
        start.elapsed(),
        Duration::from_secs(5),
        &format!("quadrature vs closed form {worst:e}, paper baseline flat error {flat_err:e}"),
    );
}

fn criterion_10_determinism() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let runs: [(&str, &[&str]); 5] = [
        ("detuning map", &["sweep"]),
        (
            "epsilon response",
            &["sweep", "--set", "axis1=epsilon", "--set", "axis1_min=1"],
        ),
        (
            "g response",
            &[
                "sweep",
                "--set",
                "axis1=g",
                "--set",
                "axis1_min=1",
                "--set",
                "epsilon=5",
            ],
        ),
        ("epsilon tongue", &["tongue", "--set", "axis1=epsilon"]),
        ("g tongue", &["tongue", "--set", "axis1=g"]),
    ];
    let mut mismatched = Vec::new();
    for (name, args) in runs {
        let mut outputs = Vec::new();
        for (k, jobs) in ["1", "8", "8"].iter().enumerate() {
            let csv = dir.path().join(format!("{k}.csv"));
            let ppm = dir.path().join(format!("{k}.ppm"));
            let status = Command::new(env!("CARGO_BIN_EXE_qsync"))
                .args(args)
                .args(["--jobs", jobs, "--out"])
                .arg(&csv)
                .arg("--heatmap")
                .arg(&ppm)
                .status()
                .unwrap();
            assert!(status.success(), "{name} exited with {status}");
            outputs.push((fs::read(&csv).unwrap(), fs::read(&ppm).unwrap()));
        }
        if !outputs.windows(2).all(|w| w[0] == w[1]) {
            mismatched.push(name);
        }
    }
    verdict(
        10,
        mismatched.is_empty(),
        start.elapsed(),
        Duration::from_secs(300),
        &format!("jobs 1, 8 and a repeat over 5 outputs; mismatches {mismatched:?}"),
    );
}

fn main() -> ExitCode {
    let criteria: [fn(); 10] = [
        criterion_01_limit_cycle,
        criterion_02_resonant_locking,
        criterion_03_detuned_locking,
        criterion_04_detuning_map,
        criterion_05_non_monotone_response,
        criterion_06_edge_law,
        criterion_07_tongue_widening,
        criterion_08_solver_cross_validation,
        criterion_09_measure_oracle,
        criterion_10_determinism,
    ];
    for (k, criterion) in criteria.iter().enumerate() {
        if std::panic::catch_unwind(criterion).is_err() {
            let n = k as u32 + 1;
            println!("criterion {n}: FAIL (panicked)");
            VERDICTS.lock().unwrap().push((n, false));
        }
    }
    let verdicts = VERDICTS.lock().unwrap();
    let failed: Vec<u32> = verdicts.iter().filter(|v| !v.1).map(|v| v.0).collect();
    println!(
        "acceptance: {} of {} criteria passed{}",
        verdicts.len() - failed.len(),
        verdicts.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!("; failing: {failed:?}")
        }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
