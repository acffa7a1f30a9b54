use qsync::linalg::{ComplexMatrix, DensityMatrix, C64};
use qsync::model::{Liouvillian, SystemParams};
use qsync::steady::{propagate, residual, steady_state, uniqueness_report, Solver};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn figure_draw(rng: &mut ChaCha8Rng) -> SystemParams {
    SystemParams {
        delta2: rng.random_range(-10.0..10.0),
        epsilon: rng.random_range(0.0..30.0),
        g: rng.random_range(0.0..30.0),
        ..SystemParams::resonant()
    }
}

fn random_state(rng: &mut ChaCha8Rng) -> DensityMatrix {
    let data: Vec<C64> = (0..16)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let a = ComplexMatrix::new(4, 4, data).unwrap();
    let m = &a * &a.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr).hermitian_part()).unwrap()
}

#[test]
fn null_space_and_propagation_agree_on_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let Solver::Evolve { dt, t_end } = Solver::evolve_default() else {
        unreachable!()
    };
    for _ in 0..20 {
        let p = figure_draw(&mut rng);
        let l = Liouvillian::new(p);
        let direct = steady_state(&l).unwrap();
        let evolved = propagate(&DensityMatrix::maximally_mixed(4), &l, dt, t_end).unwrap();
        let diff = direct.matrix().max_abs_diff(evolved.matrix());
        assert!(diff <= 1e-6, "{p:?}: {diff:e}");
    }
}

#[test]
fn propagation_forgets_the_initial_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let l = Liouvillian::new(SystemParams::detuned());
    let reference = steady_state(&l).unwrap();
    for _ in 0..5 {
        let start = random_state(&mut rng);
        let evolved = propagate(&start, &l, 1e-3, 50.0).unwrap();
        assert!(evolved.matrix().max_abs_diff(reference.matrix()) <= 1e-6);
    }
}

#[test]
fn steady_states_are_physical_and_mixed() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..100 {
        let l = Liouvillian::new(figure_draw(&mut rng));
        let rho = steady_state(&l).unwrap();
        assert!(rho.min_eigenvalue() >= -1e-9);
        assert!(rho.matrix().hermitian_deviation() <= 1e-10);
        assert!((rho.matrix().trace().re - 1.0).abs() <= 1e-12);
        assert!(residual(&l, &rho) <= 1e-9);
        let purity = rho.purity();
        assert!(purity < 1.0);
        let report = uniqueness_report(&l);
        assert_eq!(report.null_dim, 1);
        assert!(report.spectral_gap > 0.0);
    }
}

#[test]
fn steady_state_is_bit_reproducible() {
    let l = Liouvillian::new(SystemParams::detuned());
    let a = steady_state(&l).unwrap();
    let b = steady_state(&Liouvillian::new(SystemParams::detuned())).unwrap();
    for (x, y) in a.matrix().as_slice().iter().zip(b.matrix().as_slice()) {
        assert_eq!(x.re.to_bits(), y.re.to_bits());
        assert_eq!(x.im.to_bits(), y.im.to_bits());
    }
}
