mod common;

use common::{cx, unit};
use qgflow::rng::{random_density, random_hermitian, SplitMix64};
use qgflow::states::{DensityMatrix, ThermalState};
use qgflow::{CMatrix, Error};

#[test]
fn degenerate_two_level_is_maximally_mixed() {
    for &beta in &[0.1, 1.0, 7.5] {
        let h = CMatrix::from_real_diagonal(&[0.3, 0.3]);
        let t = ThermalState::new(&h, beta).unwrap();
        let half = CMatrix::identity(2).scale_re(0.5);
        assert!((t.matrix() - &half).max_abs() < 1e-14);
    }
}

#[test]
fn two_level_thermal_weights() {
    let (omega, beta) = (1.7, 0.8);
    let t = ThermalState::new(&CMatrix::from_real_diagonal(&[0.0, omega]), beta).unwrap();
    let z = 1.0 + (-beta * omega).exp();
    assert!((t.matrix()[(0, 0)].re - 1.0 / z).abs() < 1e-15);
    assert!((t.matrix()[(1, 1)].re - (-beta * omega).exp() / z).abs() < 1e-15);
    assert!((t.log_partition() - z.ln()).abs() < 1e-15);
}

#[test]
fn infinite_temperature_is_uniform() {
    let mut rng = SplitMix64::new(11);
    let h = random_hermitian::<f64>(&mut rng, 5);
    let t = ThermalState::new(&h, 0.0).unwrap();
    let uniform = CMatrix::identity(5).scale_re(0.2);
    assert!((t.matrix() - &uniform).max_abs() < 1e-14);
}

#[test]
fn large_beta_does_not_overflow() {
    let h = CMatrix::from_real_diagonal(&[0.0, 1.0, 2.0]);
    let t = ThermalState::new(&h, 800.0).unwrap();
    assert!(t.matrix().is_finite());
    assert!((t.weights()[0] - 1.0).abs() < 1e-15);
    let neg = ThermalState::new(&h, -800.0).unwrap();
    assert!((neg.weights()[2] - 1.0).abs() < 1e-15);
}

#[test]
fn entropy_examples() {
    let mixed = DensityMatrix::<f64>::maximally_mixed(4);
    assert!((mixed.entropy() - 4f64.ln()).abs() < 1e-14);
    let pure = DensityMatrix::new(unit(3, 1, 1)).unwrap();
    assert!(pure.entropy().abs() < 1e-12);
    let d = DensityMatrix::new(CMatrix::from_real_diagonal(&[0.25, 0.75])).unwrap();
    let expected = -(0.25f64 * 0.25f64.ln() + 0.75 * 0.75f64.ln());
    assert!((d.entropy() - expected).abs() < 1e-15);
}

#[test]
fn relative_entropy_forms_agree() {
    let mut rng = SplitMix64::new(3);
    for trial in 0..50 {
        let n = 2 + trial % 5;
        let h = random_hermitian::<f64>(&mut rng, n).scale_re(3.0);
        let beta = rng.uniform_in(0.1, 3.0);
        let t = ThermalState::new(&h, beta).unwrap();
        let rho = DensityMatrix::new(random_density(&mut rng, n, 1e-3)).unwrap();
        let direct = rho.relative_entropy(&t);
        let energetic = t.relative_entropy_of(&rho);
        assert!((direct - energetic).abs() < 1e-10, "{direct} vs {energetic}");
        assert!(direct >= -1e-12);
    }
}

#[test]
fn relative_entropy_of_pure_state_to_uniform() {
    let t = ThermalState::new(&CMatrix::zeros(2, 2), 1.0).unwrap();
    let rho = DensityMatrix::new(CMatrix::from_real_diagonal(&[1.0, 0.0])).unwrap();
    assert!((rho.relative_entropy(&t) - 2f64.ln()).abs() < 1e-10);
    assert!((t.relative_entropy_of(&rho) - 2f64.ln()).abs() < 1e-10);
}

#[test]
fn thermal_state_is_fixed_point_of_its_own_relative_entropy() {
    let mut rng = SplitMix64::new(8);
    let h = random_hermitian::<f64>(&mut rng, 4);
    let t = ThermalState::new(&h, 1.3).unwrap();
    let rho = t.density().unwrap();
    assert!(rho.relative_entropy(&t).abs() < 1e-12);
}

#[test]
fn invalid_states_are_rejected() {
    let not_hermitian = {
        let mut m = CMatrix::from_real_diagonal(&[0.5, 0.5]);
        m[(0, 1)] = cx(0.1, 0.0);
        m
    };
    assert!(matches!(DensityMatrix::new(not_hermitian), Err(Error::InvalidState(_))));
    let bad_trace = CMatrix::from_real_diagonal(&[0.5, 0.6]);
    assert!(matches!(DensityMatrix::new(bad_trace), Err(Error::InvalidState(_))));
    let negative = CMatrix::from_real_diagonal(&[1.2, -0.2]);
    assert!(matches!(DensityMatrix::new(negative), Err(Error::InvalidState(_))));
    let nan = CMatrix::from_real_diagonal(&[f64::NAN, 1.0]);
    assert!(DensityMatrix::new(nan).is_err());
    assert!(DensityMatrix::new(CMatrix::zeros(2, 3)).is_err());
}

#[test]
fn rank_deficient_states_are_floored() {
    let rho = DensityMatrix::new(CMatrix::from_real_diagonal(&[1.0, 0.0, 0.0])).unwrap();
    let (spec, floored) = rho.floored_spectrum();
    assert!(floored);
    assert!(spec.iter().all(|&x| x > 0.0));
    assert!(rho.log().is_finite());
}

#[test]
fn thermal_state_commutes_with_hamiltonian() {
    let mut rng = SplitMix64::new(21);
    for n in 2..7 {
        let h = random_hermitian::<f64>(&mut rng, n).scale_re(4.0);
        let t = ThermalState::new(&h, 0.9).unwrap();
        assert!(t.matrix().commutator(&h).norm() < 1e-13);
        assert!((t.matrix().trace().re - 1.0).abs() < 1e-14);
        let log_direct = t.density().unwrap().log();
        assert!((&log_direct - &t.log_rho_hat()).max_abs() < 1e-10);
    }
}
