mod common;

use common::*;
use proptest::prelude::*;
use qgflow::kubo_mori::{
    block_formula_residual, classic_miracle_residual, generalized_miracle_residual, kubo_mori, log_mean,
    miracle_residuals, tensor_miracle_residual, KuboMoriOp,
};
use qgflow::lindblad::{decompose_dbc, exchange_tensor, make_tensor_lindblad};
use qgflow::rng::{random_density, random_density_spread, random_hermitian, random_matrix, random_unitary, SplitMix64};
use qgflow::states::{DensityMatrix, ThermalState};
use qgflow::{CMatrix, Error};

#[test]
fn log_mean_examples() {
    let e2 = 2f64.exp();
    assert!((log_mean(1.0, e2) - (e2 - 1.0) / 2.0).abs() < 1e-15);
    assert_eq!(log_mean(3.0, 3.0), 3.0);
    assert!(log_mean(0.0f64, 1.0).is_nan());
    assert!(log_mean(-1.0f64, 1.0).is_nan());
}

#[test]
fn log_mean_near_diagonal_is_smooth() {
    for &a in &[1e-8, 0.3, 1.0, 7.0, 1e6] {
        for &rel in &[1e-15, 1e-12, 1e-9, 1e-6, 1e-4, 1e-3] {
            let b = a * (1.0 + rel);
            let exact = log_mean_quadrature(a, b);
            assert!(((log_mean(a, b) - exact) / exact).abs() < 1e-14, "a {a} rel {rel}");
        }
    }
}

proptest! {
    #[test]
    fn log_mean_between_geometric_and_arithmetic(a in 1e-6f64..1e3, b in 1e-6f64..1e3) {
        let l = log_mean(a, b);
        let g = (a * b).sqrt();
        let m = 0.5 * (a + b);
        prop_assert!(l >= g * (1.0 - 1e-13) && l <= m * (1.0 + 1e-13));
        prop_assert!((l - log_mean(b, a)).abs() <= 1e-14 * l);
        if (a - b).abs() > 1e-6 * a.max(b) {
            prop_assert!((l * (a.ln() - b.ln()) - (a - b)).abs() <= 1e-12 * a.max(b));
        }
    }

    #[test]
    fn log_mean_matches_integral(a in 1e-3f64..1e2, b in 1e-3f64..1e2) {
        let exact = log_mean_quadrature(a, b);
        prop_assert!(((log_mean(a, b) - exact) / exact).abs() < 1e-12);
    }
}

#[test]
fn operator_matches_quadrature() {
    let mut rng = SplitMix64::new(1);
    for trial in 0..20 {
        let n = 2 + trial % 4;
        let rho = random_density::<f64>(&mut rng, n, 0.2);
        let a = random_matrix::<f64>(&mut rng, n, n);
        let alpha = rng.uniform_in(-2.0, 2.0);
        let op = KuboMoriOp::new(&rho, alpha).unwrap();
        let oracle = kubo_mori_quadrature(&rho.scale_re((alpha / 2.0).exp()), &a, &rho.scale_re((-alpha / 2.0).exp()), 256);
        assert!(max_abs_diff(&op.apply(&a), &oracle) < 1e-12, "trial {trial}");
    }
}

#[test]
fn maximally_mixed_state_acts_as_scalar() {
    let n = 4;
    let rho = CMatrix::identity(n).scale_re(0.25);
    let mut rng = SplitMix64::new(2);
    let a = random_matrix::<f64>(&mut rng, n, n);
    assert!(max_abs_diff(&kubo_mori(&rho).unwrap().apply(&a), &a.scale_re(0.25)) < 1e-15);
}

#[test]
fn self_adjoint_and_tilt_adjoint() {
    let mut rng = SplitMix64::new(3);
    let n = 4;
    let rho = random_density::<f64>(&mut rng, n, 0.1);
    let a = random_matrix::<f64>(&mut rng, n, n);
    let b = random_matrix::<f64>(&mut rng, n, n);
    let alpha = 1.3;
    let dp = KuboMoriOp::new(&rho, alpha).unwrap();
    let dm = KuboMoriOp::new(&rho, -alpha).unwrap();
    let lhs = a.adjoint().matmul(&dp.apply(&b)).trace();
    let rhs = dp.apply(&a).adjoint().matmul(&b).trace();
    assert!((lhs - rhs).norm() < 1e-13);
    assert!(max_abs_diff(&dp.apply(&a).adjoint(), &dm.apply(&a.adjoint())) < 1e-13);
    let c = kubo_mori(&rho).unwrap();
    let x = a.hermitian_part();
    assert!(x.inner_re(&c.apply(&x)) > 0.0);
    assert!(c.apply(&x).antihermitian_norm() < 1e-14);
}

#[test]
fn unitary_covariance() {
    let mut rng = SplitMix64::new(4);
    let n = 3;
    let rho = random_density::<f64>(&mut rng, n, 0.1);
    let u = random_unitary::<f64>(&mut rng, n);
    let a = random_matrix::<f64>(&mut rng, n, n);
    let rot = |m: &CMatrix| u.matmul(m).matmul(&u.adjoint());
    let lhs = KuboMoriOp::new(&rot(&rho), 0.7).unwrap().apply(&rot(&a));
    let rhs = rot(&KuboMoriOp::new(&rho, 0.7).unwrap().apply(&a));
    assert!(max_abs_diff(&lhs, &rhs) < 1e-13);
}

#[test]
fn negative_states_rejected() {
    let bad = CMatrix::from_real_diagonal(&[1.2, -0.2]);
    assert!(matches!(KuboMoriOp::new(&bad, 0.0), Err(Error::NotPositive { .. }) | Err(Error::InvalidState(_))));
}

#[test]
fn miracle_identities_hold() {
    let mut rng = SplitMix64::new(5);
    for trial in 0..60 {
        let n = 2 + trial % 5;
        let h = random_simple_h(&mut rng, n);
        let beta = rng.uniform_in(0.1, 3.0);
        let thermal = ThermalState::new(&h, beta).unwrap();
        let pair = random_eigenpair(&mut rng, &h, false);
        let rho = DensityMatrix::new(random_density_spread(&mut rng, n, 4.0)).unwrap();
        for &alpha in &[-2.0, 0.0, 1.5] {
            let r = miracle_residuals(&rho, &thermal, &pair, alpha).unwrap();
            assert!(r.classic < 1e-10 && r.generalized < 1e-10 && r.corollary < 1e-10, "{r:?}");
        }
        let q = random_matrix::<f64>(&mut rng, n, n);
        assert!(classic_miracle_residual(&rho, &q).unwrap() < 1e-10);
        assert!(generalized_miracle_residual(&rho, &q, 0.4).unwrap() < 1e-10);
    }
}

#[test]
fn block_formula_holds() {
    let mut rng = SplitMix64::new(6);
    for trial in 0..20 {
        let n = 2 + trial % 3;
        let rho = DensityMatrix::new(random_density(&mut rng, n, 0.05)).unwrap();
        let blocks: Vec<CMatrix> = (0..4).map(|_| random_matrix(&mut rng, n, n)).collect();
        let alpha = rng.uniform_in(-3.0, 3.0);
        let r = block_formula_residual(&rho, alpha, [&blocks[0], &blocks[1], &blocks[2], &blocks[3]]).unwrap();
        assert!(r < 1e-12, "{r}");
    }
}

#[test]
fn tensor_miracle_holds_for_commuting_couplings() {
    let mut rng = SplitMix64::new(7);
    for trial in 0..20 {
        let n = 2 + trial % 3;
        let h = random_simple_h(&mut rng, n);
        let beta = rng.uniform_in(0.2, 2.0);
        let thermal = ThermalState::new(&h, beta).unwrap();
        let rho = DensityMatrix::new(random_density(&mut rng, n, 0.05)).unwrap();
        let pair = random_eigenpair(&mut rng, &h, true);
        let t = exchange_tensor(beta, &pair);
        assert!(tensor_miracle_residual(&t, &thermal, &rho).unwrap() < 1e-10);
        let l = random_dbc_generator(&mut rng, &h, beta, 3);
        let dec = decompose_dbc(&l, &thermal, 1e-9).unwrap();
        assert!(tensor_miracle_residual(&dec.tensor, &thermal, &rho).unwrap() < 1e-9);
    }
}

#[test]
fn tensor_miracle_requires_commutation() {
    let mut rng = SplitMix64::new(8);
    let h = random_simple_h(&mut rng, 2);
    let thermal = ThermalState::new(&h, 1.0).unwrap();
    let q = random_hermitian::<f64>(&mut rng, 4);
    let t = make_tensor_lindblad(&q, &CMatrix::from_real_diagonal(&[0.4, 0.6]), 2).unwrap();
    let rho = DensityMatrix::<f64>::maximally_mixed(2);
    assert!(matches!(tensor_miracle_residual(&t, &thermal, &rho), Err(Error::Precondition(_))));
}

#[test]
fn rank_deficient_states_are_handled_by_flooring() {
    let rho = DensityMatrix::new(CMatrix::from_real_diagonal(&[0.6, 0.4, 0.0])).unwrap();
    let c = KuboMoriOp::from_density(&rho, 0.0).unwrap();
    assert!(c.floored());
    let mut rng = SplitMix64::new(9);
    let a = random_matrix::<f64>(&mut rng, 3, 3);
    assert!(c.apply(&a).is_finite());
}
