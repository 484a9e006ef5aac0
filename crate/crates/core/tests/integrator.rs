mod common;

use common::*;
use qgflow::generic::scenarios::heat_baths;
use qgflow::generic::CoupledState;
use qgflow::integrator::{integrate, Dynamics, IntegratorConfig, LindbladDynamics, Method};
use qgflow::linalg::expm;
use qgflow::lindblad::examples::{bloch_dissipator, bloch_relaxation_times, bloch_vector, from_bloch_vector};
use qgflow::lindblad::Superoperator;
use qgflow::rng::{random_density, SplitMix64};
use qgflow::states::ThermalState;
use qgflow::{CMatrix, Error, Result};

fn pure_hamiltonian(h: &CMatrix) -> LindbladDynamics<f64> {
    LindbladDynamics::new(Superoperator::zero(h.rows()), h.clone(), None).unwrap()
}

#[test]
fn hamiltonian_flow_matches_unitary_conjugation() {
    let mut rng = SplitMix64::new(1);
    let h = random_simple_h(&mut rng, 3);
    let rho0 = random_density::<f64>(&mut rng, 3, 0.1);
    let traj = integrate(&pure_hamiltonian(&h), &CoupledState::quantum(rho0.clone()), &IntegratorConfig::new(1e-3, 2.0))
        .unwrap();
    let u = expm(&h.scale(cx(0.0, -2.0))).unwrap();
    let exact = u.matmul(&rho0).matmul(&u.adjoint());
    assert!(max_abs_diff(&traj.last().unwrap().rho, &exact) < 1e-10);
    assert!(traj.trace_err.iter().all(|&e| e < 1e-12));
    let e0 = traj.energy[0];
    assert!(traj.energy.iter().all(|&e| (e - e0).abs() < 1e-10));
}

fn fit_rate(times: &[f64], values: &[f64]) -> f64 {
    // Least squares slope of log|v| against t.
    let pts: Vec<(f64, f64)> = times.iter().zip(values).map(|(&t, &v)| (t, v.abs().ln())).collect();
    let n = pts.len() as f64;
    let (st, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mt, my) = (st / n, sy / n);
    let num: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    -num / den
}

#[test]
fn bloch_relaxation_times_from_trajectory() {
    let (beta, e1, e2) = (1.0, -(1.5f64).ln(), -(0.5f64).ln());
    for &(gamma, delta) in &[(1.0, 0.0), (1.0, 1.0), (0.3, 2.0)] {
        let h = CMatrix::from_real_diagonal(&[e1, e2]);
        let l = bloch_dissipator(gamma, delta, beta, e1, e2);
        let sys = LindbladDynamics::new(l, CMatrix::zeros(2, 2), None).unwrap();
        let a_eq = ((-beta * e1).exp() - (-beta * e2).exp()) / 2.0;
        let rho0 = from_bloch_vector([0.5, 0.0, -0.4]);
        let traj = integrate(&sys, &CoupledState::quantum(rho0), &IntegratorConfig::new(1e-3, 1.0).with_stride(10)).unwrap();
        let a: Vec<[f64; 3]> = traj.states.iter().map(|q| bloch_vector(&q.rho)).collect();
        let t1 = 1.0 / fit_rate(&traj.times, &a.iter().map(|v| v[2] - a_eq).collect::<Vec<_>>());
        let t2 = 1.0 / fit_rate(&traj.times, &a.iter().map(|v| v[0]).collect::<Vec<_>>());
        assert!((t1 - 1.0 / (2.0 * gamma)).abs() < 1e-3 * t1);
        assert!((t2 - 1.0 / (gamma + 2.0 * delta)).abs() < 1e-3 * t2);
        let (r1, r2) = bloch_relaxation_times(gamma, delta, beta, e1, e2);
        assert!((r1 - t1).abs() < 1e-3 * t1 && (r2 - t2).abs() < 1e-3 * t2);
        assert!(t1 >= t2 / 2.0 - 1e-6);
        let _ = h;
    }
}

#[test]
fn rk4_converges_at_fourth_order() {
    let mut rng = SplitMix64::new(2);
    let h = random_simple_h(&mut rng, 3);
    let beta = 0.7;
    let l = random_dbc_generator(&mut rng, &h, beta, 3);
    let dense = &l.to_dense() + &dense_hamiltonian_oracle(&h);
    let rho0 = random_density::<f64>(&mut rng, 3, 0.1);
    let exact = apply_dense(&expm(&dense).unwrap(), &rho0);
    let sys = LindbladDynamics::new(l, h, None).unwrap();
    let err = |dt: f64, m: Method| {
        let cfg = IntegratorConfig::new(dt, 1.0).with_method(m).with_stride(1000);
        max_abs_diff(&integrate(&sys, &CoupledState::quantum(rho0.clone()), &cfg).unwrap().last().unwrap().rho, &exact)
    };
    let order = (err(0.1, Method::Rk4) / err(0.05, Method::Rk4)).log2();
    assert!(order >= 3.8, "{order}");
    let order = (err(0.05, Method::Heun) / err(0.025, Method::Heun)).log2();
    assert!((order - 2.0).abs() < 0.2, "{order}");
}

#[test]
fn trace_and_positivity_are_preserved() {
    let mut rng = SplitMix64::new(3);
    let h = random_simple_h(&mut rng, 4);
    let thermal = ThermalState::new(&h, 1.0).unwrap();
    let l = random_dbc_generator(&mut rng, &h, 1.0, 3);
    let sys = LindbladDynamics::new(l, h, Some(thermal)).unwrap();
    let rho0 = random_density::<f64>(&mut rng, 4, 0.01);
    let traj = integrate(&sys, &CoupledState::quantum(rho0), &IntegratorConfig::new(0.01, 5.0).with_stride(10)).unwrap();
    assert_eq!(traj.len(), 51);
    assert!((traj.times[50] - 5.0).abs() < 1e-12);
    assert!(traj.trace_err.iter().all(|&e| e < 1e-12));
    assert!(traj.min_eig.iter().all(|&e| e > -1e-12));
    assert!(traj.free_energy.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    assert!(traj.max_herm_err < 1e-13);
}

#[test]
fn snapshots_include_final_step() {
    let h = CMatrix::from_real_diagonal(&[0.0, 1.0]);
    let sys = pure_hamiltonian(&h);
    let q = CoupledState::quantum(CMatrix::identity(2).scale_re(0.5));
    let traj = integrate(&sys, &q, &IntegratorConfig::new(0.1, 1.05).with_stride(3)).unwrap();
    let last = *traj.times.last().unwrap();
    assert!((last - 1.1).abs() < 1e-12 || (last - 1.0).abs() < 1e-12);
    assert!((traj.times[1] - 0.3).abs() < 1e-12);
}

#[test]
fn heat_bath_energy_is_conserved_along_flow() {
    let mut rng = SplitMix64::new(4);
    let h = random_simple_h(&mut rng, 3);
    let couplings = (0..2).map(|c| (random_eigenpair(&mut rng, &h, true), c, 0.5)).collect();
    let sys = heat_baths(h, 1.0, vec![5.0, 5.0], 0.2, couplings).unwrap();
    let q0 = CoupledState::new(random_density(&mut rng, 3, 0.1), vec![0.5, 2.0]);
    let traj = integrate(&sys, &q0, &IntegratorConfig::new(1e-2, 5.0).with_stride(10)).unwrap();
    let e0 = traj.energy[0];
    assert!(traj.energy.iter().all(|&e| (e - e0).abs() < 1e-9));
    assert!(traj.entropy.windows(2).all(|w| w[1] >= w[0] - 1e-9));
}

struct Blowup;

impl Dynamics<f64> for Blowup {
    fn dim(&self) -> usize {
        1
    }
    fn dim_z(&self) -> usize {
        1
    }
    fn field(&self, q: &CoupledState<f64>) -> Result<CoupledState<f64>> {
        Ok(CoupledState::new(CMatrix::zeros(1, 1), vec![q.z[0] * q.z[0]]))
    }
}

struct Decay {
    floor: f64,
}

impl Dynamics<f64> for Decay {
    fn dim(&self) -> usize {
        1
    }
    fn dim_z(&self) -> usize {
        1
    }
    fn field(&self, q: &CoupledState<f64>) -> Result<CoupledState<f64>> {
        Ok(CoupledState::new(CMatrix::zeros(1, 1), vec![-50.0 * (q.z[0] - 1.0) * q.z[0]]))
    }
    fn in_domain(&self, q: &CoupledState<f64>) -> bool {
        q.z[0] > self.floor
    }
}

#[test]
fn domain_guard_halves_steps() {
    let q0 = CoupledState::new(CMatrix::identity(1), vec![3.0]);
    let traj = integrate(&Decay { floor: 0.0 }, &q0, &IntegratorConfig::new(0.05, 1.0)).unwrap();
    assert!(traj.halvings > 0);
    assert!(traj.states.iter().all(|q| q.z[0] > 0.0));
    assert!((traj.last().unwrap().z[0] - 1.0).abs() < 1e-2);
    let mut cfg = IntegratorConfig::new(0.05, 1.0);
    cfg.domain_guard = false;
    let unguarded = integrate(&Decay { floor: 0.0 }, &q0, &cfg);
    assert!(unguarded.is_err());
}

#[test]
fn guard_exhaustion_and_blowup_are_reported() {
    let q0 = CoupledState::new(CMatrix::identity(1), vec![1.0]);
    let err = integrate(&Decay { floor: 4.0 }, &CoupledState::new(CMatrix::identity(1), vec![5.0]), &IntegratorConfig::new(0.1, 1.0)).unwrap_err();
    assert!(matches!(err, Error::GuardExhausted { .. }));
    let mut cfg = IntegratorConfig::new(0.5, 10.0);
    cfg.domain_guard = false;
    let err = integrate(&Blowup, &q0, &cfg).unwrap_err();
    assert!(matches!(err, Error::NonFinite { .. }), "{err:?}");
}

#[test]
fn configuration_errors() {
    let sys = pure_hamiltonian(&CMatrix::zeros(2, 2));
    let q = CoupledState::quantum(CMatrix::identity(2).scale_re(0.5));
    for cfg in [IntegratorConfig::new(0.0, 1.0), IntegratorConfig::new(0.1, 0.01), IntegratorConfig::new(0.1, 1.0).with_stride(0)] {
        assert!(matches!(integrate(&sys, &q, &cfg), Err(Error::Config(_))));
    }
    let bad = CoupledState::quantum(CMatrix::identity(3));
    assert!(matches!(integrate(&sys, &bad, &IntegratorConfig::new(0.1, 1.0)), Err(Error::Shape(_))));
    let nan = CoupledState::quantum(CMatrix::from_real_diagonal(&[f64::NAN, 0.5]));
    assert!(matches!(integrate(&sys, &nan, &IntegratorConfig::new(0.1, 1.0)), Err(Error::NonFinite { .. })));
}
