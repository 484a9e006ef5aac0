//! Closed-form model generators: the two-level Bloch equations and a four-level exchange model.

use crate::linalg::ComplexMatrix;
use crate::lindblad::{make_mq, EigenpairQ, JumpTerm, Superoperator};
use crate::scalar::{cr, Real};

/// `sigma_+ = (sigma_1 + i sigma_2) / 2 = |0><1|`.
pub fn sigma_plus<T: Real>() -> ComplexMatrix<T> {
    ComplexMatrix::unit(2, 0, 1)
}

pub fn sigma_z<T: Real>() -> ComplexMatrix<T> {
    ComplexMatrix::from_real_diagonal(&[T::one(), -T::one()])
}

/// Two-level dissipator
/// `gamma/2 (e^{-beta e1} D[sigma_+] + e^{-beta e2} D[sigma_-]) + delta/2 D[sigma_3]`
/// where `D[L] rho = [L rho, L^*] + [L, rho L^*]` and `H = diag(e1, e2)`.
pub fn bloch_dissipator<T: Real>(gamma: T, delta: T, beta: T, e1: T, e2: T) -> Superoperator<T> {
    let half = T::lit(0.5);
    let sp = sigma_plus::<T>();
    Superoperator::from_jumps(
        2,
        vec![
            JumpTerm::new(half * gamma * (-beta * e1).exp(), sp.clone()),
            JumpTerm::new(half * gamma * (-beta * e2).exp(), sp.adjoint()),
            JumpTerm::new(half * delta, sigma_z()),
        ],
    )
    .expect("2x2 operators")
}

/// Bloch vector `a` with `rho = (1 + a . sigma) / 2`.
pub fn bloch_vector<T: Real>(rho: &ComplexMatrix<T>) -> [T; 3] {
    let two = T::lit(2.0);
    [two * rho[(0, 1)].re, -two * rho[(0, 1)].im, rho[(0, 0)].re - rho[(1, 1)].re]
}

pub fn from_bloch_vector<T: Real>(a: [T; 3]) -> ComplexMatrix<T> {
    let half = T::lit(0.5);
    let mut rho = ComplexMatrix::zeros(2, 2);
    rho[(0, 0)] = cr(half * (T::one() + a[2]));
    rho[(1, 1)] = cr(half * (T::one() - a[2]));
    rho[(0, 1)] = num_complex::Complex::new(half * a[0], -half * a[1]);
    rho[(1, 0)] = rho[(0, 1)].conj();
    rho
}

/// Longitudinal and transverse relaxation times of [`bloch_dissipator`]:
/// `T1 = 1 / (gamma s)` and `T2 = 1 / (gamma s / 2 + 2 delta)` with
/// `s = e^{-beta e1} + e^{-beta e2}`. For energies gauged so that `s = 2`
/// these reduce to `1/(2 gamma)` and `1/(gamma + 2 delta)`.
pub fn bloch_relaxation_times<T: Real>(gamma: T, delta: T, beta: T, e1: T, e2: T) -> (T, T) {
    let s = (-beta * e1).exp() + (-beta * e2).exp();
    let t1 = T::one() / (gamma * s);
    let t2 = T::one() / (gamma * s * T::lit(0.5) + T::lit(2.0) * delta);
    (t1, t2)
}

/// Four-level model `H = diag(1, 2, 9, 10)` with the frequency-one eigen-operator
/// `Q = (|1><2| + |3><4|) / sqrt(2)` normalised to unit Hilbert-Schmidt norm.
pub fn four_level_model<T: Real>(beta: T) -> (ComplexMatrix<T>, EigenpairQ<T>, Superoperator<T>) {
    let h = ComplexMatrix::from_real_diagonal(&[T::lit(1.0), T::lit(2.0), T::lit(9.0), T::lit(10.0)]);
    let q = (&ComplexMatrix::unit(4, 0, 1) + &ComplexMatrix::unit(4, 2, 3)).scale_re(T::lit(0.5).sqrt());
    let pair = EigenpairQ::new(T::one(), q, &h).expect("four-level eigen-operator");
    let l = make_mq(beta, &pair);
    (h, pair, l)
}
