use crate::error::Result;
use crate::linalg::{expm, hermitian_eigen, ComplexMatrix};
use crate::lindblad::Superoperator;
use crate::scalar::Real;
use crate::states::ThermalState;

/// Residuals of the detailed balance condition.
#[derive(Clone, Debug, PartialEq)]
pub struct DbcReport<T> {
    /// `||L rho_hat||_F`.
    pub stationarity: T,
    /// `max_ij ||L(E_ij rho_hat) - L^*(E_ij) rho_hat||_F` over matrix units.
    pub symmetry: T,
    pub pass: bool,
}

/// Checks `L rho_hat = 0` and `L(A rho_hat) = L^*(A) rho_hat` on a Hilbert-Schmidt basis.
pub fn dbc_check<T: Real>(l: &Superoperator<T>, thermal: &ThermalState<T>, tol: T) -> DbcReport<T> {
    let n = l.dim();
    let rho_hat = thermal.matrix();
    let stationarity = l.apply(rho_hat).norm();
    let adj = l.adjoint();
    let mut symmetry = T::zero();
    for i in 0..n {
        for j in 0..n {
            let a = ComplexMatrix::unit(n, i, j);
            let lhs = l.apply(&a.matmul(rho_hat));
            let rhs = adj.apply(&a).matmul(rho_hat);
            symmetry = symmetry.max((&lhs - &rhs).norm());
        }
    }
    DbcReport { stationarity, symmetry, pass: stationarity <= tol && symmetry <= tol }
}

/// Minimal Choi eigenvalues of `exp(t L)` and `exp(t L / 10)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CpReport<T> {
    pub min_eigenvalue: T,
    pub min_eigenvalue_short: T,
    /// Anti-Hermitian part of the Choi matrices (non-zero if `L` does not preserve Hermiticity).
    pub choi_asymmetry: T,
    pub pass: bool,
}

/// Choi matrix `sum_ij Phi(E_ij) (x) E_ij` of the channel with dense form `phi`.
pub fn choi_matrix<T: Real>(phi: &ComplexMatrix<T>, n: usize) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(n * n, n * n, |r, s| {
        let (a, i) = (r / n, r % n);
        let (b, j) = (s / n, s % n);
        phi[(a * n + b, i * n + j)]
    })
}

/// Complete positivity of the semigroup, sampled at `t` and `t / 10`.
pub fn cp_check<T: Real>(l: &Superoperator<T>, t: T, tol: T) -> Result<CpReport<T>> {
    let n = l.dim();
    let dense = l.to_dense();
    let mut mins = [T::zero(); 2];
    let mut asym = T::zero();
    for (slot, tt) in [t, t / T::lit(10.0)].into_iter().enumerate() {
        let phi = expm(&dense.scale_re(tt))?;
        let choi = choi_matrix(&phi, n);
        asym = asym.max(choi.antihermitian_norm());
        let e = hermitian_eigen(&choi.hermitian_part(), T::tol(1e-10))?;
        mins[slot] = e.min();
    }
    let pass = mins[0] >= -tol && mins[1] >= -tol && asym <= tol;
    Ok(CpReport { min_eigenvalue: mins[0], min_eigenvalue_short: mins[1], choi_asymmetry: asym, pass })
}
