use crate::error::{Error, Result};
use crate::linalg::{
    factor_block, hermitian_eigen, kron, partial_transpose_sigma, ComplexMatrix, HermitianEigen,
};
use crate::lindblad::{EigenpairQ, JumpTerm, Superoperator};
use crate::scalar::Real;
use crate::states::ThermalState;

/// Generator `L rho = -Tr_2 [Q, [Q, rho (x) sigma]]` from a Hermitian coupling `Q` on
/// `h1 (x) h2` and a positive semidefinite `sigma` on `h2`.
#[derive(Clone, Debug)]
pub struct TensorLindblad<T: Real> {
    pub dim1: usize,
    pub dim2: usize,
    pub q: ComplexMatrix<T>,
    pub sigma: ComplexMatrix<T>,
    pub sigma_eigen: HermitianEigen<T>,
}

/// Validates the data and returns the tensor generator description.
pub fn make_tensor_lindblad<T: Real>(
    q: &ComplexMatrix<T>,
    sigma: &ComplexMatrix<T>,
    dim1: usize,
) -> Result<TensorLindblad<T>> {
    let dim2 = sigma.require_square("sigma")?;
    let nq = q.require_square("coupling operator")?;
    if nq != dim1 * dim2 {
        return Err(Error::Shape(format!("coupling of size {nq} for factors {dim1} and {dim2}")));
    }
    q.require_hermitian(T::tol(1e-10))?;
    let sigma_eigen = hermitian_eigen(sigma, T::tol(1e-10))?;
    let floor = T::tol(1e-12) * sigma.norm().max(T::one());
    if sigma_eigen.min() < -floor {
        return Err(Error::NotPositive { min_eigenvalue: sigma_eigen.min().as_f64() });
    }
    Ok(TensorLindblad {
        dim1,
        dim2,
        q: q.hermitian_part(),
        sigma: sigma.hermitian_part(),
        sigma_eigen,
    })
}

impl<T: Real> TensorLindblad<T> {
    /// The generator evaluated by the partial-trace formula.
    pub fn generator(&self) -> Superoperator<T> {
        Superoperator::tensor(self.q.clone(), self.sigma.clone(), self.dim1)
    }

    /// Jump operators `Q_kl = <e_k|Q|e_l>` with rates `sigma_l`, from the eigenbasis of `sigma`.
    pub fn kraus_terms(&self) -> Vec<JumpTerm<T>> {
        let mut out = Vec::new();
        for l in 0..self.dim2 {
            let rate = self.sigma_eigen.values[l].max(T::zero());
            if rate == T::zero() {
                continue;
            }
            let el = self.sigma_eigen.vector(l);
            for k in 0..self.dim2 {
                let ek = self.sigma_eigen.vector(k);
                let op = factor_block(&self.q, self.dim1, &ek, &el);
                if op.norm() > T::zero() {
                    out.push(JumpTerm::new(rate, op));
                }
            }
        }
        out
    }

    /// The generator assembled from [`kraus_terms`](Self::kraus_terms).
    pub fn kraus_generator(&self) -> Superoperator<T> {
        Superoperator::from_jumps(self.dim1, self.kraus_terms()).expect("blocks have dimension dim1")
    }

    /// `(||[Q, rho_hat (x) sigma]||, ||[Q, log rho_hat (x) 1 + 1 (x) log sigma]||)`;
    /// the second entry is `None` when `sigma` is singular.
    pub fn commutation_residuals(&self, thermal: &ThermalState<T>) -> (T, Option<T>) {
        let prod = kron(thermal.matrix(), &self.sigma);
        let r1 = self.q.commutator(&prod).norm();
        let r2 = if self.sigma_eigen.min() > T::zero() {
            let log_sigma = self.sigma_eigen.map(|x| x.ln());
            let sum = &kron(&thermal.log_rho_hat(), &ComplexMatrix::identity(self.dim2))
                + &kron(&ComplexMatrix::identity(self.dim1), &log_sigma);
            Some(self.q.commutator(&sum).norm())
        } else {
            None
        };
        (r1, r2)
    }
}

/// Dual representation `(Y Q, sigma^{-1})` with
/// `Y Q = (1 (x) sigma^{1/2}) T_sigma(Q) (1 (x) sigma^{1/2})`; both pairs generate the same map.
pub fn y_sigma<T: Real>(tl: &TensorLindblad<T>) -> Result<TensorLindblad<T>> {
    let floor = T::tol(1e-12) * tl.sigma.norm().max(T::one());
    if tl.sigma_eigen.min() <= floor {
        return Err(Error::Precondition(format!(
            "sigma must be positive definite (smallest eigenvalue {:e})",
            tl.sigma_eigen.min().as_f64()
        )));
    }
    let transposed = partial_transpose_sigma(&tl.q, &tl.sigma_eigen, tl.dim1)?;
    let root = kron(&ComplexMatrix::identity(tl.dim1), &tl.sigma_eigen.map(|x| x.sqrt()));
    let q = root.matmul(&transposed).matmul(&root).hermitian_part();
    let sigma = tl.sigma_eigen.map(|x| x.recip());
    let mut out = make_tensor_lindblad(&q, &sigma, tl.dim1)?;
    // Keep the eigenvectors of sigma so that the partial transpose is taken in the same
    // basis and applying the map twice returns the original coupling.
    let m = tl.dim2;
    out.sigma_eigen = HermitianEigen {
        values: tl.sigma_eigen.values.iter().rev().map(|x| x.recip()).collect(),
        vectors: ComplexMatrix::from_fn(m, m, |r, k| tl.sigma_eigen.vectors[(r, m - 1 - k)]),
    };
    Ok(out)
}

/// Tensor data reproducing `M_{beta,Q}`: `Q^* (x) |0><1| + Q (x) |1><0|` with
/// `sigma = diag(e^{beta w/2}, e^{-beta w/2})` on a two-dimensional auxiliary space.
pub fn exchange_tensor<T: Real>(beta: T, pair: &EigenpairQ<T>) -> TensorLindblad<T> {
    let n = pair.q.rows();
    let q = &kron(&pair.q.adjoint(), &ComplexMatrix::unit(2, 0, 1))
        + &kron(&pair.q, &ComplexMatrix::unit(2, 1, 0));
    let half = beta * pair.omega * T::lit(0.5);
    let sigma = ComplexMatrix::from_real_diagonal(&[half.exp(), (-half).exp()]);
    make_tensor_lindblad(&q, &sigma, n).expect("exchange tensor data is valid")
}

/// Tensor data reproducing `S_W`: `W (x) 1` with a one-dimensional auxiliary space.
pub fn dephasing_tensor<T: Real>(w: &ComplexMatrix<T>) -> Result<TensorLindblad<T>> {
    make_tensor_lindblad(w, &ComplexMatrix::identity(1), w.rows())
}
