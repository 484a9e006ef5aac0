//! Logarithmic-mean (Kubo-Mori) operators and the commutator identities they satisfy.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, kron, ComplexMatrix, HermitianEigen};
use crate::lindblad::{EigenpairQ, TensorLindblad};
use crate::scalar::Real;
use crate::states::{floor_spectrum, DensityMatrix, ThermalState};

/// Logarithmic mean `(a - b) / (log a - log b)`, with `L(a, a) = a`.
///
/// Near the diagonal it switches to `sqrt(ab) (1 + d^2/24 + d^4/1920)`, `d = log(a/b)`,
/// which avoids the cancellation in the quotient.
pub fn log_mean<T: Real>(a: T, b: T) -> T {
    if !(a > T::zero() && b > T::zero()) {
        return T::nan();
    }
    if a == b {
        return a;
    }
    let r = (a - b) / b;
    // For nearby arguments `a - b` is exact and `ln_1p` keeps `d` accurate to a few ulps.
    let d = if r.abs() < T::lit(0.5) { r.ln_1p() } else { a.ln() - b.ln() };
    if d.abs() < T::epsilon().powf(T::lit(0.25)) {
        let d2 = d * d;
        (a * b).sqrt() * (T::one() + d2 / T::lit(24.0) + d2 * d2 / T::lit(1920.0))
    } else {
        (a - b) / d
    }
}

/// `D^alpha_rho A = sum_nk L(e^{alpha/2} r_n, e^{-alpha/2} r_k) <psi_n|A|psi_k> |psi_n><psi_k|`;
/// `alpha = 0` gives the Kubo-Mori operator `C_rho A = int_0^1 rho^s A rho^{1-s} ds`.
#[derive(Clone, Debug)]
pub struct KuboMoriOp<T: Real> {
    eigen: HermitianEigen<T>,
    alpha: T,
    weights: Vec<T>,
    floored: bool,
}

impl<T: Real> KuboMoriOp<T> {
    /// Builds the operator for a positive semidefinite Hermitian `rho` (not necessarily unit trace).
    pub fn new(rho: &ComplexMatrix<T>, alpha: T) -> Result<Self> {
        Self::from_eigen(hermitian_eigen(rho, T::tol(1e-10))?, alpha)
    }

    pub fn from_density(rho: &DensityMatrix<T>, alpha: T) -> Result<Self> {
        let (vals, floored) = rho.floored_spectrum();
        Ok(Self::build(rho.eigen().clone(), vals, floored, alpha))
    }

    /// Eigenvalues in the zero band are floored; more negative ones are rejected.
    pub fn from_eigen(eigen: HermitianEigen<T>, alpha: T) -> Result<Self> {
        let (vals, floored) = floor_spectrum(&eigen.values)?;
        Ok(Self::build(eigen, &vals, floored, alpha))
    }

    fn build(eigen: HermitianEigen<T>, vals: &[T], floored: bool, alpha: T) -> Self {
        let n = vals.len();
        let up = (alpha * T::lit(0.5)).exp();
        let down = (-alpha * T::lit(0.5)).exp();
        let mut weights = Vec::with_capacity(n * n);
        for &rn in vals {
            for &rk in vals {
                weights.push(log_mean(up * rn, down * rk));
            }
        }
        Self { eigen, alpha, weights, floored }
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.eigen.dim()
    }

    /// Whether near-zero eigenvalues were floored.
    pub fn floored(&self) -> bool {
        self.floored
    }

    pub fn eigen(&self) -> &HermitianEigen<T> {
        &self.eigen
    }

    /// Weight `L(e^{alpha/2} r_n, e^{-alpha/2} r_k)`.
    pub fn weight(&self, n: usize, k: usize) -> T {
        self.weights[n * self.dim() + k]
    }

    pub fn apply(&self, a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let mut b = self.eigen.to_eigenbasis(a);
        for (z, &w) in b.data_mut().iter_mut().zip(&self.weights) {
            *z *= w;
        }
        self.eigen.from_eigenbasis(&b)
    }
}

/// `C_rho`, the `alpha = 0` case.
pub fn kubo_mori<T: Real>(rho: &ComplexMatrix<T>) -> Result<KuboMoriOp<T>> {
    KuboMoriOp::new(rho, T::zero())
}

/// `||C_rho [Q, log rho] - [Q, rho]||_F`.
pub fn classic_miracle_residual<T: Real>(rho: &DensityMatrix<T>, q: &ComplexMatrix<T>) -> Result<T> {
    let c = KuboMoriOp::from_density(rho, T::zero())?;
    let lhs = c.apply(&q.commutator(&rho.log()));
    Ok((&lhs - &q.commutator(rho.matrix())).norm())
}

/// `||D^alpha([Q, log rho] - alpha Q) - (e^{-alpha/2} Q rho - e^{alpha/2} rho Q)||_F`.
pub fn generalized_miracle_residual<T: Real>(
    rho: &DensityMatrix<T>,
    q: &ComplexMatrix<T>,
    alpha: T,
) -> Result<T> {
    let d = KuboMoriOp::from_density(rho, alpha)?;
    let arg = &q.commutator(&rho.log()) - &q.scale_re(alpha);
    let lhs = d.apply(&arg);
    let half = alpha * T::lit(0.5);
    let mut rhs = q.matmul(rho.matrix()).scale_re((-half).exp());
    rhs.axpy_re(-half.exp(), &rho.matrix().matmul(q));
    Ok((&lhs - &rhs).norm())
}

/// `||D^{-beta w}[Q, log rho + beta H] - (e^{beta w/2} Q rho - e^{-beta w/2} rho Q)||_F`.
pub fn corollary_residual<T: Real>(
    rho: &DensityMatrix<T>,
    thermal: &ThermalState<T>,
    pair: &EigenpairQ<T>,
) -> Result<T> {
    let beta = thermal.beta();
    let d = KuboMoriOp::from_density(rho, -beta * pair.omega)?;
    let mut x = rho.log();
    x.axpy_re(beta, thermal.hamiltonian());
    let lhs = d.apply(&pair.q.commutator(&x));
    let half = beta * pair.omega * T::lit(0.5);
    let mut rhs = pair.q.matmul(rho.matrix()).scale_re(half.exp());
    rhs.axpy_re(-(-half).exp(), &rho.matrix().matmul(&pair.q));
    Ok((&lhs - &rhs).norm())
}

#[derive(Clone, Debug, PartialEq)]
pub struct MiracleReport<T> {
    pub classic: T,
    pub generalized: T,
    pub corollary: T,
}

/// All three identities for one state, eigen-operator pair and shift `alpha`.
pub fn miracle_residuals<T: Real>(
    rho: &DensityMatrix<T>,
    thermal: &ThermalState<T>,
    pair: &EigenpairQ<T>,
    alpha: T,
) -> Result<MiracleReport<T>> {
    Ok(MiracleReport {
        classic: classic_miracle_residual(rho, &pair.q)?,
        generalized: generalized_miracle_residual(rho, &pair.q, alpha)?,
        corollary: corollary_residual(rho, thermal, pair)?,
    })
}

/// Direct-sum block matrix `[[a, b], [c, d]]`.
pub fn block_matrix<T: Real>(blocks: [&ComplexMatrix<T>; 4]) -> ComplexMatrix<T> {
    let n = blocks[0].rows();
    ComplexMatrix::from_fn(2 * n, 2 * n, |r, s| blocks[(r / n) * 2 + s / n][(r % n, s % n)])
}

/// Compares `C` of `diag(e^{alpha/2} rho, e^{-alpha/2} rho)` on `[[A,B],[C,D]]` with
/// `[[e^{alpha/2} C_rho A, D^alpha B], [D^{-alpha} C, e^{-alpha/2} C_rho D]]`.
pub fn block_formula_residual<T: Real>(
    rho: &DensityMatrix<T>,
    alpha: T,
    blocks: [&ComplexMatrix<T>; 4],
) -> Result<T> {
    let n = rho.dim();
    let half = alpha * T::lit(0.5);
    let zero = ComplexMatrix::zeros(n, n);
    let up = rho.matrix().scale_re(half.exp());
    let down = rho.matrix().scale_re((-half).exp());
    let big = block_matrix([&up, &zero, &zero, &down]);
    let lhs = kubo_mori(&big)?.apply(&block_matrix(blocks));

    let c = KuboMoriOp::from_density(rho, T::zero())?;
    let dp = KuboMoriOp::from_density(rho, alpha)?;
    let dm = KuboMoriOp::from_density(rho, -alpha)?;
    let rhs = block_matrix([
        &c.apply(blocks[0]).scale_re(half.exp()),
        &dp.apply(blocks[1]),
        &dm.apply(blocks[2]),
        &c.apply(blocks[3]).scale_re((-half).exp()),
    ]);
    Ok((&lhs - &rhs).norm())
}

/// `||C_{rho (x) sigma}[Q, (log rho - log rho_hat) (x) 1] - [Q, rho (x) sigma]||_F`,
/// valid when `[Q, log rho_hat (x) 1 + 1 (x) log sigma] = 0`.
pub fn tensor_miracle_residual<T: Real>(
    tl: &TensorLindblad<T>,
    thermal: &ThermalState<T>,
    rho: &DensityMatrix<T>,
) -> Result<T> {
    let (_, log_comm) = tl.commutation_residuals(thermal);
    let log_comm = log_comm.ok_or_else(|| Error::Precondition("sigma must be positive definite".into()))?;
    let bound = T::tol(1e-10) * tl.q.norm().max(T::one());
    if log_comm > bound {
        return Err(Error::Precondition(format!(
            "coupling does not commute with log rho_hat (x) 1 + 1 (x) log sigma (residual {:e})",
            log_comm.as_f64()
        )));
    }
    let joint = HermitianEigen::kron(&rho.floored_eigen(), &tl.sigma_eigen);
    let c = KuboMoriOp::from_eigen(joint, T::zero())?;
    let xi = &rho.log() - &thermal.log_rho_hat();
    let lifted = kron(&xi, &ComplexMatrix::identity(tl.dim2));
    let lhs = c.apply(&tl.q.commutator(&lifted));
    let rhs = tl.q.commutator(&kron(rho.matrix(), &tl.sigma));
    Ok((&lhs - &rhs).norm())
}
