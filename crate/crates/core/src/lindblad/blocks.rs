use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, ComplexMatrix};
use crate::lindblad::{EigenpairQ, JumpTerm, Superoperator};
use crate::scalar::Real;

/// Dephasing block `S_W A = [W, A W] + [W A, W] = -[W, [W, A]]` for Hermitian `W` commuting with `H`.
pub fn make_sw<T: Real>(w: &ComplexMatrix<T>, h: &ComplexMatrix<T>) -> Result<Superoperator<T>> {
    let n = w.require_square("W")?;
    w.require_hermitian(T::tol(1e-10))?;
    let comm = w.commutator(h).norm();
    let bound = T::tol(1e-10) * w.norm().max(T::one()) * h.norm().max(T::one());
    if comm > bound {
        return Err(Error::Precondition(format!("[W,H] does not vanish (norm {:e})", comm.as_f64())));
    }
    Superoperator::from_jumps(n, vec![JumpTerm::new(T::one(), w.hermitian_part())])
}

/// Exchange block
/// `M A = e^{beta w/2}([Q, A Q^*] + [Q A, Q^*]) + e^{-beta w/2}([Q^*, A Q] + [Q^* A, Q])`.
pub fn make_mq<T: Real>(beta: T, pair: &EigenpairQ<T>) -> Superoperator<T> {
    let half = beta * pair.omega * T::lit(0.5);
    let n = pair.q.rows();
    Superoperator::from_jumps(
        n,
        vec![JumpTerm::new(half.exp(), pair.q.clone()), JumpTerm::new((-half).exp(), pair.q.adjoint())],
    )
    .expect("square eigen-operator")
}

/// `L A = sum_nm a_nm ([Q_n, A Q_m^*] + [Q_n A, Q_m^*])` with Hermitian positive semidefinite `a`.
///
/// The coefficient matrix is diagonalised so the result is stored as independent jump terms.
pub fn make_general_lindblad<T: Real>(
    a: &ComplexMatrix<T>,
    ops: &[ComplexMatrix<T>],
) -> Result<Superoperator<T>> {
    let k = a.require_square("coefficient matrix")?;
    if k != ops.len() {
        return Err(Error::Shape(format!("{k}x{k} coefficients for {} operators", ops.len())));
    }
    let n = ops.first().map_or(0, |q| q.rows());
    if ops.iter().any(|q| q.rows() != n || q.cols() != n) {
        return Err(Error::Shape("operators differ in shape".into()));
    }
    let e = hermitian_eigen(a, T::tol(1e-10))?;
    let floor = T::tol(1e-10) * a.norm().max(T::one());
    if e.min() < -floor {
        return Err(Error::NotPositive { min_eigenvalue: e.min().as_f64() });
    }
    let mut jumps = Vec::new();
    for (idx, &lam) in e.values.iter().enumerate() {
        if lam <= T::zero() {
            continue;
        }
        let mut op = ComplexMatrix::zeros(n, n);
        for (m, q) in ops.iter().enumerate() {
            op.axpy(e.vectors[(m, idx)], q);
        }
        jumps.push(JumpTerm::new(lam, op));
    }
    Superoperator::from_jumps(n, jumps)
}

/// Sum of exchange blocks `sum_c M_{beta, Q_c}` plus, optionally, the Hamiltonian part `i[., H]`.
pub fn exchange_generator<T: Real>(
    beta: T,
    pairs: &[EigenpairQ<T>],
    hamiltonian: Option<&ComplexMatrix<T>>,
) -> Result<Superoperator<T>> {
    let n = pairs
        .first()
        .map(|p| p.q.rows())
        .or(hamiltonian.map(|h| h.rows()))
        .ok_or_else(|| Error::Shape("empty generator".into()))?;
    let mut parts: Vec<Superoperator<T>> = pairs.iter().map(|p| make_mq(beta, p)).collect();
    if let Some(h) = hamiltonian {
        parts.push(Superoperator::hamiltonian(h)?);
    }
    Superoperator::sum(n, parts)
}
