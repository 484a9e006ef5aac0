use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::{cr, Real, C};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `A = U diag(values) U^*` of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub vectors: ComplexMatrix<T>,
}

/// Cyclic complex Jacobi eigensolver.
///
/// Rejects inputs whose anti-Hermitian part exceeds `tol` relative to the norm;
/// otherwise diagonalises the Hermitian part.
pub fn hermitian_eigen<T: Real>(a: &ComplexMatrix<T>, tol: T) -> Result<HermitianEigen<T>> {
    let n = a.require_square("eigen-decomposition input")?;
    a.require_hermitian(tol)?;
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.norm();
    if scale == T::zero() || n == 1 {
        return Ok(HermitianEigen { values: m.diagonal().iter().map(|z| z.re).collect(), vectors: v });
    }
    let thresh = T::lit(1e-14).max(T::epsilon() * T::lit(8.0)) * scale;
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&m);
        if off <= thresh {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off: off.as_f64() });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        sweeps += 1;
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, k| v[(r, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm<T: Real>(m: &ComplexMatrix<T>) -> T {
    let n = m.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation annihilating `m[p,q]`: a phase on `q` makes the pivot real,
/// then a real Givens rotation zeroes it.
fn rotate<T: Real>(m: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r <= T::min_positive_value() {
        return;
    }
    let phase = apq / r;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let tau = (aqq - app) / (r + r);
    let t = if tau == T::zero() {
        T::one()
    } else {
        tau.signum() / (tau.abs() + (T::one() + tau * tau).sqrt())
    };
    let cs = T::one() / (T::one() + t * t).sqrt();
    let sn = t * cs;
    let g_pp = cr(cs);
    let g_pq = cr(sn);
    let g_qp = phase.conj() * (-sn);
    let g_qq = phase.conj() * cs;
    let n = m.rows();
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * g_pp + mkq * g_qp;
        m[(k, q)] = mkp * g_pq + mkq * g_qq;
    }
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = g_pp.conj() * mpk + g_qp.conj() * mqk;
        m[(q, k)] = g_pq.conj() * mpk + g_qq.conj() * mqk;
    }
    m[(p, q)] = cr(T::zero());
    m[(q, p)] = cr(T::zero());
    m[(p, p)] = cr(m[(p, p)].re);
    m[(q, q)] = cr(m[(q, q)].re);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

impl<T: Real> HermitianEigen<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }

    pub fn max(&self) -> T {
        self.values.last().copied().unwrap_or_else(T::zero)
    }

    pub fn vector(&self, k: usize) -> Vec<C<T>> {
        self.vectors.column(k)
    }

    /// `U diag(f(values)) U^*`.
    pub fn map(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let d: Vec<T> = self.values.iter().map(|&x| f(x)).collect();
        self.with_values(&d)
    }

    /// Like [`map`](Self::map) but fails on the first eigenvalue where `f` is not finite.
    pub fn try_map(&self, f: impl Fn(T) -> T) -> Result<ComplexMatrix<T>> {
        let mut d = Vec::with_capacity(self.dim());
        for &x in &self.values {
            let y = f(x);
            if !y.is_finite() {
                return Err(Error::Domain { eigenvalue: x.as_f64() });
            }
            d.push(y);
        }
        Ok(self.with_values(&d))
    }

    /// `U diag(d) U^*` for arbitrary real `d`.
    pub fn with_values(&self, d: &[T]) -> ComplexMatrix<T> {
        let n = self.dim();
        let u = &self.vectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).fold(cr(T::zero()), |acc, k| acc + u[(i, k)] * u[(j, k)].conj() * d[k])
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.with_values(&self.values)
    }

    /// `U^* A U`: `A` expressed in the eigenbasis.
    pub fn to_eigenbasis(&self, a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.vectors.adjoint().matmul(a).matmul(&self.vectors)
    }

    /// `U A U^*`: inverse of [`to_eigenbasis`](Self::to_eigenbasis).
    pub fn from_eigenbasis(&self, a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.vectors.matmul(a).matmul(&self.vectors.adjoint())
    }

    /// Groups indices of (ascending) eigenvalues whose consecutive gaps are at most `tol`.
    pub fn clusters(&self, tol: T) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for (k, &x) in self.values.iter().enumerate() {
            match out.last_mut() {
                Some(last) if x - self.values[*last.last().unwrap()] <= tol => last.push(k),
                _ => out.push(vec![k]),
            }
        }
        out
    }

    /// Eigen-decomposition of `A (x) B` assembled from the factors, re-sorted ascending.
    pub fn kron(a: &Self, b: &Self) -> Self {
        let (na, nb) = (a.dim(), b.dim());
        let mut pairs: Vec<(T, usize, usize)> = Vec::with_capacity(na * nb);
        for i in 0..na {
            for j in 0..nb {
                pairs.push((a.values[i] * b.values[j], i, j));
            }
        }
        pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
        let n = na * nb;
        let vectors = ComplexMatrix::from_fn(n, n, |row, k| {
            let (_, i, j) = pairs[k];
            a.vectors[(row / nb, i)] * b.vectors[(row % nb, j)]
        });
        HermitianEigen { values: pairs.iter().map(|p| p.0).collect(), vectors }
    }
}

/// `f(A)` for Hermitian `A`; fails with the offending eigenvalue when `f` is not finite there.
pub fn matrix_function<T: Real>(
    a: &ComplexMatrix<T>,
    f: impl Fn(T) -> T,
    tol: T,
) -> Result<ComplexMatrix<T>> {
    hermitian_eigen(a, tol)?.try_map(f)
}

/// Principal logarithm of a positive definite matrix.
pub fn matrix_log<T: Real>(a: &ComplexMatrix<T>, tol: T) -> Result<ComplexMatrix<T>> {
    matrix_function(a, |x| if x > T::zero() { x.ln() } else { T::nan() }, tol)
}

/// `A^p` for positive definite `A`.
pub fn matrix_power<T: Real>(a: &ComplexMatrix<T>, p: T, tol: T) -> Result<ComplexMatrix<T>> {
    matrix_function(a, |x| if x > T::zero() { x.powf(p) } else { T::nan() }, tol)
}

/// `exp(A)` for Hermitian `A`.
pub fn matrix_exp_hermitian<T: Real>(a: &ComplexMatrix<T>, tol: T) -> Result<ComplexMatrix<T>> {
    matrix_function(a, T::exp, tol)
}

/// Square root of a positive semidefinite matrix; eigenvalues in `[-floor, 0)` are treated as zero.
pub fn psd_sqrt<T: Real>(a: &ComplexMatrix<T>, floor: T, tol: T) -> Result<ComplexMatrix<T>> {
    let e = hermitian_eigen(a, tol)?;
    if e.min() < -floor {
        return Err(Error::NotPositive { min_eigenvalue: e.min().as_f64() });
    }
    Ok(e.map(|x| x.max(T::zero()).sqrt()))
}
