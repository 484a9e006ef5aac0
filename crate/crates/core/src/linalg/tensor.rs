use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianEigen};
use crate::scalar::{cr, Real};

/// Kronecker product with the second factor's index running fastest:
/// `(A (x) B)[i*d2 + k, j*d2 + l] = A[i,j] B[k,l]`.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |r, s| {
        a[(r / br, s / bc)] * b[(r % br, s % bc)]
    })
}

fn split_dims<T: Real>(m: &ComplexMatrix<T>, dim1: usize, what: &str) -> Result<usize> {
    let n = m.require_square(what)?;
    if dim1 == 0 || n % dim1 != 0 {
        return Err(Error::Shape(format!("{what}: dimension {n} is not divisible by {dim1}")));
    }
    Ok(n / dim1)
}

/// Partial trace over the second tensor factor of `h1 (x) h2` with `dim h1 = dim1`.
pub fn partial_trace_2<T: Real>(m: &ComplexMatrix<T>, dim1: usize) -> Result<ComplexMatrix<T>> {
    let d2 = split_dims(m, dim1, "partial trace")?;
    Ok(ComplexMatrix::from_fn(dim1, dim1, |i, j| {
        (0..d2).fold(cr(T::zero()), |acc, k| acc + m[(i * d2 + k, j * d2 + k)])
    }))
}

/// Partial transpose of the second factor relative to the eigenbasis `{e_j}` of `sigma`:
/// writing `m = sum_jk Q_jk (x) |e_j><e_k|`, returns `sum_jk Q_kj (x) |e_j><e_k|`.
///
/// The result depends on the phases and (for degenerate `sigma`) the choice of the
/// eigenbasis, which is fixed by `basis`.
pub fn partial_transpose_sigma<T: Real>(
    m: &ComplexMatrix<T>,
    basis: &HermitianEigen<T>,
    dim1: usize,
) -> Result<ComplexMatrix<T>> {
    let d2 = split_dims(m, dim1, "partial transpose")?;
    if basis.dim() != d2 {
        return Err(Error::Shape(format!("basis of dimension {} for factor of dimension {d2}", basis.dim())));
    }
    let lift = kron(&ComplexMatrix::identity(dim1), &basis.vectors);
    let inner = lift.adjoint().matmul(m).matmul(&lift);
    let swapped = ComplexMatrix::from_fn(dim1 * d2, dim1 * d2, |r, s| {
        let (a, k) = (r / d2, r % d2);
        let (b, j) = (s / d2, s % d2);
        inner[(a * d2 + j, b * d2 + k)]
    });
    Ok(lift.matmul(&swapped).matmul(&lift.adjoint()))
}

/// The operator block `<e_k| m |e_l>` on the first factor, for vectors `e_k, e_l` of the second.
pub fn factor_block<T: Real>(
    m: &ComplexMatrix<T>,
    dim1: usize,
    ek: &[num_complex::Complex<T>],
    el: &[num_complex::Complex<T>],
) -> ComplexMatrix<T> {
    let d2 = ek.len();
    ComplexMatrix::from_fn(dim1, dim1, |a, b| {
        let mut acc = cr(T::zero());
        for c in 0..d2 {
            let w = ek[c].conj();
            if w.norm_sqr() == T::zero() {
                continue;
            }
            for d in 0..d2 {
                acc += w * m[(a * d2 + c, b * d2 + d)] * el[d];
            }
        }
        acc
    })
}
