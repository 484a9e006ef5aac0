use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::{cr, Real};

const PADE_ORDER: usize = 6;

/// Matrix exponential of a general complex matrix by scaling and squaring with a `[6/6]` Padé approximant.
pub fn expm<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let n = a.require_square("expm input")?;
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<T>())
        .fold(T::zero(), T::max);
    let mut s = 0i32;
    if norm1 > T::lit(0.5) {
        s = ((norm1 / T::lit(0.5)).log2().ceil()).to_i32().unwrap_or(0).max(0);
    }
    let scaled = a.scale_re(T::lit(2f64.powi(-s)));

    let mut coeffs = [T::one(); PADE_ORDER + 1];
    for k in 1..=PADE_ORDER {
        let kk = T::lit(k as f64);
        let num = T::lit((PADE_ORDER + 1 - k) as f64);
        let den = T::lit((2 * PADE_ORDER + 1 - k) as f64) * kk;
        coeffs[k] = coeffs[k - 1] * num / den;
    }
    let ident = ComplexMatrix::identity(n);
    let mut numer = ident.scale_re(coeffs[0]);
    let mut denom = ident.scale_re(coeffs[0]);
    let mut power = ident;
    for (k, &ck) in coeffs.iter().enumerate().skip(1) {
        power = power.matmul(&scaled);
        numer.axpy_re(ck, &power);
        let sign = if k % 2 == 0 { T::one() } else { -T::one() };
        denom.axpy_re(sign * ck, &power);
    }
    let mut result = solve(&denom, &numer)?;
    for _ in 0..s {
        result = result.matmul(&result);
    }
    Ok(result)
}

/// Solves `A X = B` by Gaussian elimination with partial pivoting.
pub fn solve<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let n = a.require_square("linear system")?;
    if b.rows() != n {
        return Err(Error::Shape(format!("right-hand side has {} rows, expected {n}", b.rows())));
    }
    let m = b.cols();
    let mut lu = a.clone();
    let mut x = b.clone();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| lu[(i, col)].norm().partial_cmp(&lu[(j, col)].norm()).unwrap())
            .unwrap();
        if lu[(pivot, col)].norm() <= T::min_positive_value() {
            return Err(Error::Singular);
        }
        if pivot != col {
            for k in 0..n {
                let t = lu[(col, k)];
                lu[(col, k)] = lu[(pivot, k)];
                lu[(pivot, k)] = t;
            }
            for k in 0..m {
                let t = x[(col, k)];
                x[(col, k)] = x[(pivot, k)];
                x[(pivot, k)] = t;
            }
        }
        let inv = cr(T::one()) / lu[(col, col)];
        for row in (col + 1)..n {
            let f = lu[(row, col)] * inv;
            if f.norm() == T::zero() {
                continue;
            }
            for k in col..n {
                let v = lu[(col, k)];
                lu[(row, k)] -= f * v;
            }
            for k in 0..m {
                let v = x[(col, k)];
                x[(row, k)] -= f * v;
            }
        }
    }
    for col in (0..n).rev() {
        let inv = cr(T::one()) / lu[(col, col)];
        for k in 0..m {
            let mut acc = x[(col, k)];
            for j in (col + 1)..n {
                acc -= lu[(col, j)] * x[(j, k)];
            }
            x[(col, k)] = acc * inv;
        }
    }
    Ok(x)
}
