use crate::error::{Error, Result};
use crate::linalg::{kron, partial_trace_2, ComplexMatrix};
use crate::scalar::{c, Real};

/// One dissipative term `rate * ([L A, L^*] + [L, A L^*])`.
#[derive(Clone, Debug)]
pub struct JumpTerm<T: Real> {
    pub rate: T,
    pub op: ComplexMatrix<T>,
    adj: ComplexMatrix<T>,
    gram: ComplexMatrix<T>,
}

impl<T: Real> JumpTerm<T> {
    pub fn new(rate: T, op: ComplexMatrix<T>) -> Self {
        let adj = op.adjoint();
        let gram = adj.matmul(&op);
        Self { rate, op, adj, gram }
    }

    /// `rate * (2 L A L^* - L^*L A - A L^*L)`.
    pub fn apply(&self, a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let sandwich = self.op.matmul(a).matmul(&self.adj);
        let mut out = sandwich.scale_re(self.rate + self.rate);
        out.axpy_re(-self.rate, &self.gram.matmul(a));
        out.axpy_re(-self.rate, &a.matmul(&self.gram));
        out
    }
}

#[derive(Clone, Debug)]
enum Action<T: Real> {
    Jumps(Vec<JumpTerm<T>>),
    /// `A -> i[A, H]`.
    Commutator(ComplexMatrix<T>),
    /// `A -> -Tr_2 [Q, [Q, A (x) sigma]]`.
    Tensor { q: ComplexMatrix<T>, sigma: ComplexMatrix<T> },
    /// Matrix acting on row-major vectorisations.
    Dense(ComplexMatrix<T>),
    Scaled(T, Box<Superoperator<T>>),
    Sum(Vec<Superoperator<T>>),
}

/// Linear map on operators of a Hilbert space of dimension `dim`.
#[derive(Clone, Debug)]
pub struct Superoperator<T: Real> {
    dim: usize,
    action: Action<T>,
}

impl<T: Real> Superoperator<T> {
    pub fn zero(dim: usize) -> Self {
        Self { dim, action: Action::Jumps(Vec::new()) }
    }

    pub fn from_jumps(dim: usize, jumps: Vec<JumpTerm<T>>) -> Result<Self> {
        for j in &jumps {
            if j.op.rows() != dim || j.op.cols() != dim {
                return Err(Error::Shape(format!("jump operator is not {dim}x{dim}")));
            }
        }
        Ok(Self { dim, action: Action::Jumps(jumps) })
    }

    /// Hamiltonian part `A -> i[A, H]`.
    pub fn hamiltonian(h: &ComplexMatrix<T>) -> Result<Self> {
        let n = h.require_square("Hamiltonian")?;
        h.require_hermitian(T::tol(1e-10))?;
        Ok(Self { dim: n, action: Action::Commutator(h.hermitian_part()) })
    }

    pub(crate) fn tensor(q: ComplexMatrix<T>, sigma: ComplexMatrix<T>, dim1: usize) -> Self {
        Self { dim: dim1, action: Action::Tensor { q, sigma } }
    }

    /// Superoperator given by its matrix on row-major vectorisations
    /// (column `k*n + l` holds `vec(L(|k><l|))`).
    pub fn from_dense(matrix: ComplexMatrix<T>) -> Result<Self> {
        let n2 = matrix.require_square("dense superoperator")?;
        let n = (n2 as f64).sqrt().round() as usize;
        if n * n != n2 {
            return Err(Error::Shape(format!("dense superoperator of size {n2} is not a square dimension")));
        }
        Ok(Self { dim: n, action: Action::Dense(matrix) })
    }

    pub fn sum(dim: usize, parts: Vec<Superoperator<T>>) -> Result<Self> {
        if parts.iter().any(|p| p.dim != dim) {
            return Err(Error::Shape("summands act on different dimensions".into()));
        }
        Ok(Self { dim, action: Action::Sum(parts) })
    }

    pub fn scaled(&self, s: T) -> Self {
        Self { dim: self.dim, action: Action::Scaled(s, Box::new(self.clone())) }
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        Self::sum(self.dim, vec![self.clone(), other.clone()])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Jump terms when the map is given in jump form.
    pub fn jumps(&self) -> Option<&[JumpTerm<T>]> {
        match &self.action {
            Action::Jumps(j) => Some(j),
            _ => None,
        }
    }

    pub fn apply(&self, a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        assert_eq!((a.rows(), a.cols()), (self.dim, self.dim), "operand shape");
        match &self.action {
            Action::Jumps(jumps) => {
                let mut out = ComplexMatrix::zeros(self.dim, self.dim);
                for j in jumps {
                    out += &j.apply(a);
                }
                out
            }
            Action::Commutator(h) => a.commutator(h).scale(c(T::zero(), T::one())),
            Action::Tensor { q, sigma } => {
                let big = kron(a, sigma);
                let inner = q.commutator(&big);
                let outer = q.commutator(&inner);
                -partial_trace_2(&outer, self.dim).expect("tensor dimensions validated")
            }
            Action::Dense(m) => ComplexMatrix::from_row_major(self.dim, &m.matvec(a.data())),
            Action::Scaled(s, inner) => inner.apply(a).scale_re(*s),
            Action::Sum(parts) => {
                let mut out = ComplexMatrix::zeros(self.dim, self.dim);
                for p in parts {
                    out += &p.apply(a);
                }
                out
            }
        }
    }

    /// Matrix of the map on row-major vectorisations.
    pub fn to_dense(&self) -> ComplexMatrix<T> {
        if let Action::Dense(m) = &self.action {
            return m.clone();
        }
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n * n, n * n);
        for k in 0..n {
            for l in 0..n {
                let col = k * n + l;
                let img = self.apply(&ComplexMatrix::unit(n, k, l));
                for (row, &v) in img.data().iter().enumerate() {
                    out[(row, col)] = v;
                }
            }
        }
        out
    }

    /// Hilbert-Schmidt adjoint, returned in dense form.
    pub fn adjoint(&self) -> Self {
        Self { dim: self.dim, action: Action::Dense(self.to_dense().adjoint()) }
    }

    /// Dense form of the map conjugated into a basis: `X -> U^* L(U X U^*) U`.
    pub fn in_basis(&self, u: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let n = self.dim;
        let ud = u.adjoint();
        let mut out = ComplexMatrix::zeros(n * n, n * n);
        for k in 0..n {
            for l in 0..n {
                let x = u.matmul(&ComplexMatrix::unit(n, k, l)).matmul(&ud);
                let img = ud.matmul(&self.apply(&x)).matmul(u);
                for (row, &v) in img.data().iter().enumerate() {
                    out[(row, k * n + l)] = v;
                }
            }
        }
        out
    }

    /// Frobenius norm of the dense form.
    pub fn norm(&self) -> T {
        self.to_dense().norm()
    }

    /// Frobenius distance between the dense forms.
    pub fn distance(&self, other: &Self) -> T {
        (&self.to_dense() - &other.to_dense()).norm()
    }
}

