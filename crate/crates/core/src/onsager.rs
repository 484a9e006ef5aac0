//! Onsager operators `K(rho)` that turn detailed-balance generators into gradient flows
//! of the relative entropy: `L rho = -K(rho)(log rho - log rho_hat)`.

use crate::error::{Error, Result};
use crate::kubo_mori::KuboMoriOp;
use crate::linalg::{hermitian_basis, hermitian_eigen, kron, partial_trace_2, ComplexMatrix, HermitianEigen, RealMatrix};
use crate::lindblad::{make_mq, EigenpairQ, Superoperator, TensorLindblad};
use crate::scalar::Real;
use crate::states::{DensityMatrix, ThermalState};

/// Where an Onsager operator comes from.
#[derive(Clone, Debug)]
pub enum OnsagerSource<T: Real> {
    /// `K xi = [Q^*, D^{-beta w}[Q, xi]] + [Q, D^{beta w}[Q^*, xi]]`.
    Simple { beta: T, pair: EigenpairQ<T> },
    /// `K xi = Tr_2 [Q, C_{rho (x) sigma}[Q, xi (x) 1]]`.
    Tensor(TensorLindblad<T>),
    Scaled(T, Box<OnsagerSource<T>>),
    Sum(Vec<OnsagerSource<T>>),
}

pub fn simple_onsager<T: Real>(beta: T, pair: EigenpairQ<T>) -> OnsagerSource<T> {
    OnsagerSource::Simple { beta, pair }
}

pub fn tensor_onsager<T: Real>(tl: TensorLindblad<T>) -> OnsagerSource<T> {
    OnsagerSource::Tensor(tl)
}

pub fn sum_onsager<T: Real>(parts: Vec<OnsagerSource<T>>) -> OnsagerSource<T> {
    OnsagerSource::Sum(parts)
}

impl<T: Real> OnsagerSource<T> {
    pub fn dim(&self) -> usize {
        match self {
            OnsagerSource::Simple { pair, .. } => pair.q.rows(),
            OnsagerSource::Tensor(tl) => tl.dim1,
            OnsagerSource::Scaled(_, inner) => inner.dim(),
            OnsagerSource::Sum(parts) => parts.first().map_or(0, |p| p.dim()),
        }
    }

    /// The Lindblad generator this operator produces through `L rho = -K(rho)(log rho - log rho_hat)`.
    pub fn generator(&self) -> Result<Superoperator<T>> {
        Ok(match self {
            OnsagerSource::Simple { beta, pair } => make_mq(*beta, pair),
            OnsagerSource::Tensor(tl) => tl.kraus_generator(),
            OnsagerSource::Scaled(s, inner) => inner.generator()?.scaled(*s),
            OnsagerSource::Sum(parts) => {
                Superoperator::sum(self.dim(), parts.iter().map(|p| p.generator()).collect::<Result<_>>()?)?
            }
        })
    }

    /// Evaluates the operator at a state, precomputing the spectral data it needs.
    pub fn at(&self, rho: &DensityMatrix<T>) -> Result<OnsagerApplication<T>> {
        let mut parts = Vec::new();
        self.collect(rho, T::one(), &mut parts)?;
        Ok(OnsagerApplication { dim: rho.dim(), parts })
    }

    fn collect(&self, rho: &DensityMatrix<T>, weight: T, out: &mut Vec<Part<T>>) -> Result<()> {
        match self {
            OnsagerSource::Simple { beta, pair } => {
                let a = *beta * pair.omega;
                out.push(Part::Simple {
                    weight,
                    q: pair.q.clone(),
                    qd: pair.q.adjoint(),
                    d_minus: KuboMoriOp::from_density(rho, -a)?,
                    d_plus: KuboMoriOp::from_density(rho, a)?,
                });
            }
            OnsagerSource::Tensor(tl) => {
                let joint = HermitianEigen::kron(&rho.floored_eigen(), &tl.sigma_eigen);
                out.push(Part::Tensor {
                    weight,
                    q: tl.q.clone(),
                    dim2: tl.dim2,
                    c: KuboMoriOp::from_eigen(joint, T::zero())?,
                });
            }
            OnsagerSource::Scaled(s, inner) => inner.collect(rho, weight * *s, out)?,
            OnsagerSource::Sum(parts) => {
                for p in parts {
                    p.collect(rho, weight, out)?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
enum Part<T: Real> {
    Simple {
        weight: T,
        q: ComplexMatrix<T>,
        qd: ComplexMatrix<T>,
        d_minus: KuboMoriOp<T>,
        d_plus: KuboMoriOp<T>,
    },
    Tensor { weight: T, q: ComplexMatrix<T>, dim2: usize, c: KuboMoriOp<T> },
}

/// An Onsager operator frozen at a state `rho`.
#[derive(Clone, Debug)]
pub struct OnsagerApplication<T: Real> {
    dim: usize,
    parts: Vec<Part<T>>,
}

impl<T: Real> OnsagerApplication<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `K(rho) xi` for Hermitian `xi`.
    pub fn apply(&self, xi: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        check_hermitian(xi)?;
        Ok(self.apply_unchecked(xi))
    }

    pub(crate) fn apply_unchecked(&self, xi: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for part in &self.parts {
            match part {
                Part::Simple { weight, q, qd, d_minus, d_plus } => {
                    let a = qd.commutator(&d_minus.apply(&q.commutator(xi)));
                    let b = q.commutator(&d_plus.apply(&qd.commutator(xi)));
                    out.axpy_re(*weight, &(&a + &b));
                }
                Part::Tensor { weight, q, dim2, c } => {
                    let lifted = kron(xi, &ComplexMatrix::identity(*dim2));
                    let inner = c.apply(&q.commutator(&lifted));
                    let traced = partial_trace_2(&q.commutator(&inner), self.dim).expect("dimensions agree");
                    out.axpy_re(*weight, &traced);
                }
            }
        }
        out.hermitian_part()
    }

    /// Dual dissipation potential `R*(rho, xi)`, evaluated from each part's own quadratic form.
    pub fn potential(&self, xi: &ComplexMatrix<T>) -> Result<T> {
        check_hermitian(xi)?;
        let half = T::lit(0.5);
        let mut total = T::zero();
        for part in &self.parts {
            match part {
                Part::Simple { weight, q, qd, d_minus, d_plus } => {
                    let a = q.commutator(xi);
                    let b = qd.commutator(xi);
                    total += *weight * half * (a.inner_re(&d_minus.apply(&a)) + b.inner_re(&d_plus.apply(&b)));
                }
                Part::Tensor { weight, q, dim2, c } => {
                    let lifted = q.commutator(&kron(xi, &ComplexMatrix::identity(*dim2)));
                    total += *weight * half * lifted.inner_re(&c.apply(&lifted));
                }
            }
        }
        Ok(total)
    }

    /// Matrix of `K(rho)` in the Hilbert-Schmidt orthonormal Hermitian basis.
    pub fn dense(&self) -> RealMatrix<T> {
        let basis = hermitian_basis::<T>(self.dim);
        let images: Vec<ComplexMatrix<T>> = basis.iter().map(|f| self.apply_unchecked(f)).collect();
        RealMatrix::from_fn(basis.len(), basis.len(), |a, b| basis[a].inner_re(&images[b]))
    }

    /// Smallest eigenvalue of the dense form (non-negative for a valid Onsager operator).
    pub fn min_eigenvalue(&self) -> Result<T> {
        let d = self.dense();
        let sym = d.add(&d.transpose()).scale(T::lit(0.5));
        Ok(hermitian_eigen(&sym.to_complex(), T::tol(1e-8))?.min())
    }
}

fn check_hermitian<T: Real>(xi: &ComplexMatrix<T>) -> Result<()> {
    xi.require_hermitian(T::tol(1e-10)).map_err(|e| match e {
        Error::NotHermitian { residual } => {
            Error::Precondition(format!("Onsager operators act on Hermitian arguments (residual {residual:e})"))
        }
        other => other,
    })
}

/// `||L rho + K(rho)(log rho - log rho_hat)||_F`, the gradient-flow residual.
pub fn gradient_form_residual<T: Real>(
    source: &OnsagerSource<T>,
    rho: &DensityMatrix<T>,
    thermal: &ThermalState<T>,
) -> Result<T> {
    let l = source.generator()?;
    let k = source.at(rho)?;
    let xi = &rho.log() - &thermal.log_rho_hat();
    let flow = k.apply(&xi.hermitian_part())?;
    Ok((&l.apply(rho.matrix()) + &flow).norm())
}
