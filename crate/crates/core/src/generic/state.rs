use crate::linalg::{dot, ComplexMatrix};
use crate::scalar::Real;

/// A point `(rho, z)` of the coupled state space; also used for tangent and cotangent vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct CoupledState<T: Real> {
    pub rho: ComplexMatrix<T>,
    pub z: Vec<T>,
}

impl<T: Real> CoupledState<T> {
    pub fn new(rho: ComplexMatrix<T>, z: Vec<T>) -> Self {
        Self { rho, z }
    }

    pub fn quantum(rho: ComplexMatrix<T>) -> Self {
        Self { rho, z: Vec::new() }
    }

    pub fn zeros(n: usize, dz: usize) -> Self {
        Self { rho: ComplexMatrix::zeros(n, n), z: vec![T::zero(); dz] }
    }

    pub fn dim(&self) -> usize {
        self.rho.rows()
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: T, other: &Self) {
        self.rho.axpy_re(s, &other.rho);
        for (a, &b) in self.z.iter_mut().zip(&other.z) {
            *a += s * b;
        }
    }

    pub fn plus(&self, s: T, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(s, other);
        out
    }

    pub fn scale(&self, s: T) -> Self {
        Self { rho: self.rho.scale_re(s), z: self.z.iter().map(|&x| x * s).collect() }
    }

    /// Duality pairing `Re Tr(a^* b) + a_z . b_z`.
    pub fn pair(&self, other: &Self) -> T {
        self.rho.inner_re(&other.rho) + dot(&self.z, &other.z)
    }

    pub fn norm(&self) -> T {
        self.pair(self).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.rho.is_finite() && self.z.iter().all(|x| x.is_finite())
    }
}
