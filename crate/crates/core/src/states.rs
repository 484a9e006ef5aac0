//! Density matrices, thermal equilibria and the entropy functionals built on them.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, ComplexMatrix, HermitianEigen};
use crate::scalar::{cr, Real};

/// Eigenvalues with `|x| <= ZERO_BAND` are replaced by [`EIGEN_FLOOR`] inside logarithms.
pub const ZERO_BAND: f64 = 1e-12;
pub const EIGEN_FLOOR: f64 = 1e-14;

/// Applies the zero-band floor to a spectrum.
///
/// Returns the floored values and whether any value was floored; values below
/// `-ZERO_BAND` are an error.
pub fn floor_spectrum<T: Real>(values: &[T]) -> Result<(Vec<T>, bool)> {
    let band = T::tol(ZERO_BAND);
    let floor = T::lit(EIGEN_FLOOR);
    let mut floored = false;
    let mut out = Vec::with_capacity(values.len());
    for &x in values {
        if x < -band {
            return Err(Error::NotPositive { min_eigenvalue: x.as_f64() });
        }
        if x <= band {
            floored = true;
            out.push(floor.max(x));
        } else {
            out.push(x);
        }
    }
    Ok((out, floored))
}

/// Validated density matrix together with its eigen-decomposition.
#[derive(Clone, Debug)]
pub struct DensityMatrix<T: Real> {
    rho: ComplexMatrix<T>,
    eigen: HermitianEigen<T>,
    floored: Vec<T>,
    was_floored: bool,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, positivity and unit trace at tolerance `1e-12`.
    pub fn new(rho: ComplexMatrix<T>) -> Result<Self> {
        Self::with_tol(rho, T::tol(ZERO_BAND))
    }

    /// Validation for states produced by time stepping, which carry round-off:
    /// Hermiticity and positivity at `1e-9`, trace at `1e-6`.
    pub fn relaxed(rho: ComplexMatrix<T>) -> Result<Self> {
        Self::checked(rho, T::tol(1e-9), T::tol(1e-6))
    }

    pub fn with_tol(rho: ComplexMatrix<T>, tol: T) -> Result<Self> {
        Self::checked(rho, tol, tol)
    }

    fn checked(rho: ComplexMatrix<T>, tol: T, trace_tol: T) -> Result<Self> {
        rho.require_square("density matrix")?;
        if !rho.is_finite() {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let asym = rho.antihermitian_norm();
        if asym > tol * rho.norm().max(T::one()) {
            return Err(Error::InvalidState(format!("not Hermitian (residual {:e})", asym.as_f64())));
        }
        let rho = rho.hermitian_part();
        let tr = rho.trace().re;
        if (tr - T::one()).abs() > trace_tol {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let eigen = hermitian_eigen(&rho, tol)?;
        if eigen.min() < -tol {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:e}",
                eigen.min().as_f64()
            )));
        }
        let band = T::tol(ZERO_BAND);
        let floor = T::lit(EIGEN_FLOOR);
        let was_floored = eigen.values.iter().any(|&x| x <= band);
        let floored = eigen.values.iter().map(|&x| if x <= band { floor.max(x) } else { x }).collect();
        Ok(Self { rho, eigen, floored, was_floored })
    }

    /// Maximally mixed state `I / n`.
    pub fn maximally_mixed(n: usize) -> Self {
        let rho = ComplexMatrix::identity(n).scale_re(T::one() / T::lit(n as f64));
        Self::new(rho).expect("maximally mixed state is valid")
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.rho
    }

    pub fn eigen(&self) -> &HermitianEigen<T> {
        &self.eigen
    }

    pub fn dim(&self) -> usize {
        self.rho.rows()
    }

    /// Spectrum after the zero-band floor; the flag reports whether flooring occurred.
    pub fn floored_spectrum(&self) -> (&[T], bool) {
        (&self.floored, self.was_floored)
    }

    /// Eigen-decomposition with the floored spectrum.
    pub fn floored_eigen(&self) -> HermitianEigen<T> {
        HermitianEigen { values: self.floored.clone(), vectors: self.eigen.vectors.clone() }
    }

    /// `log rho` with near-zero eigenvalues floored.
    pub fn log(&self) -> ComplexMatrix<T> {
        let logs: Vec<T> = self.floored.iter().map(|x| x.ln()).collect();
        self.eigen.with_values(&logs)
    }

    /// Von Neumann entropy `-Tr(rho log rho)`.
    pub fn entropy(&self) -> T {
        -self.floored.iter().map(|&x| x * x.ln()).sum::<T>()
    }

    /// `Tr(rho H)`.
    pub fn energy(&self, h: &ComplexMatrix<T>) -> T {
        self.rho.inner_re(h)
    }

    /// `Tr rho (log rho - log sigma)` evaluated through both matrix logarithms.
    pub fn relative_entropy(&self, sigma: &ThermalState<T>) -> T {
        let diff = &self.log() - &sigma.log_rho_hat();
        self.rho.inner_re(&diff)
    }
}

/// Thermal equilibrium `rho_hat = exp(-beta H) / Z`.
#[derive(Clone, Debug)]
pub struct ThermalState<T: Real> {
    beta: T,
    h: ComplexMatrix<T>,
    h_eigen: HermitianEigen<T>,
    weights: Vec<T>,
    log_z: T,
    rho_hat: ComplexMatrix<T>,
}

impl<T: Real> ThermalState<T> {
    pub fn new(h: &ComplexMatrix<T>, beta: T) -> Result<Self> {
        let h_eigen = hermitian_eigen(h, T::tol(1e-10))?;
        let exponents: Vec<T> = h_eigen.values.iter().map(|&e| -beta * e).collect();
        let shift = exponents.iter().copied().fold(T::neg_infinity(), T::max);
        let raw: Vec<T> = exponents.iter().map(|&x| (x - shift).exp()).collect();
        let sum: T = raw.iter().copied().sum();
        let weights: Vec<T> = raw.iter().map(|&x| x / sum).collect();
        let log_z = shift + sum.ln();
        let rho_hat = h_eigen.with_values(&weights);
        Ok(Self { beta, h: h.hermitian_part(), h_eigen, weights, log_z, rho_hat })
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix<T> {
        &self.h
    }

    pub fn h_eigen(&self) -> &HermitianEigen<T> {
        &self.h_eigen
    }

    /// Energies `eps_i` in ascending order (eigenvalues of `H`).
    pub fn energies(&self) -> &[T] {
        &self.h_eigen.values
    }

    /// Equilibrium populations `exp(-beta eps_i) / Z` in the eigenbasis of `H`.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn log_partition(&self) -> T {
        self.log_z
    }

    pub fn partition(&self) -> T {
        self.log_z.exp()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.rho_hat
    }

    pub fn dim(&self) -> usize {
        self.h.rows()
    }

    pub fn density(&self) -> Result<DensityMatrix<T>> {
        DensityMatrix::new(self.rho_hat.clone())
    }

    /// `log rho_hat = -beta H - log Z`, computed without a matrix logarithm.
    pub fn log_rho_hat(&self) -> ComplexMatrix<T> {
        let mut out = self.h.scale_re(-self.beta);
        for i in 0..self.dim() {
            out[(i, i)] -= cr(self.log_z);
        }
        out
    }

    /// Relative entropy in the form `-S(rho) + beta Tr(rho H) + log Z`.
    pub fn relative_entropy_of(&self, rho: &DensityMatrix<T>) -> T {
        -rho.entropy() + self.beta * rho.energy(&self.h) + self.log_z
    }
}

/// Von Neumann entropy of a density matrix.
pub fn entropy<T: Real>(rho: &DensityMatrix<T>) -> T {
    rho.entropy()
}

/// `Tr rho (log rho - log rho_hat)`.
pub fn relative_entropy<T: Real>(rho: &DensityMatrix<T>, thermal: &ThermalState<T>) -> T {
    rho.relative_entropy(thermal)
}
