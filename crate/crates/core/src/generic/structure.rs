use crate::error::Result;
use crate::generic::CoupledState;
use crate::scalar::Real;

/// A state-dependent Poisson operator `J(q)` acting on cotangent vectors.
pub trait PoissonStructure<T: Real> {
    /// Dimension of the quantum Hilbert space.
    fn dim(&self) -> usize;
    /// Number of macroscopic coordinates.
    fn dim_z(&self) -> usize;
    fn poisson(&self, q: &CoupledState<T>, xi: &CoupledState<T>) -> Result<CoupledState<T>>;
    /// Directional derivative `d/de J(q + e dq) xi` at `e = 0`.
    fn poisson_derivative(
        &self,
        q: &CoupledState<T>,
        dq: &CoupledState<T>,
        xi: &CoupledState<T>,
    ) -> Result<CoupledState<T>>;
}

/// GENERIC system `q' = J(q) DE(q) + K(q) DS(q)`.
pub trait GenericStructure<T: Real>: PoissonStructure<T> {
    fn energy(&self, q: &CoupledState<T>) -> Result<T>;
    fn entropy(&self, q: &CoupledState<T>) -> Result<T>;
    fn energy_grad(&self, q: &CoupledState<T>) -> Result<CoupledState<T>>;
    fn entropy_grad(&self, q: &CoupledState<T>) -> Result<CoupledState<T>>;
    fn onsager(&self, q: &CoupledState<T>, xi: &CoupledState<T>) -> Result<CoupledState<T>>;

    fn vector_field(&self, q: &CoupledState<T>) -> Result<CoupledState<T>> {
        let mut out = self.poisson(q, &self.energy_grad(q)?)?;
        out.axpy(T::one(), &self.onsager(q, &self.entropy_grad(q)?)?);
        Ok(out)
    }

    /// `dS/dt = <DS, K DS>`, which equals twice the dual dissipation potential at `DS`.
    fn entropy_production(&self, q: &CoupledState<T>) -> Result<T> {
        let ds = self.entropy_grad(q)?;
        Ok(ds.pair(&self.onsager(q, &ds)?))
    }
}

/// Damped Hamiltonian system `q' = (J(q) - K(q) / theta_*) DF(q)`.
pub trait DampedStructure<T: Real>: PoissonStructure<T> {
    fn free_energy(&self, q: &CoupledState<T>) -> Result<T>;
    fn free_energy_grad(&self, q: &CoupledState<T>) -> Result<CoupledState<T>>;
    fn onsager(&self, q: &CoupledState<T>, xi: &CoupledState<T>) -> Result<CoupledState<T>>;

    fn theta_star(&self) -> T {
        T::one()
    }

    fn vector_field(&self, q: &CoupledState<T>) -> Result<CoupledState<T>> {
        let df = self.free_energy_grad(q)?;
        let mut out = self.poisson(q, &df)?;
        out.axpy(-T::one() / self.theta_star(), &self.onsager(q, &df)?);
        Ok(out)
    }

    /// `-dF/dt = <DF, K DF> / theta_*`.
    fn dissipation_rate(&self, q: &CoupledState<T>) -> Result<T> {
        let df = self.free_energy_grad(q)?;
        Ok(df.pair(&self.onsager(q, &df)?) / self.theta_star())
    }
}
