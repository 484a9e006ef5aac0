use crate::error::Result;
use crate::generic::{CoupledState, DampedStructure, GenericStructure, PoissonStructure};
use crate::scalar::Real;

/// GENERIC system obtained from a damped Hamiltonian system by appending a scalar slack
/// energy `e` as the last macroscopic coordinate: `E~ = F + e`, `S~ = e / theta_*`,
/// `J~ = diag(J, 0)` and `K~(xi, s) = (K(xi - s DF), -<DF, K(xi - s DF)>)`.
#[derive(Clone, Debug)]
pub struct SlackGeneric<D> {
    inner: D,
}

impl<D> SlackGeneric<D> {
    pub fn new(inner: D) -> Self {
        Self { inner }
    }

    pub fn inner(&self) -> &D {
        &self.inner
    }
}

fn split<T: Real>(q: &CoupledState<T>) -> (CoupledState<T>, T) {
    let mut z = q.z.clone();
    let e = z.pop().unwrap_or_else(T::zero);
    (CoupledState::new(q.rho.clone(), z), e)
}

fn join<T: Real>(q: CoupledState<T>, e: T) -> CoupledState<T> {
    let mut z = q.z;
    z.push(e);
    CoupledState::new(q.rho, z)
}

/// Appends a slack coordinate `e` to a state of the underlying damped system.
pub fn with_slack<T: Real>(q: &CoupledState<T>, e: T) -> CoupledState<T> {
    join(q.clone(), e)
}

impl<T: Real, D: DampedStructure<T>> PoissonStructure<T> for SlackGeneric<D> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn dim_z(&self) -> usize {
        self.inner.dim_z() + 1
    }

    fn poisson(&self, q: &CoupledState<T>, xi: &CoupledState<T>) -> Result<CoupledState<T>> {
        let (q0, _) = split(q);
        let (xi0, _) = split(xi);
        Ok(join(self.inner.poisson(&q0, &xi0)?, T::zero()))
    }

    fn poisson_derivative(
        &self,
        q: &CoupledState<T>,
        dq: &CoupledState<T>,
        xi: &CoupledState<T>,
    ) -> Result<CoupledState<T>> {
        let (q0, _) = split(q);
        let (dq0, _) = split(dq);
        let (xi0, _) = split(xi);
        Ok(join(self.inner.poisson_derivative(&q0, &dq0, &xi0)?, T::zero()))
    }
}

impl<T: Real, D: DampedStructure<T>> GenericStructure<T> for SlackGeneric<D> {
    fn energy(&self, q: &CoupledState<T>) -> Result<T> {
        let (q0, e) = split(q);
        Ok(self.inner.free_energy(&q0)? + e)
    }

    fn entropy(&self, q: &CoupledState<T>) -> Result<T> {
        Ok(split(q).1 / self.inner.theta_star())
    }

    fn energy_grad(&self, q: &CoupledState<T>) -> Result<CoupledState<T>> {
        let (q0, _) = split(q);
        Ok(join(self.inner.free_energy_grad(&q0)?, T::one()))
    }

    fn entropy_grad(&self, q: &CoupledState<T>) -> Result<CoupledState<T>> {
        let (q0, _) = split(q);
        let zero = CoupledState::zeros(q0.dim(), q0.z.len());
        Ok(join(zero, T::one() / self.inner.theta_star()))
    }

    fn onsager(&self, q: &CoupledState<T>, xi: &CoupledState<T>) -> Result<CoupledState<T>> {
        let (q0, _) = split(q);
        let (xi0, s) = split(xi);
        let df = self.inner.free_energy_grad(&q0)?;
        let k = self.inner.onsager(&q0, &xi0.plus(-s, &df))?;
        let flux = -df.pair(&k);
        Ok(join(k, flux))
    }
}
