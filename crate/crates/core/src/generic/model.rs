use std::sync::Arc;

use crate::linalg::{ComplexMatrix, RealMatrix};
use crate::lindblad::EigenpairQ;
use crate::scalar::Real;

/// Macroscopic subsystem of a GENERIC model: energy, entropy and the macroscopic
/// Poisson and Onsager matrices.
pub trait MacroGeneric<T: Real>: Send + Sync {
    fn dim(&self) -> usize;
    fn labels(&self) -> Vec<String> {
        (0..self.dim()).map(|i| format!("z{i}")).collect()
    }
    fn energy(&self, z: &[T]) -> T;
    fn energy_grad(&self, z: &[T]) -> Vec<T>;
    fn entropy(&self, z: &[T]) -> T;
    fn entropy_grad(&self, z: &[T]) -> Vec<T>;
    /// Constant antisymmetric `J_ma`.
    fn poisson(&self) -> RealMatrix<T>;
    /// Symmetric positive semidefinite `K_ma(z)`.
    fn onsager(&self, z: &[T]) -> RealMatrix<T>;
    fn in_domain(&self, _z: &[T]) -> bool {
        true
    }
}

/// Macroscopic subsystem of an isothermal (damped Hamiltonian) model, described by a
/// dimensionless free energy.
pub trait MacroDamped<T: Real>: Send + Sync {
    fn dim(&self) -> usize;
    fn labels(&self) -> Vec<String> {
        (0..self.dim()).map(|i| format!("z{i}")).collect()
    }
    fn free_energy(&self, z: &[T]) -> T;
    fn free_energy_grad(&self, z: &[T]) -> Vec<T>;
    fn poisson(&self) -> RealMatrix<T>;
    fn onsager(&self, z: &[T]) -> RealMatrix<T>;
    fn in_domain(&self, _z: &[T]) -> bool {
        true
    }
}

pub type VectorFn<T> = Arc<dyn Fn(&[T]) -> Vec<T> + Send + Sync>;
pub type ScalarFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;

/// Dissipative coupling of the quantum system to the macroscopic variables through an
/// eigen-operator pair; `direction` is `b_c(z)` in GENERIC models and `a_c(z)` in
/// isothermal ones.
#[derive(Clone)]
pub struct MacroCoupling<T: Real> {
    pub pair: EigenpairQ<T>,
    pub direction: VectorFn<T>,
    pub kappa: ScalarFn<T>,
}

impl<T: Real> std::fmt::Debug for MacroCoupling<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MacroCoupling").field("pair", &self.pair).finish_non_exhaustive()
    }
}

impl<T: Real> MacroCoupling<T> {
    pub fn new(pair: EigenpairQ<T>, direction: VectorFn<T>, kappa: ScalarFn<T>) -> Self {
        Self { pair, direction, kappa }
    }

    /// Coupling with constant direction and rate.
    pub fn constant(pair: EigenpairQ<T>, direction: Vec<T>, kappa: T) -> Self {
        Self { pair, direction: Arc::new(move |_| direction.clone()), kappa: Arc::new(move |_| kappa) }
    }
}

/// Real-linear coupling map `Gamma: Herm -> R^m` stored through `Gamma^* e_a = G_a`.
#[derive(Clone, Debug, Default)]
pub struct CouplingMap<T: Real> {
    pub ops: Vec<ComplexMatrix<T>>,
}

impl<T: Real> CouplingMap<T> {
    pub fn new(ops: Vec<ComplexMatrix<T>>) -> Self {
        Self { ops }
    }

    pub fn is_zero(&self) -> bool {
        self.ops.iter().all(|g| g.norm() == T::zero())
    }

    /// `(Gamma rho)_a = Re Tr(G_a rho)`, zero-padded to `dz` components.
    pub fn apply(&self, rho: &ComplexMatrix<T>, dz: usize) -> Vec<T> {
        let mut out = vec![T::zero(); dz];
        for (o, g) in out.iter_mut().zip(&self.ops) {
            *o = g.inner_re(rho);
        }
        out
    }

    /// `Gamma^* zeta = sum_a zeta_a G_a`.
    pub fn adjoint(&self, zeta: &[T], n: usize) -> ComplexMatrix<T> {
        let mut out = ComplexMatrix::zeros(n, n);
        for (g, &x) in self.ops.iter().zip(zeta) {
            out.axpy_re(x, g);
        }
        out
    }

    /// Dense `dz x n^2` representation acting on row-major vectorisations (real parts).
    pub fn dense(&self, n: usize, dz: usize) -> RealMatrix<T> {
        RealMatrix::from_fn(dz, n * n, |a, k| {
            self.ops.get(a).map_or(T::zero(), |g| g.data()[k].re)
        })
    }
}

pub(crate) fn weighted<T: Real>(v: &[T], s: T) -> Vec<T> {
    v.iter().map(|&x| x * s).collect()
}
