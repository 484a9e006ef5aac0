use std::sync::Arc;

use crate::error::{Error, Result};
use crate::generic::model::{weighted, CouplingMap, MacroCoupling, MacroGeneric};
use crate::generic::{CoupledState, GenericStructure, PoissonStructure};
use crate::linalg::{dot, ComplexMatrix};
use crate::lindblad::{make_mq, EigenpairQ};
use crate::onsager::{simple_onsager, OnsagerApplication, OnsagerSource};
use crate::scalar::{c, Real};
use crate::states::DensityMatrix;

/// Quantum system coupled to macroscopic variables `z` in GENERIC form, with
/// `E = Tr(rho H) + E(z)` and `S = -k_B Tr(rho log rho) + S(z)`.
///
/// Each coupling `c` contributes the Onsager block built from
/// `kappa_c K_{beta_c, Q_c}(rho)` with `beta_c = <DS(z), b_c(z)> / k_B`, and `Gamma`
/// couples the reversible dynamics through `H - Gamma^* DE(z)`.
#[derive(Clone)]
pub struct GenericSystem<T: Real> {
    h: ComplexMatrix<T>,
    k_b: T,
    macro_model: Arc<dyn MacroGeneric<T>>,
    gamma: CouplingMap<T>,
    couplings: Vec<MacroCoupling<T>>,
}

/// Residuals of the structural conditions at a state.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantReport<T> {
    /// `max_c |<DE(z), b_c(z)> - 1|`.
    pub direction_normalisation: T,
    /// `||K_ma(z) DE(z)||`.
    pub macro_onsager_energy: T,
    /// `||J_ma DS(z)||`.
    pub macro_poisson_entropy: T,
}

impl<T: Real> std::fmt::Debug for GenericSystem<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GenericSystem").field("h", &self.h).field("k_b", &self.k_b).field("couplings", &self.couplings).finish_non_exhaustive()
    }
}

impl<T: Real> GenericSystem<T> {
    pub fn new(
        h: ComplexMatrix<T>,
        k_b: T,
        macro_model: Arc<dyn MacroGeneric<T>>,
        gamma: CouplingMap<T>,
        couplings: Vec<MacroCoupling<T>>,
    ) -> Result<Self> {
        let n = h.require_square("Hamiltonian")?;
        h.require_hermitian(T::tol(1e-10))?;
        validate_couplings(&h, &couplings)?;
        validate_gamma(&gamma, n, macro_model.dim())?;
        if k_b <= T::zero() {
            return Err(Error::Config("k_B must be positive".into()));
        }
        Ok(Self { h: h.hermitian_part(), k_b, macro_model, gamma, couplings })
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix<T> {
        &self.h
    }

    pub fn k_b(&self) -> T {
        self.k_b
    }

    pub fn macro_model(&self) -> &dyn MacroGeneric<T> {
        self.macro_model.as_ref()
    }

    pub fn couplings(&self) -> &[MacroCoupling<T>] {
        &self.couplings
    }

    /// Effective inverse temperature `<DS(z), b_c(z)> / k_B` seen by coupling `c`.
    pub fn beta_hat(&self, c: usize, z: &[T]) -> T {
        dot(&self.macro_model.entropy_grad(z), &(self.couplings[c].direction)(z)) / self.k_b
    }

    fn coupling_onsager(&self, c: usize, rho: &DensityMatrix<T>, z: &[T]) -> Result<OnsagerApplication<T>> {
        let cp = &self.couplings[c];
        let src = OnsagerSource::Scaled((cp.kappa)(z), Box::new(simple_onsager(self.beta_hat(c, z), cp.pair.clone())));
        src.at(rho)
    }

    /// Linear form
    /// `rho' = i[rho, H~] + sum_c k_B kappa_c M_{beta_c,Q_c} rho`,
    /// `z' = J_ma DE - Gamma i[rho, H~] + K_ma DS - sum_c k_B kappa_c <H, M_c rho> b_c`,
    /// with `H~ = H - Gamma^* DE(z)`.
    pub fn linear_field(&self, q: &CoupledState<T>) -> Result<CoupledState<T>> {
        let n = self.dim();
        let dz = self.dim_z();
        let de = self.macro_model.energy_grad(&q.z);
        let ds = self.macro_model.entropy_grad(&q.z);
        let h_eff = &self.h - &self.gamma.adjoint(&de, n);
        let ham = q.rho.commutator(&h_eff).scale(c(T::zero(), T::one()));
        let mut rho_dot = ham.clone();
        let mut z_dot = self.macro_model.poisson().matvec(&de);
        for (a, b) in z_dot.iter_mut().zip(self.gamma.apply(&ham, dz)) {
            *a -= b;
        }
        for (a, b) in z_dot.iter_mut().zip(self.macro_model.onsager(&q.z).matvec(&ds)) {
            *a += b;
        }
        for (idx, cp) in self.couplings.iter().enumerate() {
            let rate = self.k_b * (cp.kappa)(&q.z);
            let m = make_mq(self.beta_hat(idx, &q.z), &cp.pair).apply(&q.rho);
            rho_dot.axpy_re(rate, &m);
            let flux = rate * self.h.inner_re(&m);
            for (a, b) in z_dot.iter_mut().zip((cp.direction)(&q.z)) {
                *a -= flux * b;
            }
        }
        Ok(CoupledState::new(rho_dot, z_dot))
    }

    /// Dual dissipation potential
    /// `P*(q; mu, zeta) = 1/2 zeta.K_ma zeta + sum_c 1/2 <eta_c, K_c eta_c>`, `eta_c = mu - <zeta, b_c> H`.
    pub fn dissipation_potential(&self, q: &CoupledState<T>, xi: &CoupledState<T>) -> Result<T> {
        let rho = DensityMatrix::relaxed(q.rho.clone())?;
        let half = T::lit(0.5);
        let mut total = half * dot(&xi.z, &self.macro_model.onsager(&q.z).matvec(&xi.z));
        for idx in 0..self.couplings.len() {
            let b = (self.couplings[idx].direction)(&q.z);
            let mut eta = xi.rho.clone();
            eta.axpy_re(-dot(&xi.z, &b), &self.h);
            total += self.coupling_onsager(idx, &rho, &q.z)?.potential(&eta.hermitian_part())?;
        }
        Ok(total)
    }

    pub fn invariant_residuals(&self, z: &[T]) -> InvariantReport<T> {
        let de = self.macro_model.energy_grad(z);
        let ds = self.macro_model.entropy_grad(z);
        let direction_normalisation = self
            .couplings
            .iter()
            .map(|cp| (dot(&de, &(cp.direction)(z)) - T::one()).abs())
            .fold(T::zero(), T::max);
        let norm = |v: Vec<T>| v.iter().map(|&x| x * x).sum::<T>().sqrt();
        InvariantReport {
            direction_normalisation,
            macro_onsager_energy: norm(self.macro_model.onsager(z).matvec(&de)),
            macro_poisson_entropy: norm(self.macro_model.poisson().matvec(&ds)),
        }
    }
}

pub(crate) fn validate_couplings<T: Real>(h: &ComplexMatrix<T>, couplings: &[MacroCoupling<T>]) -> Result<()> {
    for cp in couplings {
        EigenpairQ::new(cp.pair.omega, cp.pair.q.clone(), h)?;
    }
    Ok(())
}

pub(crate) fn validate_gamma<T: Real>(gamma: &CouplingMap<T>, n: usize, dz: usize) -> Result<()> {
    if gamma.ops.len() > dz {
        return Err(Error::Shape(format!("{} coupling operators for {dz} macroscopic coordinates", gamma.ops.len())));
    }
    for g in &gamma.ops {
        if g.rows() != n || g.cols() != n {
            return Err(Error::Shape(format!("coupling operator is not {n}x{n}")));
        }
        g.require_hermitian(T::tol(1e-10))?;
    }
    Ok(())
}

/// `J_qs(rho) mu = i[rho, mu]`.
pub(crate) fn lie_poisson<T: Real>(rho: &ComplexMatrix<T>, mu: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    rho.commutator(mu).scale(c(T::zero(), T::one()))
}

impl<T: Real> PoissonStructure<T> for GenericSystem<T> {
    fn dim(&self) -> usize {
        self.h.rows()
    }

    fn dim_z(&self) -> usize {
        self.macro_model.dim()
    }

    fn poisson(&self, q: &CoupledState<T>, xi: &CoupledState<T>) -> Result<CoupledState<T>> {
        let h_eff = &xi.rho - &self.gamma.adjoint(&xi.z, self.dim());
        let rho_dot = lie_poisson(&q.rho, &h_eff);
        let mut z_dot = self.macro_model.poisson().matvec(&xi.z);
        for (a, b) in z_dot.iter_mut().zip(self.gamma.apply(&rho_dot, self.dim_z())) {
            *a -= b;
        }
        Ok(CoupledState::new(rho_dot, z_dot))
    }

    fn poisson_derivative(
        &self,
        _q: &CoupledState<T>,
        dq: &CoupledState<T>,
        xi: &CoupledState<T>,
    ) -> Result<CoupledState<T>> {
        let h_eff = &xi.rho - &self.gamma.adjoint(&xi.z, self.dim());
        let rho_dot = lie_poisson(&dq.rho, &h_eff);
        let z_dot = weighted(&self.gamma.apply(&rho_dot, self.dim_z()), -T::one());
        Ok(CoupledState::new(rho_dot, z_dot))
    }
}

impl<T: Real> GenericStructure<T> for GenericSystem<T> {
    fn energy(&self, q: &CoupledState<T>) -> Result<T> {
        Ok(q.rho.inner_re(&self.h) + self.macro_model.energy(&q.z))
    }

    fn entropy(&self, q: &CoupledState<T>) -> Result<T> {
        let rho = DensityMatrix::relaxed(q.rho.clone())?;
        Ok(self.k_b * rho.entropy() + self.macro_model.entropy(&q.z))
    }

    fn energy_grad(&self, q: &CoupledState<T>) -> Result<CoupledState<T>> {
        Ok(CoupledState::new(self.h.clone(), self.macro_model.energy_grad(&q.z)))
    }

    fn entropy_grad(&self, q: &CoupledState<T>) -> Result<CoupledState<T>> {
        let rho = DensityMatrix::relaxed(q.rho.clone())?;
        Ok(CoupledState::new(rho.log().scale_re(-self.k_b), self.macro_model.entropy_grad(&q.z)))
    }

    /// `K_ma xi_z` on the macroscopic block plus, for each coupling,
    /// `(K_c eta_c, -<H, K_c eta_c> b_c)` with `eta_c = xi_rho - <xi_z, b_c> H`.
    fn onsager(&self, q: &CoupledState<T>, xi: &CoupledState<T>) -> Result<CoupledState<T>> {
        let rho = DensityMatrix::relaxed(q.rho.clone())?;
        let n = self.dim();
        let mut rho_dot = ComplexMatrix::zeros(n, n);
        let mut z_dot = self.macro_model.onsager(&q.z).matvec(&xi.z);
        for idx in 0..self.couplings.len() {
            let b = (self.couplings[idx].direction)(&q.z);
            let mut eta = xi.rho.clone();
            eta.axpy_re(-dot(&xi.z, &b), &self.h);
            let k_eta = self.coupling_onsager(idx, &rho, &q.z)?.apply(&eta.hermitian_part())?;
            let flux = self.h.inner_re(&k_eta);
            rho_dot += &k_eta;
            for (a, &bb) in z_dot.iter_mut().zip(&b) {
                *a -= flux * bb;
            }
        }
        Ok(CoupledState::new(rho_dot, z_dot))
    }
}
