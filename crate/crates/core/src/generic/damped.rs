use std::sync::Arc;

use crate::error::{Error, Result};
use crate::generic::model::{CouplingMap, MacroCoupling, MacroDamped};
use crate::generic::system::{lie_poisson, validate_couplings, validate_gamma};
use crate::generic::{CoupledState, DampedStructure, PoissonStructure};
use crate::linalg::{dot, ComplexMatrix};
use crate::lindblad::make_mq;
use crate::onsager::{simple_onsager, OnsagerApplication, OnsagerSource};
use crate::scalar::Real;
use crate::states::DensityMatrix;

/// Isothermal coupled system `q' = (J - K) DF` with the dimensionless free energy
/// `F(rho, z) = Tr(rho log rho + beta_* rho H) + F(z)`.
///
/// `J_qs(rho) mu = (i / beta_*)[rho, mu]`, so that the uncoupled flow is `i[rho, H]`.
/// Coupling `c` contributes `kappa_c K_{beta_c(z), Q_c}(rho)` composed with
/// `X_c zeta = <zeta, a_c> H - Gamma_K^* zeta` on the macroscopic cotangent, where
/// `beta_c(z) = beta_* + <DF(z), a_c(z)> - g_c . DF(z)` and `g_c` is defined by
/// `[Q_c, Gamma_K^* zeta] = omega_c (g_c . zeta) Q_c`.
#[derive(Clone)]
pub struct DampedSystem<T: Real> {
    h: ComplexMatrix<T>,
    beta_star: T,
    macro_model: Arc<dyn MacroDamped<T>>,
    gamma_j: CouplingMap<T>,
    gamma_k: CouplingMap<T>,
    couplings: Vec<MacroCoupling<T>>,
    shifts: Vec<Vec<T>>,
    condition_residual: T,
}

impl<T: Real> std::fmt::Debug for DampedSystem<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DampedSystem").field("h", &self.h).field("beta_star", &self.beta_star).field("couplings", &self.couplings).finish_non_exhaustive()
    }
}

impl<T: Real> DampedSystem<T> {
    pub fn new(
        h: ComplexMatrix<T>,
        beta_star: T,
        macro_model: Arc<dyn MacroDamped<T>>,
        gamma_j: CouplingMap<T>,
        gamma_k: CouplingMap<T>,
        couplings: Vec<MacroCoupling<T>>,
    ) -> Result<Self> {
        let n = h.require_square("Hamiltonian")?;
        h.require_hermitian(T::tol(1e-10))?;
        if !(beta_star > T::zero()) {
            return Err(Error::Config("beta_* must be positive".into()));
        }
        validate_couplings(&h, &couplings)?;
        validate_gamma(&gamma_j, n, macro_model.dim())?;
        validate_gamma(&gamma_k, n, macro_model.dim())?;
        let mut shifts = Vec::with_capacity(couplings.len());
        let mut condition_residual = T::zero();
        for cp in &couplings {
            let q = &cp.pair.q;
            let qn = q.norm_sqr();
            let mut g = Vec::with_capacity(gamma_k.ops.len());
            for op in &gamma_k.ops {
                let comm = q.commutator(op);
                let coeff = if cp.pair.omega == T::zero() || qn == T::zero() {
                    T::zero()
                } else {
                    q.inner_re(&comm) / (cp.pair.omega * qn)
                };
                let mut res = comm.clone();
                res.axpy_re(-cp.pair.omega * coeff, q);
                let scale = qn.sqrt() * T::one().max(op.norm());
                condition_residual = condition_residual.max(res.norm() / T::one().max(scale));
                g.push(coeff);
            }
            shifts.push(g);
        }
        if condition_residual > T::tol(1e-10) {
            return Err(Error::Representation {
                reason: "coupling operators do not shift the jump operators along their frequency".into(),
                residual: condition_residual.as_f64(),
            });
        }
        Ok(Self { h: h.hermitian_part(), beta_star, macro_model, gamma_j, gamma_k, couplings, shifts, condition_residual })
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix<T> {
        &self.h
    }

    pub fn beta_star(&self) -> T {
        self.beta_star
    }

    pub fn macro_model(&self) -> &dyn MacroDamped<T> {
        self.macro_model.as_ref()
    }

    pub fn couplings(&self) -> &[MacroCoupling<T>] {
        &self.couplings
    }

    /// Worst relative residual of `[Q_c, G_a] = omega_c g_ca Q_c` over couplings and basis operators.
    pub fn condition_residual(&self) -> T {
        self.condition_residual
    }

    /// `||[Q_c, Gamma_K^* zeta] - omega_c (g_c . zeta) Q_c||` for a given macroscopic vector.
    pub fn condition_residual_at(&self, c: usize, zeta: &[T]) -> T {
        let cp = &self.couplings[c];
        let mut res = cp.pair.q.commutator(&self.gamma_k.adjoint(zeta, self.dim()));
        res.axpy_re(-cp.pair.omega * dot(&self.shifts[c], zeta), &cp.pair.q);
        res.norm()
    }

    /// `g_c`.
    pub fn shift(&self, c: usize) -> &[T] {
        &self.shifts[c]
    }

    /// `beta_c(z) = beta_* + <DF(z), a_c(z)> - g_c . DF(z)`.
    pub fn beta_tilde(&self, c: usize, z: &[T]) -> T {
        let df = self.macro_model.free_energy_grad(z);
        self.beta_star + dot(&df, &(self.couplings[c].direction)(z)) - dot(&self.shifts[c], &df)
    }

    fn coupling_onsager(&self, c: usize, rho: &DensityMatrix<T>, z: &[T]) -> Result<OnsagerApplication<T>> {
        let cp = &self.couplings[c];
        let beta = self.beta_tilde(c, z);
        OnsagerSource::Scaled((cp.kappa)(z), Box::new(simple_onsager(beta, cp.pair.clone()))).at(rho)
    }

    /// `eta_c = mu + <zeta, a_c> H - Gamma_K^* zeta`.
    fn lifted(&self, c: usize, xi: &CoupledState<T>, z: &[T]) -> ComplexMatrix<T> {
        let mut eta = xi.rho.clone();
        eta.axpy_re(dot(&xi.z, &(self.couplings[c].direction)(z)), &self.h);
        eta -= &self.gamma_k.adjoint(&xi.z, self.dim());
        eta.hermitian_part()
    }

    /// Linear form with `H~ = H - Gamma_J^* DF(z) / beta_*`:
    /// `rho' = i[rho, H~] + sum_c kappa_c M_{beta_c, Q_c} rho` and
    /// `z' = J_ma DF - Gamma_J i[rho, H~] - K_ma DF + sum_c kappa_c (<H, M_c rho> a_c - Gamma_K M_c rho)`.
    pub fn linear_field(&self, q: &CoupledState<T>) -> Result<CoupledState<T>> {
        let n = self.dim();
        let dz = self.dim_z();
        let df = self.macro_model.free_energy_grad(&q.z);
        let mut h_eff = self.h.clone();
        h_eff.axpy_re(-T::one() / self.beta_star, &self.gamma_j.adjoint(&df, n));
        let ham = lie_poisson(&q.rho, &h_eff);
        let mut rho_dot = ham.clone();
        let mut z_dot = self.macro_model.poisson().matvec(&df);
        let gj = self.gamma_j.apply(&ham, dz);
        let kd = self.macro_model.onsager(&q.z).matvec(&df);
        for ((a, g), k) in z_dot.iter_mut().zip(gj).zip(kd) {
            *a -= g + k;
        }
        for (idx, cp) in self.couplings.iter().enumerate() {
            let kappa = (cp.kappa)(&q.z);
            let m = make_mq(self.beta_tilde(idx, &q.z), &cp.pair).apply(&q.rho);
            rho_dot.axpy_re(kappa, &m);
            let flux = kappa * self.h.inner_re(&m);
            let a = (cp.direction)(&q.z);
            let gk = self.gamma_k.apply(&m, dz);
            for ((o, av), g) in z_dot.iter_mut().zip(a).zip(gk) {
                *o += flux * av - kappa * g;
            }
        }
        Ok(CoupledState::new(rho_dot, z_dot))
    }

    /// `P*(q; mu, zeta) = 1/2 zeta.K_ma zeta + sum_c 1/2 <eta_c, K_c eta_c>`.
    pub fn dissipation_potential(&self, q: &CoupledState<T>, xi: &CoupledState<T>) -> Result<T> {
        let rho = DensityMatrix::relaxed(q.rho.clone())?;
        let mut total = T::lit(0.5) * dot(&xi.z, &self.macro_model.onsager(&q.z).matvec(&xi.z));
        for idx in 0..self.couplings.len() {
            let eta = self.lifted(idx, xi, &q.z);
            total += self.coupling_onsager(idx, &rho, &q.z)?.potential(&eta)?;
        }
        Ok(total)
    }
}

impl<T: Real> PoissonStructure<T> for DampedSystem<T> {
    fn dim(&self) -> usize {
        self.h.rows()
    }

    fn dim_z(&self) -> usize {
        self.macro_model.dim()
    }

    fn poisson(&self, q: &CoupledState<T>, xi: &CoupledState<T>) -> Result<CoupledState<T>> {
        let h_eff = &xi.rho - &self.gamma_j.adjoint(&xi.z, self.dim());
        let rho_dot = lie_poisson(&q.rho, &h_eff).scale_re(T::one() / self.beta_star);
        let mut z_dot = self.macro_model.poisson().matvec(&xi.z);
        for (a, b) in z_dot.iter_mut().zip(self.gamma_j.apply(&rho_dot, self.dim_z())) {
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
        let h_eff = &xi.rho - &self.gamma_j.adjoint(&xi.z, self.dim());
        let rho_dot = lie_poisson(&dq.rho, &h_eff).scale_re(T::one() / self.beta_star);
        let z_dot = self.gamma_j.apply(&rho_dot, self.dim_z()).iter().map(|&x| -x).collect();
        Ok(CoupledState::new(rho_dot, z_dot))
    }
}

impl<T: Real> DampedStructure<T> for DampedSystem<T> {
    fn free_energy(&self, q: &CoupledState<T>) -> Result<T> {
        let rho = DensityMatrix::relaxed(q.rho.clone())?;
        Ok(-rho.entropy() + self.beta_star * q.rho.inner_re(&self.h) + self.macro_model.free_energy(&q.z))
    }

    fn free_energy_grad(&self, q: &CoupledState<T>) -> Result<CoupledState<T>> {
        let rho = DensityMatrix::relaxed(q.rho.clone())?;
        let mut mu = rho.log();
        mu.axpy_re(self.beta_star, &self.h);
        Ok(CoupledState::new(mu, self.macro_model.free_energy_grad(&q.z)))
    }

    fn onsager(&self, q: &CoupledState<T>, xi: &CoupledState<T>) -> Result<CoupledState<T>> {
        let rho = DensityMatrix::relaxed(q.rho.clone())?;
        let n = self.dim();
        let dz = self.dim_z();
        let mut rho_dot = ComplexMatrix::zeros(n, n);
        let mut z_dot = self.macro_model.onsager(&q.z).matvec(&xi.z);
        for idx in 0..self.couplings.len() {
            let eta = self.lifted(idx, xi, &q.z);
            let k = self.coupling_onsager(idx, &rho, &q.z)?.apply(&eta)?;
            let flux = self.h.inner_re(&k);
            let a = (self.couplings[idx].direction)(&q.z);
            let gk = self.gamma_k.apply(&k, dz);
            for ((o, av), g) in z_dot.iter_mut().zip(a).zip(gk) {
                *o += flux * av - g;
            }
            rho_dot += &k;
        }
        Ok(CoupledState::new(rho_dot, z_dot))
    }
}
