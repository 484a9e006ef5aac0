//! Builders for the coupled models: damped quantum system, finite heat baths,
//! general isothermal coupling, a quantum dot exchanging carriers with a reservoir,
//! and a spatially uniform Maxwell-Bloch system.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::generic::model::{CouplingMap, MacroCoupling, MacroDamped, MacroGeneric};
use crate::generic::{CoupledState, DampedSystem, GenericSystem};
use crate::linalg::{hermitian_eigen, ComplexMatrix, RealMatrix};
use crate::lindblad::{EigenpairQ, JumpTerm, Superoperator};
use crate::scalar::{c, Real};

/// Empty macroscopic system.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoMacro;

impl<T: Real> MacroGeneric<T> for NoMacro {
    fn dim(&self) -> usize {
        0
    }
    fn energy(&self, _z: &[T]) -> T {
        T::zero()
    }
    fn energy_grad(&self, _z: &[T]) -> Vec<T> {
        Vec::new()
    }
    fn entropy(&self, _z: &[T]) -> T {
        T::zero()
    }
    fn entropy_grad(&self, _z: &[T]) -> Vec<T> {
        Vec::new()
    }
    fn poisson(&self) -> RealMatrix<T> {
        RealMatrix::zeros(0, 0)
    }
    fn onsager(&self, _z: &[T]) -> RealMatrix<T> {
        RealMatrix::zeros(0, 0)
    }
}

impl<T: Real> MacroDamped<T> for NoMacro {
    fn dim(&self) -> usize {
        0
    }
    fn free_energy(&self, _z: &[T]) -> T {
        T::zero()
    }
    fn free_energy_grad(&self, _z: &[T]) -> Vec<T> {
        Vec::new()
    }
    fn poisson(&self) -> RealMatrix<T> {
        RealMatrix::zeros(0, 0)
    }
    fn onsager(&self, _z: &[T]) -> RealMatrix<T> {
        RealMatrix::zeros(0, 0)
    }
}

/// `rho' = i[rho, H] + sum_c kappa_c M_{beta, Q_c} rho` as a damped Hamiltonian system
/// with `F = Tr(rho log rho + beta rho H)`.
pub fn damped_qs<T: Real>(h: ComplexMatrix<T>, beta: T, pairs: Vec<(EigenpairQ<T>, T)>) -> Result<DampedSystem<T>> {
    let couplings = pairs.into_iter().map(|(p, k)| MacroCoupling::constant(p, Vec::new(), k)).collect();
    DampedSystem::new(h, beta, Arc::new(NoMacro), CouplingMap::default(), CouplingMap::default(), couplings)
}

/// Heat baths with temperatures `theta_m`, constant heat capacities `c_m`,
/// `E = sum c_m theta_m`, `S = sum c_m log theta_m`, and direct heat conduction
/// `K_ma = lambda sum_{m<n} theta_m theta_n d_mn d_mn^T` with `d_mn = e_m / c_m - e_n / c_n`.
#[derive(Clone, Debug)]
pub struct HeatBaths<T> {
    pub capacities: Vec<T>,
    pub conduction: T,
}

impl<T: Real> MacroGeneric<T> for HeatBaths<T> {
    fn dim(&self) -> usize {
        self.capacities.len()
    }
    fn labels(&self) -> Vec<String> {
        (0..self.capacities.len()).map(|m| format!("theta{m}")).collect()
    }
    fn energy(&self, z: &[T]) -> T {
        self.capacities.iter().zip(z).map(|(&c, &t)| c * t).sum()
    }
    fn energy_grad(&self, _z: &[T]) -> Vec<T> {
        self.capacities.clone()
    }
    fn entropy(&self, z: &[T]) -> T {
        self.capacities.iter().zip(z).map(|(&c, &t)| c * t.ln()).sum()
    }
    fn entropy_grad(&self, z: &[T]) -> Vec<T> {
        self.capacities.iter().zip(z).map(|(&c, &t)| c / t).collect()
    }
    fn poisson(&self) -> RealMatrix<T> {
        RealMatrix::zeros(self.dim(), self.dim())
    }
    fn onsager(&self, z: &[T]) -> RealMatrix<T> {
        let m = self.dim();
        let mut k = RealMatrix::zeros(m, m);
        for a in 0..m {
            for b in a + 1..m {
                let mut d = vec![T::zero(); m];
                d[a] = T::one() / self.capacities[a];
                d[b] = -T::one() / self.capacities[b];
                k = k.add(&RealMatrix::outer(&d, &d).scale(self.conduction * z[a] * z[b]));
            }
        }
        k
    }
    fn in_domain(&self, z: &[T]) -> bool {
        z.iter().all(|&t| t > T::zero())
    }
}

/// Quantum system exchanging energy with heat baths; `couplings` lists `(pair, bath, kappa)`.
pub fn heat_baths<T: Real>(
    h: ComplexMatrix<T>,
    k_b: T,
    capacities: Vec<T>,
    conduction: T,
    couplings: Vec<(EigenpairQ<T>, usize, T)>,
) -> Result<GenericSystem<T>> {
    let m = capacities.len();
    if capacities.iter().any(|&c| !(c > T::zero())) {
        return Err(Error::Config("heat capacities must be positive".into()));
    }
    if conduction < T::zero() {
        return Err(Error::Config("heat conduction must be nonnegative".into()));
    }
    let mut list = Vec::with_capacity(couplings.len());
    for (pair, bath, kappa) in couplings {
        if bath >= m {
            return Err(Error::Config(format!("coupling refers to bath {bath} of {m}")));
        }
        if kappa < T::zero() {
            return Err(Error::Config("coupling rates must be nonnegative".into()));
        }
        let mut b = vec![T::zero(); m];
        b[bath] = T::one() / capacities[bath];
        list.push(MacroCoupling::constant(pair, b, kappa));
    }
    GenericSystem::new(h, k_b, Arc::new(HeatBaths { capacities, conduction }), CouplingMap::default(), list)
}

/// Quadratic free energy `F(z) = 1/2 z.A z` with constant `J_ma` and `K_ma`.
#[derive(Clone, Debug)]
pub struct QuadraticMacro<T: Real> {
    pub stiffness: RealMatrix<T>,
    pub poisson: RealMatrix<T>,
    pub onsager: RealMatrix<T>,
}

impl<T: Real> MacroDamped<T> for QuadraticMacro<T> {
    fn dim(&self) -> usize {
        self.stiffness.rows()
    }
    fn free_energy(&self, z: &[T]) -> T {
        T::lit(0.5) * crate::linalg::dot(z, &self.stiffness.matvec(z))
    }
    fn free_energy_grad(&self, z: &[T]) -> Vec<T> {
        self.stiffness.matvec(z)
    }
    fn poisson(&self) -> RealMatrix<T> {
        self.poisson.clone()
    }
    fn onsager(&self, _z: &[T]) -> RealMatrix<T> {
        self.onsager.clone()
    }
}

/// Isothermal coupling with reversible coupling operators `gamma` (`Gamma^* e_a = G_a`)
/// and constant directions `a_c`.
pub fn isothermal<T: Real>(
    h: ComplexMatrix<T>,
    beta_star: T,
    macro_model: QuadraticMacro<T>,
    gamma: Vec<ComplexMatrix<T>>,
    couplings: Vec<(EigenpairQ<T>, Vec<T>, T)>,
) -> Result<DampedSystem<T>> {
    let dz = macro_model.dim();
    let (j, k) = (&macro_model.poisson, &macro_model.onsager);
    if j.rows() != dz || k.rows() != dz || macro_model.stiffness.cols() != dz {
        return Err(Error::Shape("macroscopic matrices must be square of equal size".into()));
    }
    let list = couplings
        .into_iter()
        .map(|(p, a, kappa)| {
            if a.len() != dz {
                return Err(Error::Shape(format!("direction of length {} for {dz} coordinates", a.len())));
            }
            Ok(MacroCoupling::constant(p, a, kappa))
        })
        .collect::<Result<Vec<_>>>()?;
    DampedSystem::new(h, beta_star, Arc::new(macro_model), CouplingMap::new(gamma), CouplingMap::default(), list)
}

/// Carrier densities `c = (c_f, c_b)` with `F(c) = sum c_j (log(c_j / w_j) - 1)`.
#[derive(Clone, Debug)]
pub struct Reservoir<T> {
    pub equilibrium: [T; 2],
}

impl<T: Real> MacroDamped<T> for Reservoir<T> {
    fn dim(&self) -> usize {
        2
    }
    fn labels(&self) -> Vec<String> {
        vec!["c_free".into(), "c_bound".into()]
    }
    fn free_energy(&self, z: &[T]) -> T {
        z.iter().zip(&self.equilibrium).map(|(&c, &w)| c * ((c / w).ln() - T::one())).sum()
    }
    fn free_energy_grad(&self, z: &[T]) -> Vec<T> {
        z.iter().zip(&self.equilibrium).map(|(&c, &w)| (c / w).ln()).collect()
    }
    fn poisson(&self) -> RealMatrix<T> {
        RealMatrix::zeros(2, 2)
    }
    fn onsager(&self, _z: &[T]) -> RealMatrix<T> {
        RealMatrix::zeros(2, 2)
    }
    fn in_domain(&self, z: &[T]) -> bool {
        z.iter().all(|&c| c > T::zero())
    }
}

/// Two-level quantum dot `H = diag(eps1, eps2)` capturing free carriers:
/// `X_free + |1> <-> X_bound + |2>`.
#[derive(Clone, Debug)]
pub struct QuantumDot<T> {
    pub eps1: T,
    pub eps2: T,
    pub beta_star: T,
    pub w_free: T,
    pub w_bound: T,
    pub kappa_hat: T,
}

impl<T: Real> QuantumDot<T> {
    fn validate(&self) -> Result<()> {
        if !(self.eps2 > self.eps1) {
            return Err(Error::Config("quantum dot requires eps2 > eps1".into()));
        }
        if !(self.w_free > T::zero() && self.w_bound > T::zero()) {
            return Err(Error::Config("equilibrium densities must be positive".into()));
        }
        if !(self.beta_star > T::zero()) || self.kappa_hat < T::zero() {
            return Err(Error::Config("beta_* must be positive and kappa nonnegative".into()));
        }
        Ok(())
    }

    pub fn hamiltonian(&self) -> ComplexMatrix<T> {
        ComplexMatrix::from_real_diagonal(&[self.eps1, self.eps2])
    }

    /// `|1><2|`, lowering the dot from the excited level.
    pub fn jump(&self) -> ComplexMatrix<T> {
        ComplexMatrix::unit(2, 0, 1)
    }

    pub fn system(&self) -> Result<DampedSystem<T>> {
        self.validate()?;
        let h = self.hamiltonian();
        let omega = self.eps2 - self.eps1;
        let pair = EigenpairQ::new(omega, self.jump(), &h)?;
        let a = vec![-T::one() / omega, T::one() / omega];
        let (kh, wf, wb) = (self.kappa_hat, self.w_free, self.w_bound);
        let kappa = Arc::new(move |z: &[T]| kh * (z[0] * z[1] / (wf * wb)).sqrt());
        let coupling = MacroCoupling::new(pair, Arc::new(move |_: &[T]| a.clone()), kappa);
        let reservoir = Reservoir { equilibrium: [wf, wb] };
        DampedSystem::new(h, self.beta_star, Arc::new(reservoir), CouplingMap::default(), CouplingMap::default(), vec![coupling])
    }

    /// The capture-escape equations in closed form:
    /// `rho' = i[rho, H] + k (c_b / w_b e^{-beta eps1} N_Q rho + c_f / w_f e^{-beta eps2} N_{Q*} rho)` and
    /// `c' = 2k (c_f / w_f e^{-beta eps2} rho_11 - c_b / w_b e^{-beta eps1} rho_22) (-1, 1)`,
    /// with `k = kappa_hat e^{beta (eps1 + eps2) / 2}` and `N_Q A = [Q, A Q*] + [Q A, Q*]`.
    pub fn closed_form(&self, q: &CoupledState<T>) -> Result<CoupledState<T>> {
        self.validate()?;
        let (cf, cb) = (q.z[0], q.z[1]);
        if !(cf > T::zero() && cb > T::zero()) {
            return Err(Error::Domain { eigenvalue: cf.min(cb).as_f64() });
        }
        let b = self.beta_star;
        let k = self.kappa_hat * (b * (self.eps1 + self.eps2) / T::lit(2.0)).exp();
        let up = k * cb / self.w_bound * (-b * self.eps1).exp();
        let down = k * cf / self.w_free * (-b * self.eps2).exp();
        let qm = self.jump();
        let l = Superoperator::from_jumps(2, vec![JumpTerm::new(up, qm.clone()), JumpTerm::new(down, qm.adjoint())])?;
        let mut rho_dot = q.rho.commutator(&self.hamiltonian()).scale(c(T::zero(), T::one()));
        rho_dot += &l.apply(&q.rho);
        let flux = T::lit(2.0) * (down * q.rho[(0, 0)].re - up * q.rho[(1, 1)].re);
        Ok(CoupledState::new(rho_dot, vec![-flux, flux]))
    }
}

/// Uniform electromagnetic field `z = (E, H)` with `F = beta (|E|^2 + |H|^2) / 2`; the
/// curl terms vanish for spatially constant fields.
#[derive(Clone, Debug)]
pub struct UniformField<T> {
    pub beta: T,
}

impl<T: Real> MacroDamped<T> for UniformField<T> {
    fn dim(&self) -> usize {
        6
    }
    fn labels(&self) -> Vec<String> {
        ["E_x", "E_y", "E_z", "H_x", "H_y", "H_z"].iter().map(|s| s.to_string()).collect()
    }
    fn free_energy(&self, z: &[T]) -> T {
        T::lit(0.5) * self.beta * z.iter().map(|&x| x * x).sum::<T>()
    }
    fn free_energy_grad(&self, z: &[T]) -> Vec<T> {
        z.iter().map(|&x| self.beta * x).collect()
    }
    fn poisson(&self) -> RealMatrix<T> {
        RealMatrix::zeros(6, 6)
    }
    fn onsager(&self, _z: &[T]) -> RealMatrix<T> {
        RealMatrix::zeros(6, 6)
    }
}

/// Polarisation operators `G_a = sum_n (b_n)_a |h_n><h_n|` for the eigenvectors `h_n` of
/// `H_B` in ascending energy order.
pub fn diagonal_polarisation<T: Real>(h_b: &ComplexMatrix<T>, b: &[[T; 3]]) -> Result<Vec<ComplexMatrix<T>>> {
    let eig = hermitian_eigen(h_b, T::tol(1e-14))?;
    let n = eig.dim();
    if b.len() != n {
        return Err(Error::Shape(format!("{} polarisation vectors for {n} levels", b.len())));
    }
    Ok((0..3)
        .map(|a| {
            let d: Vec<T> = b.iter().map(|v| v[a]).collect();
            eig.with_values(&d)
        })
        .collect())
}

/// Maxwell-Bloch system for uniform fields: `rho' = i[rho, H_B - Gamma^* E] +
/// sum_c kappa_c M_{beta (1 - g_c.E), Q_c} rho`, `E' = -Gamma rho'`, `H' = 0`.
/// `polarisation` is `None` for `Gamma = 0`.
pub fn maxwell_bloch_uniform<T: Real>(
    h_b: ComplexMatrix<T>,
    beta: T,
    pairs: Vec<(EigenpairQ<T>, T)>,
    polarisation: Option<&[[T; 3]]>,
) -> Result<DampedSystem<T>> {
    let gamma = match polarisation {
        Some(b) => CouplingMap::new(diagonal_polarisation(&h_b, b)?),
        None => CouplingMap::default(),
    };
    let couplings = pairs.into_iter().map(|(p, k)| MacroCoupling::constant(p, vec![T::zero(); 6], k)).collect();
    DampedSystem::new(h_b, beta, Arc::new(UniformField { beta }), gamma.clone(), gamma, couplings)
}
