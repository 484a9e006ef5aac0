//! Fixed-step explicit integration of quantum and coupled flows with structural monitors.

use crate::error::{Error, Result};
use crate::generic::{
    CoupledState, DampedStructure, DampedSystem, GenericStructure, GenericSystem, SlackGeneric,
};
use crate::linalg::{hermitian_eigen, ComplexMatrix};
use crate::lindblad::Superoperator;
use crate::scalar::{c, Real};
use crate::states::{DensityMatrix, ThermalState};

/// Energy, entropy and free energy of a state; `NaN` when not defined for the model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observables<T> {
    pub energy: T,
    pub entropy: T,
    pub free_energy: T,
}

impl<T: Real> Observables<T> {
    pub fn none() -> Self {
        Self { energy: T::nan(), entropy: T::nan(), free_energy: T::nan() }
    }
}

/// A vector field on `(rho, z)` together with its thermodynamic observables.
pub trait Dynamics<T: Real> {
    fn dim(&self) -> usize;
    fn dim_z(&self) -> usize;
    fn field(&self, q: &CoupledState<T>) -> Result<CoupledState<T>>;
    fn observables(&self, _q: &CoupledState<T>) -> Observables<T> {
        Observables::none()
    }
    /// Admissibility of the macroscopic part (positive temperatures, densities).
    fn in_domain(&self, _q: &CoupledState<T>) -> bool {
        true
    }
    fn z_labels(&self) -> Vec<String> {
        (0..self.dim_z()).map(|i| format!("z{i}")).collect()
    }
}

/// `rho' = i[rho, H] + L rho`.
#[derive(Clone, Debug)]
pub struct LindbladDynamics<T: Real> {
    pub generator: Superoperator<T>,
    pub hamiltonian: ComplexMatrix<T>,
    /// Reference state for the free-energy monitor (relative entropy).
    pub thermal: Option<ThermalState<T>>,
}

impl<T: Real> LindbladDynamics<T> {
    pub fn new(generator: Superoperator<T>, hamiltonian: ComplexMatrix<T>, thermal: Option<ThermalState<T>>) -> Result<Self> {
        let n = hamiltonian.require_square("Hamiltonian")?;
        if generator.dim() != n {
            return Err(Error::Shape(format!("generator on dimension {} with {n}x{n} Hamiltonian", generator.dim())));
        }
        Ok(Self { generator, hamiltonian, thermal })
    }
}

impl<T: Real> Dynamics<T> for LindbladDynamics<T> {
    fn dim(&self) -> usize {
        self.hamiltonian.rows()
    }

    fn dim_z(&self) -> usize {
        0
    }

    fn field(&self, q: &CoupledState<T>) -> Result<CoupledState<T>> {
        let mut rho_dot = q.rho.commutator(&self.hamiltonian).scale(c(T::zero(), T::one()));
        rho_dot += &self.generator.apply(&q.rho);
        Ok(CoupledState::quantum(rho_dot))
    }

    fn observables(&self, q: &CoupledState<T>) -> Observables<T> {
        let energy = q.rho.inner_re(&self.hamiltonian);
        match DensityMatrix::relaxed(q.rho.clone()) {
            Ok(rho) => Observables {
                energy,
                entropy: rho.entropy(),
                free_energy: self.thermal.as_ref().map_or(T::nan(), |t| rho.relative_entropy(t)),
            },
            Err(_) => Observables { energy, ..Observables::none() },
        }
    }
}

/// Integrates a coupled system through its operator form `J DE + K DS` (or
/// `(J - K) DF`) instead of the linear form.
#[derive(Clone, Debug)]
pub struct OperatorForm<S>(pub S);

fn generic_observables<T: Real, S: GenericStructure<T>>(sys: &S, q: &CoupledState<T>) -> Observables<T> {
    Observables {
        energy: sys.energy(q).unwrap_or_else(|_| T::nan()),
        entropy: sys.entropy(q).unwrap_or_else(|_| T::nan()),
        free_energy: T::nan(),
    }
}

fn damped_observables<T: Real>(sys: &DampedSystem<T>, q: &CoupledState<T>) -> Observables<T> {
    let entropy = DensityMatrix::relaxed(q.rho.clone()).map_or(T::nan(), |r| r.entropy());
    Observables {
        energy: q.rho.inner_re(sys.hamiltonian()),
        entropy,
        free_energy: sys.free_energy(q).unwrap_or_else(|_| T::nan()),
    }
}

impl<T: Real> Dynamics<T> for GenericSystem<T> {
    fn dim(&self) -> usize {
        self.hamiltonian().rows()
    }
    fn dim_z(&self) -> usize {
        self.macro_model().dim()
    }
    fn field(&self, q: &CoupledState<T>) -> Result<CoupledState<T>> {
        self.linear_field(q)
    }
    fn observables(&self, q: &CoupledState<T>) -> Observables<T> {
        generic_observables(self, q)
    }
    fn in_domain(&self, q: &CoupledState<T>) -> bool {
        self.macro_model().in_domain(&q.z)
    }
    fn z_labels(&self) -> Vec<String> {
        self.macro_model().labels()
    }
}

impl<T: Real> Dynamics<T> for OperatorForm<GenericSystem<T>> {
    fn dim(&self) -> usize {
        Dynamics::dim(&self.0)
    }
    fn dim_z(&self) -> usize {
        Dynamics::dim_z(&self.0)
    }
    fn field(&self, q: &CoupledState<T>) -> Result<CoupledState<T>> {
        GenericStructure::vector_field(&self.0, q)
    }
    fn observables(&self, q: &CoupledState<T>) -> Observables<T> {
        generic_observables(&self.0, q)
    }
    fn in_domain(&self, q: &CoupledState<T>) -> bool {
        self.0.in_domain(q)
    }
    fn z_labels(&self) -> Vec<String> {
        self.0.z_labels()
    }
}

impl<T: Real> Dynamics<T> for DampedSystem<T> {
    fn dim(&self) -> usize {
        self.hamiltonian().rows()
    }
    fn dim_z(&self) -> usize {
        self.macro_model().dim()
    }
    fn field(&self, q: &CoupledState<T>) -> Result<CoupledState<T>> {
        self.linear_field(q)
    }
    fn observables(&self, q: &CoupledState<T>) -> Observables<T> {
        damped_observables(self, q)
    }
    fn in_domain(&self, q: &CoupledState<T>) -> bool {
        self.macro_model().in_domain(&q.z)
    }
    fn z_labels(&self) -> Vec<String> {
        self.macro_model().labels()
    }
}

impl<T: Real> Dynamics<T> for OperatorForm<DampedSystem<T>> {
    fn dim(&self) -> usize {
        Dynamics::dim(&self.0)
    }
    fn dim_z(&self) -> usize {
        Dynamics::dim_z(&self.0)
    }
    fn field(&self, q: &CoupledState<T>) -> Result<CoupledState<T>> {
        DampedStructure::vector_field(&self.0, q)
    }
    fn observables(&self, q: &CoupledState<T>) -> Observables<T> {
        damped_observables(&self.0, q)
    }
    fn in_domain(&self, q: &CoupledState<T>) -> bool {
        self.0.in_domain(q)
    }
    fn z_labels(&self) -> Vec<String> {
        self.0.z_labels()
    }
}

impl<T: Real> Dynamics<T> for SlackGeneric<DampedSystem<T>> {
    fn dim(&self) -> usize {
        Dynamics::dim(self.inner())
    }
    fn dim_z(&self) -> usize {
        Dynamics::dim_z(self.inner()) + 1
    }
    fn field(&self, q: &CoupledState<T>) -> Result<CoupledState<T>> {
        GenericStructure::vector_field(self, q)
    }
    fn observables(&self, q: &CoupledState<T>) -> Observables<T> {
        generic_observables(self, q)
    }
    fn in_domain(&self, q: &CoupledState<T>) -> bool {
        let dz = q.z.len().saturating_sub(1);
        self.inner().macro_model().in_domain(&q.z[..dz])
    }
    fn z_labels(&self) -> Vec<String> {
        let mut l = self.inner().z_labels();
        l.push("slack".into());
        l
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Rk4,
    Heun,
}

/// Which monitor series to evaluate at snapshots; disabled series hold `NaN`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonitorFlags {
    pub trace: bool,
    pub hermiticity: bool,
    pub positivity: bool,
    pub energy: bool,
    pub entropy: bool,
    pub free_energy: bool,
}

impl Default for MonitorFlags {
    fn default() -> Self {
        Self { trace: true, hermiticity: true, positivity: true, energy: true, entropy: true, free_energy: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorConfig<T> {
    pub method: Method,
    pub dt: T,
    pub t_end: T,
    pub output_stride: usize,
    pub domain_guard: bool,
    pub monitors: MonitorFlags,
}

impl<T: Real> IntegratorConfig<T> {
    pub fn new(dt: T, t_end: T) -> Self {
        Self { method: Method::Rk4, dt, t_end, output_stride: 1, domain_guard: true, monitors: MonitorFlags::default() }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.output_stride = stride;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn validate(&self) -> Result<usize> {
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(Error::Config("dt must be positive".into()));
        }
        if !(self.t_end >= self.dt) || !self.t_end.is_finite() {
            return Err(Error::Config("t_end must be at least dt".into()));
        }
        if self.output_stride == 0 {
            return Err(Error::Config("output_stride must be at least 1".into()));
        }
        Ok((self.t_end / self.dt).round().to_usize().unwrap_or(usize::MAX))
    }
}

/// Snapshots taken every `output_stride` steps and at the final step.
#[derive(Clone, Debug, Default)]
pub struct Trajectory<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<CoupledState<T>>,
    pub trace_err: Vec<T>,
    /// Anti-Hermitian part removed by the projection after the step leading to the snapshot.
    pub herm_err: Vec<T>,
    pub min_eig: Vec<T>,
    pub energy: Vec<T>,
    pub entropy: Vec<T>,
    pub free_energy: Vec<T>,
    pub z_labels: Vec<String>,
    /// Largest projection error over all steps.
    pub max_herm_err: T,
    /// Number of step halvings triggered by the domain guard.
    pub halvings: usize,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&CoupledState<T>> {
        self.states.last()
    }
}

/// Threshold below which the smallest eigenvalue of `rho` triggers the domain guard.
pub const POSITIVITY_GUARD: f64 = -1e-10;
const MAX_HALVINGS: usize = 20;

fn raw_step<T: Real, D: Dynamics<T> + ?Sized>(
    sys: &D,
    method: Method,
    q: &CoupledState<T>,
    h: T,
) -> Result<CoupledState<T>> {
    let half = T::lit(0.5);
    match method {
        Method::Rk4 => {
            let k1 = sys.field(q)?;
            let k2 = sys.field(&q.plus(half * h, &k1))?;
            let k3 = sys.field(&q.plus(half * h, &k2))?;
            let k4 = sys.field(&q.plus(h, &k3))?;
            let mut out = q.plus(h / T::lit(6.0), &k1);
            out.axpy(h / T::lit(3.0), &k2);
            out.axpy(h / T::lit(3.0), &k3);
            out.axpy(h / T::lit(6.0), &k4);
            Ok(out)
        }
        Method::Heun => {
            let k1 = sys.field(q)?;
            let k2 = sys.field(&q.plus(h, &k1))?;
            let mut out = q.plus(half * h, &k1);
            out.axpy(half * h, &k2);
            Ok(out)
        }
    }
}

fn min_eig<T: Real>(rho: &ComplexMatrix<T>) -> T {
    hermitian_eigen(rho, T::tol(1e-14)).map_or(T::nan(), |e| e.min())
}

struct Stepper<'a, T: Real, D: ?Sized> {
    sys: &'a D,
    method: Method,
    guard: bool,
    halvings: usize,
    max_herm_err: T,
}

impl<T: Real, D: Dynamics<T> + ?Sized> Stepper<'_, T, D> {
    /// Advances `q` from `t` by `h`, halving recursively while the guard rejects the step.
    fn advance(&mut self, q: &CoupledState<T>, t: T, h: T, depth: usize) -> Result<(CoupledState<T>, T)> {
        let rejection = match raw_step(self.sys, self.method, q, h) {
            Ok(next) => {
                if !next.is_finite() {
                    return Err(Error::NonFinite { t: (t + h).as_f64() });
                }
                let herm = next.rho.antihermitian_norm();
                let next = CoupledState::new(next.rho.hermitian_part(), next.z);
                if !self.guard {
                    self.max_herm_err = self.max_herm_err.max(herm);
                    return Ok((next, herm));
                }
                let lam = min_eig(&next.rho);
                if !self.sys.in_domain(&next) {
                    "macroscopic state left its domain".to_string()
                } else if !(lam >= T::lit(POSITIVITY_GUARD)) {
                    format!("density matrix eigenvalue {lam:e}")
                } else {
                    self.max_herm_err = self.max_herm_err.max(herm);
                    return Ok((next, herm));
                }
            }
            Err(e) if self.guard => e.to_string(),
            Err(e) => return Err(e),
        };
        if depth >= MAX_HALVINGS {
            return Err(Error::GuardExhausted { t: t.as_f64(), reason: rejection });
        }
        self.halvings += 1;
        let half = h * T::lit(0.5);
        let (mid, e1) = self.advance(q, t, half, depth + 1)?;
        let (end, e2) = self.advance(&mid, t + half, half, depth + 1)?;
        Ok((end, e1.max(e2)))
    }
}

/// Integrates `q' = field(q)` from `t = 0` with fixed steps `t_k = k dt`. After every step
/// `rho` is projected onto its Hermitian part; the trace is monitored but never renormalised.
pub fn integrate<T: Real, D: Dynamics<T> + ?Sized>(
    sys: &D,
    q0: &CoupledState<T>,
    cfg: &IntegratorConfig<T>,
) -> Result<Trajectory<T>> {
    let steps = cfg.validate()?;
    if q0.dim() != sys.dim() || q0.z.len() != sys.dim_z() {
        return Err(Error::Shape(format!(
            "initial state ({}, {}) for system ({}, {})",
            q0.dim(),
            q0.z.len(),
            sys.dim(),
            sys.dim_z()
        )));
    }
    if !q0.is_finite() {
        return Err(Error::NonFinite { t: 0.0 });
    }
    let mut traj = Trajectory { z_labels: sys.z_labels(), ..Default::default() };
    let mut stepper = Stepper { sys, method: cfg.method, guard: cfg.domain_guard, halvings: 0, max_herm_err: T::zero() };
    let mut q = CoupledState::new(q0.rho.hermitian_part(), q0.z.clone());
    record(&mut traj, sys, cfg, T::zero(), &q, q0.rho.antihermitian_norm());
    for k in 1..=steps {
        let t = T::from_usize(k - 1).unwrap_or_else(T::zero) * cfg.dt;
        let (next, herm) = stepper.advance(&q, t, cfg.dt, 0)?;
        q = next;
        if k % cfg.output_stride == 0 || k == steps {
            let tk = T::from_usize(k).unwrap_or_else(T::zero) * cfg.dt;
            record(&mut traj, sys, cfg, tk, &q, herm);
        }
    }
    traj.max_herm_err = stepper.max_herm_err;
    traj.halvings = stepper.halvings;
    Ok(traj)
}

fn record<T: Real, D: Dynamics<T> + ?Sized>(
    traj: &mut Trajectory<T>,
    sys: &D,
    cfg: &IntegratorConfig<T>,
    t: T,
    q: &CoupledState<T>,
    herm: T,
) {
    let m = cfg.monitors;
    let nan = T::nan();
    let obs = if m.energy || m.entropy || m.free_energy { sys.observables(q) } else { Observables::none() };
    traj.times.push(t);
    traj.trace_err.push(if m.trace { (q.rho.trace().re - T::one()).abs() } else { nan });
    traj.herm_err.push(if m.hermiticity { herm } else { nan });
    traj.min_eig.push(if m.positivity { min_eig(&q.rho) } else { nan });
    traj.energy.push(if m.energy { obs.energy } else { nan });
    traj.entropy.push(if m.entropy { obs.entropy } else { nan });
    traj.free_energy.push(if m.free_energy { obs.free_energy } else { nan });
    traj.states.push(q.clone());
}
