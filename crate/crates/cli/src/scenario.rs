//! Building generators and coupled systems from a configuration.

use serde::Deserialize;

use qgflow::generic::scenarios::{damped_qs, heat_baths, isothermal, maxwell_bloch_uniform, QuadraticMacro, QuantumDot};
use qgflow::generic::{CoupledState, DampedSystem, GenericSystem};
use qgflow::integrator::LindbladDynamics;
use qgflow::lindblad::{make_mq, make_sw, make_tensor_lindblad, Superoperator};
use qgflow::rng::{random_density, SplitMix64};
use qgflow::states::ThermalState;
use qgflow::{CMatrix, Generator};

use crate::config::{real_matrix, Config, Coupling, MatrixSpec, Scenario};
use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladParams {
    /// Hermitian operators commuting with `H`, each contributing `S_W`.
    #[serde(default)]
    pub dephasing: Vec<MatrixSpec>,
    /// Adds `rho -> i[rho, H]` to the checked and decomposed generator.
    #[serde(default)]
    pub include_hamiltonian: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Empty {}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HeatBathParams {
    capacities: Vec<f64>,
    #[serde(default)]
    conduction: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IsothermalParams {
    stiffness: Vec<Vec<f64>>,
    poisson: Vec<Vec<f64>>,
    onsager: Vec<Vec<f64>>,
    #[serde(default)]
    gamma: Vec<MatrixSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuantumDotParams {
    w_free: f64,
    w_bound: f64,
    kappa_hat: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaxwellBlochParams {
    #[serde(default)]
    polarisation: Option<Vec<[f64; 3]>>,
}

fn invalid(e: qgflow::Error) -> CliError {
    CliError::Validation(e.to_string())
}

/// A simulated system.
pub enum Built {
    Lindblad(LindbladDynamics<f64>),
    Generic(GenericSystem<f64>),
    Damped(DampedSystem<f64>),
}

/// Configuration with the Hamiltonian and couplings decoded.
pub struct Model {
    pub cfg: Config,
    pub h: CMatrix,
    pub couplings: Vec<Coupling>,
}

impl Model {
    pub fn new(cfg: Config) -> Result<Self, CliError> {
        let h = cfg.hamiltonian()?;
        let couplings = cfg.couplings(&h)?;
        Ok(Self { cfg, h, couplings })
    }

    pub fn thermal(&self) -> Result<ThermalState<f64>, CliError> {
        ThermalState::new(&self.h, self.cfg.beta).map_err(invalid)
    }

    fn pairs_with_rates(&self) -> Vec<(qgflow::Eigenpair, f64)> {
        self.couplings.iter().map(|c| (c.pair.clone(), c.rate)).collect()
    }

    /// Dissipative generator at inverse temperature `beta`: `sum_c rate_c M_{beta,Q_c}`, plus
    /// dephasing blocks, the tensor coupling and the dense generator when given.
    pub fn generator(&self) -> Result<Generator, CliError> {
        let n = self.cfg.dim;
        let beta = self.cfg.beta;
        let mut parts: Vec<Generator> = self.couplings.iter().map(|c| make_mq(beta, &c.pair).scaled(c.rate)).collect();
        if self.cfg.scenario == Scenario::Lindblad {
            let params: LindbladParams = self.cfg.params()?;
            for (k, w) in params.dephasing.iter().enumerate() {
                let w = w.to_hermitian(&format!("scenario_params.dephasing[{k}]"), n)?;
                parts.push(make_sw(&w, &self.h).map_err(invalid)?);
            }
            if params.include_hamiltonian {
                parts.push(Superoperator::hamiltonian(&self.h).map_err(invalid)?);
            }
        }
        if let Some(t) = &self.cfg.tensor {
            let m = t.sigma.real.len();
            let sigma = t.sigma.to_hermitian("tensor.sigma", m)?;
            let q = t.q.to_hermitian("tensor.Q", n * m)?;
            parts.push(make_tensor_lindblad(&q, &sigma, n).map_err(invalid)?.generator());
        }
        if let Some(g) = &self.cfg.generator {
            let dense = g.to_matrix("generator", n * n, n * n)?;
            parts.push(Superoperator::from_dense(dense).map_err(invalid)?);
        }
        Superoperator::sum(n, parts).map_err(invalid)
    }

    pub fn build(&self) -> Result<Built, CliError> {
        let cfg = &self.cfg;
        let h = self.h.clone();
        let n = cfg.dim;
        match cfg.scenario {
            Scenario::Lindblad => {
                let params: LindbladParams = cfg.params()?;
                if params.include_hamiltonian {
                    return Err(CliError::Validation(
                        "include_hamiltonian only applies to check and decompose; the Hamiltonian part is always simulated"
                            .into(),
                    ));
                }
                let thermal = self.thermal()?;
                Ok(Built::Lindblad(LindbladDynamics::new(self.generator()?, h, Some(thermal)).map_err(invalid)?))
            }
            Scenario::DampedQs => {
                let _: Empty = cfg.params()?;
                Ok(Built::Damped(damped_qs(h, cfg.beta, self.pairs_with_rates()).map_err(invalid)?))
            }
            Scenario::HeatBaths => {
                let p: HeatBathParams = cfg.params()?;
                let couplings = self.couplings.iter().map(|c| (c.pair.clone(), c.bath, c.rate)).collect();
                Ok(Built::Generic(heat_baths(h, cfg.k_b, p.capacities, p.conduction, couplings).map_err(invalid)?))
            }
            Scenario::Isothermal => {
                let p: IsothermalParams = cfg.params()?;
                let dz = p.stiffness.len();
                let macro_model = QuadraticMacro {
                    stiffness: real_matrix(&p.stiffness, "stiffness", dz)?,
                    poisson: real_matrix(&p.poisson, "poisson", dz)?,
                    onsager: real_matrix(&p.onsager, "onsager", dz)?,
                };
                let gamma = p
                    .gamma
                    .iter()
                    .enumerate()
                    .map(|(k, g)| g.to_hermitian(&format!("scenario_params.gamma[{k}]"), n))
                    .collect::<Result<Vec<_>, _>>()?;
                let couplings = self.couplings.iter().map(|c| (c.pair.clone(), c.direction.clone(), c.rate)).collect();
                Ok(Built::Damped(isothermal(h, cfg.beta, macro_model, gamma, couplings).map_err(invalid)?))
            }
            Scenario::QuantumDot => {
                let p: QuantumDotParams = cfg.params()?;
                if n != 2 || h[(0, 1)].norm() != 0.0 {
                    return Err(CliError::Validation("quantum_dot needs a diagonal 2x2 Hamiltonian diag(eps1, eps2)".into()));
                }
                let dot = QuantumDot {
                    eps1: h[(0, 0)].re,
                    eps2: h[(1, 1)].re,
                    beta_star: cfg.beta,
                    w_free: p.w_free,
                    w_bound: p.w_bound,
                    kappa_hat: p.kappa_hat,
                };
                Ok(Built::Damped(dot.system().map_err(invalid)?))
            }
            Scenario::MaxwellBlochUniform => {
                let p: MaxwellBlochParams = cfg.params()?;
                let sys = maxwell_bloch_uniform(h, cfg.beta, self.pairs_with_rates(), p.polarisation.as_deref())
                    .map_err(invalid)?;
                Ok(Built::Damped(sys))
            }
        }
    }

    /// Initial state from the config; `rho` defaults to a random full-rank state drawn from `seed`.
    pub fn initial_state(&self, dim_z: usize) -> Result<CoupledState<f64>, CliError> {
        let n = self.cfg.dim;
        let init = self.cfg.initial.clone().unwrap_or_default();
        let rho = match &init.rho {
            Some(m) => {
                let rho = m.to_hermitian("initial.rho", n)?;
                qgflow::Density::relaxed(rho.clone()).map_err(invalid)?;
                rho
            }
            None => random_density(&mut SplitMix64::new(self.cfg.seed), n, 0.1),
        };
        if init.z.len() != dim_z {
            return Err(CliError::Validation(format!(
                "initial.z has {} entries, scenario needs {dim_z}",
                init.z.len()
            )));
        }
        Ok(CoupledState::new(rho, init.z))
    }
}
