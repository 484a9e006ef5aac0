//! JSON scenario configuration (schema version 1).

use serde::{Deserialize, Serialize};
use serde_json::Value;

use qgflow::lindblad::{eigenpair_basis, spectral_decompose, EigenpairQ, GROUP_TOL};
use qgflow::{CMatrix, RMatrix};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Complex matrix as paired row-major real and imaginary arrays; `imag` defaults to zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub real: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub imag: Option<Vec<Vec<f64>>>,
}

impl MatrixSpec {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let rows = |f: &dyn Fn(usize, usize) -> f64| -> Vec<Vec<f64>> {
            (0..m.rows()).map(|i| (0..m.cols()).map(|j| f(i, j)).collect()).collect()
        };
        let imag = rows(&|i, j| m[(i, j)].im);
        let any_imag = imag.iter().flatten().any(|&x| x != 0.0);
        MatrixSpec { real: rows(&|i, j| m[(i, j)].re), imag: any_imag.then_some(imag) }
    }

    pub fn to_matrix(&self, what: &str, rows: usize, cols: usize) -> Result<CMatrix, CliError> {
        let check = |a: &Vec<Vec<f64>>, part: &str| -> Result<(), CliError> {
            if a.len() != rows || a.iter().any(|r| r.len() != cols) {
                return Err(CliError::Validation(format!("{what}.{part} must be {rows}x{cols}")));
            }
            if a.iter().flatten().any(|x| !x.is_finite()) {
                return Err(CliError::Validation(format!("{what}.{part} has non-finite entries")));
            }
            Ok(())
        };
        check(&self.real, "real")?;
        let re: Vec<f64> = self.real.iter().flatten().copied().collect();
        let im: Vec<f64> = match &self.imag {
            Some(imag) => {
                check(imag, "imag")?;
                imag.iter().flatten().copied().collect()
            }
            None => vec![0.0; rows * cols],
        };
        CMatrix::from_parts(rows, cols, &re, &im).map_err(|e| CliError::Validation(format!("{what}: {e}")))
    }

    pub fn to_hermitian(&self, what: &str, n: usize) -> Result<CMatrix, CliError> {
        let m = self.to_matrix(what, n, n)?;
        m.require_hermitian(1e-12).map_err(|e| CliError::Validation(format!("{what}: {e}")))?;
        Ok(m.hermitian_part())
    }
}

pub fn real_matrix(rows: &[Vec<f64>], what: &str, n: usize) -> Result<RMatrix, CliError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Validation(format!("{what} must be {n}x{n}")));
    }
    RMatrix::from_rows(rows).map_err(|e| CliError::Validation(format!("{what}: {e}")))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CouplingSpec {
    Eigenpair {
        omega: f64,
        #[serde(rename = "Q")]
        q: MatrixSpec,
        #[serde(default = "one")]
        rate: f64,
        #[serde(default)]
        bath: usize,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        direction: Vec<f64>,
    },
    /// Every element of the eigen-operator basis for `omega`.
    Auto {
        omega: f64,
        #[serde(default = "one")]
        rate: f64,
        #[serde(default)]
        bath: usize,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        direction: Vec<f64>,
    },
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

/// An expanded coupling: eigen-operator pair with rate, bath index and macroscopic direction.
#[derive(Clone, Debug)]
pub struct Coupling {
    pub pair: EigenpairQ<f64>,
    pub rate: f64,
    pub bath: usize,
    pub direction: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Lindblad,
    DampedQs,
    HeatBaths,
    Isothermal,
    QuantumDot,
    MaxwellBlochUniform,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    #[serde(default = "rk4")]
    pub method: String,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "one_usize")]
    pub output_stride: usize,
    #[serde(default = "yes")]
    pub domain_guard: bool,
}

fn rk4() -> String {
    "rk4".into()
}

fn one_usize() -> usize {
    1
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub z: Vec<f64>,
}

/// Tensor coupling `(Q, sigma)` with `Q` on `C^dim (x) C^m`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorSpec {
    #[serde(rename = "Q")]
    pub q: MatrixSpec,
    pub sigma: MatrixSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    pub dim: usize,
    pub hamiltonian: MatrixSpec,
    pub beta: f64,
    #[serde(rename = "k_B", default = "one")]
    pub k_b: f64,
    #[serde(default)]
    pub couplings: Vec<CouplingSpec>,
    pub scenario: Scenario,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub scenario_params: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrator: Option<IntegratorSpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialSpec>,
    /// Dense superoperator on row-major vectorisations, added to the block generator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<MatrixSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tensor: Option<TensorSpec>,
    /// Written by `decompose`; carried along but not used to build the generator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<Value>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Validation(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        if cfg.dim == 0 {
            return Err(CliError::Validation("dim must be positive".into()));
        }
        if !cfg.beta.is_finite() || !cfg.k_b.is_finite() {
            return Err(CliError::Validation("beta and k_B must be finite".into()));
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn hamiltonian(&self) -> Result<CMatrix, CliError> {
        self.hamiltonian.to_hermitian("hamiltonian", self.dim)
    }

    /// Couplings with `auto` entries expanded into the eigen-operator basis of their frequency.
    pub fn couplings(&self, h: &CMatrix) -> Result<Vec<Coupling>, CliError> {
        let mut out = Vec::new();
        let invalid = |e: qgflow::Error| CliError::Validation(format!("coupling: {e}"));
        for (k, spec) in self.couplings.iter().enumerate() {
            let (rate, bath, direction) = match spec {
                CouplingSpec::Eigenpair { rate, bath, direction, .. } | CouplingSpec::Auto { rate, bath, direction, .. } => {
                    (*rate, *bath, direction.clone())
                }
            };
            if !(rate >= 0.0) || !rate.is_finite() {
                return Err(CliError::Validation(format!("coupling {k}: rate must be nonnegative")));
            }
            let pairs = match spec {
                CouplingSpec::Eigenpair { omega, q, .. } => {
                    let q = q.to_matrix(&format!("couplings[{k}].Q"), self.dim, self.dim)?;
                    vec![EigenpairQ::new(*omega, q, h).map_err(invalid)?]
                }
                CouplingSpec::Auto { omega, .. } => {
                    let sd = spectral_decompose(h, GROUP_TOL).map_err(invalid)?;
                    eigenpair_basis(&sd, *omega).map_err(invalid)?
                }
            };
            out.extend(pairs.into_iter().map(|pair| Coupling { pair, rate, bath, direction: direction.clone() }));
        }
        Ok(out)
    }

    /// Scenario parameters decoded into `P`; a missing object decodes as `{}`.
    pub fn params<P: serde::de::DeserializeOwned>(&self) -> Result<P, CliError> {
        let v = if self.scenario_params.is_null() { Value::Object(Default::default()) } else { self.scenario_params.clone() };
        serde_json::from_value(v).map_err(|e| CliError::Validation(format!("scenario_params: {e}")))
    }
}
