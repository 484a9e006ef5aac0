//! Verification suites with per-trial residuals and reproducible failing cases.

use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use qgflow::generic::{nic_check, with_slack, CoupledState, SlackGeneric};
use qgflow::kubo_mori::miracle_residuals;
use qgflow::lindblad::{cp_check, dbc_check, decompose_dbc, eigenpair_basis, spectral_decompose, EigenpairQ, GROUP_TOL};
use qgflow::onsager::{gradient_form_residual, tensor_onsager};
use qgflow::rng::{random_density, random_density_spread, SplitMix64};
use qgflow::states::DensityMatrix;
use qgflow::CMatrix;

use crate::config::{Config, MatrixSpec};
use crate::scenario::{Built, Model};
use crate::{CliError, Suite};

const DEFAULT_TRIALS: usize = 20;

struct Case {
    residuals: Map<String, Value>,
    pass: bool,
    /// Inputs needed to reproduce the case.
    inputs: Value,
}

fn case(residuals: &[(&str, f64)], tol: f64, inputs: Value) -> Case {
    let pass = residuals.iter().all(|&(_, r)| r <= tol);
    let residuals = residuals.iter().map(|&(k, r)| (k.to_string(), json!(r))).collect();
    Case { residuals, pass, inputs }
}

fn core(e: qgflow::Error) -> CliError {
    CliError::Validation(e.to_string())
}

fn matrix(m: &CMatrix) -> Value {
    serde_json::to_value(MatrixSpec::from_matrix(m)).unwrap_or(Value::Null)
}

fn random_pair(rng: &mut SplitMix64, h: &CMatrix) -> Result<EigenpairQ<f64>, CliError> {
    let sd = spectral_decompose(h, GROUP_TOL).map_err(core)?;
    let omegas = sd.omegas();
    let w = omegas[rng.int_in(0, omegas.len() - 1)];
    let mut q = CMatrix::zeros(h.rows(), h.cols());
    for p in eigenpair_basis(&sd, w).map_err(core)? {
        q.axpy(rng.complex_normal(), &p.q);
    }
    let q = q.scale_re(1.0 / q.norm());
    EigenpairQ::new(w, q, h).map_err(core)
}

/// Random admissible macroscopic coordinates: the configured initial values scaled by a
/// factor in `[0.5, 1.5]`, or uniform in `[0.5, 2]` when none are given.
fn random_z(rng: &mut SplitMix64, model: &Model, dz: usize) -> Vec<f64> {
    let base = model.cfg.initial.as_ref().map(|i| i.z.clone()).unwrap_or_default();
    (0..dz)
        .map(|k| match base.get(k) {
            Some(&z) => z * rng.uniform_in(0.5, 1.5),
            None => rng.uniform_in(0.5, 2.0),
        })
        .collect()
}

fn nic_trial(model: &Model, rng: &mut SplitMix64, tol: f64) -> Result<Case, CliError> {
    use qgflow::integrator::Dynamics;
    let rho = random_density::<f64>(rng, model.cfg.dim, 0.05);
    let (report, q) = match model.build()? {
        Built::Lindblad(_) => {
            return Err(CliError::Validation("nic needs a coupled scenario, not lindblad".into()));
        }
        Built::Generic(sys) => {
            let q = CoupledState::new(rho, random_z(rng, model, sys.dim_z()));
            (nic_check(&sys, &q, tol).map_err(core)?, q)
        }
        Built::Damped(sys) => {
            let q = CoupledState::new(rho, random_z(rng, model, sys.dim_z()));
            let q = with_slack(&q, rng.uniform_in(-1.0, 1.0));
            (nic_check(&SlackGeneric::new(sys), &q, tol).map_err(core)?, q)
        }
    };
    let inputs = json!({ "rho": matrix(&q.rho), "z": q.z });
    Ok(case(&[("poisson_entropy", report.poisson_entropy), ("onsager_energy", report.onsager_energy)], tol, inputs))
}

fn identities_trial(model: &Model, rng: &mut SplitMix64, tol: f64) -> Result<Case, CliError> {
    let thermal = model.thermal()?;
    let rho = random_density_spread::<f64>(rng, model.cfg.dim, 3.0);
    let pair = random_pair(rng, &model.h)?;
    let alpha = rng.uniform_in(-3.0, 3.0);
    let state = DensityMatrix::new(rho.clone()).map_err(core)?;
    let r = miracle_residuals(&state, &thermal, &pair, alpha).map_err(core)?;
    let inputs = json!({ "rho": matrix(&rho), "omega": pair.omega, "Q": matrix(&pair.q), "alpha": alpha });
    Ok(case(&[("classic", r.classic), ("generalized", r.generalized), ("corollary", r.corollary)], tol, inputs))
}

fn run_trials(
    trials: usize,
    seed: u64,
    f: impl Fn(&mut SplitMix64) -> Result<Case, CliError> + Sync,
) -> Result<Vec<Case>, CliError> {
    // Trials draw from independent streams and are merged by index, so the report does not
    // depend on the thread count.
    (0..trials).into_par_iter().map(|k| f(&mut SplitMix64::for_trial(seed, k as u64))).collect()
}

pub fn check(suite: Suite, config: &Path, trials: Option<usize>, seed: Option<u64>, tol: Option<f64>) -> Result<String, CliError> {
    let cfg = Config::load(config)?;
    let seed = seed.unwrap_or(cfg.seed);
    let trials = trials.unwrap_or(DEFAULT_TRIALS);
    let tol = tol.unwrap_or(match suite {
        Suite::Gradient => 1e-8,
        _ => 1e-9,
    });
    if !(tol > 0.0) {
        return Err(CliError::Validation("tol must be positive".into()));
    }
    let model = Model::new(cfg)?;
    let cases: Vec<Case> = match suite {
        Suite::Dbc => {
            let l = model.generator()?;
            let r = dbc_check(&l, &model.thermal()?, tol);
            let inputs = json!({ "generator": matrix(&l.to_dense()) });
            vec![case(&[("stationarity", r.stationarity), ("symmetry", r.symmetry)], tol, inputs)]
        }
        Suite::Cp => {
            let l = model.generator()?;
            let r = cp_check(&l, 1.0, tol).map_err(core)?;
            let inputs = json!({ "generator": matrix(&l.to_dense()) });
            let residuals = [
                ("negative_choi", (-r.min_eigenvalue).max(0.0)),
                ("negative_choi_short", (-r.min_eigenvalue_short).max(0.0)),
                ("choi_asymmetry", r.choi_asymmetry),
            ];
            vec![case(&residuals, tol, inputs)]
        }
        Suite::Nic => run_trials(trials, seed, |rng| nic_trial(&model, rng, tol))?,
        Suite::Identities => run_trials(trials, seed, |rng| identities_trial(&model, rng, tol))?,
        Suite::Gradient => {
            let thermal = model.thermal()?;
            let l = model.generator()?;
            let dec = decompose_dbc(&l, &thermal, 1e-9).map_err(|e| CliError::Failed(failure_report("gradient", &e)))?;
            run_trials(trials, seed, |rng| {
                let rho = random_density_spread::<f64>(rng, model.cfg.dim, 3.0);
                let state = DensityMatrix::new(rho.clone()).map_err(core)?;
                let source = tensor_onsager(dec.tensor.clone());
                let r = gradient_form_residual(&source, &state, &thermal).map_err(core)?;
                Ok(case(&[("gradient_form", r)], tol, json!({ "rho": matrix(&rho) })))
            })?
        }
    };
    let pass = cases.iter().all(|c| c.pass);
    let max = cases
        .iter()
        .flat_map(|c| c.residuals.values().filter_map(Value::as_f64))
        .fold(0.0f64, f64::max);
    let listed: Vec<Value> = cases
        .iter()
        .enumerate()
        .map(|(k, c)| json!({ "trial": k, "pass": c.pass, "residuals": c.residuals }))
        .collect();
    let failing: Vec<Value> = cases
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.pass)
        .map(|(k, c)| json!({ "trial": k, "residuals": c.residuals, "inputs": c.inputs }))
        .collect();
    let report = json!({
        "suite": format!("{suite:?}").to_lowercase(),
        "pass": pass,
        "tol": tol,
        "seed": seed,
        "cases": listed,
        "max_residual": max,
        "failing": failing,
    });
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
    if pass {
        Ok(text)
    } else {
        Err(CliError::Failed(text))
    }
}

pub fn failure_report(suite: &str, e: &qgflow::Error) -> String {
    json!({ "suite": suite, "pass": false, "message": e.to_string() }).to_string()
}
