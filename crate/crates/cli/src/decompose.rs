//! Block and tensor decomposition, written as a configuration that can be read back in.

use std::path::Path;

use serde_json::json;

use qgflow::lindblad::{dbc_check, decompose_dbc, Block};

use crate::config::{Config, CouplingSpec, MatrixSpec, Scenario};
use crate::scenario::Model;
use crate::CliError;

const TOL: f64 = 1e-9;

pub fn decompose(config: &Path, out: &Path) -> Result<String, CliError> {
    let cfg = Config::load(config)?;
    let model = Model::new(cfg)?;
    let thermal = model.thermal()?;
    let l = model.generator()?;
    let dec = match decompose_dbc(&l, &thermal, TOL) {
        Ok(d) => d,
        Err(qgflow::Error::Precondition(msg)) => {
            let r = dbc_check(&l, &thermal, TOL);
            let report = json!({
                "status": "not_detailed_balance",
                "message": msg,
                "stationarity": r.stationarity,
                "symmetry": r.symmetry,
            });
            return Err(CliError::Failed(report.to_string()));
        }
        Err(e) => return Err(CliError::Validation(e.to_string())),
    };

    let mut couplings = Vec::new();
    let mut dephasing = Vec::new();
    let mut blocks = Vec::new();
    for b in &dec.blocks {
        match b {
            Block::Exchange { pair, .. } => {
                couplings.push(CouplingSpec::Eigenpair {
                    omega: pair.omega,
                    q: MatrixSpec::from_matrix(&pair.q),
                    rate: 1.0,
                    bath: 0,
                    direction: Vec::new(),
                });
                blocks.push(json!({ "kind": "exchange", "omega": pair.omega, "Q": MatrixSpec::from_matrix(&pair.q) }));
            }
            Block::Dephasing { w } => {
                dephasing.push(MatrixSpec::from_matrix(w));
                blocks.push(json!({ "kind": "dephasing", "omega": 0.0, "W": MatrixSpec::from_matrix(w) }));
            }
        }
    }
    let block_residual = dec.block_generator(&model.h).map_err(|e| CliError::Validation(e.to_string()))?.distance(&l);
    let tensor_residual = dec.tensor.generator().distance(&l);
    let summary = json!({
        "blocks": blocks,
        "tensor": { "Q": MatrixSpec::from_matrix(&dec.tensor.q), "sigma": MatrixSpec::from_matrix(&dec.tensor.sigma) },
        "sigma_choice": "thermal",
        "residuals": {
            "block": block_residual,
            "tensor": tensor_residual,
            "commutation": dec.commutation_residual,
        },
    });

    let mut cfg = model.cfg.clone();
    cfg.scenario = Scenario::Lindblad;
    cfg.couplings = couplings;
    cfg.scenario_params = if dephasing.is_empty() { serde_json::Value::Null } else { json!({ "dephasing": dephasing }) };
    cfg.generator = None;
    cfg.tensor = None;
    cfg.decomposition = Some(summary);
    if let Some(init) = &cfg.initial {
        if !init.z.is_empty() {
            cfg.initial = Some(crate::config::InitialSpec { rho: init.rho.clone(), z: Vec::new() });
        }
    }
    let text = serde_json::to_string_pretty(&cfg).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(out, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", out.display())))?;
    Ok(json!({
        "status": "ok",
        "blocks": dec.blocks.len(),
        "block_residual": block_residual,
        "tensor_residual": tensor_residual,
        "commutation_residual": dec.commutation_residual,
    })
    .to_string())
}
