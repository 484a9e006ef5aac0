use std::fmt::Write as _;
use std::path::Path;

use qgflow::integrator::{integrate, Dynamics, IntegratorConfig, Method, Trajectory};

use crate::config::{Config, IntegratorSpec};
use crate::scenario::{Built, Model};
use crate::CliError;

fn integrator_config(spec: &IntegratorSpec) -> Result<IntegratorConfig<f64>, CliError> {
    let method = match spec.method.to_ascii_lowercase().as_str() {
        "rk4" => Method::Rk4,
        "heun" => Method::Heun,
        other => return Err(CliError::Validation(format!("unknown integrator method {other:?}"))),
    };
    let mut cfg = IntegratorConfig::new(spec.dt, spec.t_end).with_method(method).with_stride(spec.output_stride);
    cfg.domain_guard = spec.domain_guard;
    cfg.validate().map_err(|e| CliError::Validation(e.to_string()))?;
    Ok(cfg)
}

fn run<D: Dynamics<f64>>(sys: &D, model: &Model, cfg: &IntegratorConfig<f64>) -> Result<Trajectory<f64>, CliError> {
    let q0 = model.initial_state(sys.dim_z())?;
    if !sys.in_domain(&q0) {
        return Err(CliError::Validation("initial macroscopic state is outside the scenario domain".into()));
    }
    integrate(sys, &q0, cfg).map_err(|e| match e {
        qgflow::Error::Shape(_) | qgflow::Error::Config(_) => CliError::Validation(e.to_string()),
        other => CliError::Integration(other.to_string()),
    })
}

fn num(out: &mut String, x: f64) {
    let _ = write!(out, ",{x:.16e}");
}

/// CSV with columns `t, trace_err, herm_err, min_eig, energy, entropy, free_energy`, the real and
/// imaginary parts of `rho` in row-major order, then the macroscopic coordinates.
pub fn to_csv(traj: &Trajectory<f64>, n: usize) -> String {
    let mut out = String::from("t,trace_err,herm_err,min_eig,energy,entropy,free_energy");
    for i in 0..n {
        for j in 0..n {
            let _ = write!(out, ",re_rho_{i}_{j},im_rho_{i}_{j}");
        }
    }
    for label in &traj.z_labels {
        let _ = write!(out, ",{label}");
    }
    out.push('\n');
    for k in 0..traj.len() {
        let _ = write!(out, "{:.16e}", traj.times[k]);
        for x in [traj.trace_err[k], traj.herm_err[k], traj.min_eig[k], traj.energy[k], traj.entropy[k], traj.free_energy[k]] {
            num(&mut out, x);
        }
        let q = &traj.states[k];
        for v in q.rho.data() {
            num(&mut out, v.re);
            num(&mut out, v.im);
        }
        for &z in &q.z {
            num(&mut out, z);
        }
        out.push('\n');
    }
    out
}

pub fn simulate(config: &Path, out: &Path) -> Result<String, CliError> {
    let cfg = Config::load(config)?;
    let spec = cfg.integrator.clone().ok_or_else(|| CliError::Validation("simulate needs an integrator section".into()))?;
    let icfg = integrator_config(&spec)?;
    let model = Model::new(cfg)?;
    let traj = match model.build()? {
        Built::Lindblad(sys) => run(&sys, &model, &icfg)?,
        Built::Generic(sys) => run(&sys, &model, &icfg)?,
        Built::Damped(sys) => run(&sys, &model, &icfg)?,
    };
    std::fs::write(out, to_csv(&traj, model.cfg.dim))
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", out.display())))?;
    Ok(format!(
        "{{\"status\":\"ok\",\"rows\":{},\"halvings\":{},\"max_herm_err\":{:e}}}",
        traj.len(),
        traj.halvings,
        traj.max_herm_err
    ))
}
