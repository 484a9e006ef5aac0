use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qgflow"))
}

fn write(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

/// Two-level system in the gauge `e^{-e1} + e^{-e2} = 2` (beta = 1), where `T1 = 1/(2 gamma)`.
fn bloch_config(gamma: f64, delta: f64) -> Value {
    let (e1, e2) = (-(1.5f64).ln(), -(0.5f64).ln());
    let kappa = gamma / 2.0 * (-(e1 + e2) / 2.0).exp();
    let w = (delta / 2.0).sqrt();
    json!({
        "schema_version": 1,
        "dim": 2,
        "hamiltonian": { "real": [[e1, 0.0], [0.0, e2]] },
        "beta": 1.0,
        "couplings": [{ "type": "eigenpair", "omega": e2 - e1, "Q": { "real": [[0.0, 1.0], [0.0, 0.0]] }, "rate": kappa }],
        "scenario": "lindblad",
        "scenario_params": { "dephasing": [{ "real": [[w, 0.0], [0.0, -w]] }] },
        "integrator": { "method": "rk4", "dt": 1e-3, "t_end": 1.0, "output_stride": 10 },
        "initial": { "rho": { "real": [[0.3, 0.25], [0.25, 0.7]] } },
        "seed": 1
    })
}

fn heat_bath_config() -> Value {
    json!({
        "schema_version": 1,
        "dim": 3,
        "hamiltonian": { "real": [[0.0, 0.0, 0.0], [0.0, 0.7, 0.0], [0.0, 0.0, 1.5]] },
        "beta": 1.0,
        "k_B": 0.8,
        "couplings": [
            { "type": "auto", "omega": 0.7, "rate": 0.6, "bath": 0 },
            { "type": "auto", "omega": 1.5, "rate": 0.4, "bath": 1 },
            { "type": "auto", "omega": 0.8, "rate": 0.5, "bath": 1 }
        ],
        "scenario": "heat_baths",
        "scenario_params": { "capacities": [3.0, 5.0], "conduction": 0.2 },
        "integrator": { "dt": 1e-2, "t_end": 5.0, "output_stride": 5 },
        "initial": { "z": [0.6, 2.0] },
        "seed": 11
    })
}

fn csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn fit_rate(t: &[f64], v: &[f64]) -> f64 {
    let n = t.len() as f64;
    let y: Vec<f64> = v.iter().map(|x| x.abs().ln()).collect();
    let (mt, my) = (t.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let num: f64 = t.iter().zip(&y).map(|(a, b)| (a - mt) * (b - my)).sum();
    let den: f64 = t.iter().map(|a| (a - mt) * (a - mt)).sum();
    -num / den
}

#[test]
fn bloch_simulation_reproduces_relaxation_times() {
    let dir = TempDir::new().unwrap();
    for &(gamma, delta) in &[(1.0, 0.0), (1.0, 1.0), (0.3, 2.0)] {
        let cfg = write(&dir, "bloch.json", &bloch_config(gamma, delta));
        let out = dir.path().join("bloch.csv");
        let o = run(&["simulate", "--config", s(&cfg), "--out", s(&out)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let (header, rows) = csv(&out);
        assert_eq!(header.len(), 7 + 8);
        assert_eq!(header[7], "re_rho_0_0");
        let t: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        // a_z = rho_00 - rho_11 relaxes to (e^{-e1} - e^{-e2}) / 2 = 0.5. The coherence rotates
        // at the Bohr frequency, so the transverse decay is read from |rho_01|.
        let az: Vec<f64> = rows.iter().map(|r| r[7] - r[13] - 0.5).collect();
        let ax: Vec<f64> = rows.iter().map(|r| r[9].hypot(r[10])).collect();
        let (t1, t2) = (1.0 / fit_rate(&t, &az), 1.0 / fit_rate(&t, &ax));
        assert!((t1 * 2.0 * gamma - 1.0).abs() < 1e-3, "T1 {t1}");
        assert!((t2 * (gamma + 2.0 * delta) - 1.0).abs() < 1e-3, "T2 {t2}");
    }
}

#[test]
fn validation_errors_exit_with_code_two() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.csv");
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ \"schema_version\": 1,").unwrap();
    let o = run(&["simulate", "--config", s(&bad), "--out", s(&out)]);
    assert_eq!(code(&o), 2);
    let diag: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(diag["kind"], "validation");

    let mut cfg = bloch_config(1.0, 0.0);
    cfg["extra"] = json!(1);
    let p = write(&dir, "unknown.json", &cfg);
    assert_eq!(code(&run(&["simulate", "--config", s(&p), "--out", s(&out)])), 2);

    let mut cfg = bloch_config(1.0, 0.0);
    cfg["schema_version"] = json!(2);
    let p = write(&dir, "version.json", &cfg);
    assert_eq!(code(&run(&["simulate", "--config", s(&p), "--out", s(&out)])), 2);

    let mut cfg = bloch_config(1.0, 0.0);
    cfg["couplings"][0]["omega"] = json!(0.3);
    let p = write(&dir, "pair.json", &cfg);
    assert_eq!(code(&run(&["simulate", "--config", s(&p), "--out", s(&out)])), 2);

    let mut cfg = heat_bath_config();
    cfg["scenario_params"]["capacities"] = json!([3.0, -1.0]);
    let p = write(&dir, "caps.json", &cfg);
    assert_eq!(code(&run(&["simulate", "--config", s(&p), "--out", s(&out)])), 2);

    let mut cfg = heat_bath_config();
    cfg["initial"]["z"] = json!([1.0]);
    let p = write(&dir, "z.json", &cfg);
    assert_eq!(code(&run(&["simulate", "--config", s(&p), "--out", s(&out)])), 2);
    assert!(!out.exists());
}

#[test]
fn integration_failure_exits_with_code_three() {
    let dir = TempDir::new().unwrap();
    let mut cfg = bloch_config(10.0, 0.0);
    cfg["integrator"] = json!({ "dt": 50.0, "t_end": 5000.0, "domain_guard": false });
    let p = write(&dir, "blowup.json", &cfg);
    let o = run(&["simulate", "--config", s(&p), "--out", s(&dir.path().join("x.csv"))]);
    assert_eq!(code(&o), 3);
    let diag: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(diag["kind"], "integration");
}

#[test]
fn heat_bath_energy_column_is_constant() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "hb.json", &heat_bath_config());
    let out = dir.path().join("hb.csv");
    assert_eq!(code(&run(&["simulate", "--config", s(&p), "--out", s(&out)])), 0);
    let (header, rows) = csv(&out);
    assert_eq!(&header[header.len() - 2..], &["theta0".to_string(), "theta1".to_string()]);
    let e0 = rows[0][4];
    assert!(rows.iter().all(|r| (r[4] - e0).abs() < 1e-7));
    assert!(rows.windows(2).all(|w| w[1][5] >= w[0][5] - 1e-9));
}

#[test]
fn simulation_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let mut cfg = heat_bath_config();
    cfg["initial"] = json!({ "z": [0.6, 2.0] });
    let p = write(&dir, "hb.json", &cfg);
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert_eq!(code(&run(&["simulate", "--config", s(&p), "--out", s(&a)])), 0);
    assert_eq!(code(&run(&["simulate", "--config", s(&p), "--out", s(&b)])), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn coupled_scenarios_simulate() {
    let dir = TempDir::new().unwrap();
    let dot = json!({
        "schema_version": 1, "dim": 2,
        "hamiltonian": { "real": [[-0.4, 0.0], [0.0, 0.9]] },
        "beta": 1.2, "scenario": "quantum_dot",
        "scenario_params": { "w_free": 0.7, "w_bound": 1.6, "kappa_hat": 0.8 },
        "integrator": { "dt": 1e-2, "t_end": 2.0, "output_stride": 10 },
        "initial": { "z": [0.3, 2.0] }
    });
    let mb = json!({
        "schema_version": 1, "dim": 3,
        "hamiltonian": { "real": [[0.0, 0.0, 0.0], [0.0, 0.6, 0.0], [0.0, 0.0, 1.7]] },
        "beta": 0.9,
        "couplings": [{ "type": "auto", "omega": 0.6, "rate": 0.5 }, { "type": "auto", "omega": 1.7, "rate": 0.3 }],
        "scenario": "maxwell_bloch_uniform",
        "scenario_params": { "polarisation": [[0.1, 0.0, -0.2], [0.3, 0.1, 0.0], [-0.2, 0.2, 0.1]] },
        "integrator": { "dt": 1e-2, "t_end": 2.0, "output_stride": 10 },
        "initial": { "z": [0.2, -0.1, 0.3, 0.0, 0.0, 0.0] }
    });
    let iso = json!({
        "schema_version": 1, "dim": 2,
        "hamiltonian": { "real": [[0.0, 0.0], [0.0, 1.0]] },
        "beta": 1.3,
        "couplings": [{ "type": "auto", "omega": 1.0, "rate": 0.5, "direction": [0.2, -0.1] }],
        "scenario": "isothermal",
        "scenario_params": {
            "stiffness": [[1.5, 0.2], [0.2, 0.8]], "poisson": [[0.0, 0.7], [-0.7, 0.0]],
            "onsager": [[0.4, -0.1], [-0.1, 0.3]], "gamma": [{ "real": [[0.3, 0.0], [0.0, -0.2]] }]
        },
        "integrator": { "dt": 1e-2, "t_end": 2.0, "output_stride": 10 },
        "initial": { "z": [0.5, -0.4] }
    });
    let qs = json!({
        "schema_version": 1, "dim": 2,
        "hamiltonian": { "real": [[0.0, 0.0], [0.0, 1.0]] },
        "beta": 1.0,
        "couplings": [{ "type": "auto", "omega": 1.0 }],
        "scenario": "damped_qs",
        "integrator": { "dt": 1e-2, "t_end": 2.0 }
    });
    for (name, cfg) in [("dot", dot), ("mb", mb), ("iso", iso), ("qs", qs)] {
        let p = write(&dir, &format!("{name}.json"), &cfg);
        let out = dir.path().join(format!("{name}.csv"));
        let o = run(&["simulate", "--config", s(&p), "--out", s(&out)]);
        assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let (_, rows) = csv(&out);
        // Free energy is a Lyapunov function of every damped scenario.
        assert!(rows.windows(2).all(|w| w[1][6] <= w[0][6] + 1e-12), "{name}");
        let o = run(&["check", "nic", "--config", s(&p), "--trials", "4"]);
        assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stdout));
    }
}

#[test]
fn identities_suite_passes() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({
        "schema_version": 1, "dim": 4,
        "hamiltonian": { "real": [[0.0, 0.2, 0.0, 0.0], [0.2, 0.5, 0.1, 0.0], [0.0, 0.1, 1.1, 0.3], [0.0, 0.0, 0.3, 2.0]] },
        "beta": 0.8, "scenario": "lindblad", "seed": 7
    });
    let p = write(&dir, "id.json", &cfg);
    let o = run(&["check", "identities", "--config", s(&p), "--trials", "50", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["cases"].as_array().unwrap().len(), 50);
    assert!(r["max_residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn check_report_does_not_depend_on_thread_count() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "hb.json", &heat_bath_config());
    let runs: Vec<Vec<u8>> = ["1", "4"]
        .iter()
        .map(|t| {
            let o = bin().env("QGFLOW_THREADS", t).args(["check", "nic", "--config", s(&p), "--trials", "16"]).output().unwrap();
            assert_eq!(code(&o), 0);
            o.stdout
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn hamiltonian_only_generator_fails_detailed_balance() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({
        "schema_version": 1, "dim": 2,
        "hamiltonian": { "real": [[0.0, 0.5], [0.5, 1.0]] },
        "beta": 1.0, "scenario": "lindblad",
        "scenario_params": { "include_hamiltonian": true }
    });
    let p = write(&dir, "ham.json", &cfg);
    let o = run(&["check", "dbc", "--config", s(&p)]);
    assert_eq!(code(&o), 1);
    let r = report(&o);
    assert_eq!(r["pass"], false);
    assert!(r["failing"][0]["inputs"]["generator"]["real"].is_array());

    let o = run(&["decompose", "--config", s(&p), "--out", s(&dir.path().join("d.json"))]);
    assert_eq!(code(&o), 1);
    let r = report(&o);
    assert_eq!(r["status"], "not_detailed_balance");
}

#[test]
fn cp_and_dbc_pass_for_bloch_generator() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "bloch.json", &bloch_config(1.0, 1.0));
    for suite in ["dbc", "cp", "gradient"] {
        let o = run(&["check", suite, "--config", s(&p)]);
        assert_eq!(code(&o), 0, "{suite}");
    }
}

#[test]
fn decompose_bloch_generator_and_reingest() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "bloch.json", &bloch_config(1.0, 1.0));
    let out = dir.path().join("dec.json");
    let o = run(&["decompose", "--config", s(&p), "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    let summary = report(&o);
    assert_eq!(summary["blocks"], 2);
    assert!(summary["block_residual"].as_f64().unwrap() < 1e-8);
    let dec: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(dec["decomposition"]["blocks"].as_array().unwrap().len(), 2);
    assert!(dec["decomposition"]["tensor"]["Q"]["real"].is_array());
    let o = run(&["check", "gradient", "--config", s(&out), "--trials", "10"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    // The re-ingested blocks rebuild the same trajectory.
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert_eq!(code(&run(&["simulate", "--config", s(&p), "--out", s(&a)])), 0);
    assert_eq!(code(&run(&["simulate", "--config", s(&out), "--out", s(&b)])), 0);
    let ((_, ra), (_, rb)) = (csv(&a), csv(&b));
    let gap = ra.iter().zip(&rb).flat_map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).abs())).fold(0.0, f64::max);
    assert!(gap < 1e-10, "{gap}");
}

#[test]
fn decompose_random_dense_generator() {
    use qgflow::rng::SplitMix64;
    let mut rng = SplitMix64::new(5);
    let h = qgflow::rng::hermitian_with_spectrum::<f64>(&mut rng, &[-0.3, 0.4, 1.4]);
    let sd = qgflow::lindblad::spectral_decompose(&h, qgflow::lindblad::GROUP_TOL).unwrap();
    let mut parts = Vec::new();
    for w in [0.7, 1.0, 1.7] {
        let basis = qgflow::lindblad::eigenpair_basis(&sd, w).unwrap();
        parts.push(qgflow::lindblad::make_mq(0.9, &basis[0].scaled(rng.uniform_in(0.4, 1.2))));
    }
    let l = qgflow::lindblad::Superoperator::sum(3, parts).unwrap();
    let spec = |m: &qgflow::CMatrix| {
        let rows = |f: &dyn Fn(usize, usize) -> f64| -> Vec<Vec<f64>> {
            (0..m.rows()).map(|i| (0..m.cols()).map(|j| f(i, j)).collect()).collect()
        };
        json!({ "real": rows(&|i, j| m[(i, j)].re), "imag": rows(&|i, j| m[(i, j)].im) })
    };
    let cfg = json!({
        "schema_version": 1, "dim": 3, "hamiltonian": spec(&h), "beta": 0.9,
        "scenario": "lindblad", "generator": spec(&l.to_dense())
    });
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "dense.json", &cfg);
    let out = dir.path().join("dec.json");
    let o = run(&["decompose", "--config", s(&p), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&o);
    assert_eq!(r["blocks"], 3);
    assert!(r["block_residual"].as_f64().unwrap() < 1e-8);
    assert!(r["commutation_residual"].as_f64().unwrap() < 1e-8);
    assert_eq!(code(&run(&["check", "gradient", "--config", s(&out)])), 0);
}

#[test]
fn decompose_zero_generator_gives_no_blocks() {
    let dir = TempDir::new().unwrap();
    let cfg = json!({
        "schema_version": 1, "dim": 2,
        "hamiltonian": { "real": [[0.0, 0.0], [0.0, 1.0]] },
        "beta": 1.0, "scenario": "lindblad"
    });
    let p = write(&dir, "zero.json", &cfg);
    let out = dir.path().join("dec.json");
    let o = run(&["decompose", "--config", s(&p), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(report(&o)["blocks"], 0);
}
