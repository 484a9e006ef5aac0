//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use qgflow::linalg::{hermitian_eigen, ComplexMatrix};
use qgflow::lindblad::{spectral_decompose, EigenpairQ, GROUP_TOL};
use qgflow::rng::{hermitian_with_spectrum, random_matrix, SplitMix64};
use qgflow::CMatrix;

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Row-major Kronecker product written out with explicit loops.
pub fn kron_oracle(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (p, q) = (b.rows(), b.cols());
    let mut out = CMatrix::zeros(a.rows() * p, a.cols() * q);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            for k in 0..p {
                for l in 0..q {
                    out[(i * p + k, j * q + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Dense matrix of `sum_k r_k (2 L rho L^* - L^*L rho - rho L^*L)` on row-major vectorisations,
/// via `vec(A X B) = (A (x) B^T) vec(X)`.
pub fn dense_lindblad_oracle(n: usize, jumps: &[(f64, CMatrix)]) -> CMatrix {
    let id = CMatrix::identity(n);
    let mut out = CMatrix::zeros(n * n, n * n);
    for (rate, l) in jumps {
        let ld = l.adjoint();
        let ldl = ld.matmul(l);
        let term = &(&kron_oracle(l, &ld.transpose()).scale_re(2.0) - &kron_oracle(&ldl, &id))
            - &kron_oracle(&id, &ldl.transpose());
        out.axpy_re(*rate, &term);
    }
    out
}

/// Dense matrix of `rho -> i[rho, H]`.
pub fn dense_hamiltonian_oracle(h: &CMatrix) -> CMatrix {
    let n = h.rows();
    let id = CMatrix::identity(n);
    (&kron_oracle(&id, &h.transpose()) - &kron_oracle(h, &id)).scale(cx(0.0, 1.0))
}

/// Apply a dense superoperator to a matrix.
pub fn apply_dense(l: &CMatrix, a: &CMatrix) -> CMatrix {
    let n = a.rows();
    CMatrix::from_row_major(n, &l.matvec(&a.to_vec()))
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
    }
    out
}

/// `int_0^1 a^s X b^{1-s} ds` by Gauss-Legendre quadrature, for positive definite `a`, `b`.
pub fn kubo_mori_quadrature(a: &CMatrix, x: &CMatrix, b: &CMatrix, nodes: usize) -> CMatrix {
    let ea = hermitian_eigen(a, 1e-14).unwrap();
    let eb = hermitian_eigen(b, 1e-14).unwrap();
    let mut out = CMatrix::zeros(x.rows(), x.cols());
    for (s, w) in gauss_legendre(nodes) {
        let pa = ea.map(|v| v.powf(s));
        let pb = eb.map(|v| v.powf(1.0 - s));
        out.axpy_re(w, &pa.matmul(x).matmul(&pb));
    }
    out
}

/// Logarithmic mean from its integral form `int_0^1 a^s b^{1-s} ds` in closed form per branch,
/// evaluated with a long Gauss-Legendre rule.
pub fn log_mean_quadrature(a: f64, b: f64) -> f64 {
    gauss_legendre(60).iter().map(|&(s, w)| w * a.powf(s) * b.powf(1.0 - s)).sum()
}

/// Hamiltonian with a prescribed spectrum in a random basis.
pub fn hamiltonian(rng: &mut SplitMix64, eigs: &[f64]) -> CMatrix {
    hermitian_with_spectrum(rng, eigs)
}

/// Random spectrum with distinct, well separated levels.
pub fn simple_spectrum(rng: &mut SplitMix64, n: usize) -> Vec<f64> {
    let mut e = Vec::with_capacity(n);
    let mut x = rng.uniform_in(-1.0, 0.0);
    for _ in 0..n {
        e.push(x);
        x += rng.uniform_in(0.3, 1.2);
    }
    e
}

/// Random eigen-operator: a random combination of the dyads for one Bohr frequency.
pub fn random_eigenpair(rng: &mut SplitMix64, h: &CMatrix, positive: bool) -> EigenpairQ<f64> {
    let sd = spectral_decompose(h, GROUP_TOL).unwrap();
    let omegas: Vec<f64> = sd
        .omegas()
        .into_iter()
        .filter(|&w| if positive { w > 0.0 } else { true })
        .collect();
    let w = omegas[rng.int_in(0, omegas.len() - 1)];
    let basis = qgflow::lindblad::eigenpair_basis(&sd, w).unwrap();
    let mut q = CMatrix::zeros(h.rows(), h.cols());
    for p in &basis {
        q.axpy(rng.complex_normal(), &p.q);
    }
    let nrm = q.norm();
    EigenpairQ::new(w, q.scale_re(1.0 / nrm), h).unwrap()
}

/// Hermitian `W` commuting with `h`: a random Hermitian matrix block-diagonalised by the
/// spectral projectors.
pub fn random_commuting_hermitian(rng: &mut SplitMix64, h: &CMatrix) -> CMatrix {
    let sd = spectral_decompose(h, GROUP_TOL).unwrap();
    let g = random_matrix::<f64>(rng, h.rows(), h.rows()).hermitian_part();
    let mut w = CMatrix::zeros(h.rows(), h.rows());
    for p in &sd.projectors {
        w = &w + &p.matmul(&g).matmul(p);
    }
    w.hermitian_part()
}

/// Central finite difference of a scalar function along a parameter.
pub fn derivative(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).max_abs()
}

pub fn unit(n: usize, i: usize, j: usize) -> CMatrix {
    ComplexMatrix::unit(n, i, j)
}

/// Random detailed-balance generator from `blocks` building blocks: exchange blocks on positive
/// Bohr frequencies and dephasing blocks from commuting Hermitian operators.
pub fn random_dbc_generator(
    rng: &mut SplitMix64,
    h: &CMatrix,
    beta: f64,
    blocks: usize,
) -> qgflow::Generator {
    use qgflow::lindblad::{make_mq, make_sw, Superoperator};
    let sd = spectral_decompose(h, GROUP_TOL).unwrap();
    let has_positive = sd.omegas().iter().any(|&w| w > 0.0);
    let mut parts = Vec::new();
    for _ in 0..blocks {
        if has_positive && rng.uniform() < 0.7 {
            let pair = random_eigenpair(rng, h, true);
            let scale = rng.uniform_in(0.3, 1.5);
            parts.push(make_mq(beta, &pair.scaled(scale)));
        } else {
            let w = random_commuting_hermitian(rng, h);
            parts.push(make_sw(&w, h).unwrap());
        }
    }
    Superoperator::sum(h.rows(), parts).unwrap()
}

/// Hamiltonian with a random simple spectrum in a random basis.
pub fn random_simple_h(rng: &mut SplitMix64, n: usize) -> CMatrix {
    let eigs = simple_spectrum(rng, n);
    hermitian_with_spectrum(rng, &eigs)
}
