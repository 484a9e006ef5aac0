//! Deterministic pseudo-random numbers and random test instances.
//!
//! The generator is SplitMix64: the state advances by `0x9E3779B97F4A7C15`
//! and each output is mixed by
//! `z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9; z = (z ^ (z >> 27)) * 0x94D049BB133111EB; z ^ (z >> 31)`.
//! Uniform doubles take the top 53 bits; normals use the Box-Muller transform,
//! so a seed reproduces the same stream in any language.

use crate::linalg::{hermitian_eigen, ComplexMatrix};
use crate::scalar::{c, Real, C};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Independent stream for trial `k` derived from a base seed.
    pub fn for_trial(seed: u64, k: u64) -> Self {
        let mut base = Self::new(seed ^ k.wrapping_mul(GOLDEN).rotate_left(17));
        Self::new(base.next_u64())
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int_in(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as usize
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    pub fn complex_normal<T: Real>(&mut self) -> C<T> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        c(T::lit(s * self.normal()), T::lit(s * self.normal()))
    }
}

/// Matrix with independent standard complex Gaussian entries.
pub fn random_matrix<T: Real>(rng: &mut SplitMix64, rows: usize, cols: usize) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(rows, cols, |_, _| rng.complex_normal())
}

/// Random Hermitian matrix with unit Frobenius norm.
pub fn random_hermitian<T: Real>(rng: &mut SplitMix64, n: usize) -> ComplexMatrix<T> {
    let g = random_matrix::<T>(rng, n, n).hermitian_part();
    let nrm = g.norm();
    g.scale_re(T::one() / nrm)
}

/// Haar-like random unitary from Gram-Schmidt on a Gaussian matrix.
pub fn random_unitary<T: Real>(rng: &mut SplitMix64, n: usize) -> ComplexMatrix<T> {
    let g = random_matrix::<T>(rng, n, n);
    let mut cols: Vec<Vec<C<T>>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for u in &cols {
            let p = u.iter().zip(&v).fold(c(T::zero(), T::zero()), |a, (x, y)| a + x.conj() * y);
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= p * ui;
            }
        }
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        for vi in &mut v {
            *vi /= nrm;
        }
        cols.push(v);
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// `U diag(eigs) U^*` with a random unitary `U`.
pub fn hermitian_with_spectrum<T: Real>(rng: &mut SplitMix64, eigs: &[T]) -> ComplexMatrix<T> {
    let u = random_unitary::<T>(rng, eigs.len());
    u.matmul(&ComplexMatrix::from_real_diagonal(eigs)).matmul(&u.adjoint())
}

/// Random full-rank density matrix with smallest eigenvalue at least `floor / n`.
pub fn random_density<T: Real>(rng: &mut SplitMix64, n: usize, floor: f64) -> ComplexMatrix<T> {
    let g = random_matrix::<T>(rng, n, n);
    let w = g.matmul(&g.adjoint()).hermitian_part();
    let tr = w.trace().re;
    let mix = T::lit(floor);
    let mut rho = w.scale_re((T::one() - mix) / tr);
    for i in 0..n {
        rho[(i, i)] += c(mix / T::lit(n as f64), T::zero());
    }
    rho.hermitian_part()
}

/// Random density matrix whose spectrum spans several orders of magnitude.
pub fn random_density_spread<T: Real>(rng: &mut SplitMix64, n: usize, decades: f64) -> ComplexMatrix<T> {
    let raw: Vec<f64> = (0..n).map(|_| 10f64.powf(-decades * rng.uniform())).collect();
    let s: f64 = raw.iter().sum();
    let eigs: Vec<T> = raw.iter().map(|x| T::lit(x / s)).collect();
    hermitian_with_spectrum(rng, &eigs).hermitian_part()
}

/// Random Hamiltonian with integer-valued spectrum drawn from `0..levels`,
/// which produces degenerate levels and repeated Bohr frequencies.
pub fn random_degenerate_hamiltonian<T: Real>(
    rng: &mut SplitMix64,
    n: usize,
    levels: usize,
) -> ComplexMatrix<T> {
    let eigs: Vec<T> = (0..n).map(|_| T::lit(rng.int_in(0, levels - 1) as f64 * 0.5)).collect();
    hermitian_with_spectrum(rng, &eigs)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue<T: Real>(a: &ComplexMatrix<T>) -> T {
    hermitian_eigen(&a.hermitian_part(), T::tol(1e-9)).map(|e| e.min()).unwrap_or_else(|_| T::nan())
}
