//! Classical reversible Markov chains: the commutative special case used as a reference.

use crate::error::{Error, Result};
use crate::kubo_mori::log_mean;
use crate::linalg::{expm, RealMatrix};
use crate::lindblad::{dbc_check, spectral_decompose, Superoperator, GROUP_TOL};
use crate::scalar::Real;
use crate::states::ThermalState;

/// Chain `p' = L p` with `L_nm >= 0` (rate from `m` to `n`) for `n != m` and zero column sums,
/// reversible with respect to `w_eq`.
#[derive(Clone, Debug)]
pub struct MarkovChain<T: Real> {
    rates: RealMatrix<T>,
    w_eq: Vec<T>,
}

impl<T: Real> MarkovChain<T> {
    pub fn new(rates: RealMatrix<T>, w_eq: Vec<T>) -> Result<Self> {
        let n = rates.rows();
        if rates.cols() != n || w_eq.len() != n {
            return Err(Error::Shape(format!("{}x{} rates for {} weights", n, rates.cols(), w_eq.len())));
        }
        let tol = T::tol(1e-10) * rates.norm().max(T::one());
        for m in 0..n {
            let col: T = (0..n).map(|k| rates[(k, m)]).sum();
            if col.abs() > tol {
                return Err(Error::Precondition(format!("column {m} sums to {col}, not zero")));
            }
            for k in 0..n {
                if k != m && rates[(k, m)] < -tol {
                    return Err(Error::Precondition(format!("negative rate {} from {m} to {k}", rates[(k, m)])));
                }
            }
        }
        if w_eq.iter().any(|&w| w <= T::zero()) {
            return Err(Error::Precondition("equilibrium weights must be positive".into()));
        }
        let total: T = w_eq.iter().copied().sum();
        if (total - T::one()).abs() > T::tol(1e-10) {
            return Err(Error::Precondition(format!("equilibrium weights sum to {total}")));
        }
        for a in 0..n {
            for b in 0..n {
                let gap = (rates[(a, b)] * w_eq[b] - rates[(b, a)] * w_eq[a]).abs();
                if gap > tol {
                    return Err(Error::Precondition(format!(
                        "detailed balance fails between states {a} and {b} (gap {:e})",
                        gap.as_f64()
                    )));
                }
            }
        }
        Ok(Self { rates, w_eq })
    }

    pub fn dim(&self) -> usize {
        self.w_eq.len()
    }

    pub fn rates(&self) -> &RealMatrix<T> {
        &self.rates
    }

    pub fn equilibrium(&self) -> &[T] {
        &self.w_eq
    }

    /// Edge weight `kappa_nm = L_nm w_m` (symmetric).
    pub fn kappa(&self, n: usize, m: usize) -> T {
        self.rates[(n, m)] * self.w_eq[m]
    }

    pub fn apply(&self, p: &[T]) -> Vec<T> {
        self.rates.matvec(p)
    }

    /// `K(p) = sum_{n<m} kappa_nm L(p_n/w_n, p_m/w_m) (e_n - e_m)(e_n - e_m)^T`.
    pub fn onsager(&self, p: &[T]) -> RealMatrix<T> {
        let n = self.dim();
        let mut k = RealMatrix::zeros(n, n);
        for a in 0..n {
            for b in (a + 1)..n {
                let kappa = self.kappa(a, b);
                if kappa == T::zero() {
                    continue;
                }
                let s = kappa * log_mean(p[a] / self.w_eq[a], p[b] / self.w_eq[b]);
                k[(a, a)] += s;
                k[(b, b)] += s;
                k[(a, b)] -= s;
                k[(b, a)] -= s;
            }
        }
        k
    }

    /// `sum_n p_n log(p_n / w_n)`, evaluated as `sum_n (p_n log(p_n / w_n) - p_n + w_n)`.
    /// The extra terms cancel for normalised `p` but remove the first-order mass error,
    /// which otherwise swamps the value near equilibrium.
    pub fn relative_entropy(&self, p: &[T]) -> T {
        p.iter()
            .zip(&self.w_eq)
            .map(|(&x, &w)| if x > T::zero() { x * (x / w).ln() - x + w } else { w })
            .sum()
    }

    /// Exact solution `exp(t L) p0`.
    pub fn propagate(&self, p0: &[T], t: T) -> Result<Vec<T>> {
        let e = expm(&self.rates.scale(t).to_complex())?;
        let p: Vec<num_complex::Complex<T>> = p0.iter().map(|&x| num_complex::Complex::new(x, T::zero())).collect();
        Ok(e.matvec(&p).iter().map(|z| z.re).collect())
    }
}

/// `||L p + K(p) log(p / w)||`, the classical gradient-flow residual.
pub fn markov_gradient_residual<T: Real>(chain: &MarkovChain<T>, p: &[T]) -> T {
    let lp = chain.apply(p);
    let mu: Vec<T> = p.iter().zip(chain.equilibrium()).map(|(&x, &w)| (x / w).ln()).collect();
    let kmu = chain.onsager(p).matvec(&mu);
    lp.iter().zip(&kmu).map(|(&a, &b)| (a + b) * (a + b)).sum::<T>().sqrt()
}

/// Restriction of a detailed-balance generator to the diagonal of the eigenbasis of `H`.
///
/// Requires a non-degenerate Hamiltonian; the rates are `L_nm = <h_n| L(|h_m><h_m|) |h_n>`.
pub fn davies_diagonal_oracle<T: Real>(
    l: &Superoperator<T>,
    thermal: &ThermalState<T>,
    tol: T,
) -> Result<MarkovChain<T>> {
    let sd = spectral_decompose(thermal.hamiltonian(), T::lit(GROUP_TOL))?;
    if sd.clusters.iter().any(|c| c.len() > 1) {
        return Err(Error::Precondition("Hamiltonian spectrum is degenerate".into()));
    }
    let report = dbc_check(l, thermal, tol * l.norm().max(T::one()));
    if !report.pass {
        return Err(Error::Precondition(format!(
            "generator violates detailed balance (stationarity {:e}, symmetry {:e})",
            report.stationarity.as_f64(),
            report.symmetry.as_f64()
        )));
    }
    let n = thermal.dim();
    let dense = l.in_basis(&sd.eigen.vectors);
    let rates = RealMatrix::from_fn(n, n, |a, b| dense[(a * n + a, b * n + b)].re);
    MarkovChain::new(rates, thermal.weights().to_vec())
}
