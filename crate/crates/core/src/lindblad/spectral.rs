use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, ComplexMatrix, HermitianEigen};
use crate::scalar::Real;

/// Default tolerance for grouping eigenvalues and Bohr frequencies.
pub const GROUP_TOL: f64 = 1e-9;

/// Spectral data of a Hamiltonian: distinct levels, projectors and Bohr frequencies.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T: Real> {
    pub eigen: HermitianEigen<T>,
    /// Distinct energies (cluster means), ascending.
    pub levels: Vec<T>,
    /// Eigenvector indices belonging to each level.
    pub clusters: Vec<Vec<usize>>,
    pub projectors: Vec<ComplexMatrix<T>>,
    /// Bohr frequencies `eps_m - eps_n` with the dimension of their eigen-operator space.
    pub frequencies: Vec<(T, usize)>,
    tol: T,
}

/// Groups the spectrum of `h` into levels within `group_tol` (relative to `max(1, |eps|_max)`).
pub fn spectral_decompose<T: Real>(h: &ComplexMatrix<T>, group_tol: T) -> Result<SpectralDecomposition<T>> {
    let eigen = hermitian_eigen(h, T::tol(1e-10))?;
    let scale = eigen.values.iter().fold(T::one(), |m, &x| m.max(x.abs()));
    let tol = group_tol * scale;
    let clusters = eigen.clusters(tol);
    let levels: Vec<T> = clusters
        .iter()
        .map(|cl| cl.iter().map(|&k| eigen.values[k]).sum::<T>() / T::lit(cl.len() as f64))
        .collect();
    let projectors = clusters
        .iter()
        .map(|cl| {
            let d: Vec<T> = (0..eigen.dim())
                .map(|k| if cl.contains(&k) { T::one() } else { T::zero() })
                .collect();
            eigen.with_values(&d)
        })
        .collect();
    let mut raw: Vec<(T, usize)> = Vec::new();
    for (n, cn) in clusters.iter().enumerate() {
        for (m, cm) in clusters.iter().enumerate() {
            raw.push((levels[m] - levels[n], cn.len() * cm.len()));
        }
    }
    raw.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut frequencies: Vec<(T, usize)> = Vec::new();
    for (w, d) in raw {
        match frequencies.last_mut() {
            Some(last) if (w - last.0).abs() <= tol => last.1 += d,
            _ => frequencies.push((w, d)),
        }
    }
    for f in &mut frequencies {
        if f.0.abs() <= tol {
            f.0 = T::zero();
        }
    }
    Ok(SpectralDecomposition { eigen, levels, clusters, projectors, frequencies, tol })
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigen.dim()
    }

    pub fn tolerance(&self) -> T {
        self.tol
    }

    /// Index of the level containing eigenvector `k`.
    pub fn level_of(&self, k: usize) -> usize {
        self.clusters.iter().position(|cl| cl.contains(&k)).expect("index in range")
    }

    /// Bohr frequencies only.
    pub fn omegas(&self) -> Vec<T> {
        self.frequencies.iter().map(|f| f.0).collect()
    }

    /// The recorded frequency matching `omega`, if any.
    pub fn find_frequency(&self, omega: T) -> Option<T> {
        self.frequencies.iter().map(|f| f.0).find(|&w| (w - omega).abs() <= self.tol)
    }
}

/// A pair `(omega, Q)` with `[Q, H] = omega Q`.
#[derive(Clone, Debug)]
pub struct EigenpairQ<T: Real> {
    pub omega: T,
    pub q: ComplexMatrix<T>,
}

/// Residual `||[Q,H] - omega Q||_F`.
pub fn eigenpair_residual<T: Real>(omega: T, q: &ComplexMatrix<T>, h: &ComplexMatrix<T>) -> T {
    (&q.commutator(h) - &q.scale_re(omega)).norm()
}

impl<T: Real> EigenpairQ<T> {
    /// Validates `||[Q,H] - omega Q|| <= 1e-10 ||Q|| max(1, ||H||)`.
    pub fn new(omega: T, q: ComplexMatrix<T>, h: &ComplexMatrix<T>) -> Result<Self> {
        if q.rows() != h.rows() || q.cols() != h.cols() {
            return Err(Error::Shape("eigen-operator and Hamiltonian differ in shape".into()));
        }
        let res = eigenpair_residual(omega, &q, h);
        let bound = T::tol(1e-10) * q.norm().max(T::min_positive_value()) * h.norm().max(T::one());
        if res > bound {
            return Err(Error::Precondition(format!(
                "[Q,H] = omega Q fails for omega = {omega} (residual {:e})",
                res.as_f64()
            )));
        }
        Ok(Self { omega, q })
    }

    /// The partner `(-omega, Q^*)`.
    pub fn adjoint(&self) -> Self {
        Self { omega: -self.omega, q: self.q.adjoint() }
    }

    pub fn scaled(&self, s: T) -> Self {
        Self { omega: self.omega, q: self.q.scale_re(s) }
    }
}

/// Basis `{P_n V P_m}` of the eigen-operator space for `omega`, built from eigenvector dyads.
pub fn eigenpair_basis<T: Real>(sd: &SpectralDecomposition<T>, omega: T) -> Result<Vec<EigenpairQ<T>>> {
    let w = sd.find_frequency(omega).ok_or_else(|| {
        Error::Precondition(format!("{omega} is not a Bohr frequency of the Hamiltonian"))
    })?;
    let mut out = Vec::new();
    for (n, cn) in sd.clusters.iter().enumerate() {
        for (m, cm) in sd.clusters.iter().enumerate() {
            if (sd.levels[m] - sd.levels[n] - w).abs() > sd.tol {
                continue;
            }
            for &a in cn {
                for &b in cm {
                    let q = ComplexMatrix::outer(&sd.eigen.vector(a), &sd.eigen.vector(b));
                    out.push(EigenpairQ { omega: w, q });
                }
            }
        }
    }
    Ok(out)
}
