use crate::error::{Error, Result};
use crate::linalg::{hermitian_basis, hermitian_eigen, kron, psd_sqrt, ComplexMatrix};
use crate::lindblad::checks::choi_matrix;
use crate::lindblad::{
    dbc_check, make_mq, make_sw, make_tensor_lindblad, spectral_decompose, EigenpairQ, Superoperator,
    TensorLindblad, GROUP_TOL,
};
use crate::scalar::{cr, Real};
use crate::states::ThermalState;

/// A building block of a detailed-balance generator.
#[derive(Clone, Debug)]
pub enum Block<T: Real> {
    /// `S_W` with Hermitian `W` commuting with `H`.
    Dephasing { w: ComplexMatrix<T> },
    /// `M_{beta,Q}` for an eigen-operator pair with positive frequency.
    Exchange { beta: T, pair: EigenpairQ<T> },
}

impl<T: Real> Block<T> {
    pub fn omega(&self) -> T {
        match self {
            Block::Dephasing { .. } => T::zero(),
            Block::Exchange { pair, .. } => pair.omega,
        }
    }

    pub fn operator(&self) -> &ComplexMatrix<T> {
        match self {
            Block::Dephasing { w } => w,
            Block::Exchange { pair, .. } => &pair.q,
        }
    }

    pub fn generator(&self, h: &ComplexMatrix<T>) -> Result<Superoperator<T>> {
        match self {
            Block::Dephasing { w } => make_sw(w, h),
            Block::Exchange { beta, pair } => Ok(make_mq(*beta, pair)),
        }
    }
}

/// Result of [`decompose_dbc`].
#[derive(Clone, Debug)]
pub struct Decomposition<T: Real> {
    /// Blocks sorted by frequency, then by Hilbert-Schmidt norm.
    pub blocks: Vec<Block<T>>,
    /// Tensor representation with `sigma = rho_hat`.
    pub tensor: TensorLindblad<T>,
    /// Coefficients `M_{ij,mn}` in the eigenbasis of `H`, composite index `i*n + j`.
    pub coefficients: ComplexMatrix<T>,
    pub block_residual: T,
    pub tensor_residual: T,
    /// `||[Q, rho_hat (x) rho_hat]||_F`.
    pub commutation_residual: T,
}

impl<T: Real> Decomposition<T> {
    /// Sum of the block generators.
    pub fn block_generator(&self, h: &ComplexMatrix<T>) -> Result<Superoperator<T>> {
        let n = h.rows();
        let parts = self.blocks.iter().map(|b| b.generator(h)).collect::<Result<Vec<_>>>()?;
        Superoperator::sum(n, parts)
    }
}

/// Decomposes a generator satisfying the detailed balance condition into dephasing and
/// exchange blocks, and into a tensor representation whose coupling commutes with
/// `rho_hat (x) rho_hat`.
///
/// The coefficient matrix is read off from the Choi matrix projected onto the complement
/// of the maximally entangled vector, which selects traceless jump operators.
pub fn decompose_dbc<T: Real>(
    l: &Superoperator<T>,
    thermal: &ThermalState<T>,
    tol: T,
) -> Result<Decomposition<T>> {
    let n = thermal.dim();
    if l.dim() != n {
        return Err(Error::Shape(format!("generator on dimension {} for thermal state of {n}", l.dim())));
    }
    let beta = thermal.beta();
    let scale = l.norm().max(T::one());
    let report = dbc_check(l, thermal, tol * scale);
    if !report.pass {
        return Err(Error::Precondition(format!(
            "generator violates detailed balance (stationarity {:e}, symmetry {:e})",
            report.stationarity.as_f64(),
            report.symmetry.as_f64()
        )));
    }
    let h = thermal.hamiltonian();
    let sd = spectral_decompose(h, T::lit(GROUP_TOL))?;
    let u = sd.eigen.vectors.clone();
    let weights = thermal.weights();
    let nn = n * n;

    let dense = l.in_basis(&u);
    let choi = choi_matrix(&dense, n);
    let inv_n = T::one() / T::lit(n as f64);
    let proj = ComplexMatrix::from_fn(nn, nn, |r, s| {
        let id = if r == s { T::one() } else { T::zero() };
        let omega = if r % (n + 1) == 0 && s % (n + 1) == 0 { inv_n } else { T::zero() };
        cr(id - omega)
    });
    let mut m = proj.matmul(&choi).matmul(&proj).scale_re(T::lit(0.5)).hermitian_part();

    // Composite index (i, j) -> frequency class of eps_j - eps_i.
    let level: Vec<T> = (0..n).map(|k| sd.levels[sd.level_of(k)]).collect();
    let omega_of = |idx: usize| level[idx % n] - level[idx / n];
    let classes: Vec<usize> = (0..nn)
        .map(|idx| {
            let w = omega_of(idx);
            sd.frequencies
                .iter()
                .position(|f| (f.0 - w).abs() <= sd.tolerance())
                .expect("every level difference is a recorded frequency")
        })
        .collect();

    for r in 0..nn {
        for s in 0..nn {
            if classes[r] != classes[s] {
                m[(r, s)] = cr(T::zero());
            }
        }
    }
    let partner = |idx: usize| (idx % n) * n + idx / n;
    for r in 0..nn {
        for s in 0..nn {
            if classes[r] != classes[s] {
                continue;
            }
            let (pr, ps) = (partner(s), partner(r));
            if (pr, ps) <= (r, s) {
                continue;
            }
            let factor = (beta * omega_of(r)).exp();
            let avg = (m[(r, s)] + m[(pr, ps)] * factor) * T::lit(0.5);
            m[(r, s)] = avg;
            m[(pr, ps)] = avg / factor;
        }
    }

    let m_scale = m.norm().max(T::one());
    let floor = tol * m_scale;
    let cutoff = tol * T::lit(1e-3) * m_scale;
    let n_classes = sd.frequencies.len();
    let mut blocks = Vec::new();
    let mut q_inner = ComplexMatrix::zeros(nn, nn);

    for class in 0..n_classes {
        let idx: Vec<usize> = (0..nn).filter(|&r| classes[r] == class).collect();
        if idx.is_empty() {
            continue;
        }
        let w = sd.frequencies[class].0;
        let sub = ComplexMatrix::from_fn(idx.len(), idx.len(), |a, b| m[(idx[a], idx[b])]);
        let eig = hermitian_eigen(&sub, T::tol(1e-8))?;
        if eig.min() < -floor {
            return Err(Error::NotPositive { min_eigenvalue: eig.min().as_f64() });
        }

        if w > T::zero() {
            for (k, &lam) in eig.values.iter().enumerate() {
                if lam <= cutoff {
                    continue;
                }
                let mut x = ComplexMatrix::zeros(n, n);
                for (a, &r) in idx.iter().enumerate() {
                    x[(r / n, r % n)] = eig.vectors[(a, k)];
                }
                let q = u.matmul(&x).matmul(&u.adjoint());
                let amp = (lam * (-beta * w * T::lit(0.5)).exp()).sqrt();
                blocks.push(Block::Exchange { beta, pair: EigenpairQ { omega: w, q: q.scale_re(amp) } });
            }
        } else if w == T::zero() {
            blocks.extend(dephasing_blocks(&sub, &idx, n, &u, cutoff)?);
        }

        let tilde = ComplexMatrix::from_fn(idx.len(), idx.len(), |a, b| {
            sub[(a, b)] / (weights[idx[a] / n] * weights[idx[b] / n]).sqrt()
        });
        let root = psd_sqrt(&tilde, floor / weights.iter().copied().fold(T::one(), T::min), T::tol(1e-8))?;
        for (a, &r) in idx.iter().enumerate() {
            let (i, j) = (r / n, r % n);
            for (b, &s) in idx.iter().enumerate() {
                let (k, l2) = (s / n, s % n);
                let coef = root[(a, b)] * (weights[i] / weights[k]).sqrt();
                q_inner[(i * n + l2, j * n + k)] += coef;
            }
        }
    }

    blocks.sort_by(|a, b| {
        a.omega()
            .partial_cmp(&b.omega())
            .unwrap()
            .then(a.operator().norm().partial_cmp(&b.operator().norm()).unwrap())
    });

    let uu = kron(&u, &u);
    let q = uu.matmul(&q_inner).matmul(&uu.adjoint()).hermitian_part();
    let tensor = make_tensor_lindblad(&q, thermal.matrix(), n)?;

    let parts = blocks.iter().map(|b| b.generator(h)).collect::<Result<Vec<_>>>()?;
    let block_gen = Superoperator::sum(n, parts)?;
    let block_residual = block_gen.distance(l);
    let tensor_residual = tensor.kraus_generator().distance(l);
    let commutation_residual = tensor.commutation_residuals(thermal).0;
    let worst = block_residual.max(tensor_residual);
    if worst > T::lit(10.0) * tol * scale {
        return Err(Error::Representation {
            reason: "reconstructed generator differs from the input".into(),
            residual: worst.as_f64(),
        });
    }
    Ok(Decomposition {
        blocks,
        tensor,
        coefficients: m,
        block_residual,
        tensor_residual,
        commutation_residual,
    })
}

/// Zero-frequency coefficients rewritten over a Hermitian basis of the commutant; the
/// resulting real symmetric matrix yields Hermitian `W` for the dephasing blocks.
fn dephasing_blocks<T: Real>(
    sub: &ComplexMatrix<T>,
    idx: &[usize],
    n: usize,
    u: &ComplexMatrix<T>,
    cutoff: T,
) -> Result<Vec<Block<T>>> {
    let herm = hermitian_basis::<T>(n);
    let basis: Vec<ComplexMatrix<T>> = herm
        .into_iter()
        .filter(|f| {
            f.data()
                .iter()
                .enumerate()
                .all(|(r, z)| z.norm() == T::zero() || idx.contains(&r))
        })
        .collect();
    let coords = ComplexMatrix::from_fn(idx.len(), basis.len(), |a, b| basis[b].data()[idx[a]]);
    let g = coords.adjoint().matmul(sub).matmul(&coords);
    let g_real = ComplexMatrix::from_fn(g.rows(), g.cols(), |a, b| cr(g[(a, b)].re)).hermitian_part();
    let eig = hermitian_eigen(&g_real, T::tol(1e-8))?;
    let mut out = Vec::new();
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam <= cutoff {
            continue;
        }
        let mut x = ComplexMatrix::zeros(n, n);
        for (b, f) in basis.iter().enumerate() {
            x.axpy_re(eig.vectors[(b, k)].re, f);
        }
        let w = u.matmul(&x).matmul(&u.adjoint()).hermitian_part().scale_re(lam.sqrt());
        out.push(Block::Dephasing { w });
    }
    Ok(out)
}
