use crate::error::Result;
use crate::generic::{CoupledState, GenericStructure, PoissonStructure};
use crate::linalg::{hermitian_basis, hermitian_eigen, RealMatrix};
use crate::rng::{random_hermitian, SplitMix64};
use crate::scalar::Real;

/// Non-interaction residuals `||J DS||` and `||K DE||` at one state.
#[derive(Clone, Debug, PartialEq)]
pub struct NicReport<T> {
    pub poisson_entropy: T,
    pub onsager_energy: T,
    pub pass: bool,
}

pub fn nic_check<T: Real, S: GenericStructure<T> + ?Sized>(
    sys: &S,
    q: &CoupledState<T>,
    tol: T,
) -> Result<NicReport<T>> {
    let poisson_entropy = sys.poisson(q, &sys.entropy_grad(q)?)?.norm();
    let onsager_energy = sys.onsager(q, &sys.energy_grad(q)?)?.norm();
    Ok(NicReport { poisson_entropy, onsager_energy, pass: poisson_entropy <= tol && onsager_energy <= tol })
}

/// The two halves `||J DE||` and `||K DS||` of the GENERIC vector field.
pub fn field_parts<T: Real, S: GenericStructure<T> + ?Sized>(sys: &S, q: &CoupledState<T>) -> Result<(T, T)> {
    Ok((sys.poisson(q, &sys.energy_grad(q)?)?.norm(), sys.onsager(q, &sys.entropy_grad(q)?)?.norm()))
}

/// Random cotangent vector: unit-norm Hermitian part and standard normal macroscopic part.
pub fn random_cotangent<T: Real>(rng: &mut SplitMix64, n: usize, dz: usize) -> CoupledState<T> {
    let rho = random_hermitian(rng, n);
    let z = (0..dz).map(|_| T::lit(rng.normal())).collect();
    CoupledState::new(rho, z)
}

/// Orthonormal basis of the real state space `Herm(C^n) x R^dz`.
pub fn state_basis<T: Real>(n: usize, dz: usize) -> Vec<CoupledState<T>> {
    let mut out: Vec<_> = hermitian_basis(n).into_iter().map(|b| CoupledState::new(b, vec![T::zero(); dz])).collect();
    for a in 0..dz {
        let mut s = CoupledState::zeros(n, dz);
        s.z[a] = T::one();
        out.push(s);
    }
    out
}

/// Gradient of `q -> <g, J(q) h>` expanded in [`state_basis`].
fn bracket_gradient<T: Real, S: PoissonStructure<T> + ?Sized>(
    sys: &S,
    q: &CoupledState<T>,
    basis: &[CoupledState<T>],
    g: &CoupledState<T>,
    h: &CoupledState<T>,
) -> Result<CoupledState<T>> {
    let mut out = CoupledState::zeros(sys.dim(), sys.dim_z());
    for e in basis {
        let d = g.pair(&sys.poisson_derivative(q, e, h)?);
        out.axpy(d, e);
    }
    Ok(out)
}

/// Largest cyclic sum `{F,{G,H}} + {G,{H,F}} + {H,{F,G}}` over `trials` random triples of
/// linear functionals, with `{F,G}(q) = <DF, J(q) DG>`.
pub fn jacobi_check<T: Real, S: PoissonStructure<T> + ?Sized>(
    sys: &S,
    q: &CoupledState<T>,
    rng: &mut SplitMix64,
    trials: usize,
) -> Result<T> {
    let (n, dz) = (sys.dim(), sys.dim_z());
    let basis = state_basis::<T>(n, dz);
    let mut worst = T::zero();
    for _ in 0..trials {
        let f: CoupledState<T> = random_cotangent(rng, n, dz);
        let g = random_cotangent(rng, n, dz);
        let h = random_cotangent(rng, n, dz);
        let mut total = T::zero();
        for (a, b, c) in [(&f, &g, &h), (&g, &h, &f), (&h, &f, &g)] {
            let inner = bracket_gradient(sys, q, &basis, b, c)?;
            total += a.pair(&sys.poisson(q, &inner)?);
        }
        worst = worst.max(total.abs());
    }
    Ok(worst)
}

/// Largest `|<a, J b> + <b, J a>|` over random pairs.
pub fn poisson_antisymmetry<T: Real, S: PoissonStructure<T> + ?Sized>(
    sys: &S,
    q: &CoupledState<T>,
    rng: &mut SplitMix64,
    trials: usize,
) -> Result<T> {
    let (n, dz) = (sys.dim(), sys.dim_z());
    let mut worst = T::zero();
    for _ in 0..trials {
        let a = random_cotangent(rng, n, dz);
        let b = random_cotangent(rng, n, dz);
        let r = a.pair(&sys.poisson(q, &b)?) + b.pair(&sys.poisson(q, &a)?);
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// Largest `|<a, K b> - <b, K a>|` and smallest `<a, K a>` over random pairs for an
/// Onsager-type map.
pub fn onsager_symmetry<T: Real>(
    onsager: impl Fn(&CoupledState<T>) -> Result<CoupledState<T>>,
    n: usize,
    dz: usize,
    rng: &mut SplitMix64,
    trials: usize,
) -> Result<(T, T)> {
    let mut asym = T::zero();
    let mut min_quad = T::infinity();
    for _ in 0..trials {
        let a = random_cotangent(rng, n, dz);
        let b = random_cotangent(rng, n, dz);
        let ka = onsager(&a)?;
        asym = asym.max((a.pair(&onsager(&b)?) - b.pair(&ka)).abs());
        min_quad = min_quad.min(a.pair(&ka));
    }
    Ok((asym, min_quad))
}

/// Antisymmetry of `J_ma`, and asymmetry and smallest eigenvalue of `K_ma`.
pub fn macro_structure<T: Real>(j: &RealMatrix<T>, k: &RealMatrix<T>) -> Result<(T, T, T)> {
    let min = if k.rows() == 0 {
        T::zero()
    } else {
        hermitian_eigen(&k.to_complex().hermitian_part(), T::tol(1e-14))?.min()
    };
    Ok((j.symmetry(), k.asymmetry(), min))
}
