//! Gradient-flow structure of quantum Markov semigroups with detailed balance.
//!
//! The crate builds Lindblad generators that satisfy a detailed balance condition
//! with respect to a thermal state, verifies them, writes them as gradient flows of
//! the relative entropy through Kubo-Mori type Onsager operators, and couples them to
//! macroscopic variables in thermodynamically consistent (GENERIC) form.
//!
//! All numerics are generic over the real scalar ([`Real`], implemented for `f32` and
//! `f64`); the aliases at the crate root fix `f64`, which the stated tolerances assume.

// Comparisons are written as `!(x > 0)` so that NaN is rejected along with the invalid range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod generic;
pub mod integrator;
pub mod kubo_mori;
pub mod linalg;
pub mod lindblad;
pub mod markov;
pub mod onsager;
pub mod rng;
pub mod scalar;
pub mod states;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub type CMatrix = linalg::ComplexMatrix<f64>;
pub type RMatrix = linalg::RealMatrix<f64>;
pub type Density = states::DensityMatrix<f64>;
pub type Thermal = states::ThermalState<f64>;
pub type Generator = lindblad::Superoperator<f64>;
pub type Eigenpair = lindblad::EigenpairQ<f64>;
pub type Tensor = lindblad::TensorLindblad<f64>;
pub type KuboMori = kubo_mori::KuboMoriOp<f64>;
pub type Chain = markov::MarkovChain<f64>;
