//! Lindblad generators satisfying detailed balance: building blocks, tensor forms and checks.

mod blocks;
mod checks;
mod decompose;
pub mod examples;
mod spectral;
mod superop;
mod tensor;

pub use blocks::{exchange_generator, make_general_lindblad, make_mq, make_sw};
pub use checks::{choi_matrix, cp_check, dbc_check, CpReport, DbcReport};
pub use decompose::{decompose_dbc, Block, Decomposition};
pub use spectral::{
    eigenpair_basis, eigenpair_residual, spectral_decompose, EigenpairQ, SpectralDecomposition,
    GROUP_TOL,
};
pub use superop::{JumpTerm, Superoperator};
pub use tensor::{dephasing_tensor, exchange_tensor, make_tensor_lindblad, y_sigma, TensorLindblad};
