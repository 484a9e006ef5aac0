//! Dense complex linear algebra on small Hermitian problems.

mod eigen;
mod expm;
mod matrix;
mod real;
mod tensor;

pub use eigen::{
    hermitian_eigen, matrix_exp_hermitian, matrix_function, matrix_log, matrix_power, psd_sqrt,
    HermitianEigen,
};
pub use expm::{expm, solve};
pub use matrix::{hermitian_basis, ComplexMatrix};
pub use real::{dot, RealMatrix};
pub use tensor::{factor_block, kron, partial_trace_2, partial_transpose_sigma};
