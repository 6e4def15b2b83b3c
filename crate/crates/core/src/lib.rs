//! Exact finite-field toolkit for the generic subrank of tensors.

pub mod bounds;
pub mod certify;
pub mod decomp;
pub mod error;
pub mod field;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod subspace;
pub mod tensor;

pub use error::{Error, Result};
pub use field::{FieldSpec, DEFAULT_MODULUS};
pub use linalg::Matrix;
pub use subspace::TensorSubspace;
pub use tensor::Tensor;
