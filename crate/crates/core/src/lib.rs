//! Elliptic R-matrix of `A_{q,p}(gl_N)`, its trigonometric limits, identity
//! checks and the quantum determinant in the fundamental evaluation representation.

pub mod error;
pub mod perm;
pub mod properties;
pub mod qdet;
pub mod rmatrix;
pub mod special;
pub mod tensor;

pub use error::{Error, Result};
pub use properties::{PropertyReport, Sampler, SuiteConfig};
pub use qdet::QdetResult;
pub use rmatrix::{build_r, ModelParams, RKind};
pub use special::{LogComplex, TruncationPolicy};
pub use tensor::{antisymmetrizer, permutation_op, SpectralReport, TensorOperator};
