//! Weighted quaternionic Cauchy transform on the slice-averaged Gaussian space,
//! its Ito-Hermite basis, polyregular Bergman projections and spectral data.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod bergman;
pub mod cauchy;
pub mod dd;
pub mod error;
pub mod gauss;
pub mod measure;
pub mod quaternion;
pub mod report;
pub mod specfun;
pub mod spectral;

pub use basis::{BasisFunctionKind, BasisIndex};
pub use bergman::{SliceExpansion, TruncationSpec};
pub use cauchy::KernelEvaluation;
pub use error::{Error, Result};
pub use measure::QuadratureSpec;
pub use quaternion::{ImaginaryUnit, Polar, Quaternion, SlicePoint};
pub use report::VerificationReport;
pub use spectral::{OperatorMatrix, SpectralReport};
