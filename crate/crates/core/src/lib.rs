//! Intrinsic fractional Sobolev semi-norms on ℝⁿ and bounded domains,
//! their explicit constants, and numerical studies of the limits σ → 0⁺
//! and σ → 1⁻.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod domains;
pub mod funcspace;
pub mod limits;
pub mod error;
pub mod quad;
pub mod seminorms;
pub mod specfun;
pub mod spectral;
pub mod suite;

pub use domains::Domain;
pub use error::{Error, Result};
pub use quad::{Estimate, QuadMethod, QuadSpec};

/// Library version, recorded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
