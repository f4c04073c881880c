//! Subgradient methods and continuous-time subgradient flows for robust
//! low-rank recovery: robust PCA, robust phase retrieval, robust matrix
//! sensing, and the rank-one symmetric robust PCA landscape.

// `!(a < b)` is used on purpose so that NaN fails parameter checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod flow;
pub mod format;
pub mod landscape;
pub mod linalg;
pub mod model;
pub mod objectives;
pub mod optimizer;
pub mod rng;

pub use error::{Error, Result};
