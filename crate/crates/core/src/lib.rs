//! Computational tools for extended Gevrey classes `E_{τ,σ}`: weight
//! sequences, associated functions, test functions with their
//! ultradifferentiable norms, almost analytic extensions and boundary-value
//! pairings, and wave front detection from sampled data.

// negated comparisons reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod associated;
pub mod boundary;
pub mod cone;
pub mod error;
pub mod grid;
pub mod multiindex;
pub mod quadrature;
pub mod sequences;
pub mod testfun;
pub mod wavefront;

pub use error::{Error, Result};
pub use sequences::GevreyParams;
