// Negated comparisons are deliberate: they reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bundled;
pub mod error;
pub mod harness;
pub mod herglotz;
pub mod linalg;
pub mod measures;
pub mod model_space;
pub mod quadrature;
pub mod random;
pub mod rank_n;
pub mod rank_one;
pub mod report;
pub mod scenario;

pub use error::{Error, Result};
