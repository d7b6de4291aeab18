//! Diagonal-norm summation-by-parts operators on lines and rectangles.

mod coefficients;
mod operator;
mod set;

pub use operator::{build_sbp_1d, minimum_nodes, SbpOperator1D};
pub use set::{build_operator_set, Axis, Face, FaceId, Grid, SbpOperatorSet};
