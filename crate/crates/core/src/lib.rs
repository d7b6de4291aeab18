//! Nonlinear energy-stable boundary conditions for skew-symmetric initial
//! boundary value problems, discretized with summation-by-parts operators and
//! weak (SAT) or strong boundary imposition.
//!
//! The crate is generic over the scalar type. Operator construction only
//! needs [`Scalar`] and therefore also runs in exact rational arithmetic; the
//! flow solvers need [`Real`]. Concrete `f64` aliases are exported below.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod boundary;
pub mod config;
pub mod diagnostics;
pub mod equations;
pub mod error;
pub mod exact;
pub mod linalg;
pub mod sbp;
pub mod scalar;
pub mod scenario;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};

pub type Grid64 = sbp::Grid<f64>;
pub type SbpOperator1D64 = sbp::SbpOperator1D<f64>;
pub type SbpOperatorSet64 = sbp::SbpOperatorSet<f64>;
pub type SbpOperatorSet32 = sbp::SbpOperatorSet<f32>;
pub type SbpOperatorSetExact = sbp::SbpOperatorSet<num_rational::BigRational>;
pub type Matrix64 = linalg::Matrix<f64>;
pub type EquationSpec64 = equations::EquationSpec<f64>;
pub type EquationSpec32 = equations::EquationSpec<f32>;
pub type BoundaryRotation64 = equations::BoundaryRotation<f64>;
pub type BoundarySpec64 = boundary::BoundarySpec<f64>;
pub type StateField64 = solver::StateField<f64>;
pub type SemiDiscreteSystem64 = solver::SemiDiscreteSystem<f64>;
pub type SemiDiscreteSystem32 = solver::SemiDiscreteSystem<f32>;
pub type EnergyReport64 = diagnostics::EnergyReport<f64>;
