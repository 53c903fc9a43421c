//! Gradient-based multi-objective optimization built around the smooth
//! Tchebycheff scalarization.
//!
//! * [`scalarize`] holds the domain types and the linear, Tchebycheff and
//!   smooth Tchebycheff scalarizations with their (sub)gradients.
//! * [`problems`] ships the synthetic F1–F6 suite, five engineering design
//!   problems and a 1-D convex toy, all with analytic Jacobians.
//! * [`solvers`] runs single-preference projected (sub)gradient descent and
//!   an MGDA baseline.
//! * [`psl`] trains a preference-conditioned MLP that maps preferences to
//!   solutions (Pareto set learning).
//! * [`metrics`] provides non-dominated filtering, exact 2-D/3-D hypervolume,
//!   a Monte Carlo oracle and the hypervolume-difference pipeline.

// `!(x > 0.0)` rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod metrics;
pub mod problems;
pub mod psl;
pub mod scalarize;
pub mod solvers;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use scalarize::{
    IdealPoint, Normalization, ObjectiveVector, Preference, ScalarizationKind,
    ScalarizationResult, ScalarizationSpec,
};
