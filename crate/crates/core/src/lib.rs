//! Regularized least-squares approximation in redundant frames.
//!
//! The pipeline is: pick a truncated frame ([`frames::FrameSpec`]), a set of
//! sampling functionals ([`sampling::SamplingScheme`]), assemble the sampled
//! system ([`gram::build_system`]) and solve it by truncated SVD
//! ([`solver::truncated_svd_solve`]). The stability of that procedure is
//! quantified by [`diagnostics`].

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately rejects NaN

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod frames;
pub mod gram;
pub mod orthopoly;
pub mod sampling;
pub mod solver;

pub use error::{FrameError, Result};
pub use frames::{CoefficientVector, FrameSpec, RealFunction, TargetFunction};
pub use gram::{build_gram_factor, build_system, GramFactor, GramSystem};
pub use sampling::{DataVector, NodeKind, SamplingScheme, SchemeFamily, Weighting};
pub use solver::{approximate, truncated_svd_solve, Approximant, RegularizedSolution};
