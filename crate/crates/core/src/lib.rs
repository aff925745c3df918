//! Closed-form beam-coverage synthesis for half-wavelength uniform linear
//! arrays.
//!
//! The far-field designs shape a truncated sinc amplitude profile whose
//! spatial spectrum is a flat window over the target angles; the near-field
//! design does the same over a linearized (angle, inverse-range) domain. The
//! crate also ships the analytical roll-off and range-defocusing models,
//! optimization and codebook baselines, a dense-grid worst-case evaluator and
//! the `beamcov` command-line front end.

// `!(x > 0.0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod beam;
pub mod cli;
pub mod composite;
pub mod error;
pub mod evaluator;
pub mod ff_design;
pub mod geometry;
pub mod io;
pub mod nf_design;
pub mod quadrature;
pub mod special;
pub mod steering;

pub use beam::{BeamWeights, Scheme, WeightShape};
pub use error::{Error, Result};
pub use ff_design::AngularRegion;
pub use geometry::{build_array, ArrayConfig};
pub use nf_design::RangeRegion;
pub use steering::{SpatialPoint, TaylorCoefficients};
