//! Numerics for the annealed ferromagnetic q-state Potts model on rank-1
//! inhomogeneous random graphs.
//!
//! The model assigns each vertex a positive weight drawn from a law `W`;
//! edges appear independently with probability `w_i w_j / (l_n + w_i w_j)`.
//! Averaging the partition function over the graph turns the model into an
//! inhomogeneous mean-field system whose entire phase structure is driven
//! by one scalar function of the weight law, here called the landscape.
//!
//! * [`weights`]: the vertex-weight laws, their moments, and the
//!   expectation engine behind every integral in the crate.
//! * [`landscape`]: the fixed-point landscape, its derivatives, inflection
//!   and tangent analysis, reduced pressure, and the criticality function.
//! * [`critical`]: critical temperatures (Newton at zero field, equal-area
//!   root in a field), the Pareto smoothing exponent, and regime
//!   classification.
//! * [`variational`]: the reduced and full variational problems for the
//!   pressure, plus temperature sweeps with jump detection.
//! * [`oracle`]: exact finite-n partition functions by enumeration,
//!   validating the thermodynamic-limit formulas at desk scale.
//!
//! All numerics are generic over the scalar type through [`real::Real`];
//! the aliases below fix `f64`, which every advertised tolerance assumes.

pub mod critical;
pub mod error;
pub mod landscape;
pub mod oracle;
pub mod quad;
pub mod real;
pub mod roots;
pub mod variational;
pub mod weights;

pub use error::{Error, Result};
pub use real::Real;

/// Double-precision weight law.
pub type Dist64 = weights::WeightDistribution<f64>;
/// Double-precision model parameters `(q, B, W)`.
pub type Potts64 = landscape::PottsConfig<f64>;
/// Double-precision critical point.
pub type Critical64 = critical::CriticalPoint<f64>;
/// Double-precision phase report.
pub type Phase64 = critical::PhaseReport<f64>;
/// Double-precision exact finite-n instance.
pub type Oracle64 = oracle::OracleInstance<f64>;
