//! Numerical laboratory for two-candidate electoral competition on the policy
//! space `[0, 1]` when the median voter's ideal policy is uncertain.
//!
//! Candidates care about the enacted policy. Under commitment they choose
//! platforms strategically ([`solver::extremal_equilibria`]); without commitment
//! each simply runs on their ideal policy. [`analysis`] compares the two regimes
//! through the expected policy `pi = P*x_l + (1-P)*x_r` evaluated at equilibrium.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`). The aliases
//! re-exported at the crate root fix the scalar to `f64`, which is what the
//! command-line front end and the test suites use.

// `!(a < b)` is used deliberately so that NaN inputs fail validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod assumptions;
pub mod beliefs;
pub mod contest;
mod error;
pub mod format;
pub mod preferences;
mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use analysis::{Regime, VaryIdeal};
pub use contest::Side;
pub use solver::Selection;

pub type MedianBelief = beliefs::MedianBelief<f64>;
pub type NumericDensity = beliefs::NumericDensity<f64>;
pub type UtilitySpec = preferences::UtilitySpec<f64>;
pub type UtilityReport = preferences::UtilityReport<f64>;
pub type PlatformProfile = contest::PlatformProfile<f64>;
pub type IdealPair = contest::IdealPair<f64>;
pub type ElectionModel = contest::ElectionModel<f64>;
pub type BestResponseOptions = solver::BestResponseOptions<f64>;
pub type EquilibriumOptions = solver::EquilibriumOptions<f64>;
pub type BestResponseSet = solver::BestResponseSet<f64>;
pub type EquilibriumReport = solver::EquilibriumReport<f64>;

pub type CertificateReport = assumptions::CertificateReport<f64>;
pub type SweepRow = analysis::SweepRow<f64>;
pub type CounterexampleRow = analysis::CounterexampleRow<f64>;
pub type RegimeCheck = analysis::RegimeCheck<f64>;
pub type RegimeComparison = analysis::RegimeComparison<f64>;
