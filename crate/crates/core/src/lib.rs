//! Arbitrary-precision numerics for Müntz systems `{x^λn}` in weighted
//! `L²_w(A)` spaces, where `A` is a finite union of intervals in `[0, ∞)`.
//!
//! Everything is generic over [`Real`]; the concrete aliases at the bottom of
//! this file fix the scalar to [`MpFloat`] (MPFR, runtime precision) or `f64`.

pub mod decimal;
pub mod domain;
pub mod duals;
pub mod error;
pub mod exponents;
pub mod gram;
pub mod linalg;
pub mod momentsolve;
pub mod mpfloat;
pub mod operator;
pub mod scalar;
pub mod series;

pub use decimal::Decimal;
pub use domain::{DomainSpec, Interval, IntervalSpec, WeightPiece, WeightSpec, WeightedDomain};
pub use duals::{
    distance, distance_sweep, dual_family, lower_bound_certificate, oracle_distance, DistanceReport,
    DualFamily, LowerBoundCertificate,
};
pub use error::{MuntzError, Result};
pub use exponents::{ExponentSequence, ExponentSpec, Summability};
pub use gram::{gram, GramMatrix, GramOptions};
pub use linalg::Matrix;
pub use momentsolve::{fit_growth, solve_moments, GrowthFit, MomentData, MomentSolution};
pub use mpfloat::MpFloat;
pub use operator::{
    apply, eigen_check, finite_sections, hereditary_check, hereditary_sweep, EigenReport,
    HereditarySummary, MixedSystemReport, OperatorKind, OperatorSpec, Partition, PartitionSampling,
};
pub use scalar::{Real, DEFAULT_PRECISION_BITS};
pub use series::{
    christoffel_remez, coefficient_convergence, evaluate, project, project_in, remez_sweep,
    removal_test, CoefficientTable, MuntzSeries, Projection, RemezSweep, TargetFunction,
};

/// Traits needed to call scalar methods on concrete types.
pub mod prelude {
    pub use crate::scalar::Real;
    pub use num_traits::{One, Signed, Zero};
}

pub type MpDomain = WeightedDomain<MpFloat>;
pub type MpExponents = ExponentSequence<MpFloat>;
pub type MpGram = GramMatrix<MpFloat>;
pub type MpDualFamily = DualFamily<MpFloat>;
pub type MpSeries = MuntzSeries<MpFloat>;

pub type F64Domain = WeightedDomain<f64>;
pub type F64Exponents = ExponentSequence<f64>;
pub type F64Gram = GramMatrix<f64>;
pub type F64DualFamily = DualFamily<f64>;
pub type F64Series = MuntzSeries<f64>;
