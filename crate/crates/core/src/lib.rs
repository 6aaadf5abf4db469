//! Realizability of prescribed first and second correlation functions by
//! point processes on finite domains.
//!
//! A domain is a finite set of sites with occupancy caps, optional hard-core
//! exclusion and optional bounds on the total particle count. A pair
//! `(rho1, rho2)` is realizable when some probability distribution over
//! admissible configurations has density `rho1` and factorial pair
//! correlation `rho2`. [`check_realizability`] decides this with a linear
//! program and returns either a witness distribution or a quadratic
//! certificate that is nonnegative on every configuration but pairs
//! negatively with the correlations.
//!
//! Everything is generic over [`Scalar`]: `f32`, `f64` or exact
//! [`Rational`]. The aliases below fix the common choices.

pub mod conditions;
pub mod enumeration;
pub mod error;
pub mod generators;
pub mod lp;
pub mod matrix;
pub mod model;
pub mod oracle;
pub mod scalar;
pub mod solver;
pub mod stationary;

pub use conditions::{
    check_gap, check_mean_bounds, check_upper, check_variance, mean_and_variance, run_battery, ConditionKind,
    ConditionReport, ConditionVerdict, TestFamily, TestFunction,
};
pub use enumeration::{enumerate_configurations, enumerate_configurations_with_limit, range_of, RangeSet};
pub use error::{Error, Result};
pub use generators::{bernoulli_product, hardcore_gibbs, truncated_poisson_product, two_atom_family, GeneratorSpec};
pub use lp::{ArithmeticMode, PivotRule, SolverOptions};
pub use matrix::Matrix;
pub use model::{
    correlations_of, eval_quadratic, factorial_power2, h3, h_moment, is_admissible, pairing, Configuration,
    CorrelationPair, Distribution, Domain, DomainBuilder, QuadraticPolynomial, RealizationResult,
};
pub use scalar::{Rational, Scalar};
pub use solver::{check_realizability, minimal_third_moment, verify_certificate, RestrictedCubic, ThirdMomentResult};
pub use stationary::{
    check_realizability_stationary, is_stationary, reduce_pair_correlation, symmetrize, translation_group, FiniteGroup,
    ReducedPairCorrelation,
};

pub type Correlations = CorrelationPair<f64>;
pub type ExactCorrelations = CorrelationPair<Rational>;
pub type Polynomial = QuadraticPolynomial<f64>;
pub type ExactPolynomial = QuadraticPolynomial<Rational>;
pub type Dist = Distribution<f64>;
pub type ExactDistribution = Distribution<Rational>;
pub type Realization = RealizationResult<f64>;
pub type ExactRealization = RealizationResult<Rational>;
