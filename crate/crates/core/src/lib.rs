//! Numerical verification of a refined Hardy inequality.
//!
//! The classical Hardy inequality bounds `∫ H(x)^p dx` by
//! `(p/(p-1))^p ∫ f^p` for the running average `H(x) = (1/x)∫_0^x f`.
//! Superquadratic functions sharpen Jensen's inequality, and feeding that
//! sharpening through the Hardy machinery subtracts an explicit nonnegative
//! correction from the right-hand side. This crate verifies the whole chain
//! numerically:
//!
//! * [`quadrature`] — adaptive integration on `(0, ∞)`, the running
//!   average, and the nested correction term;
//! * [`funcdsl`] — the expression language behind `--f`;
//! * [`superquad`] — grid-based superquadraticity certificates and the
//!   sharpened discrete Jensen inequality;
//! * [`hardy`] — scalar inequality reports with tolerance-audited verdicts;
//! * [`operator`] — finite-dimensional Hermitian realizations of the
//!   operator inequalities (quadratic-form Jensen bounds, the operator
//!   Hardy refinement, the Loewner-order averaging bound for 1 < p ≤ 2,
//!   and the external Jensen bound).
//!
//! All numerical kernels are generic over the scalar type through
//! [`scalar::Real`] (f32 or f64); the aliases below fix the `f64`
//! instantiations that the CLI and the verification suites use.

pub mod funcdsl;
pub mod hardy;
pub mod operator;
pub mod quadrature;
pub mod scalar;
pub mod superquad;

pub use funcdsl::ScalarFn;
pub use scalar::Real;

/// `f64` instantiations of the core types.
pub type QuadConfig64 = quadrature::QuadConfig<f64>;
pub type QuadResult64 = quadrature::QuadResult<f64>;
pub type RunningAverage64 = quadrature::RunningAverage<f64>;
pub type HardyReport64 = hardy::HardyReport<f64>;
pub type SuperquadWitness64 = superquad::SuperquadWitness<f64>;
pub type DiscreteMeasure64 = superquad::DiscreteMeasure<f64>;
pub type HermitianMatrix64 = operator::HermitianMatrix<f64>;
pub type MatrixField64 = operator::MatrixField<f64>;
pub type UnitVector64 = operator::UnitVector<f64>;
pub type AveragingMap64 = operator::AveragingMap<f64>;
