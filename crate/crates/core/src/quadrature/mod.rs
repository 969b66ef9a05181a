//! Adaptive numerical integration on `(0, ∞)` and the nested Hardy terms.
//!
//! The engine is Gauss–Kronrod 7/15 with worst-first interval refinement.
//! Improper integrals are mapped to a finite interval first, either through
//! the rational substitution `t = u/(1-u)` or by truncating to `[ε, T]` and
//! integrating in log space. Panels are always reduced in ascending-domain
//! order with compensated summation, so identical inputs give bit-identical
//! results regardless of evaluation scheduling.

mod adaptive;
mod average;
mod hardy_terms;
mod kronrod;

pub use average::{running_average, RunningAverage};
pub use hardy_terms::{correction_term, correction_term_weighted, hardy_lhs, hardy_lhs_weighted};

pub(crate) use adaptive::{adaptive_interval, adaptive_seeded, geometric_edges};
pub(crate) use average::PrefixCache;
pub(crate) use kronrod::nodes15;

use serde::Serialize;

use crate::funcdsl::{DomainError, ScalarFn};
use crate::scalar::Real;

/// How an integral over `(0, ∞)` is reduced to a finite interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform<T> {
    /// `t = u/(1-u)`, mapping `(0, 1) → (0, ∞)`. The default; no decay
    /// assumption beyond integrability.
    Rational,
    /// Truncate to `t ∈ [lower, upper]` and integrate in log space. Meant
    /// for integrands with known exponential tails.
    LogTruncate { lower: T, upper: T },
}

/// Tolerances and budget for one integral evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_panels: usize,
    pub transform: Transform<T>,
}

impl<T: Real> Default for QuadConfig<T> {
    fn default() -> Self {
        QuadConfig {
            rel_tol: T::lit(1e-10),
            abs_tol: T::lit(1e-14),
            max_panels: 4096,
            transform: Transform::Rational,
        }
    }
}

impl<T: Real> QuadConfig<T> {
    /// Checks the invariants a hand-built config must satisfy.
    pub fn validate(&self) -> Result<(), String> {
        if !(self.rel_tol > T::zero()) {
            return Err("rel_tol must be > 0".into());
        }
        if !(self.abs_tol > T::zero()) {
            return Err("abs_tol must be > 0".into());
        }
        if self.max_panels < 1 {
            return Err("max_panels must be at least 1".into());
        }
        if let Transform::LogTruncate { lower, upper } = self.transform {
            if !(T::zero() < lower && lower < upper) {
                return Err("log-truncate requires 0 < lower < upper".into());
            }
        }
        Ok(())
    }

    /// Tolerances tightened by 10x for integrals nested inside this one,
    /// so the outer error estimate stays honest.
    pub(crate) fn nested(&self) -> (T, T) {
        let ten = T::lit(10.0);
        (self.rel_tol / ten, self.abs_tol / ten)
    }
}

/// Value and error estimate for one integral evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult<T> {
    pub value: T,
    pub err_estimate: T,
    pub panels_used: usize,
    pub converged: bool,
}

/// Integration failure.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    /// The integrand produced NaN or ±∞ at a quadrature node.
    #[error("integrand returned a non-finite value at t = {point}")]
    NonFiniteSample { point: f64 },
    /// The integrand itself reported a domain violation.
    #[error(transparent)]
    Eval(#[from] DomainError),
    /// Sign-change isolation for an inner-integral kink failed even after
    /// refining the scan; the integrand is oscillating below resolution.
    #[error("could not isolate integrand sign changes near t = {near} (inner integral at x = {x})")]
    KinkNotBracketed { near: f64, x: f64 },
    /// The integrand failed for a reason beyond a scalar domain violation
    /// (matrix-valued integrands report eigensolver trouble this way).
    #[error("integrand evaluation failed: {0}")]
    IntegrandFailure(String),
}

/// Integrates `f` over `(0, ∞)` under the configured transform.
///
/// A budget overrun is not an error: the result comes back with
/// `converged = false` and the error estimate reached so far.
pub fn integrate_halfline<T: Real>(
    f: &ScalarFn,
    cfg: &QuadConfig<T>,
) -> Result<QuadResult<T>, QuadError> {
    integrate_halfline_with(|t| Ok(f.eval(t)?), cfg)
}

/// Same as [`integrate_halfline`] but over an arbitrary integrand closure.
pub fn integrate_halfline_with<T, F>(f: F, cfg: &QuadConfig<T>) -> Result<QuadResult<T>, QuadError>
where
    T: Real,
    F: Fn(T) -> Result<T, QuadError>,
{
    integrate_halfline_decay(f, None, cfg)
}

/// Half-line integration with a declared tail decay: the integrand behaves
/// like `x^(-alpha)` (alpha > 1) as `x → ∞`.
///
/// Under the rational transform a power tail turns into an endpoint
/// singularity `(1-u)^(alpha-2)` that floating-point subdivision cannot
/// resolve past the ulp spacing at `u = 1`. With the decay declared, the
/// tail `[1, ∞)` is instead mapped by `x = y^(-1/(alpha-1))`, which makes
/// the transformed integrand bounded at `y = 0`.
pub(crate) fn integrate_halfline_decay<T, F>(
    f: F,
    tail_decay: Option<T>,
    cfg: &QuadConfig<T>,
) -> Result<QuadResult<T>, QuadError>
where
    T: Real,
    F: Fn(T) -> Result<T, QuadError>,
{
    let one = T::one();
    match cfg.transform {
        Transform::Rational => {
            let alpha = match tail_decay {
                Some(a) if a > one => a,
                _ => {
                    let g = |u: T| {
                        let w = one - u;
                        let t = u / w;
                        if !t.is_finite() {
                            return Err(QuadError::NonFiniteSample { point: u.as_f64() });
                        }
                        Ok(f(t)? / (w * w))
                    };
                    return adaptive_interval(
                        &g,
                        T::zero(),
                        one,
                        cfg.rel_tol,
                        cfg.abs_tol,
                        cfg.max_panels,
                    );
                }
            };
            let head = adaptive_interval(
                &|x: T| f(x),
                T::zero(),
                one,
                cfg.rel_tol,
                cfg.abs_tol,
                cfg.max_panels,
            )?;
            let gamma = one / (alpha - one);
            let tail_g = |y: T| {
                let x = y.powf(-gamma);
                if !x.is_finite() {
                    return Err(QuadError::NonFiniteSample { point: y.as_f64() });
                }
                Ok(f(x)? * gamma * y.powf(-gamma - one))
            };
            let tail = adaptive_interval(
                &tail_g,
                T::zero(),
                one,
                cfg.rel_tol,
                cfg.abs_tol,
                cfg.max_panels.saturating_sub(head.panels_used).max(8),
            )?;
            let value = head.value + tail.value;
            let err_estimate = head.err_estimate + tail.err_estimate;
            Ok(QuadResult {
                value,
                err_estimate,
                panels_used: head.panels_used + tail.panels_used,
                converged: err_estimate <= cfg.abs_tol.max(cfg.rel_tol * value.abs()),
            })
        }
        Transform::LogTruncate { lower, upper } => {
            let g = |s: T| {
                let t = s.exp();
                Ok(f(t)? * t)
            };
            adaptive_interval(
                &g,
                lower.ln(),
                upper.ln(),
                cfg.rel_tol,
                cfg.abs_tol,
                cfg.max_panels,
            )
        }
    }
}

/// Integrates `f` over the finite interval `[a, b]` with the config's
/// tolerances (no transform applied).
pub fn integrate_interval<T, F>(
    f: F,
    a: T,
    b: T,
    cfg: &QuadConfig<T>,
) -> Result<QuadResult<T>, QuadError>
where
    T: Real,
    F: Fn(T) -> Result<T, QuadError>,
{
    adaptive_interval(&f, a, b, cfg.rel_tol, cfg.abs_tol, cfg.max_panels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcdsl::Builtin;

    fn default_cfg() -> QuadConfig<f64> {
        QuadConfig::default()
    }

    #[test]
    fn inverse_square_integrates_to_one() {
        // ∫ 1/(x+1)^2 dx over (0,∞) = 1
        let f = ScalarFn::parse("1/((t+1)^2)").unwrap();
        let r = integrate_halfline(&f, &default_cfg()).unwrap();
        assert!(r.converged);
        assert!((r.value - 1.0).abs() <= 1e-9, "value {}", r.value);
        assert!((r.value - 1.0).abs() <= r.err_estimate + 1e-12);
    }

    #[test]
    fn zero_function_is_exact() {
        let f = ScalarFn::zero();
        let r = integrate_halfline(&f, &default_cfg()).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn exponential_decay_integrates_to_one() {
        // oracle: closed-form antiderivative -e^{-x}
        let f = ScalarFn::builtin(Builtin::ExpDecay);
        let r = integrate_halfline(&f, &default_cfg()).unwrap();
        assert!(r.converged);
        assert!((r.value - 1.0).abs() <= 1e-9, "value {}", r.value);
    }

    #[test]
    fn log_truncate_agrees_with_rational() {
        let f = ScalarFn::builtin(Builtin::ExpDecay);
        let rational = integrate_halfline(&f, &default_cfg()).unwrap();
        let cfg = QuadConfig {
            transform: Transform::LogTruncate {
                lower: 1e-12,
                upper: 60.0,
            },
            ..default_cfg()
        };
        let truncated = integrate_halfline(&f, &cfg).unwrap();
        let budget = rational.err_estimate + truncated.err_estimate + 2e-12;
        assert!((rational.value - truncated.value).abs() <= budget);
    }

    #[test]
    fn non_finite_sample_is_reported() {
        let r = integrate_halfline_with::<f64, _>(
            |t| {
                if t > 1.0 {
                    Ok(f64::NAN)
                } else {
                    Ok(t)
                }
            },
            &default_cfg(),
        );
        assert!(matches!(r, Err(QuadError::NonFiniteSample { .. })));
    }

    #[test]
    fn budget_exhaustion_reports_unconverged() {
        let f = ScalarFn::parse("1/((t+1)^2)").unwrap();
        let cfg = QuadConfig {
            max_panels: 2,
            rel_tol: 1e-15,
            abs_tol: 1e-16,
            ..default_cfg()
        };
        let r = integrate_halfline(&f, &cfg).unwrap();
        assert!(!r.converged);
        assert!(r.panels_used <= 2);
    }

    #[test]
    fn determinism_bitwise() {
        let f = ScalarFn::parse("exp(-t)*t^2").unwrap();
        let a = integrate_halfline(&f, &default_cfg()).unwrap();
        let b = integrate_halfline(&f, &default_cfg()).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.err_estimate.to_bits(), b.err_estimate.to_bits());
        assert_eq!(a.panels_used, b.panels_used);
    }

    #[test]
    fn config_validation() {
        let mut cfg = default_cfg();
        assert!(cfg.validate().is_ok());
        cfg.rel_tol = 0.0;
        assert!(cfg.validate().is_err());
        let bad = QuadConfig {
            transform: Transform::LogTruncate {
                lower: 2.0,
                upper: 1.0,
            },
            ..default_cfg()
        };
        assert!(bad.validate().is_err());
    }
}
