//! Scalar inequality reports: the classical Hardy inequality, its refined
//! form with the superquadratic correction, the weighted `dx/x` form, and
//! the difference counterpart for 1 < p ≤ 2.
//!
//! Every report carries the raw correction integral together with the
//! signed coefficient it enters with:
//!
//! ```text
//! refined_rhs = classical_rhs + correction_coefficient * correction
//! ```
//!
//! * classical:               coefficient 0 (correction zeroed)
//! * refined (p ≥ 2):         coefficient -(p/(p-1))^(p-2)
//! * weighted form (p ≥ 2):   coefficient -1
//! * counterpart (1 < p ≤ 2): coefficient +(p/(p-1))^(p-1)
//!
//! The counterpart coefficient carries exponent p-1: the substitution chain
//! behind the flipped inequality balances exactly at p = 2 (where both
//! `t^2` and `-t^2` satisfy the superquadratic bound with equality), and
//! only this exponent reproduces that balance.

use serde::Serialize;

use crate::funcdsl::{Builtin, ScalarFn};
use crate::quadrature::{
    correction_term, correction_term_weighted, hardy_lhs, hardy_lhs_weighted,
    integrate_halfline_decay, QuadConfig, QuadError, QuadResult,
};
use crate::scalar::Real;

/// Three-way outcome: a margin inside the error budget is never reported
/// as a violation, so quadrature error cannot manufacture counterexamples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Holds,
    HoldsWithinError,
    Violated,
}

impl Verdict {
    pub fn from_margin<T: Real>(margin: T, budget: T) -> Self {
        if margin > budget {
            Verdict::Holds
        } else if margin >= -budget {
            Verdict::HoldsWithinError
        } else {
            Verdict::Violated
        }
    }

    pub fn is_violation(self) -> bool {
        self == Verdict::Violated
    }
}

/// Which inequality a report audits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReportForm {
    Classical,
    Refined,
    LemmaWeighted,
    DifferenceCounterpart,
    OperatorRefined,
}

/// Per-integral diagnostics attached to a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportDiagnostics<T> {
    pub lhs_quad: QuadResult<T>,
    pub rhs_quad: QuadResult<T>,
    pub correction_quad: Option<QuadResult<T>>,
    /// Magnitude of the largest negative eigenvalue clipped to zero during
    /// operator evaluations; zero for scalar reports.
    pub psd_clip: T,
    /// Grid-coarsening delta for sampled operator fields (discretization
    /// audit); zero when the field is evaluated analytically.
    pub richardson_delta: T,
}

/// One audited inequality instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardyReport<T> {
    pub form: ReportForm,
    pub function: String,
    pub p: T,
    pub lhs: T,
    pub classical_rhs: T,
    pub correction: T,
    pub correction_coefficient: T,
    pub refined_rhs: T,
    pub classical_margin: T,
    pub refined_margin: T,
    pub err_budget: T,
    pub verdict: Verdict,
    pub diagnostics: ReportDiagnostics<T>,
}

impl<T: Real + Serialize> HardyReport<T> {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        form: ReportForm,
        function: String,
        p: T,
        lhs_quad: QuadResult<T>,
        rhs_scale: T,
        rhs_quad: QuadResult<T>,
        correction_coefficient: T,
        correction_quad: Option<QuadResult<T>>,
        extra_budget: T,
    ) -> Self {
        let lhs = lhs_quad.value;
        let classical_rhs = rhs_scale * rhs_quad.value;
        let correction = correction_quad.map_or(T::zero(), |q| q.value);
        let refined_rhs = classical_rhs + correction_coefficient * correction;
        let classical_margin = classical_rhs - lhs;
        let refined_margin = refined_rhs - lhs;
        let err_budget = lhs_quad.err_estimate
            + rhs_scale * rhs_quad.err_estimate
            + correction_coefficient.abs()
                * correction_quad.map_or(T::zero(), |q| q.err_estimate)
            + extra_budget;
        let verdict = Verdict::from_margin(refined_margin, err_budget);
        HardyReport {
            form,
            function,
            p,
            lhs,
            classical_rhs,
            correction,
            correction_coefficient,
            refined_rhs,
            classical_margin,
            refined_margin,
            err_budget,
            verdict,
            diagnostics: ReportDiagnostics {
                lhs_quad,
                rhs_quad,
                correction_quad,
                psd_clip: T::zero(),
                richardson_delta: T::zero(),
            },
        }
    }
}

/// `(p/(p-1))^p ∫ f^p`, the classical right-hand side pieces.
fn f_power_integral<T: Real>(
    f: &ScalarFn,
    p: T,
    cfg: &QuadConfig<T>,
) -> Result<QuadResult<T>, QuadError> {
    // p-integrable corpus functions decay at least like 1/t
    integrate_halfline_decay(|t| Ok(f.eval(t)?.powf(p)), Some(p), cfg)
}

pub fn hardy_constant<T: Real>(p: T) -> T {
    (p / (p - T::one())).powf(p)
}

/// Classical Hardy check: `∫ H^p ≤ (p/(p-1))^p ∫ f^p`.
pub fn classical_check<T: Real + Serialize>(
    f: &ScalarFn,
    p: T,
    cfg: &QuadConfig<T>,
) -> Result<HardyReport<T>, QuadError> {
    assert!(p > T::one(), "classical Hardy requires p > 1");
    let lhs_quad = hardy_lhs(f, p, cfg)?;
    let fp_quad = f_power_integral(f, p, cfg)?;
    Ok(HardyReport::assemble(
        ReportForm::Classical,
        f.to_string(),
        p,
        lhs_quad,
        hardy_constant(p),
        fp_quad,
        T::zero(),
        None,
        T::zero(),
    ))
}

/// Refined check for p ≥ 2:
/// `∫ H^p ≤ (p/(p-1))^p ∫ f^p - (p/(p-1))^(p-2) * correction`.
pub fn refined_check<T: Real + Serialize>(
    f: &ScalarFn,
    p: T,
    cfg: &QuadConfig<T>,
) -> Result<HardyReport<T>, QuadError> {
    assert!(p >= T::lit(2.0), "refined check requires p >= 2");
    let lhs_quad = hardy_lhs(f, p, cfg)?;
    let fp_quad = f_power_integral(f, p, cfg)?;
    let corr_quad = correction_term(f, p, cfg)?;
    let coef = -(p / (p - T::one())).powf(p - T::lit(2.0));
    Ok(HardyReport::assemble(
        ReportForm::Refined,
        f.to_string(),
        p,
        lhs_quad,
        hardy_constant(p),
        fp_quad,
        coef,
        Some(corr_quad),
        T::zero(),
    ))
}

/// Weighted form for p ≥ 2:
/// `∫ H_g^p dx/x ≤ ∫ g^p dt/t - ∫ (1/x)∫_0^x |g - H_g(x)|^p dt dx/x`.
pub fn lemma_weighted_check<T: Real + Serialize>(
    g: &ScalarFn,
    p: T,
    cfg: &QuadConfig<T>,
) -> Result<HardyReport<T>, QuadError> {
    assert!(p >= T::lit(2.0), "weighted form requires p >= 2");
    let lhs_quad = hardy_lhs_weighted(g, p, cfg)?;
    let rhs_quad = integrate_halfline_decay(|t| Ok(g.eval(t)?.powf(p) / t), Some(p + T::one()), cfg)?;
    let corr_quad = correction_term_weighted(g, p, cfg)?;
    Ok(HardyReport::assemble(
        ReportForm::LemmaWeighted,
        g.to_string(),
        p,
        lhs_quad,
        T::one(),
        rhs_quad,
        -T::one(),
        Some(corr_quad),
        T::zero(),
    ))
}

/// Difference counterpart for 1 < p ≤ 2:
/// `(p/(p-1))^p ∫ f^p ≤ ∫ H^p + (p/(p-1))^(p-1) * correction`.
///
/// Report roles are swapped accordingly: `lhs` holds the scaled `∫ f^p`
/// and `classical_rhs` holds `∫ H^p`.
pub fn difference_counterpart_check<T: Real + Serialize>(
    f: &ScalarFn,
    p: T,
    cfg: &QuadConfig<T>,
) -> Result<HardyReport<T>, QuadError> {
    assert!(
        p > T::one() && p <= T::lit(2.0),
        "difference counterpart requires 1 < p <= 2"
    );
    let fp_quad = f_power_integral(f, p, cfg)?;
    let scale = hardy_constant(p);
    let lhs_quad = QuadResult {
        value: scale * fp_quad.value,
        err_estimate: scale * fp_quad.err_estimate,
        panels_used: fp_quad.panels_used,
        converged: fp_quad.converged,
    };
    let h_quad = hardy_lhs(f, p, cfg)?;
    let corr_quad = correction_term(f, p, cfg)?;
    let coef = (p / (p - T::one())).powf(p - T::one());
    Ok(HardyReport::assemble(
        ReportForm::DifferenceCounterpart,
        f.to_string(),
        p,
        lhs_quad,
        T::one(),
        h_quad,
        coef,
        Some(corr_quad),
        T::zero(),
    ))
}

/// The verification corpus: nonnegative p-integrable functions with
/// verified tail decay under the default transform.
pub fn refinement_corpus() -> Vec<ScalarFn> {
    vec![
        ScalarFn::builtin(Builtin::InverseShift),
        ScalarFn::builtin(Builtin::ExpDecay),
        ScalarFn::builtin(Builtin::RampExpDecay),
        ScalarFn::builtin(Builtin::OddRational),
        ScalarFn::builtin(Builtin::Lorentzian),
    ]
}
