//! Quadratic-form Jensen bounds for superquadratic functions: the single
//! operator inequality, its averaged (unital positive linear map) form, and
//! the external two-operator bound.

use nalgebra::{DVector, RealField};
use num_complex::Complex;

use super::{fabs, spectral_form, AveragingMap, HermitianMatrix, MatrixField, OperatorError,
    UnitVector};
use crate::funcdsl::ScalarFn;
use crate::scalar::Real;

/// Both quadratic-form sides of an operator Jensen inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorJensenGap<T> {
    /// `f(⟨·η, η⟩)` side.
    pub lhs: T,
    /// Expectation side minus the averaged deviation term.
    pub rhs: T,
    /// `rhs - lhs`; nonnegative for superquadratic f up to roundoff.
    pub gap: T,
}

/// Single-operator bound:
/// `f(⟨Aη,η⟩) ≤ ⟨f(A)η,η⟩ - ⟨f(|A - ⟨Aη,η⟩·I|)η,η⟩`.
pub fn theorem_a_gap<T: Real + RealField>(
    a: &HermitianMatrix<T>,
    eta: &UnitVector<T>,
    f: &ScalarFn,
) -> Result<OperatorJensenGap<T>, OperatorError> {
    if a.dim() != eta.dim() {
        return Err(OperatorError::DimensionMismatch(format!(
            "matrix dim {} vs vector dim {}",
            a.dim(),
            eta.dim()
        )));
    }
    let mean = a.quadratic_form(eta.as_vector());
    let lhs = f.eval(mean)?;
    let expectation = spectral_form(a, eta.as_vector(), |lambda| Ok(f.eval(lambda)?))?;
    let shifted = a.add_scalar(-mean);
    let deviation = spectral_form(&shifted, eta.as_vector(), |lambda| {
        Ok(f.eval(fabs(lambda))?)
    })?;
    let rhs = expectation - deviation;
    Ok(OperatorJensenGap {
        lhs,
        rhs,
        gap: rhs - lhs,
    })
}

/// Averaged bound for the unital positive map `Φ = Σ w_i ⟨·⟩_i`:
/// `f(⟨Φ(A)η,η⟩) ≤ ⟨Φ(f(A))η,η⟩ - ⟨Φ(f(|A - ⟨Φ(A)η,η⟩·I|))η,η⟩`
/// realized over the field samples. With a single sample and unit weight
/// this reduces bit for bit to [`theorem_a_gap`].
pub fn theorem_b_gap<T: Real + RealField>(
    field: &MatrixField<T>,
    phi: &AveragingMap<T>,
    eta: &UnitVector<T>,
    f: &ScalarFn,
) -> Result<OperatorJensenGap<T>, OperatorError> {
    let samples = field.samples();
    if phi.len() != samples.len() {
        return Err(OperatorError::DimensionMismatch(format!(
            "{} weights for {} samples",
            phi.len(),
            samples.len()
        )));
    }
    if field.dim() != eta.dim() {
        return Err(OperatorError::DimensionMismatch(format!(
            "field dim {} vs vector dim {}",
            field.dim(),
            eta.dim()
        )));
    }
    let averaged = phi.average(samples)?;
    let mean = averaged.quadratic_form(eta.as_vector());
    let lhs = f.eval(mean)?;

    let mut expect_terms = Vec::with_capacity(samples.len());
    let mut dev_terms = Vec::with_capacity(samples.len());
    for sample in samples {
        expect_terms.push(spectral_form(sample, eta.as_vector(), |lambda| {
            Ok(f.eval(lambda)?)
        })?);
        let shifted = sample.add_scalar(-mean);
        dev_terms.push(spectral_form(&shifted, eta.as_vector(), |lambda| {
            Ok(f.eval(fabs(lambda))?)
        })?);
    }
    let expectation = phi.average_scalars(&expect_terms);
    let deviation = phi.average_scalars(&dev_terms);
    let rhs = expectation - deviation;
    Ok(OperatorJensenGap {
        lhs,
        rhs,
        gap: rhs - lhs,
    })
}

/// Outcome of the external (two-operator) Jensen bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExternalJensenOutcome<T> {
    /// `f(⟨Ax,x⟩ - ⟨By,y⟩)`
    pub lhs: T,
    /// The five-term lower bound evaluated exactly as stated.
    pub rhs_lower_bound: T,
    /// `lhs - rhs_lower_bound`; a negative value beyond tolerance is a
    /// reportable finding, not an assertion failure.
    pub slack: T,
}

/// Evaluates the external Jensen bound
///
/// ```text
/// f(⟨Ax,x⟩ - ⟨By,y⟩) ≥ ‖x‖² f(⟨A x̂, x̂⟩) - ⟨f(B)y,y⟩
///                      + ⟨f(|B - ⟨By,y⟩/‖y‖²·I|)y,y⟩
///                      + f(‖y‖² d) + ‖y‖² f(d),
///     d = |⟨Ax,x⟩/‖x‖² - ⟨By,y⟩/‖y‖²|
/// ```
///
/// under the hypotheses `‖x‖² - ‖y‖² = 1`, `‖y‖ > 0`, and
/// `⟨Ax,x⟩ - ⟨By,y⟩ ≥ 0`.
pub fn external_jensen_check<T: Real + RealField>(
    a: &HermitianMatrix<T>,
    b: &HermitianMatrix<T>,
    x: &DVector<Complex<T>>,
    y: &DVector<Complex<T>>,
    f: &ScalarFn,
) -> Result<ExternalJensenOutcome<T>, OperatorError> {
    a.check_psd()?;
    b.check_psd()?;
    if a.dim() != x.len() || b.dim() != y.len() {
        return Err(OperatorError::DimensionMismatch(
            "operator and vector dimensions differ".into(),
        ));
    }
    let nx2: T = x.norm_squared();
    let ny2: T = y.norm_squared();
    if fabs(nx2 - ny2 - T::one()) > T::lit(1e-10) {
        return Err(OperatorError::HypothesisViolated(format!(
            "requires |x|^2 - |y|^2 = 1, got {}",
            (nx2 - ny2).as_f64()
        )));
    }
    if !(ny2 > T::zero()) {
        return Err(OperatorError::HypothesisViolated(
            "requires |y| > 0".into(),
        ));
    }
    let ax = a.quadratic_form(x);
    let by = b.quadratic_form(y);
    let diff = ax - by;
    if diff < T::zero() {
        return Err(OperatorError::HypothesisViolated(format!(
            "requires <Ax,x> - <By,y> >= 0, got {}",
            diff.as_f64()
        )));
    }

    let lhs = f.eval(diff)?;
    let avg_a = ax / nx2;
    let avg_b = by / ny2;
    let d = fabs(avg_a - avg_b);

    let term1 = nx2 * f.eval(avg_a)?;
    let term2 = spectral_form(b, y, |lambda| Ok(f.eval(lambda)?))?;
    let term3 = spectral_form(b, y, |lambda| Ok(f.eval(fabs(lambda - avg_b))?))?;
    let term4 = f.eval(ny2 * d)?;
    let term5 = ny2 * f.eval(d)?;
    let rhs_lower_bound = term1 - term2 + term3 + term4 + term5;

    Ok(ExternalJensenOutcome {
        lhs,
        rhs_lower_bound,
        slack: lhs - rhs_lower_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{random_psd, random_unit, seeded_rng};
    use crate::superquad::{jensen_gap, DiscreteMeasure};

    #[test]
    fn scalar_matrix_has_zero_gap() {
        let c = 0.8;
        let a = HermitianMatrix::from_real_diagonal(&[c, c, c]);
        let eta: UnitVector<f64> = random_unit(&mut seeded_rng(42, 0), 3);
        let f = ScalarFn::parse("t^2").unwrap();
        let g = theorem_a_gap(&a, &eta, &f).unwrap();
        assert!(g.gap.abs() <= 1e-12, "gap {}", g.gap);
    }

    #[test]
    fn one_dimensional_gap_is_exactly_zero() {
        let a = HermitianMatrix::from_real_diagonal(&[0.6]);
        let eta = UnitVector::basis(1, 0);
        for src in ["t^2", "t^3", "t^2.5"] {
            let f = ScalarFn::parse(src).unwrap();
            let g = theorem_a_gap(&a, &eta, &f).unwrap();
            assert_eq!(g.gap, 0.0, "f = {src}");
        }
    }

    #[test]
    fn diagonal_case_matches_discrete_jensen() {
        // oracle: with A = diag(a_i) and η = (√w_i), both sides reduce to
        // the discrete sharpened Jensen inequality
        let points = vec![0.1, 0.7, 0.4];
        let weights = vec![0.5, 0.25, 0.25];
        let a = HermitianMatrix::from_real_diagonal(&points);
        let eta = UnitVector::normalized(DVector::from_vec(
            weights
                .iter()
                .map(|&w: &f64| Complex::new(w.sqrt(), 0.0))
                .collect::<Vec<_>>(),
        ))
        .unwrap();
        let f = ScalarFn::parse("t^3").unwrap();
        let op = theorem_a_gap(&a, &eta, &f).unwrap();
        let m = DiscreteMeasure::new(points, weights).unwrap();
        let sc = jensen_gap(&f, &m).unwrap();
        assert!((op.lhs - sc.lhs).abs() <= 1e-12);
        assert!((op.rhs - sc.rhs).abs() <= 1e-12);
        assert!((op.gap - sc.gap).abs() <= 1e-12);
    }

    #[test]
    fn random_instances_have_nonnegative_gap() {
        let f2 = ScalarFn::parse("t^2").unwrap();
        let f3 = ScalarFn::parse("t^3").unwrap();
        for i in 0..50 {
            let mut rng = seeded_rng(42, i);
            let dim = 2 + (i as usize % 5);
            let a: HermitianMatrix<f64> = random_psd(&mut rng, dim);
            let eta = random_unit(&mut rng, dim);
            for f in [&f2, &f3] {
                let g = theorem_a_gap(&a, &eta, f).unwrap();
                assert!(g.gap >= -1e-8, "instance {i}: gap {}", g.gap);
            }
        }
    }

    #[test]
    fn external_jensen_scalar_square_case_is_tight() {
        // A = aI, B = bI, |x|^2 = 2, |y|^2 = 1, f = t^2: the bound is an
        // identity (slack 0) whenever 2a - b >= 0
        for (aa, bb) in [(1.0, 1.0), (2.0, 0.5), (0.75, 1.2)] {
            let a = HermitianMatrix::<f64>::from_real_diagonal(&[aa, aa]);
            let b = HermitianMatrix::from_real_diagonal(&[bb, bb]);
            let x = DVector::from_vec(vec![Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)]);
            let y = DVector::from_vec(vec![Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)]);
            let f = ScalarFn::parse("t^2").unwrap();
            let out = external_jensen_check(&a, &b, &x, &y, &f).unwrap();
            assert!(out.slack.abs() <= 1e-10, "a={aa} b={bb}: slack {}", out.slack);
        }
    }

    #[test]
    fn external_jensen_zero_function() {
        let a = HermitianMatrix::from_real_diagonal(&[1.0]);
        let b = HermitianMatrix::from_real_diagonal(&[0.5]);
        let x = DVector::from_vec(vec![Complex::new(2.0f64.sqrt(), 0.0)]);
        let y = DVector::from_vec(vec![Complex::new(1.0, 0.0)]);
        let out = external_jensen_check(&a, &b, &x, &y, &ScalarFn::zero()).unwrap();
        assert_eq!(out.slack, 0.0);
    }

    #[test]
    fn external_jensen_hypothesis_violations_name_the_culprit() {
        let a = HermitianMatrix::from_real_diagonal(&[1.0]);
        let b = HermitianMatrix::from_real_diagonal(&[0.5]);
        let f = ScalarFn::parse("t^2").unwrap();
        // |x|^2 - |y|^2 != 1
        let x = DVector::from_vec(vec![Complex::new(1.0, 0.0)]);
        let y = DVector::from_vec(vec![Complex::new(1.0, 0.0)]);
        match external_jensen_check(&a, &b, &x, &y, &f) {
            Err(OperatorError::HypothesisViolated(msg)) => assert!(msg.contains("|x|^2")),
            other => panic!("expected hypothesis violation, got {other:?}"),
        }
        // tiny but nonzero y is accepted
        let x = DVector::from_vec(vec![Complex::new((1.0 + 1e-16f64).sqrt(), 0.0)]);
        let y = DVector::from_vec(vec![Complex::new(1e-8, 0.0)]);
        assert!(external_jensen_check(&a, &b, &x, &y, &f).is_ok());
    }
}
