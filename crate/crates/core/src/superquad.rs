//! Grid-based superquadraticity checks and the sharpened discrete Jensen
//! inequality.
//!
//! A function f is superquadratic when for every anchor a ≥ 0 some constant
//! C_a satisfies `f(b) ≥ f(a) + C_a (b - a) + f(|b - a|)` for all b ≥ 0.
//! On a finite grid each b ≠ a contributes a one-sided bound on C_a, so the
//! check reduces to interval intersection per anchor. A `Consistent` verdict
//! is evidence on the sampled grid, not a proof; reports phrase it that way.

use rand::Rng;

use crate::funcdsl::{Builtin, DomainError, ScalarFn};
use crate::scalar::Real;

/// Default absolute slack for interval intersection: the bounds are
/// derivative-scale quantities, so machine-precision ties must not count
/// as violations.
pub const DEFAULT_SUPERQUAD_TOL: f64 = 1e-9;

/// Anchor pairs closer than this contribute no bound (the divided
/// difference degenerates).
const MIN_SEPARATION: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SuperquadError {
    #[error("grid has fewer than 3 distinct points")]
    DegenerateGrid,
    #[error(transparent)]
    Eval(#[from] DomainError),
}

/// Feasible range for the anchor constant C_a. `low` / `high` are -∞ / +∞
/// when the grid has no point on that side of the anchor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaInterval<T> {
    pub anchor: T,
    pub low: T,
    pub high: T,
    /// Grid point that produced `high` (the binding upper constraint).
    pub binding: T,
}

impl<T: Real> CaInterval<T> {
    pub fn is_feasible(&self, tol: T) -> bool {
        self.low <= self.high + tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SuperquadVerdict<T> {
    /// Every anchor admits a constant, within tolerance, on this grid.
    Consistent,
    /// Anchor `a` has an empty constant range; `b` is the grid point whose
    /// constraint cannot be met.
    ViolatedAt { a: T, b: T },
}

/// Outcome of [`check_superquadratic`]: per-anchor feasible intervals and
/// the aggregate verdict (first violation in ascending anchor order).
#[derive(Debug, Clone, PartialEq)]
pub struct SuperquadWitness<T> {
    pub anchors: Vec<T>,
    pub intervals: Vec<CaInterval<T>>,
    pub verdict: SuperquadVerdict<T>,
}

impl<T: Real> SuperquadWitness<T> {
    pub fn is_consistent(&self) -> bool {
        matches!(self.verdict, SuperquadVerdict::Consistent)
    }
}

/// Decides superquadraticity of `f` on `grid` by C_a feasibility.
///
/// For each anchor a, every b > a yields the upper bound
/// `(f(b) - f(a) - f(|b-a|)) / (b - a)` on C_a and every b < a yields the
/// same expression as a lower bound; the verdict is `Consistent` iff every
/// anchor's bounds intersect within `tol`.
pub fn check_superquadratic<T: Real>(
    f: &ScalarFn,
    grid: &[T],
    tol: T,
) -> Result<SuperquadWitness<T>, SuperquadError> {
    let mut points: Vec<T> = grid.to_vec();
    points.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    points.dedup();
    if points.len() < 3 {
        return Err(SuperquadError::DegenerateGrid);
    }

    let values: Vec<T> = points
        .iter()
        .map(|&x| f.eval(x))
        .collect::<Result<_, _>>()?;

    let min_sep = T::lit(MIN_SEPARATION);
    let mut intervals = Vec::with_capacity(points.len());
    let mut verdict = SuperquadVerdict::Consistent;

    for (i, &a) in points.iter().enumerate() {
        let mut low = T::neg_infinity();
        let mut high = T::infinity();
        let mut binding = a;
        for (j, &b) in points.iter().enumerate() {
            if i == j || (b - a).abs() < min_sep {
                continue;
            }
            let dev = f.eval((b - a).abs())?;
            let bound = (values[j] - values[i] - dev) / (b - a);
            if b > a {
                if bound < high {
                    high = bound;
                    binding = b;
                }
            } else if bound > low {
                low = bound;
            }
        }
        let interval = CaInterval {
            anchor: a,
            low,
            high,
            binding,
        };
        if !interval.is_feasible(tol) && matches!(verdict, SuperquadVerdict::Consistent) {
            verdict = SuperquadVerdict::ViolatedAt { a, b: binding };
        }
        intervals.push(interval);
    }

    Ok(SuperquadWitness {
        anchors: points,
        intervals,
        verdict,
    })
}

/// Finite measure with weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure<T> {
    points: Vec<T>,
    weights: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeasureError {
    #[error("points and weights differ in length")]
    LengthMismatch,
    #[error("measure must have at least one point")]
    Empty,
    #[error("point {0} is negative or non-finite")]
    BadPoint(f64),
    #[error("weight {0} is not positive and finite")]
    BadWeight(f64),
    #[error("weights sum to {0}, not 1")]
    NotNormalized(f64),
}

impl<T: Real> DiscreteMeasure<T> {
    pub fn new(points: Vec<T>, weights: Vec<T>) -> Result<Self, MeasureError> {
        if points.len() != weights.len() {
            return Err(MeasureError::LengthMismatch);
        }
        if points.is_empty() {
            return Err(MeasureError::Empty);
        }
        for &p in &points {
            if !(p.is_finite() && p >= T::zero()) {
                return Err(MeasureError::BadPoint(p.as_f64()));
            }
        }
        let mut sum = T::zero();
        for &w in &weights {
            if !(w.is_finite() && w > T::zero()) {
                return Err(MeasureError::BadWeight(w.as_f64()));
            }
            sum = sum + w;
        }
        if (sum - T::one()).abs() > T::lit(1e-12) {
            return Err(MeasureError::NotNormalized(sum.as_f64()));
        }
        Ok(DiscreteMeasure { points, weights })
    }

    /// Uniformly random measure with up to `max_points` support points in
    /// `[0, span]` and normalized positive weights.
    pub fn random<R: Rng>(rng: &mut R, max_points: usize, span: T) -> Self {
        let n = rng.gen_range(1..=max_points.max(1));
        let points: Vec<T> = (0..n)
            .map(|_| span * T::lit(rng.gen_range(0.0..1.0f64)))
            .collect();
        let raw: Vec<T> = (0..n)
            .map(|_| T::lit(rng.gen_range(0.05..1.0f64)))
            .collect();
        let sum: T = raw.iter().copied().sum();
        let weights: Vec<T> = raw.iter().map(|&w| w / sum).collect();
        DiscreteMeasure { points, weights }
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn mean(&self) -> T {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| p * w)
            .sum()
    }
}

/// Both sides of the sharpened Jensen inequality and their gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JensenGap<T> {
    /// `f(∫ φ dμ)`
    pub lhs: T,
    /// `∫ f(φ) dμ - ∫ f(|φ - ∫ φ dμ|) dμ`
    pub rhs: T,
    /// `rhs - lhs`; nonnegative for superquadratic f up to roundoff.
    pub gap: T,
}

/// Evaluates the sharpened Jensen inequality for a discrete measure.
pub fn jensen_gap<T: Real>(
    f: &ScalarFn,
    m: &DiscreteMeasure<T>,
) -> Result<JensenGap<T>, DomainError> {
    let mean = m.mean();
    let lhs = f.eval(mean)?;
    let mut expectation = T::zero();
    let mut deviation = T::zero();
    for (&p, &w) in m.points().iter().zip(m.weights()) {
        expectation = expectation + w * f.eval(p)?;
        deviation = deviation + w * f.eval((p - mean).abs())?;
    }
    let rhs = expectation - deviation;
    Ok(JensenGap {
        lhs,
        rhs,
        gap: rhs - lhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// `±t^p` together with the verdict the grid check is expected to return:
/// `t^p` is superquadratic for p ≥ 2 and `-t^p` for 1 < p ≤ 2.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerFamily {
    pub function: ScalarFn,
    pub exponent: f64,
    pub sign: Sign,
    pub expected_consistent: bool,
}

pub fn power_family(p: f64, sign: Sign) -> PowerFamily {
    assert!(p > 1.0, "power family requires p > 1");
    let negated = sign == Sign::Minus;
    let expected_consistent = match sign {
        Sign::Plus => p >= 2.0,
        Sign::Minus => p <= 2.0,
    };
    PowerFamily {
        function: ScalarFn::builtin(Builtin::Power {
            exponent: p,
            negated,
        }),
        exponent: p,
        sign,
        expected_consistent,
    }
}

/// Diagnostic only: secant slopes of `f` on the sorted grid are
/// nondecreasing (grid-level convexity). Positive superquadratic functions
/// are convex, so a Consistent nonnegative function failing this points at
/// numerical trouble rather than at the inequality.
pub fn convex_on_grid<T: Real>(
    f: &ScalarFn,
    grid: &[T],
    tol: T,
) -> Result<bool, SuperquadError> {
    let mut points: Vec<T> = grid.to_vec();
    points.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    points.dedup();
    if points.len() < 3 {
        return Err(SuperquadError::DegenerateGrid);
    }
    let mut prev_slope = T::neg_infinity();
    for w in points.windows(2) {
        let slope = (f.eval(w[1])? - f.eval(w[0])?) / (w[1] - w[0]);
        if slope < prev_slope - tol {
            return Ok(false);
        }
        prev_slope = slope;
    }
    Ok(true)
}

/// The canonical grid the acceptance suites run the power family on.
pub fn canonical_grid<T: Real>() -> Vec<T> {
    [0.0, 0.1, 0.5, 1.0, 2.0, 10.0]
        .iter()
        .map(|&x| T::lit(x))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> f64 {
        DEFAULT_SUPERQUAD_TOL
    }

    #[test]
    fn square_is_consistent_with_interval_containing_2a() {
        // b^2 = a^2 + 2a(b-a) + (b-a)^2 exactly, so C_a = 2a always fits
        let f = ScalarFn::parse("t^2").unwrap();
        let grid = [0.0, 0.3, 1.0, 2.5, 7.0];
        let w = check_superquadratic(&f, &grid, tol()).unwrap();
        assert!(w.is_consistent());
        for iv in &w.intervals {
            let target = 2.0 * iv.anchor;
            assert!(iv.low <= target + 1e-9 && target <= iv.high + 1e-9);
        }
    }

    #[test]
    fn cube_is_consistent() {
        let f = ScalarFn::parse("t^3").unwrap();
        let grid = [0.0, 0.5, 1.0, 2.0, 4.0];
        let w = check_superquadratic(&f, &grid, tol()).unwrap();
        assert!(w.is_consistent());
    }

    #[test]
    fn sqrt_is_violated() {
        let f = ScalarFn::parse("sqrt(t)").unwrap();
        let grid = [0.0, 0.25, 1.0, 4.0];
        let w = check_superquadratic(&f, &grid, tol()).unwrap();
        match w.verdict {
            SuperquadVerdict::ViolatedAt { .. } => {}
            other => panic!("expected violation, got {other:?}"),
        }
        assert!(w.intervals.iter().any(|iv| !iv.is_feasible(tol())));
    }

    #[test]
    fn degenerate_grid_is_rejected() {
        let f = ScalarFn::parse("t^2").unwrap();
        let err = check_superquadratic(&f, &[1.0, 1.0, 1.0], tol()).unwrap_err();
        assert_eq!(err, SuperquadError::DegenerateGrid);
    }

    #[test]
    fn jensen_gap_of_square_vanishes() {
        // variance identity: E[φ^2] - (Eφ)^2 = E[(φ - Eφ)^2]
        let f = ScalarFn::parse("t^2").unwrap();
        let m = DiscreteMeasure::<f64>::new(vec![0.0, 1.0, 3.0], vec![0.25, 0.5, 0.25]).unwrap();
        let g = jensen_gap(&f, &m).unwrap();
        assert!(g.gap.abs() <= 1e-12);
    }

    #[test]
    fn jensen_gap_of_cube_two_point() {
        let f = ScalarFn::parse("t^3").unwrap();
        let m = DiscreteMeasure::new(vec![0.0, 2.0], vec![0.5, 0.5]).unwrap();
        let g = jensen_gap(&f, &m).unwrap();
        assert_eq!(g.lhs, 1.0);
        assert_eq!(g.rhs, 3.0);
        assert_eq!(g.gap, 2.0);
    }

    #[test]
    fn jensen_gap_of_zero_function() {
        let m = DiscreteMeasure::new(vec![1.0, 2.0], vec![0.5, 0.5]).unwrap();
        let g = jensen_gap(&ScalarFn::zero(), &m).unwrap();
        assert_eq!((g.lhs, g.rhs, g.gap), (0.0, 0.0, 0.0));
    }

    #[test]
    fn power_family_expectations() {
        assert!(power_family(2.0, Sign::Plus).expected_consistent);
        assert!(power_family(3.0, Sign::Plus).expected_consistent);
        assert!(power_family(1.5, Sign::Minus).expected_consistent);
        assert!(power_family(2.0, Sign::Minus).expected_consistent);
        assert!(!power_family(1.5, Sign::Plus).expected_consistent);
        assert!(!power_family(3.0, Sign::Minus).expected_consistent);
    }

    #[test]
    fn measure_validation() {
        assert!(DiscreteMeasure::new(vec![1.0], vec![1.0]).is_ok());
        assert!(matches!(
            DiscreteMeasure::new(vec![1.0], vec![0.5]),
            Err(MeasureError::NotNormalized(_))
        ));
        assert!(matches!(
            DiscreteMeasure::new(vec![-1.0], vec![1.0]),
            Err(MeasureError::BadPoint(_))
        ));
        assert!(matches!(
            DiscreteMeasure::<f64>::new(vec![], vec![]),
            Err(MeasureError::Empty)
        ));
    }

    #[test]
    fn convexity_diagnostic() {
        let sq = ScalarFn::parse("t^2").unwrap();
        let rt = ScalarFn::parse("sqrt(t)").unwrap();
        let grid = [0.0, 0.5, 1.0, 2.0, 4.0];
        assert!(convex_on_grid(&sq, &grid, 1e-12).unwrap());
        assert!(!convex_on_grid(&rt, &grid, 1e-12).unwrap());
    }
}
