//! Finite-dimensional Hermitian realizations of the operator inequalities.
//!
//! Everything infinite-dimensional in the underlying theory is realized
//! here on complex Hermitian matrices with discretized integrals: quadratic
//! forms against unit vectors, weighted averaging maps as the unital
//! positive linear maps, and eigendecomposition as the functional calculus.

mod hardy_ops;
mod jensen;
mod random;

pub use hardy_ops::{
    hansen_check, hansen_check_with_panels, hansen_counterexample_search, operator_hardy_refined,
    HansenFinding, HansenOutcome, MatrixField, SearchParams, DEFAULT_HANSEN_PANELS,
};
pub use jensen::{external_jensen_check, theorem_a_gap, theorem_b_gap, ExternalJensenOutcome,
    OperatorJensenGap};
pub use random::{
    instance_seed, random_field, random_psd, random_simplex_weights, random_unit, seeded_rng,
};

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector, RealField};
use num_complex::Complex;

use crate::funcdsl::{DomainError, ScalarFn};
use crate::quadrature::QuadError;
use crate::scalar::Real;

/// Relative asymmetry tolerated when adopting a matrix as Hermitian.
const HERMITIAN_TOL: f64 = 1e-12;
/// Relative eigenvalue floor for accepting a matrix as PSD.
const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OperatorError {
    #[error("matrix is not Hermitian within tolerance (relative asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },
    #[error("matrix is not positive semidefinite (eigmin {eigmin:e}, norm {norm:e})")]
    NotPsd { eigmin: f64, norm: f64 },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("eigendecomposition did not converge")]
    EigenFailure,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("cannot normalize a zero vector")]
    ZeroVector,
    #[error("grid must be strictly increasing with positive entries")]
    BadGrid,
    #[error("averaging weights must be positive and non-empty")]
    BadWeights,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Eval(#[from] DomainError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

// `num_traits::Float` and `nalgebra::RealField` both offer these methods;
// route through the Float versions once so call sites stay unambiguous.
pub(crate) fn fabs<T: Real>(x: T) -> T {
    num_traits::Float::abs(x)
}
pub(crate) fn fmax<T: Real>(a: T, b: T) -> T {
    num_traits::Float::max(a, b)
}
pub(crate) fn fpow<T: Real>(a: T, b: T) -> T {
    num_traits::Float::powf(a, b)
}

/// A validated Hermitian matrix over `Complex<T>`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix<T> {
    m: DMatrix<Complex<T>>,
}

impl<T: Real + RealField> HermitianMatrix<T> {
    /// Adopts `m`, requiring `‖M - M*‖ ≤ 1e-12 ‖M‖`; the stored matrix is
    /// the symmetrization `(M + M*)/2`.
    pub fn new(m: DMatrix<Complex<T>>) -> Result<Self, OperatorError> {
        if m.nrows() != m.ncols() {
            return Err(OperatorError::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let adj = m.adjoint();
        let asym: T = (&m - &adj).norm();
        let scale: T = m.norm();
        if asym > T::lit(HERMITIAN_TOL) * scale {
            return Err(OperatorError::NotHermitian {
                asymmetry: (asym / scale).as_f64(),
            });
        }
        let half = Complex::new(T::lit(0.5), T::zero());
        Ok(HermitianMatrix { m: (m + adj) * half })
    }

    /// Wraps a matrix that is Hermitian by construction.
    pub(crate) fn trusted(m: DMatrix<Complex<T>>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        HermitianMatrix { m }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianMatrix {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianMatrix {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let dim = diag.len();
        let mut m = DMatrix::zeros(dim, dim);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, T::zero());
        }
        HermitianMatrix { m }
    }

    /// Builds from real entries (row major); the matrix must be symmetric.
    pub fn from_real_rows(rows: &[Vec<T>]) -> Result<Self, OperatorError> {
        let n = rows.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(OperatorError::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = Complex::new(v, T::zero());
            }
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.m
    }

    pub fn frobenius_norm(&self) -> T {
        self.m.norm()
    }

    /// `⟨Mv, v⟩ = v* M v`; real for Hermitian M (the imaginary residue is
    /// roundoff and is dropped).
    pub fn quadratic_form(&self, v: &DVector<Complex<T>>) -> T {
        debug_assert_eq!(v.len(), self.dim());
        let mv = &self.m * v;
        v.dotc(&mv).re
    }

    /// `M + c·I`
    pub fn add_scalar(&self, c: T) -> Self {
        let mut m = self.m.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += Complex::new(c, T::zero());
        }
        HermitianMatrix { m }
    }

    pub fn scaled(&self, w: T) -> Self {
        HermitianMatrix {
            m: &self.m * Complex::new(w, T::zero()),
        }
    }

    /// Eigenvalues (real, ascending) and the matching eigenvector columns.
    pub fn eig(&self) -> Result<(Vec<T>, DMatrix<Complex<T>>), OperatorError> {
        let n = self.dim();
        if n == 1 {
            return Ok((
                vec![self.m[(0, 0)].re],
                DMatrix::identity(1, 1),
            ));
        }
        let se: SymmetricEigen<Complex<T>, _> =
            SymmetricEigen::try_new(self.m.clone(), T::default_epsilon(), 0)
                .ok_or(OperatorError::EigenFailure)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            se.eigenvalues[i]
                .partial_cmp(&se.eigenvalues[j])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let values: Vec<T> = order.iter().map(|&i| se.eigenvalues[i]).collect();
        let mut vectors = DMatrix::zeros(n, n);
        for (k, &i) in order.iter().enumerate() {
            vectors.set_column(k, &se.eigenvectors.column(i));
        }
        Ok((values, vectors))
    }

    pub fn eigenvalues(&self) -> Result<Vec<T>, OperatorError> {
        Ok(self.eig()?.0)
    }

    pub fn eigmin(&self) -> Result<T, OperatorError> {
        let vals = self.eigenvalues()?;
        Ok(vals[0])
    }

    /// PSD within the relative tolerance `eigmin ≥ -1e-10 ‖M‖`.
    pub fn check_psd(&self) -> Result<(), OperatorError> {
        let eigmin = self.eigmin()?;
        let norm = self.frobenius_norm();
        if eigmin < -T::lit(PSD_TOL) * fmax(norm, T::one()) {
            return Err(OperatorError::NotPsd {
                eigmin: eigmin.as_f64(),
                norm: norm.as_f64(),
            });
        }
        Ok(())
    }
}

impl<T: Real + RealField> std::ops::Add for &HermitianMatrix<T> {
    type Output = HermitianMatrix<T>;
    fn add(self, rhs: Self) -> HermitianMatrix<T> {
        HermitianMatrix {
            m: &self.m + &rhs.m,
        }
    }
}

impl<T: Real + RealField> std::ops::Sub for &HermitianMatrix<T> {
    type Output = HermitianMatrix<T>;
    fn sub(self, rhs: Self) -> HermitianMatrix<T> {
        HermitianMatrix {
            m: &self.m - &rhs.m,
        }
    }
}

/// Applies a scalar map to the spectrum: `U diag(map(λ)) U*`.
pub(crate) fn apply_spectral<T, F>(
    m: &HermitianMatrix<T>,
    map: F,
) -> Result<HermitianMatrix<T>, OperatorError>
where
    T: Real + RealField,
    F: Fn(T) -> Result<T, OperatorError>,
{
    let (values, vectors) = m.eig()?;
    let n = m.dim();
    let mut scaled = vectors.clone();
    for (k, &lambda) in values.iter().enumerate() {
        let mapped = Complex::new(map(lambda)?, T::zero());
        for i in 0..n {
            scaled[(i, k)] *= mapped;
        }
    }
    Ok(HermitianMatrix::trusted(&scaled * vectors.adjoint()))
}

/// Functional calculus `f(M)` by eigendecomposition.
pub fn apply_function<T: Real + RealField>(
    m: &HermitianMatrix<T>,
    f: &ScalarFn,
) -> Result<HermitianMatrix<T>, OperatorError> {
    apply_spectral(m, |lambda| Ok(f.eval(lambda)?))
}

/// `|M|`: eigenvalue absolute value (equal to `(M^2)^{1/2}` for Hermitian M).
pub fn matrix_abs<T: Real + RealField>(
    m: &HermitianMatrix<T>,
) -> Result<HermitianMatrix<T>, OperatorError> {
    apply_spectral(m, |lambda| Ok(fabs(lambda)))
}

/// `⟨map(Λ)·η, η⟩` evaluated in the eigenbasis without rebuilding the
/// matrix: `Σ map(λ_k) |⟨u_k, η⟩|²`.
pub(crate) fn spectral_form<T, F>(
    m: &HermitianMatrix<T>,
    v: &DVector<Complex<T>>,
    map: F,
) -> Result<T, OperatorError>
where
    T: Real + RealField,
    F: Fn(T) -> Result<T, OperatorError>,
{
    if m.dim() == 1 {
        return Ok(map(m.m[(0, 0)].re)? * v[0].norm_sqr());
    }
    let (values, vectors) = m.eig()?;
    let mut acc = T::zero();
    for (k, &lambda) in values.iter().enumerate() {
        let overlap = vectors.column(k).dotc(v).norm_sqr();
        acc = acc + map(lambda)? * overlap;
    }
    Ok(acc)
}

/// A complex vector of unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector<T> {
    v: DVector<Complex<T>>,
}

impl<T: Real + RealField> UnitVector<T> {
    pub fn normalized(v: DVector<Complex<T>>) -> Result<Self, OperatorError> {
        let norm: T = v.norm();
        if norm == T::zero() {
            return Err(OperatorError::ZeroVector);
        }
        Ok(UnitVector {
            v: v / Complex::new(norm, T::zero()),
        })
    }

    /// The k-th standard basis vector.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[k] = Complex::new(T::one(), T::zero());
        UnitVector { v }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn as_vector(&self) -> &DVector<Complex<T>> {
        &self.v
    }
}

/// Weighted averaging over a grid: the unital positive linear map
/// `Φ(A_1..A_m) = Σ w_i A_i` with `Σ w_i = 1` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragingMap<T> {
    weights: Vec<T>,
}

impl<T: Real + RealField> AveragingMap<T> {
    /// Normalizes positive weights so their left-to-right sum is exactly 1,
    /// which makes `Φ(I) = I` exact.
    pub fn new(raw: &[T]) -> Result<Self, OperatorError> {
        if raw.is_empty() || raw.iter().any(|&w| !(w > T::zero() && w.is_finite())) {
            return Err(OperatorError::BadWeights);
        }
        let total: T = raw.iter().copied().sum();
        let mut weights: Vec<T> = raw.iter().map(|&w| w / total).collect();
        let last = weights.len() - 1;
        let prefix: T = weights[..last].iter().copied().sum();
        weights[last] = T::one() - prefix;
        for _ in 0..64 {
            let sum: T = weights.iter().copied().sum();
            if sum == T::one() {
                break;
            }
            weights[last] = weights[last] + (T::one() - sum);
        }
        if weights[last] <= T::zero() {
            return Err(OperatorError::BadWeights);
        }
        Ok(AveragingMap { weights })
    }

    pub fn uniform(len: usize) -> Result<Self, OperatorError> {
        Self::new(&vec![T::one(); len.max(1)])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `Σ w_i A_i`. Accumulation starts from the first scaled term, so a
    /// single-point map returns its sample bit for bit.
    pub fn average(
        &self,
        samples: &[HermitianMatrix<T>],
    ) -> Result<HermitianMatrix<T>, OperatorError> {
        if samples.len() != self.weights.len() {
            return Err(OperatorError::DimensionMismatch(format!(
                "{} samples for {} weights",
                samples.len(),
                self.weights.len()
            )));
        }
        let dim = samples[0].dim();
        if samples.iter().any(|s| s.dim() != dim) {
            return Err(OperatorError::DimensionMismatch(
                "samples of differing dimension".into(),
            ));
        }
        let mut acc = samples[0].scaled(self.weights[0]);
        for (s, &w) in samples[1..].iter().zip(&self.weights[1..]) {
            acc.m += &s.m * Complex::new(w, T::zero());
        }
        Ok(acc)
    }

    /// Scalar weighted sum with the same accumulation order as [`average`].
    pub(crate) fn average_scalars(&self, values: &[T]) -> T {
        let mut acc = self.weights[0] * values[0];
        for (&v, &w) in values[1..].iter().zip(&self.weights[1..]) {
            acc = acc + w * v;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_validation() {
        let ok = HermitianMatrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!(ok.is_ok());
        let mut bad = DMatrix::zeros(2, 2);
        bad[(0, 1)] = Complex::new(1.0, 0.0);
        bad[(1, 0)] = Complex::new(0.5, 0.0);
        assert!(matches!(
            HermitianMatrix::new(bad),
            Err(OperatorError::NotHermitian { .. })
        ));
    }

    #[test]
    fn apply_function_diagonal_square() {
        let m = HermitianMatrix::<f64>::from_real_diagonal(&[1.0, 2.0]);
        let f = ScalarFn::parse("t^2").unwrap();
        let r = apply_function(&m, &f).unwrap();
        assert!((r.matrix()[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!((r.matrix()[(1, 1)].re - 4.0).abs() < 1e-14);
        assert!(r.matrix()[(0, 1)].norm_sqr() < 1e-24);
    }

    #[test]
    fn matrix_abs_diagonal() {
        let m = HermitianMatrix::<f64>::from_real_diagonal(&[-3.0, 2.0]);
        let r = matrix_abs(&m).unwrap();
        assert!((r.matrix()[(0, 0)].re - 3.0).abs() < 1e-14);
        assert!((r.matrix()[(1, 1)].re - 2.0).abs() < 1e-14);
    }

    #[test]
    fn apply_cube_to_coupled_pair() {
        // oracle: [[2,1],[1,2]] has eigenpairs (1, (1,-1)/√2), (3, (1,1)/√2);
        // mapping by t^3 gives [[14,13],[13,14]]
        let m = HermitianMatrix::<f64>::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let f = ScalarFn::parse("t^3").unwrap();
        let r = apply_function(&m, &f).unwrap();
        let expect = [[14.0, 13.0], [13.0, 14.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (r.matrix()[(i, j)].re - expect[i][j]).abs() < 1e-12,
                    "entry ({i},{j}) = {}",
                    r.matrix()[(i, j)].re
                );
                assert!(r.matrix()[(i, j)].im.abs() < 1e-12);
            }
        }
        let eigs = m.eigenvalues().unwrap();
        assert!((eigs[0] - 1.0).abs() < 1e-12 && (eigs[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_form_is_real_for_complex_entries() {
        let mut m: DMatrix<Complex<f64>> = DMatrix::zeros(2, 2);
        m[(0, 0)] = Complex::new(2.0, 0.0);
        m[(1, 1)] = Complex::new(1.0, 0.0);
        m[(0, 1)] = Complex::new(0.5, 0.25);
        m[(1, 0)] = Complex::new(0.5, -0.25);
        let h = HermitianMatrix::new(m).unwrap();
        let v = UnitVector::normalized(DVector::from_vec(vec![
            Complex::new(1.0, 0.5),
            Complex::new(-0.25, 1.0),
        ]))
        .unwrap();
        let qf = h.quadratic_form(v.as_vector());
        assert!(qf.is_finite());
        // Hermitian quadratic forms sit between the extreme eigenvalues
        let eigs = h.eigenvalues().unwrap();
        assert!(eigs[0] - 1e-12 <= qf && qf <= eigs[1] + 1e-12);
    }

    #[test]
    fn averaging_map_is_exactly_unital() {
        for raw in [vec![1.0, 1.0, 1.0], vec![0.3, 0.5, 0.9, 0.0001], vec![7.0]] {
            let phi = AveragingMap::<f64>::new(&raw).unwrap();
            let sum: f64 = phi.weights().iter().sum();
            assert_eq!(sum, 1.0, "weights {raw:?}");
            let id = HermitianMatrix::identity(3);
            let samples = vec![id.clone(); raw.len()];
            let avg = phi.average(&samples).unwrap();
            assert_eq!(avg.matrix(), id.matrix());
        }
    }

    #[test]
    fn single_point_average_is_bitwise_identity() {
        let phi = AveragingMap::<f64>::new(&[0.7]).unwrap();
        assert_eq!(phi.weights(), &[1.0]);
        let a = HermitianMatrix::from_real_rows(&[vec![1.5, -0.5], vec![-0.5, 0.25]]).unwrap();
        let avg = phi.average(std::slice::from_ref(&a)).unwrap();
        assert_eq!(avg.matrix(), a.matrix());
    }

    #[test]
    fn unit_vector_normalization() {
        let v = DVector::from_vec(vec![Complex::new(3.0f64, 0.0), Complex::new(0.0, 4.0)]);
        let u = UnitVector::normalized(v).unwrap();
        assert!((u.as_vector().norm() - 1.0).abs() <= 1e-12);
        assert!(matches!(
            UnitVector::<f64>::normalized(DVector::zeros(2)),
            Err(OperatorError::ZeroVector)
        ));
    }

    #[test]
    fn psd_check() {
        let psd = HermitianMatrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!(psd.check_psd().is_ok());
        let indef = HermitianMatrix::from_real_diagonal(&[1.0, -0.5]);
        assert!(matches!(
            indef.check_psd(),
            Err(OperatorError::NotPsd { .. })
        ));
    }
}
