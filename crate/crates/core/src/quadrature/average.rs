//! The running Hardy average `H(x) = (1/x) ∫_0^x f(t) dt`.

use std::cell::RefCell;
use std::collections::BTreeMap;

use super::{adaptive_interval, adaptive_seeded, geometric_edges, QuadConfig, QuadError};
use crate::funcdsl::ScalarFn;
use crate::scalar::Real;

/// Prefix integrals of a nonnegative function over a fixed grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RunningAverage<T> {
    grid: Vec<T>,
    cumulative: Vec<T>,
}

impl<T: Real> RunningAverage<T> {
    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    /// `∫_0^{grid[i]} f`
    pub fn cumulative(&self) -> &[T] {
        &self.cumulative
    }

    /// `H(grid[i]) = cumulative[i] / grid[i]`
    pub fn average_at(&self, i: usize) -> T {
        self.cumulative[i] / self.grid[i]
    }
}

/// Computes prefix integrals `∫_0^{x_i} f` over a strictly increasing
/// positive grid, panel by panel, under the config's tolerance policy.
pub fn running_average<T: Real>(
    f: &ScalarFn,
    grid: &[T],
    cfg: &QuadConfig<T>,
) -> Result<RunningAverage<T>, QuadError> {
    assert!(!grid.is_empty(), "grid must be non-empty");
    for w in grid.windows(2) {
        assert!(w[0] < w[1], "grid must be strictly increasing");
    }
    assert!(grid[0] > T::zero(), "grid entries must be positive");

    let g = |t: T| Ok(f.eval(t)?);
    let mut cumulative = Vec::with_capacity(grid.len());
    let mut acc = T::zero();
    let mut prev = T::zero();
    for &x in grid {
        let piece = integrate_increment(&g, prev, x, cfg.rel_tol, cfg.abs_tol, cfg.max_panels)?;
        acc = acc + piece.value;
        cumulative.push(acc);
        prev = x;
    }
    Ok(RunningAverage {
        grid: grid.to_vec(),
        cumulative,
    })
}


/// Integrates one prefix increment `[a, b]`. Increments can span many
/// orders of magnitude (the first query after a far-out point lands here),
/// so wide ratios get geometric seed panels.
fn integrate_increment<T, F>(
    f: &F,
    a: T,
    b: T,
    rel_tol: T,
    abs_tol: T,
    max_panels: usize,
) -> Result<super::QuadResult<T>, QuadError>
where
    T: Real,
    F: Fn(T) -> Result<T, QuadError>,
{
    if !(b > a) {
        return adaptive_interval(f, a, b, rel_tol, abs_tol, max_panels);
    }
    let wide = a == T::zero() || b / a > T::lit(8.0);
    if wide {
        let edges = geometric_edges(a, b, T::lit(8.0));
        adaptive_seeded(f, &edges, rel_tol, abs_tol, max_panels)
    } else {
        adaptive_interval(f, a, b, rel_tol, abs_tol, max_panels)
    }
}

/// Memoizing prefix integrator used by the Hardy terms: `∫_0^x f` for
/// arbitrary query points, assembled from previously cached prefixes.
///
/// Queries arrive in whatever order the outer quadrature visits them; the
/// cache keyed on the IEEE bit pattern keeps the assembly deterministic.
pub(crate) struct PrefixCache<'f, T, F>
where
    F: Fn(T) -> Result<T, QuadError>,
{
    f: &'f F,
    rel_tol: T,
    abs_tol: T,
    max_panels: usize,
    // x bits -> (∫_0^x f, accumulated error estimate)
    entries: RefCell<BTreeMap<u64, (T, T)>>,
}

impl<'f, T: Real, F> PrefixCache<'f, T, F>
where
    F: Fn(T) -> Result<T, QuadError>,
{
    pub fn new(f: &'f F, rel_tol: T, abs_tol: T, max_panels: usize) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(0u64, (T::zero(), T::zero()));
        PrefixCache {
            f,
            rel_tol,
            abs_tol,
            max_panels,
            entries: RefCell::new(entries),
        }
    }

    fn key(x: T) -> u64 {
        // positive finite doubles order the same as their bit patterns
        x.as_f64().to_bits()
    }

    /// Records that the integrand vanishes on `[0, x]`, so later prefixes
    /// start integrating at `x` (used for truncated fields, whose leading
    /// jump would otherwise cost the adaptive engine a panel cascade).
    pub fn seed_zero_until(&self, x: T) {
        self.entries
            .borrow_mut()
            .insert(Self::key(x), (T::zero(), T::zero()));
    }

    /// Returns `(∫_0^x f, error estimate)`.
    pub fn integral_to(&self, x: T) -> Result<(T, T), QuadError> {
        debug_assert!(x >= T::zero());
        let key = Self::key(x);
        let base = {
            let entries = self.entries.borrow();
            if let Some(&(v, e)) = entries.get(&key) {
                return Ok((v, e));
            }
            let (&bk, &(bv, be)) = entries
                .range(..=key)
                .next_back()
                .expect("cache seeded at zero");
            (T::lit(f64::from_bits(bk)), bv, be)
        };
        let piece = integrate_increment(
            self.f,
            base.0,
            x,
            self.rel_tol,
            self.abs_tol,
            self.max_panels,
        )?;
        let value = base.1 + piece.value;
        let err = base.2 + piece.err_estimate;
        self.entries.borrow_mut().insert(key, (value, err));
        Ok((value, err))
    }

    /// `H(x) = (1/x) ∫_0^x f`, clamped at zero (f is nonnegative; tiny
    /// negative prefixes are quadrature roundoff).
    pub fn average(&self, x: T) -> Result<(T, T), QuadError> {
        let (v, e) = self.integral_to(x)?;
        Ok(((v / x).max(T::zero()), e / x))
    }
}
