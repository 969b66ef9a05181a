//! Reference integrators for oracle comparisons: tanh-sinh (double
//! exponential) rules, independent of the adaptive Gauss–Kronrod engine
//! under test.

#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

/// Tanh-sinh quadrature on a finite interval. Converges geometrically for
/// analytic integrands and tolerates endpoint singularities. Abscissae are
/// carried as distances from the nearer endpoint so nodes deep in the
/// clusters do not lose precision to cancellation.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, eps: f64) -> f64 {
    let c = 0.5 * (a + b);
    let d = 0.5 * (b - a);
    if d == 0.0 {
        return 0.0;
    }
    // weighted pair f(a + d*dist) + f(b - d*dist) at |u|, where
    // dist = 1 - tanh((π/2) sinh u) evaluated stably via exp(-2s).
    // The sides die independently: the node near b collides with b long
    // before the node near a runs out of subnormals, and breaking both
    // sides together would truncate a singular cluster at a.
    let pair = |u: f64| -> Option<f64> {
        let s = FRAC_PI_2 * u.sinh();
        let e2 = (-2.0 * s).exp();
        if !e2.is_finite() || e2 == 0.0 {
            return None;
        }
        let den = 1.0 + e2;
        let dist = 2.0 * e2 / den;
        let w = FRAC_PI_2 * u.cosh() * 4.0 * e2 / (den * den);
        if !(w > 1e-320) {
            return None;
        }
        let xl = a + d * dist;
        let xr = b - d * dist;
        let mut term = 0.0;
        let mut alive = false;
        if xl > a {
            term += w * f(xl);
            alive = true;
        }
        if xr < b {
            term += w * f(xr);
            alive = true;
        }
        if alive {
            Some(term)
        } else {
            None
        }
    };

    let mut h = 1.0f64;
    let mut total = FRAC_PI_2 * f(c); // u = 0 term
    let mut prev = f64::INFINITY;
    for level in 0..=12 {
        if level > 0 {
            h *= 0.5;
        }
        let mut k = 1usize;
        loop {
            let u = k as f64 * h;
            match pair(u) {
                Some(t) => total += t,
                None => break,
            }
            if u > 7.5 {
                break;
            }
            k += if level == 0 { 1 } else { 2 };
        }
        let value = d * h * total;
        if level >= 4 && (value - prev).abs() <= eps * value.abs().max(1.0) {
            return value;
        }
        prev = value;
    }
    prev
}

/// Exp-sinh quadrature on `(0, ∞)`: `x = exp((π/2) sinh u)`.
pub fn exp_sinh<F: Fn(f64) -> f64>(f: F, eps: f64) -> f64 {
    let node = |u: f64| -> Option<(f64, f64)> {
        let s = FRAC_PI_2 * u.sinh();
        let x = s.exp();
        if !x.is_finite() || x == 0.0 {
            return None;
        }
        let w = x * FRAC_PI_2 * u.cosh();
        if !w.is_finite() || w < 1e-320 {
            return None;
        }
        Some((x, w))
    };

    let mut h = 1.0f64;
    let mut total = FRAC_PI_2 * f(1.0); // u = 0: x = 1, weight (π/2)cosh(0)
    let mut prev = f64::INFINITY;
    for level in 0..=12 {
        if level > 0 {
            h *= 0.5;
        }
        let mut k = 1usize;
        loop {
            let u = k as f64 * h;
            let (mut added, mut dead) = (0.0, true);
            for su in [u, -u] {
                if let Some((x, w)) = node(su) {
                    let fx = f(x);
                    if fx != 0.0 {
                        dead = false;
                    }
                    added += w * fx;
                    if w > 1e-300 {
                        dead = false;
                    }
                }
            }
            total += added;
            if dead || u > 7.0 {
                break;
            }
            k += if level == 0 { 1 } else { 2 };
        }
        let value = h * total;
        if level >= 3 && (value - prev).abs() <= eps * value.abs().max(1.0) {
            return value;
        }
        prev = value;
    }
    prev
}

/// Zero crossings of `g` on `(lo, hi)` by dense scan plus bisection.
pub fn sign_change_roots<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, scan: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let mut prev_x = lo;
    let mut prev_v = g(lo);
    for i in 1..=scan {
        let x = lo + (hi - lo) * i as f64 / scan as f64;
        let v = g(x);
        if prev_v * v < 0.0 {
            let (mut a, mut b, mut fa) = (prev_x, x, prev_v);
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let fm = g(m);
                if fa * fm < 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev_x = x;
        prev_v = v;
    }
    roots
}

/// Piecewise tanh-sinh over `[lo, hi]` split at the sign changes of `g`.
pub fn tanh_sinh_split<F, G>(f: F, g: G, lo: f64, hi: f64, eps: f64) -> f64
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let mut cuts = vec![lo];
    cuts.extend(sign_change_roots(&g, lo, hi, 257));
    cuts.push(hi);
    cuts.windows(2).map(|w| tanh_sinh(&f, w[0], w[1], eps)).sum()
}

/// The running average `H(x) = (1/x) ∫_0^x f` by tanh-sinh.
pub fn reference_average<F: Fn(f64) -> f64>(f: F, x: f64, eps: f64) -> f64 {
    tanh_sinh(f, 0.0, x, eps) / x
}

/// Reference evaluation of the refinement correction term by nested
/// tanh-sinh/exp-sinh with kink splitting, fully independent of the
/// adaptive engine.
pub fn reference_correction<F>(f: F, p: f64, eps: f64) -> f64
where
    F: Fn(f64) -> f64 + Copy,
{
    let ratio = (p - 1.0) / p;
    let outer = |x: f64| -> f64 {
        let h = reference_average(f, x, eps * 0.1);
        let c = ratio * h;
        let xp = x.powf(-1.0 / p);
        let arg = move |t: f64| xp * t.powf(1.0 / p) * f(t) - c;
        let integrand = move |t: f64| {
            if t == 0.0 {
                return 0.0;
            }
            x.powf(1.0 / p) * t.powf(-1.0 / p) * arg(t).abs().powf(p)
        };
        tanh_sinh_split(integrand, arg, 0.0, x, eps * 0.1) / x
    };
    exp_sinh(outer, eps)
}

#[cfg(test)]
mod self_checks {
    use super::*;

    #[test]
    fn tanh_sinh_basics() {
        let v = tanh_sinh(|x| x * x, 0.0, 1.0, 1e-12);
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
        // endpoint singularity
        let s = tanh_sinh(|x| x.powf(-0.5), 0.0, 1.0, 1e-12);
        assert!((s - 2.0).abs() < 1e-9, "{s}");
    }

    #[test]
    fn exp_sinh_basics() {
        let v = exp_sinh(|x| (-x).exp(), 1e-12);
        assert!((v - 1.0).abs() < 1e-10, "{v}");
        let w = exp_sinh(|x| 1.0 / ((x + 1.0) * (x + 1.0)), 1e-12);
        assert!((w - 1.0).abs() < 1e-9, "{w}");
    }
}
