//! Gauss–Kronrod 7/15 panel rule.

use super::QuadError;
use crate::scalar::Real;

/// Abscissae of the 15-point Kronrod rule on [-1, 1], nonnegative half.
/// Even indices interleave the 7-point Gauss rule nodes (odd indices).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Gauss weights for the embedded 7-point rule (nodes XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One panel's Kronrod estimate and error bound.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Panel<T> {
    pub a: T,
    pub b: T,
    pub value: T,
    pub err: T,
}

/// The 15 Kronrod nodes on `[a, b]` in ascending order, with weights
/// scaled so that `Σ w_i f(x_i) ≈ ∫_a^b f`.
pub(crate) fn nodes15<T: Real>(a: T, b: T) -> Vec<(T, T)> {
    let half = T::lit(0.5);
    let center = (a + b) * half;
    let hlgth = (b - a) * half;
    let mut out = Vec::with_capacity(15);
    for j in 0..7 {
        out.push((center - hlgth * T::lit(XGK[j]), hlgth * T::lit(WGK[j])));
    }
    out.push((center, hlgth * T::lit(WGK[7])));
    for j in (0..7).rev() {
        out.push((center + hlgth * T::lit(XGK[j]), hlgth * T::lit(WGK[j])));
    }
    out
}

pub(crate) fn gk15<T, F>(f: &F, a: T, b: T) -> Result<Panel<T>, QuadError>
where
    T: Real,
    F: Fn(T) -> Result<T, QuadError>,
{
    let half = T::lit(0.5);
    let center = (a + b) * half;
    let hlgth = (b - a) * half;

    let sample = |t: T| -> Result<T, QuadError> {
        let v = f(t)?;
        if !v.is_finite() {
            return Err(QuadError::NonFiniteSample { point: t.as_f64() });
        }
        Ok(v)
    };

    let fc = sample(center)?;
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];
    let mut resk = T::lit(WGK[7]) * fc;
    let mut resabs = resk.abs();
    for j in 0..7 {
        let d = hlgth * T::lit(XGK[j]);
        let f1 = sample(center - d)?;
        let f2 = sample(center + d)?;
        fv1[j] = f1;
        fv2[j] = f2;
        let w = T::lit(WGK[j]);
        resk = resk + w * (f1 + f2);
        resabs = resabs + w * (f1.abs() + f2.abs());
    }
    let mut resg = T::lit(WG[3]) * fc;
    for j in 0..3 {
        resg = resg + T::lit(WG[j]) * (fv1[2 * j + 1] + fv2[2 * j + 1]);
    }

    // QUADPACK-style scaled error estimate
    let reskh = resk * half;
    let mut resasc = T::lit(WGK[7]) * (fc - reskh).abs();
    for j in 0..7 {
        resasc = resasc + T::lit(WGK[j]) * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let habs = hlgth.abs();
    let value = resk * hlgth;
    resabs = resabs * habs;
    resasc = resasc * habs;
    let mut err = ((resk - resg) * hlgth).abs();
    if resasc != T::zero() && err != T::zero() {
        let scaled = (T::lit(200.0) * err / resasc).powf(T::lit(1.5));
        err = resasc * scaled.min(T::one());
    }
    let eps50 = T::lit(50.0) * T::epsilon();
    if resabs > T::min_positive_value() / eps50 {
        err = err.max(eps50 * resabs);
    }

    Ok(Panel { a, b, value, err })
}
