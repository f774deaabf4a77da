//! Complex log-gamma and digamma on the right half-plane.
//!
//! Stirling's asymptotic series after shifting the argument up by the
//! recursion `Gamma(w+1) = w Gamma(w)` until `|w|` is large enough for the
//! series to converge to double precision. The shift only ever adds positive
//! integers, so the principal branch stays continuous on vertical lines in
//! `Re w > 0`.

// The coefficient tables carry their full decimal expansions.
#![allow(clippy::excessive_precision)]

use crate::{Error, Result};
use num_complex::Complex64;

/// ln(2 pi) / 2.
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_74;

/// Stirling coefficients B_{2k} / (2k (2k-1)) for k = 1..=12.
const STIRLING: [f64; 12] = [
    8.333333333333333e-2,
    -2.777777777777778e-3,
    7.936507936507937e-4,
    -5.952380952380953e-4,
    8.417508417508418e-4,
    -1.9175269175269175e-3,
    6.410256410256410e-3,
    -2.955065359477124e-2,
    1.7964437236883057e-1,
    -1.3924322169059011,
    1.3402864044168392e1,
    -1.5684828462600202e2,
];

/// |w| above which the Stirling series is summed directly.
const STIRLING_RADIUS: f64 = 12.0;

/// Principal-branch log-gamma for `Re w > 0`.
pub fn log_gamma(w: Complex64) -> Result<Complex64> {
    if !(w.re > 0.0) {
        return Err(Error::domain(format!(
            "log_gamma requires Re w > 0, got {w}"
        )));
    }
    Ok(log_gamma_unchecked(w))
}

/// Internal entry point without the domain check, for hot paths that already
/// guarantee `Re w > 0`.
#[inline]
pub(crate) fn log_gamma_unchecked(mut w: Complex64) -> Complex64 {
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm_sqr() < STIRLING_RADIUS * STIRLING_RADIUS {
        shift += w.ln();
        w += 1.0;
    }
    stirling_series(w) - shift
}

fn stirling_series(w: Complex64) -> Complex64 {
    let ln_w = w.ln();
    let mut acc = (w - 0.5) * ln_w - w + HALF_LN_TWO_PI;
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut pow = inv;
    for &c in &STIRLING {
        acc += c * pow;
        pow *= inv2;
    }
    acc
}

/// Digamma (logarithmic derivative of Gamma) for `Re w > 0`.
pub fn digamma(w: Complex64) -> Result<Complex64> {
    if !(w.re > 0.0) {
        return Err(Error::domain(format!("digamma requires Re w > 0, got {w}")));
    }
    Ok(digamma_unchecked(w))
}

#[inline]
pub(crate) fn digamma_unchecked(mut w: Complex64) -> Complex64 {
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm_sqr() < STIRLING_RADIUS * STIRLING_RADIUS {
        shift += 1.0 / w;
        w += 1.0;
    }
    // psi(w) = ln w - 1/(2w) - sum B_{2k} / (2k w^{2k})
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut acc = w.ln() - 0.5 * inv;
    let mut pow = inv2;
    for &c in &BERNOULLI_OVER_2K {
        acc -= c * pow;
        pow *= inv2;
    }
    acc - shift
}

/// B_{2k} / (2k) for k = 1..=8.
const BERNOULLI_OVER_2K: [f64; 8] = [
    8.333333333333333e-2,
    -8.333333333333333e-3,
    3.968253968253968e-3,
    -4.166666666666667e-3,
    7.575757575757576e-3,
    -2.1092796092796094e-2,
    8.333333333333333e-2,
    -4.432598039215686e-1,
];
