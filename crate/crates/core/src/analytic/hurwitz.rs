//! Hurwitz zeta by Euler-Maclaurin, with a tracked remainder bound.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::sync::OnceLock;

/// Number of Bernoulli correction terms.
const CORRECTION_TERMS: usize = 12;

/// `B_{2j} / (2j)!` for j = 1..=CORRECTION_TERMS+1, computed once from the
/// exact recurrence rather than transcribed.
fn em_coefficients() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let top = 2 * (CORRECTION_TERMS + 1);
        // Bernoulli numbers via sum_{j=0}^{m} C(m+1, j) B_j = 0
        let mut bernoulli: Vec<BigRational> = Vec::with_capacity(top + 1);
        bernoulli.push(BigRational::one());
        for m in 1..=top {
            let mut acc = BigRational::zero();
            for (j, b) in bernoulli.iter().enumerate() {
                acc += b * BigRational::from_integer(binomial(m as u64 + 1, j as u64));
            }
            let den = BigRational::from_integer(BigInt::from(m as u64 + 1));
            bernoulli.push(-acc / den);
        }
        let mut factorial = BigRational::one();
        let mut out = Vec::with_capacity(CORRECTION_TERMS + 1);
        for k in 1..=top {
            factorial *= BigRational::from_integer(BigInt::from(k as u64));
            if k % 2 == 0 {
                out.push((&bernoulli[k] / &factorial).to_f64().expect("finite"));
            }
        }
        debug_assert!((out[0] - 1.0 / 12.0).abs() < 1e-18);
        out
    })
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// A Hurwitz zeta value with its Euler-Maclaurin remainder bound.
#[derive(Debug, Clone, Copy)]
pub struct HurwitzEval {
    pub value: Complex64,
    pub error_estimate: f64,
}

/// Hurwitz zeta `zeta(s, alpha) = sum_{k >= 0} (k + alpha)^{-s}` continued to
/// `Re s > -1`, `s != 1`, for `alpha` in `(0, 1]`.
pub fn hurwitz_zeta(s: Complex64, alpha: f64) -> Result<HurwitzEval> {
    let m = default_depth(s);
    hurwitz_zeta_with_depth(s, alpha, m)
}

/// Index shift before the Euler-Maclaurin corrections take over.
pub fn default_depth(s: Complex64) -> usize {
    (2.0 * s.im.abs()).ceil().max(20.0) as usize
}

/// Euler-Maclaurin with an explicit shift depth (exposed for depth-doubling
/// cross-checks).
pub fn hurwitz_zeta_with_depth(s: Complex64, alpha: f64, m: usize) -> Result<HurwitzEval> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::pole("hurwitz_zeta at s = 1"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if !(s.re > -1.0) {
        return Err(Error::domain(format!("Re s must exceed -1, got {s}")));
    }
    let mut direct_re = crate::numeric::KahanSum::new();
    let mut direct_im = crate::numeric::KahanSum::new();
    for k in 0..m {
        let base = k as f64 + alpha;
        let term = (-s * base.ln()).exp();
        direct_re.add(term.re);
        direct_im.add(term.im);
    }
    let edge = m as f64 + alpha;
    let ln_edge = edge.ln();
    // (M + alpha)^{1-s} / (s - 1) + (M + alpha)^{-s} / 2
    let mut tail = ((1.0 - s) * ln_edge).exp() / (s - 1.0) + 0.5 * (-s * ln_edge).exp();
    // correction terms B_{2j}/(2j)! * (s)_{2j-1} * (M + alpha)^{-s-2j+1}
    let coeffs = em_coefficients();
    let mut rising = s; // (s)_1
    let mut power = (-(s + 1.0) * ln_edge).exp(); // (M+alpha)^{-s-1}
    let edge2 = edge * edge;
    for (j, &c) in coeffs.iter().take(CORRECTION_TERMS).enumerate() {
        tail += c * rising * power;
        // advance (s)_{2j-1} -> (s)_{2j+1} and the power by edge^{-2}
        let two_j = 2.0 * (j as f64 + 1.0);
        rising = rising * (s + (two_j - 1.0)) * (s + two_j);
        power /= edge2;
    }
    // standard remainder bound: |next term| * |s + 2J + 1| / (Re s + 2J + 1)
    let next = coeffs[CORRECTION_TERMS] * rising * power;
    let order = 2.0 * CORRECTION_TERMS as f64 + 1.0;
    let safety = (s + order).norm() / (s.re + order);
    let error_estimate = next.norm() * safety + 4.0 * f64::EPSILON * m as f64;
    let value = Complex64::new(direct_re.value(), direct_im.value()) + tail;
    Ok(HurwitzEval { value, error_estimate })
}
