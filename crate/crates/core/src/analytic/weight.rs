//! The smoothed cutoff weight
//!
//! ```text
//! W_a(x; t) = (1/2 pi i) integral over Re z = c of
//!             Gamma(1/4 + a/2 + z/2 + it/2) Gamma(1/4 + a/2 + z/2 - it/2)
//!             / |Gamma(1/4 + a/2 + it/2)|^2 * e^{z^2} x^{-z} dz / z
//! ```
//!
//! which interpolates between 1 (for `x` well below `tau = |t| + 2`) and 0
//! (for `x` well above `tau`). Trapezoidal quadrature on a vertical line with
//! step `h = 0.05`, truncated at `|Im z| = 8`; the `e^{z^2}` factor makes the
//! integrand decay like a Gaussian along the line, so the rule converges
//! geometrically in `1/h`.
//!
//! Two lines are used. For `x >= tau` the integral is taken on `Re z = 2`,
//! where `x^{-z}` is small. For `x < tau` the line is moved to `Re z = -1/4`,
//! which crosses the simple pole at `z = 0` with residue exactly 1, so
//! `W = 1 + (integral on Re z = -1/4)`. Staying on one fixed line would lose
//! up to eight digits to cancellation at the opposite end of the x range.

use super::gamma::{digamma_unchecked, log_gamma_unchecked};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Trapezoid step along the contour.
pub const STEP: f64 = 0.05;
/// Truncation height |Im z|.
pub const HEIGHT: f64 = 8.0;
/// Number of nodes on one side of y = 0.
const K: usize = 160; // HEIGHT / STEP

/// Real part of the direct integration line.
pub const LINE_DIRECT: f64 = 2.0;
/// Real part of the shifted line (crosses the z = 0 pole, residue 1).
pub const LINE_SHIFTED: f64 = -0.25;

/// One evaluation of the cutoff weight.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WeightEval {
    pub x: f64,
    pub t: f64,
    pub parity: u8,
    /// |t| + 2.
    pub tau: f64,
    pub value: f64,
    /// Truncation + discretization + rounding bound for the quadrature.
    pub quad_error: f64,
    /// Real part of the contour actually used.
    pub line: f64,
    /// Imaginary part of the raw quadrature (zero by construction on the
    /// symmetric fast path; rounding-level on the reference path).
    pub raw_imag: f64,
}

/// Reusable per-(t, parity) quadrature data: the x-independent factor
/// `g(z) = G(z) e^{z^2} / z` sampled on both lines at `y_k = k h`, `k >= 0`.
/// Conjugate symmetry `g(-y) = conj(g(y))` supplies the other half.
#[derive(Debug, Clone)]
pub struct WeightKernel {
    t: f64,
    parity: u8,
    tau: f64,
    direct: LineSamples,
    shifted: LineSamples,
}

#[derive(Debug, Clone)]
struct LineSamples {
    c: f64,
    g: Vec<Complex64>,
    /// Trapezoid-weighted sum of |g| (x-independent part of the L1 norm).
    l1: f64,
    /// |g| at the truncation endpoint.
    endpoint: f64,
}

impl WeightKernel {
    pub fn new(t: f64, parity: u8) -> Self {
        assert!(parity <= 1, "parity must be 0 or 1");
        WeightKernel {
            t,
            parity,
            tau: t.abs() + 2.0,
            direct: LineSamples::build(LINE_DIRECT, t, parity),
            shifted: LineSamples::build(LINE_SHIFTED, t, parity),
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Full evaluation with the error bound.
    pub fn eval(&self, x: f64) -> Result<WeightEval> {
        if !(x > 0.0) {
            return Err(Error::domain(format!("weight requires x > 0, got {x}")));
        }
        let (line, residue) = self.pick_line(x);
        let raw = line.sum_symmetric(x);
        Ok(WeightEval {
            x,
            t: self.t,
            parity: self.parity,
            tau: self.tau,
            value: residue + raw,
            quad_error: line.error_bound(x, self.parity),
            line: line.c,
            raw_imag: 0.0,
        })
    }

    /// Value-only fast path for series summation.
    #[inline]
    pub fn eval_value(&self, x: f64) -> f64 {
        let (line, residue) = self.pick_line(x);
        residue + line.sum_symmetric(x)
    }

    /// The integral on the shifted line alone (equals W - 1).
    pub fn eval_shifted(&self, x: f64) -> Result<WeightEval> {
        if !(x > 0.0) {
            return Err(Error::domain(format!("weight requires x > 0, got {x}")));
        }
        Ok(WeightEval {
            x,
            t: self.t,
            parity: self.parity,
            tau: self.tau,
            value: self.shifted.sum_symmetric(x),
            quad_error: self.shifted.error_bound(x, self.parity),
            line: LINE_SHIFTED,
            raw_imag: 0.0,
        })
    }

    #[inline]
    fn pick_line(&self, x: f64) -> (&LineSamples, f64) {
        if x >= self.tau {
            (&self.direct, 0.0)
        } else {
            (&self.shifted, 1.0)
        }
    }
}

impl LineSamples {
    fn build(c: f64, t: f64, parity: u8) -> LineSamples {
        let alpha = 0.25 + 0.5 * f64::from(parity);
        let den_log = 2.0 * log_gamma_unchecked(Complex64::new(alpha, 0.5 * t)).re;
        let mut g = Vec::with_capacity(K + 1);
        for k in 0..=K {
            let y = k as f64 * STEP;
            let z = Complex64::new(c, y);
            g.push(sample(z, t, alpha, den_log));
        }
        let mut l1 = g[0].norm() + g[K].norm();
        for gk in &g[1..K] {
            l1 += 2.0 * gk.norm();
        }
        let endpoint = g[K].norm();
        LineSamples { c, g, l1, endpoint }
    }

    /// Trapezoid sum over the full line via conjugate symmetry; exact real.
    #[inline]
    fn sum_symmetric(&self, x: f64) -> f64 {
        let ln_x = x.ln();
        let theta = STEP * ln_x;
        // r = e^{-i h ln x}; f(y_k) = g_k x^{-c} r^k
        let (sin_t, cos_t) = theta.sin_cos();
        let (rr, ri) = (cos_t, -sin_t);
        let mut pr = 1.0f64;
        let mut pi_ = 0.0f64;
        let mut acc = self.g[0].re;
        for gk in &self.g[1..K] {
            let npr = pr * rr - pi_ * ri;
            pi_ = pr * ri + pi_ * rr;
            pr = npr;
            acc += 2.0 * (gk.re * pr - gk.im * pi_);
        }
        let npr = pr * rr - pi_ * ri;
        pi_ = pr * ri + pi_ * rr;
        pr = npr;
        acc += self.g[K].re * pr - self.g[K].im * pi_;
        x.powf(-self.c) * acc * STEP / (2.0 * PI)
    }

    /// Rigorous-style error bound: Gaussian-tail truncation, pole-aware
    /// discretization terms, and accumulated rounding.
    fn error_bound(&self, x: f64, parity: u8) -> f64 {
        let scale = x.powf(-self.c) * STEP / (2.0 * PI);
        let l1 = self.l1 * scale.abs();
        // truncation: |f(Y+jh)| <= |f(Y)| e^{-2 Y j h} slack, summed over j
        let rho_t = (-2.0 * HEIGHT * STEP).exp();
        let trunc = 2.0 * self.endpoint * scale.abs() * 8.0 * rho_t / (1.0 - rho_t);
        // discretization: nearest singularities of the integrand as a
        // function of y, continued into the strip |Im y| < d
        let disc = if self.c == LINE_DIRECT {
            // clean strip of half-width 0.5 (z = 0 sits at distance 2)
            l1 * 50.0 * (-2.0 * PI * 0.5 / STEP).exp()
        } else {
            // z = 0 pole at distance 1/4 with residue exactly 1
            let pole_z0 = 10.0 * (-2.0 * PI * 0.25 / STEP).exp();
            // first gamma pole at distance 1/4 + parity; its residue carries
            // x^{1/2 + parity}
            let dist = 0.25 + f64::from(parity);
            let pole_gamma =
                30.0 * x.powf(0.5 + f64::from(parity)) * (-2.0 * PI * dist / STEP).exp();
            // remainder of the strip out to half-width 0.45
            let far = l1 * 1000.0 * (-2.0 * PI * 0.45 / STEP).exp();
            pole_z0 + pole_gamma + far
        };
        let rounding = 8.0 * f64::EPSILON * l1;
        trunc + disc + rounding
    }
}

/// `g(z) = exp(logGamma(A+) + logGamma(A-) - den + z^2) / z` at one node.
#[inline]
fn sample(z: Complex64, t: f64, alpha: f64, den_log: f64) -> Complex64 {
    let half_z = 0.5 * z;
    let a_plus = Complex64::new(alpha, 0.5 * t) + half_z;
    let a_minus = Complex64::new(alpha, -0.5 * t) + half_z;
    let log_num = log_gamma_unchecked(a_plus) + log_gamma_unchecked(a_minus);
    (log_num - den_log + z * z).exp() / z
}

/// Half-width of one tabulation interval in `u = ln x`.
const TABLE_WIDTH: f64 = 0.5;
/// Taylor degree per interval. The tabulated sum is band-limited in `u` with
/// frequencies at most HEIGHT, so the remainder is below
/// `(HEIGHT * TABLE_WIDTH / 2)^(DEG+1) / (DEG+1)!`, about 4e-14 here.
const TABLE_DEGREE: usize = 20;

struct TableInterval {
    u_center: f64,
    coeff: [f64; TABLE_DEGREE + 1],
}

/// Piecewise-polynomial accelerator for many weight evaluations at one
/// (t, parity): intervals in `ln x` are aligned to the `x = tau` line switch
/// and built lazily as larger x are requested. Each evaluation is a short
/// real Horner plus the elementary `x^{-c}` factor.
pub struct WeightTable {
    kernel: WeightKernel,
    /// ln(tau); intervals at nonnegative indexes use the direct line.
    u_star: f64,
    /// intervals with index >= 0 (direct line), built on demand.
    direct: Vec<Option<TableInterval>>,
    /// intervals with index < 0 (shifted line), stored as [-1, -2, ...].
    shifted: Vec<Option<TableInterval>>,
}

impl WeightTable {
    pub fn new(kernel: WeightKernel) -> WeightTable {
        let u_star = kernel.tau().ln();
        WeightTable { kernel, u_star, direct: Vec::new(), shifted: Vec::new() }
    }

    pub fn kernel(&self) -> &WeightKernel {
        &self.kernel
    }

    /// W(x; t) to within ~1e-12 of [`WeightKernel::eval_value`].
    pub fn eval(&mut self, x: f64) -> f64 {
        let u = x.ln();
        let idx = ((u - self.u_star) / TABLE_WIDTH).floor() as i64;
        let (line, residue, pow) = if idx >= 0 {
            (&self.kernel.direct, 0.0, 1.0 / (x * x))
        } else {
            (&self.kernel.shifted, 1.0, x.sqrt().sqrt())
        };
        let slot = if idx >= 0 {
            let i = idx as usize;
            if i >= self.direct.len() {
                self.direct.resize_with(i + 1, || None);
            }
            &mut self.direct[i]
        } else {
            let i = (-1 - idx) as usize;
            if i >= self.shifted.len() {
                self.shifted.resize_with(i + 1, || None);
            }
            &mut self.shifted[i]
        };
        let interval = slot.get_or_insert_with(|| {
            build_interval(line, self.u_star + (idx as f64 + 0.5) * TABLE_WIDTH)
        });
        let du = u - interval.u_center;
        let mut p = interval.coeff[TABLE_DEGREE];
        for m in (0..TABLE_DEGREE).rev() {
            p = p * du + interval.coeff[m];
        }
        residue + pow * p
    }
}

/// Taylor coefficients of `Re sum_k w_k g_k e^{-i k h u}` about `u_center`.
fn build_interval(line: &LineSamples, u_center: f64) -> TableInterval {
    let mut coeff = [0.0f64; TABLE_DEGREE + 1];
    let theta = STEP * u_center;
    let (sin_t, cos_t) = theta.sin_cos();
    let (rr, ri) = (cos_t, -sin_t);
    let mut pr = 1.0f64;
    let mut pi_ = 0.0f64;
    let scale = STEP / (2.0 * PI);
    for (k, gk) in line.g.iter().enumerate() {
        let w = if k == 0 || k == K { 1.0 } else { 2.0 };
        // a_k = w g_k r^k, then b <- b * (-i k h) / (m + 1) per degree
        let mut br = w * scale * (gk.re * pr - gk.im * pi_);
        let mut bi = w * scale * (gk.re * pi_ + gk.im * pr);
        let kh = k as f64 * STEP;
        for (m, c) in coeff.iter_mut().enumerate() {
            *c += br;
            let f = kh / (m as f64 + 1.0);
            let nbr = bi * f;
            bi = -br * f;
            br = nbr;
        }
        // advance r^k
        let npr = pr * rr - pi_ * ri;
        pi_ = pr * ri + pi_ * rr;
        pr = npr;
    }
    TableInterval { u_center, coeff }
}

/// Reference two-sided evaluation: every node on both half-lines is computed
/// independently, so the imaginary part is a genuine rounding observation
/// instead of an identity.
fn two_sided(c: f64, x: f64, t: f64, parity: u8) -> (f64, f64, LineSamples) {
    let alpha = 0.25 + 0.5 * f64::from(parity);
    let den_log = 2.0 * log_gamma_unchecked(Complex64::new(alpha, 0.5 * t)).re;
    let ln_x = x.ln();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in -(K as i64)..=(K as i64) {
        let y = k as f64 * STEP;
        let z = Complex64::new(c, y);
        let g = sample(z, t, alpha, den_log);
        let phase = Complex64::from_polar(1.0, -y * ln_x);
        let w = if k.unsigned_abs() as usize == K { 0.5 } else { 1.0 };
        acc += w * g * phase;
    }
    let scale = x.powf(-c) * STEP / (2.0 * PI);
    // the samples are rebuilt once more for the error bookkeeping
    let samples = LineSamples::build(c, t, parity);
    (acc.re * scale, acc.im * scale, samples)
}

/// W_a(x; t) by the reference two-sided quadrature.
pub fn weight(x: f64, t: f64, parity: u8) -> Result<WeightEval> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("weight requires x > 0, got {x}")));
    }
    assert!(parity <= 1, "parity must be 0 or 1");
    let tau = t.abs() + 2.0;
    let (c, residue) = if x >= tau { (LINE_DIRECT, 0.0) } else { (LINE_SHIFTED, 1.0) };
    let (re, im, samples) = two_sided(c, x, t, parity);
    Ok(WeightEval {
        x,
        t,
        parity,
        tau,
        value: residue + re,
        quad_error: samples.error_bound(x, parity),
        line: c,
        raw_imag: im,
    })
}

/// The integral on `Re z = -1/4` alone, which equals `W - 1`.
pub fn weight_shifted(x: f64, t: f64, parity: u8) -> Result<WeightEval> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("weight requires x > 0, got {x}")));
    }
    assert!(parity <= 1, "parity must be 0 or 1");
    let (re, im, samples) = two_sided(LINE_SHIFTED, x, t, parity);
    Ok(WeightEval {
        x,
        t,
        parity,
        tau: t.abs() + 2.0,
        value: re,
        quad_error: samples.error_bound(x, parity),
        line: LINE_SHIFTED,
        raw_imag: im,
    })
}

/// dW/dt, by differentiating under the integral sign: the integrand picks up
/// the factor `(i/2) [psi(A+) - psi(A-) - psi(v+) + psi(v-)]`.
pub fn weight_dt(x: f64, t: f64, parity: u8) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("weight requires x > 0, got {x}")));
    }
    assert!(parity <= 1, "parity must be 0 or 1");
    let tau = t.abs() + 2.0;
    let c = if x >= tau { LINE_DIRECT } else { LINE_SHIFTED };
    let alpha = 0.25 + 0.5 * f64::from(parity);
    let den_log = 2.0 * log_gamma_unchecked(Complex64::new(alpha, 0.5 * t)).re;
    let psi_v_plus = digamma_unchecked(Complex64::new(alpha, 0.5 * t));
    let psi_v_minus = digamma_unchecked(Complex64::new(alpha, -0.5 * t));
    let ln_x = x.ln();
    let half_i = Complex64::new(0.0, 0.5);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in -(K as i64)..=(K as i64) {
        let y = k as f64 * STEP;
        let z = Complex64::new(c, y);
        let half_z = 0.5 * z;
        let a_plus = Complex64::new(alpha, 0.5 * t) + half_z;
        let a_minus = Complex64::new(alpha, -0.5 * t) + half_z;
        let g = sample(z, t, alpha, den_log);
        let factor = half_i
            * (digamma_unchecked(a_plus) - digamma_unchecked(a_minus) - psi_v_plus + psi_v_minus);
        let phase = Complex64::from_polar(1.0, -y * ln_x);
        let w = if k.unsigned_abs() as usize == K { 0.5 } else { 1.0 };
        acc += w * g * factor * phase;
    }
    Ok(x.powf(-c) * acc.re * STEP / (2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The grid shared by the residue-identity and envelope tests.
    pub(crate) fn test_grid() -> (Vec<f64>, Vec<f64>) {
        let xs: Vec<f64> = (0..=24).map(|i| 10f64.powf(-3.0 + 0.25 * i as f64)).collect();
        let ts = vec![0.0, 1.0, 10.0, 100.0];
        (xs, ts)
    }

    #[test]
    fn rejects_nonpositive_x() {
        assert!(weight(0.0, 1.0, 0).is_err());
        assert!(weight(-2.0, 1.0, 1).is_err());
        assert!(weight_shifted(0.0, 1.0, 0).is_err());
        assert!(weight_dt(-1.0, 1.0, 0).is_err());
    }

    #[test]
    fn table_matches_kernel_path() {
        for &t in &[0.0, 2.0, 11.5, 87.0, 640.0] {
            for &parity in &[0u8, 1] {
                let kernel = WeightKernel::new(t, parity);
                let mut table = WeightTable::new(WeightKernel::new(t, parity));
                let mut x = 0.07;
                while x < 3.0e4 {
                    let direct = kernel.eval_value(x);
                    let tabulated = table.eval(x);
                    assert!(
                        (direct - tabulated).abs() < 1e-11,
                        "x={x} t={t} a={parity}: {direct} vs {tabulated}"
                    );
                    x *= 1.37;
                }
            }
        }
    }

    #[test]
    fn kernel_matches_reference_path() {
        for &t in &[0.0, 3.0, 57.0] {
            for &parity in &[0u8, 1] {
                let kernel = WeightKernel::new(t, parity);
                for &x in &[1e-4, 0.3, 1.0, 7.7, 61.0, 1e3] {
                    let fast = kernel.eval(x).unwrap();
                    let slow = weight(x, t, parity).unwrap();
                    assert!(
                        (fast.value - slow.value).abs() < 1e-12,
                        "x={x} t={t} a={parity}: {} vs {}",
                        fast.value,
                        slow.value
                    );
                    assert_eq!(fast.line, slow.line);
                }
            }
        }
    }

    #[test]
    fn residue_identity_on_grid() {
        // W - 1 equals the shifted-line integral; nontrivial where the lines
        // differ (x >= tau) and a consistency check elsewhere.
        let (xs, ts) = test_grid();
        for &t in &ts {
            for &parity in &[0u8, 1] {
                for &x in &xs {
                    let w = weight(x, t, parity).unwrap();
                    let ws = weight_shifted(x, t, parity).unwrap();
                    let gap = (w.value - 1.0 - ws.value).abs();
                    assert!(gap < 1e-9, "x={x} t={t} a={parity} gap={gap:.3e}");
                }
            }
        }
    }

    #[test]
    fn quad_error_bound_within_posted_budget() {
        for &t in &[0.0, 1.0, 10.0, 100.0, 1000.0] {
            for &parity in &[0u8, 1] {
                let kernel = WeightKernel::new(t, parity);
                for &x in &[1e-8, 1e-4, 0.5, 1.0, 30.0, 1e4, 1e8] {
                    let w = kernel.eval(x).unwrap();
                    assert!(
                        w.quad_error <= 1e-10,
                        "x={x} t={t} a={parity} err={:.3e}",
                        w.quad_error
                    );
                    assert!(w.raw_imag.abs() <= w.quad_error);
                }
            }
        }
    }

    #[test]
    fn reference_imaginary_part_below_error_bound() {
        for &t in &[0.0, 4.0, 333.0] {
            for &x in &[1e-5, 0.8, 50.0, 2e4] {
                let w = weight(x, t, 0).unwrap();
                assert!(
                    w.raw_imag.abs() <= w.quad_error,
                    "x={x} t={t} imag={:.3e} err={:.3e}",
                    w.raw_imag,
                    w.quad_error
                );
            }
        }
    }

    #[test]
    fn step_halving_agreement_at_unit_x() {
        // x = 1, t = 10, a = 0: recompute with half the step by brute force
        // and compare. The half-step rule reuses the same truncation height.
        let t = 10.0f64;
        let x = 1.0f64;
        let alpha = 0.25;
        let den_log = 2.0 * log_gamma_unchecked(Complex64::new(alpha, 0.5 * t)).re;
        let h2 = STEP / 2.0;
        let k2 = 2 * K;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in -(k2 as i64)..=(k2 as i64) {
            let y = k as f64 * h2;
            let z = Complex64::new(LINE_SHIFTED, y);
            let g = sample(z, t, alpha, den_log);
            let phase = Complex64::from_polar(1.0, -y * x.ln());
            let w = if k.unsigned_abs() as usize == k2 { 0.5 } else { 1.0 };
            acc += w * g * phase;
        }
        let halved = x.powf(-LINE_SHIFTED) * acc.re * h2 / (2.0 * PI);
        let full = weight_shifted(x, t, 0).unwrap().value;
        assert!((halved - full).abs() < 1e-10, "halved={halved} full={full}");
    }

    #[test]
    fn shifted_is_even_in_t() {
        for &t in &[0.5, 3.0, 40.0] {
            for &x in &[0.01, 1.0, 9.0] {
                for &parity in &[0u8, 1] {
                    let plus = weight_shifted(x, t, parity).unwrap().value;
                    let minus = weight_shifted(x, -t, parity).unwrap().value;
                    assert!((plus - minus).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn shifted_vanishes_as_x_to_zero() {
        for &parity in &[0u8, 1] {
            let v8 = weight_shifted(1e-8, 3.0, parity).unwrap().value.abs();
            let v4 = weight_shifted(1e-4, 3.0, parity).unwrap().value.abs();
            let v1 = weight_shifted(1e-1, 3.0, parity).unwrap().value.abs();
            assert!(v8 < v4 && v4 < v1, "{v8} {v4} {v1}");
            assert!(v8 < 1e-2);
        }
    }

    #[test]
    fn approaches_one_well_below_tau() {
        // x = 1e-8, t = 100
        for &parity in &[0u8, 1] {
            let w = weight(1e-8, 100.0, parity).unwrap();
            assert!((w.value - 1.0).abs() < 0.02, "value={}", w.value);
        }
    }

    #[test]
    fn quadratic_decay_well_above_tau() {
        // x = 100 tau: |W| <= C (tau/x)^2 with small C
        for &t in &[0.0f64, 5.0, 40.0] {
            for &parity in &[0u8, 1] {
                let tau = t.abs() + 2.0;
                let x = 100.0 * tau;
                let w = weight(x, t, parity).unwrap();
                let c = w.value.abs() * (x / tau).powi(2);
                assert!(c < 10.0, "t={t} a={parity} C={c}");
            }
        }
    }

    #[test]
    fn envelope_constants_on_grid() {
        let (xs, ts) = test_grid();
        let mut c_above: f64 = 0.0;
        let mut c_below: f64 = 0.0;
        for &t in &ts {
            for &parity in &[0u8, 1] {
                let kernel = WeightKernel::new(t, parity);
                let tau = kernel.tau();
                for &x in &xs {
                    let w = kernel.eval(x).unwrap();
                    if x >= tau {
                        c_above = c_above.max(w.value.abs() * (x / tau).powi(2));
                    } else {
                        c_below = c_below.max((w.value - 1.0).abs() * (tau / x).powf(0.25));
                    }
                }
            }
        }
        assert!(c_above <= 10.0, "C_above={c_above}");
        assert!(c_below <= 10.0, "C_below={c_below}");
        // the bounds are not vacuous
        assert!(c_above > 1e-3 && c_below > 1e-3, "{c_above} {c_below}");
    }

    #[test]
    fn derivative_vanishes_at_zero() {
        for &x in &[0.1, 1.0, 13.0] {
            for &parity in &[0u8, 1] {
                let d = weight_dt(x, 0.0, parity).unwrap();
                assert_eq!(d, 0.0);
            }
        }
    }

    #[test]
    fn derivative_matches_centered_difference() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        for i in 0..50 {
            let x = 10f64.powf(rng.gen_range(-2.0..2.0));
            let t = rng.gen_range(0.3..20.0);
            let parity = (i % 2) as u8;
            let d = weight_dt(x, t, parity).unwrap();
            let h = 1e-4;
            let fd = (weight(x, t + h, parity).unwrap().value
                - weight(x, t - h, parity).unwrap().value)
                / (2.0 * h);
            assert!((d - fd).abs() < 1e-6, "x={x} t={t} a={parity} d={d} fd={fd}");
        }
    }

    #[test]
    fn derivative_envelopes_on_grid() {
        let (xs, ts) = test_grid();
        let mut c_above: f64 = 0.0;
        let mut c_below: f64 = 0.0;
        for &t in &ts {
            for &parity in &[0u8, 1] {
                let tau = t.abs() + 2.0;
                for &x in &xs {
                    let d = weight_dt(x, t, parity).unwrap().abs();
                    if x >= tau {
                        c_above = c_above.max(d * tau * (x / tau).powi(2));
                    } else {
                        c_below = c_below.max(d * tau * (tau / x).powf(0.25));
                    }
                }
            }
        }
        assert!(c_above <= 10.0, "C_above={c_above}");
        assert!(c_below <= 10.0, "C_below={c_below}");
    }

    #[test]
    fn example_case_finite_at_half_x() {
        // (x = 0.5, t = 5, a = 1)
        let d = weight_dt(0.5, 5.0, 1).unwrap();
        assert!(d.is_finite());
        let h = 1e-4;
        let fd = (weight(0.5, 5.0 + h, 1).unwrap().value - weight(0.5, 5.0 - h, 1).unwrap().value)
            / (2.0 * h);
        assert!((d - fd).abs() < 1e-6);
    }
}
