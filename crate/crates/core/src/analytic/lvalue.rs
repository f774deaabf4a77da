//! Two independent routes to `L(s, chi)` on and near the critical line.
//!
//! The *oracle* route writes `L(s, chi) = q^{-s} sum_a chi(a) zeta(s, a/q)`
//! in terms of Hurwitz zeta. The *smoothed* route evaluates
//! `|L(1/2 + it, chi)|^2` as the rapidly convergent double series
//!
//! ```text
//! 2 sum_{a,b >= 1} chi(a) conj(chi(b)) / sqrt(ab) * (a/b)^{-it}
//!                  * W_parity(pi a b / q; t)
//! ```
//!
//! truncated where the cutoff weight makes the remaining mass negligible.
//! The two must agree; the acceptance suite holds them to 1e-5 relative.

use super::hurwitz::{default_depth, hurwitz_zeta_with_depth};
use super::weight::{WeightKernel, WeightTable};
use crate::characters::{gauss_sum, DirichletCharacter};
use crate::numeric::KahanSum;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Which engine produced an L-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LMethod {
    Oracle,
    Smoothed,
}

/// An L-value with provenance and a self-reported error estimate.
#[derive(Debug, Clone, Serialize)]
pub struct LValueResult {
    pub s_re: f64,
    pub s_im: f64,
    pub character: String,
    pub value_re: f64,
    pub value_im: f64,
    pub method: LMethod,
    /// Bounds the difference between two internal precisions of the method.
    pub error_estimate: f64,
}

impl LValueResult {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.value_re, self.value_im)
    }
}

/// `L(s, chi)` through Hurwitz zeta, evaluated at two depths; the reported
/// estimate bounds their difference plus the tail remainder.
pub fn l_oracle(s: Complex64, chi: &DirichletCharacter) -> Result<LValueResult> {
    if chi.is_principal() && chi.q() == 1 && s == Complex64::new(1.0, 0.0) {
        return Err(Error::pole("L(1, principal character)"));
    }
    let q = chi.q();
    let depth = default_depth(s);
    let shallow = l_oracle_at_depth(s, chi, depth)?;
    let (deep, remainder) = l_oracle_raw(s, chi, 2 * depth)?;
    let scale = (-s * (q as f64).ln()).exp().norm();
    Ok(LValueResult {
        s_re: s.re,
        s_im: s.im,
        character: chi.id(),
        value_re: deep.re,
        value_im: deep.im,
        method: LMethod::Oracle,
        error_estimate: (deep - shallow).norm() + remainder * scale,
    })
}

fn l_oracle_at_depth(s: Complex64, chi: &DirichletCharacter, depth: usize) -> Result<Complex64> {
    Ok(l_oracle_raw(s, chi, depth)?.0)
}

fn l_oracle_raw(
    s: Complex64,
    chi: &DirichletCharacter,
    depth: usize,
) -> Result<(Complex64, f64)> {
    let q = chi.q();
    let mut total = Complex64::new(0.0, 0.0);
    let mut remainder = 0.0;
    for a in 1..=q {
        let c = chi.eval(a as i64);
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let h = hurwitz_zeta_with_depth(s, a as f64 / q as f64, depth)?;
        total += c * h.value;
        remainder += h.error_estimate;
    }
    let value = (-s * (q as f64).ln()).exp() * total;
    Ok((value, remainder))
}

/// Completed L-function at `1/2 + s`:
/// `Lambda(1/2 + s, chi) = (q/pi)^{s/2} Gamma(1/4 + s/2 + parity/2) L(1/2 + s, chi)`.
/// Requires a primitive character.
pub fn completed_lambda(s: Complex64, chi: &DirichletCharacter) -> Result<Complex64> {
    if !chi.is_primitive() {
        return Err(Error::NotPrimitive(chi.id()));
    }
    let q = chi.q() as f64;
    let gamma_arg = Complex64::new(0.25 + 0.5 * f64::from(chi.parity()), 0.0) + 0.5 * s;
    let log_gamma = super::gamma::log_gamma(gamma_arg)?;
    let l = l_oracle(Complex64::new(0.5, 0.0) + s, chi)?.value();
    Ok((0.5 * s * (q / PI).ln() + log_gamma).exp() * l)
}

/// Relative residual of the reflection
/// `Lambda(1/2 + s, chi) = tau(chi) / (i^parity sqrt q) * Lambda(1/2 - s, conj chi)`.
pub fn functional_equation_residual(s: Complex64, chi: &DirichletCharacter) -> Result<f64> {
    if !chi.is_primitive() {
        return Err(Error::NotPrimitive(chi.id()));
    }
    let lhs = completed_lambda(s, chi)?;
    let rhs_lambda = completed_lambda(-s, &chi.conjugate())?;
    let i_pow = if chi.parity() == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    };
    let root_number = gauss_sum(chi) / (i_pow * (chi.q() as f64).sqrt());
    Ok((lhs - root_number * rhs_lambda).norm() / lhs.norm())
}

/// Hard ceiling on the smoothed-series truncation.
const MAX_TRUNCATION: u64 = 1 << 24;

/// Reusable evaluator of the smoothed series for one primitive character.
///
/// Holds the character value table and the lazily grown `ln` / `1/sqrt`
/// tables so that repeated evaluations at many `t` (panel quadrature) do not
/// re-derive them.
pub struct LSquareEngine {
    q: u64,
    parity: u8,
    eps: f64,
    chi_table: Vec<Complex64>,
    ln: Vec<f64>,
    rsqrt: Vec<f64>,
    // per-t scratch
    table: Option<WeightTable>,
    weights: Vec<f64>,
    phases: Vec<Complex64>,
}

impl LSquareEngine {
    pub fn new(chi: &DirichletCharacter, eps: f64) -> Result<LSquareEngine> {
        if !chi.is_primitive() {
            return Err(Error::NotPrimitive(chi.id()));
        }
        if !(eps >= 1e-9) {
            return Err(Error::domain(format!("eps must be at least 1e-9, got {eps}")));
        }
        Ok(LSquareEngine {
            q: chi.q(),
            parity: chi.parity(),
            eps,
            chi_table: chi.value_table(),
            ln: vec![0.0],
            rsqrt: vec![0.0],
            table: None,
            weights: vec![0.0],
            phases: vec![Complex64::new(0.0, 0.0)],
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `|L(1/2 + it, chi)|^2` via the smoothed series.
    pub fn eval(&mut self, t: f64) -> Result<f64> {
        self.eval_with_cutoff(t, None)
    }

    /// The head/tail split at cutoff `z`: `A` sums pairs with `ab <= z`, and
    /// `B` is the remainder of the full smoothed value, so that
    /// `2 (A + B) = |L|^2`.
    pub fn eval_split(&mut self, t: f64, z: f64) -> Result<(Complex64, Complex64)> {
        let z_floor = if z < 1.0 { 0 } else { z.floor() as u64 };
        let full = self.eval_with_cutoff(t, Some(z_floor))?;
        let head = if z_floor > 0 {
            self.head_sum(z_floor)
        } else {
            Complex64::new(0.0, 0.0)
        };
        let b = Complex64::new(0.5 * full, 0.0) - head;
        Ok((head, b))
    }

    /// Returns `2 * S` (the smoothed `|L|^2`).
    fn eval_with_cutoff(&mut self, t: f64, head_cutoff: Option<u64>) -> Result<f64> {
        self.table = Some(WeightTable::new(WeightKernel::new(t, self.parity)));
        // weight and phase caches are only valid for one t
        self.weights.truncate(1);
        self.phases.truncate(1);
        let tau = t.abs() + 2.0;
        let qf = self.q as f64;
        // initial truncation: N = (q tau / pi) max(4, eps^{-1/2} / tau)
        let factor = (self.eps.powf(-0.5) / tau).max(4.0);
        let mut n = ((qf * tau / PI) * factor).ceil() as u64;
        n = n.max(16);
        if let Some(z) = head_cutoff {
            n = n.max(z);
        }
        self.extend_tables(n);
        let mut total = KahanSum::new();
        total.add(self.pair_sum(0, n));
        // double until the last dyadic block is negligible
        loop {
            let next = n
                .checked_mul(2)
                .filter(|&m| m <= MAX_TRUNCATION)
                .ok_or_else(|| {
                    Error::Budget(format!(
                        "smoothed series did not settle below eps by ab = {MAX_TRUNCATION}"
                    ))
                })?;
            self.extend_tables(next);
            let block = self.pair_sum(n, next);
            total.add(block);
            n = next;
            if (2.0 * block).abs() < self.eps / 4.0 {
                break;
            }
        }
        let mut value = 2.0 * total.value();
        if self.q == 1 {
            value -= riemann_pole_correction(t)?;
        }
        Ok(value)
    }

    /// Grow ln, 1/sqrt, weight and phase tables to index `n` for the current
    /// t (the weight table and phases are rebuilt at each eval).
    fn extend_tables(&mut self, n: u64) {
        let n = n as usize;
        let old = self.ln.len();
        if n + 1 > old {
            for k in old..=n {
                self.ln.push((k as f64).ln());
                self.rsqrt.push(1.0 / (k as f64).sqrt());
            }
        }
        let t_old = self.weights.len();
        if n + 1 > t_old {
            let qf = self.q as f64;
            let table = self.table.as_mut().expect("table built per eval");
            let t = table.kernel().t();
            for k in t_old..=n {
                self.weights.push(table.eval(PI * k as f64 / qf));
                // e^{-i t ln k}
                self.phases.push(Complex64::from_polar(1.0, -t * self.ln[k]));
            }
        }
    }

    /// Sum of the symmetrized series terms over pairs with `lo < ab <= hi`.
    fn pair_sum(&self, lo: u64, hi: u64) -> f64 {
        let q = self.q as usize;
        let zero = Complex64::new(0.0, 0.0);
        let mut acc = KahanSum::new();
        let mut a = 1u64;
        while a * a <= hi {
            let chi_a = self.chi_table[a as usize % q];
            if chi_a != zero {
                let b_lo = (lo / a + 1).max(a);
                let b_hi = hi / a;
                let pa = self.phases[a as usize];
                let ra = self.rsqrt[a as usize];
                let mut rb = b_lo as usize % q;
                for b in b_lo..=b_hi {
                    let chi_b = self.chi_table[rb];
                    rb += 1;
                    if rb == q {
                        rb = 0;
                    }
                    if chi_b == zero {
                        continue;
                    }
                    let u = chi_a * chi_b.conj();
                    let pb = self.phases[b as usize];
                    // Re[u * pa * conj(pb)]
                    let pr = pa.re * pb.re + pa.im * pb.im;
                    let pi_ = pa.im * pb.re - pa.re * pb.im;
                    let re = u.re * pr - u.im * pi_;
                    let term = re * self.weights[(a * b) as usize] * ra * self.rsqrt[b as usize];
                    acc.add(if a == b { term } else { 2.0 * term });
                }
            }
            a += 1;
        }
        acc.value()
    }

    /// Complex head sum over ordered pairs with `ab <= z`.
    fn head_sum(&self, z: u64) -> Complex64 {
        let q = self.q;
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        for a in 1..=z {
            let chi_a = self.chi_table[(a % q) as usize];
            if chi_a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let pa = self.phases[a as usize];
            let ra = self.rsqrt[a as usize];
            for b in 1..=z / a {
                let chi_b = self.chi_table[(b % q) as usize];
                if chi_b == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let u = chi_a * chi_b.conj();
                let pb = self.phases[b as usize];
                let phase = pa * pb.conj();
                let term = u * phase * (self.weights[(a * b) as usize] * ra * self.rsqrt[b as usize]);
                re.add(term.re);
                im.add(term.im);
            }
        }
        Complex64::new(re.value(), im.value())
    }
}

/// The modulus-one identity needs extra residue terms: the completed zeta
/// has simple poles at arguments 1 and 0 (residues +1 and -1 in the series
/// normalization, which carries an extra sqrt(pi) against the classical
/// completed function), and the contour shift crosses all four images. For
/// q > 1 the completed L-function is entire and nothing is collected.
///
/// `|zeta(1/2 + it)|^2 = (series) - R(t)` with
/// `R(t) = sqrt(pi) * 2 Re[ Lam(1 - 2it) e^{z1^2} / z1 - Lam(-2it) e^{z2^2} / z2 ] / D`,
/// `z1 = 1/2 - it`, `z2 = -1/2 - it`, `D = |Gamma(1/4 + it/2)|^2`, and
/// `Lam(s) = pi^{-s/2} Gamma(s/2) zeta(s)`.
fn riemann_pole_correction(t: f64) -> Result<f64> {
    use super::gamma::log_gamma;
    use super::hurwitz::hurwitz_zeta;
    let denom = (2.0 * log_gamma(Complex64::new(0.25, 0.5 * t))?.re).exp();
    let sqrt_pi = PI.sqrt();
    if t.abs() < 1e-6 {
        // merged double poles; the limit in closed form (the error of using
        // it below |t| = 1e-6 is under 5e-12)
        let b = crate::predict::EULER_GAMMA - (4.0 * PI).ln() - 1.0;
        return Ok(sqrt_pi * 4.0 * 0.25f64.exp() * b / denom);
    }
    let classical_lambda = |s: Complex64| -> Result<Complex64> {
        let zeta = hurwitz_zeta(s, 1.0)?.value;
        let half = 0.5 * s;
        let log_gamma_half = if half.re > 0.0 {
            log_gamma(half)?
        } else {
            // Gamma(w) = Gamma(w + 1) / w continues across Re w = 0
            log_gamma(half + 1.0)? - half.ln()
        };
        Ok((-half * PI.ln() + log_gamma_half).exp() * zeta)
    };
    let two_it = Complex64::new(0.0, 2.0 * t);
    let z1 = Complex64::new(0.5, -t);
    let z2 = Complex64::new(-0.5, -t);
    let r1 = classical_lambda(Complex64::new(1.0, 0.0) - two_it)? * (z1 * z1).exp() / z1;
    let r2 = -classical_lambda(-two_it)? * (z2 * z2).exp() / z2;
    Ok(sqrt_pi * 2.0 * (r1.re + r2.re) / denom)
}

/// One-shot smoothed `|L(1/2 + it, chi)|^2`.
pub fn smoothed_l_square(t: f64, chi: &DirichletCharacter, eps: f64) -> Result<f64> {
    LSquareEngine::new(chi, eps)?.eval(t)
}

/// `|L|^2` as an [`LValueResult`] (the value field carries the real square).
pub fn smoothed_l_square_result(
    t: f64,
    chi: &DirichletCharacter,
    eps: f64,
) -> Result<LValueResult> {
    let v = smoothed_l_square(t, chi, eps)?;
    Ok(LValueResult {
        s_re: 0.5,
        s_im: t,
        character: chi.id(),
        value_re: v,
        value_im: 0.0,
        method: LMethod::Smoothed,
        error_estimate: eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{build_group, enumerate_characters};
    use approx::assert_abs_diff_eq;

    fn primitive(q: u64, idx: usize) -> DirichletCharacter {
        enumerate_characters(&build_group(q).unwrap(), true).remove(idx)
    }

    #[test]
    fn oracle_matches_zeta_at_2() {
        let chi1 = primitive(1, 0);
        let l = l_oracle(Complex64::new(2.0, 0.0), &chi1).unwrap();
        assert_abs_diff_eq!(l.value_re, PI * PI / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(l.value_im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn oracle_rejects_pole() {
        let chi1 = primitive(1, 0);
        assert!(l_oracle(Complex64::new(1.0, 0.0), &chi1).is_err());
    }

    #[test]
    fn oracle_matches_dirichlet_series_at_3() {
        let s = Complex64::new(3.0, 0.0);
        for idx in 0..3 {
            let chi = primitive(5, idx);
            let oracle = l_oracle(s, &chi).unwrap().value();
            let mut series = Complex64::new(0.0, 0.0);
            for n in 1..200_000i64 {
                series += chi.eval(n) * (-s * (n as f64).ln()).exp();
            }
            assert!((oracle - series).norm() < 1e-10, "idx={idx}");
        }
    }

    #[test]
    fn oracle_error_estimate_bounds_depth_difference() {
        let s = Complex64::new(0.5, 7.0);
        let chi = primitive(7, 1);
        let r = l_oracle(s, &chi).unwrap();
        let shallow = l_oracle_at_depth(s, &chi, default_depth(s)).unwrap();
        assert!((r.value() - shallow).norm() <= r.error_estimate);
    }

    #[test]
    fn oracle_known_value_mod4() {
        // L(1/2, chi_4) = 0.66769...
        let chi4 = primitive(4, 0);
        let l = l_oracle(Complex64::new(0.5, 0.0), &chi4).unwrap();
        assert_abs_diff_eq!(l.value_re, 0.66769, epsilon = 5e-6);
        assert_abs_diff_eq!(l.value_im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn lambda_requires_primitivity() {
        // the principal character mod 4 is induced from modulus 1
        let group = build_group(4).unwrap();
        let principal = enumerate_characters(&group, false)
            .into_iter()
            .find(|c| c.is_principal())
            .unwrap();
        assert!(completed_lambda(Complex64::new(0.2, 0.0), &principal).is_err());
        assert!(functional_equation_residual(Complex64::new(0.2, 0.0), &principal).is_err());
    }

    #[test]
    fn functional_equation_quadratic_mod5() {
        // real primitive character mod 5, root number +1: s = 0 is exact
        let quad = enumerate_characters(&build_group(5).unwrap(), true)
            .into_iter()
            .find(|c| c.is_real())
            .unwrap();
        let r = functional_equation_residual(Complex64::new(0.0, 0.0), &quad).unwrap();
        assert!(r < 1e-12, "residual={r}");
    }

    #[test]
    fn functional_equation_complex_point() {
        let chi = primitive(5, 0);
        let s = Complex64::new(0.3, 2.0);
        let r = functional_equation_residual(s, &chi).unwrap();
        assert!(r < 1e-8, "residual={r}");
    }

    #[test]
    fn functional_equation_conjugation_symmetry() {
        let chi = primitive(7, 2);
        let s = Complex64::new(0.15, 1.3);
        let a = functional_equation_residual(s, &chi).unwrap();
        let b = functional_equation_residual(s.conj(), &chi.conjugate()).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }

    #[test]
    fn smoothed_requires_primitive_and_sane_eps() {
        let group = build_group(8).unwrap();
        let imprimitive = enumerate_characters(&group, false)
            .into_iter()
            .find(|c| !c.is_primitive())
            .unwrap();
        assert!(LSquareEngine::new(&imprimitive, 1e-6).is_err());
        let chi = primitive(5, 0);
        assert!(LSquareEngine::new(&chi, 1e-10).is_err());
    }

    #[test]
    fn smoothed_matches_oracle_mod5() {
        let eps = 1e-6;
        for idx in 0..3 {
            let chi = primitive(5, idx);
            let t = 1.0;
            let smoothed = smoothed_l_square(t, &chi, eps).unwrap();
            let oracle = l_oracle(Complex64::new(0.5, t), &chi).unwrap().value().norm_sqr();
            assert!(
                (smoothed - oracle).abs() < 1e-5,
                "idx={idx} smoothed={smoothed} oracle={oracle}"
            );
        }
    }

    #[test]
    fn smoothed_is_essentially_nonnegative() {
        let chi = primitive(5, 0);
        for &t in &[0.0, 0.5, 2.0, 9.0] {
            let v = smoothed_l_square(t, &chi, 1e-6).unwrap();
            assert!(v > -1e-6, "t={t} v={v}");
        }
    }

    #[test]
    fn smoothed_conjugate_reflection() {
        let eps = 1e-7;
        let chi = primitive(5, 0);
        let conj = chi.conjugate();
        for &t in &[0.7, 3.3] {
            let a = smoothed_l_square(t, &chi, eps).unwrap();
            let b = smoothed_l_square(-t, &conj, eps).unwrap();
            assert!((a - b).abs() < 2.0 * eps, "t={t} a={a} b={b}");
        }
    }

    #[test]
    fn split_reconstructs_and_degenerates() {
        let chi = primitive(5, 0);
        let mut engine = LSquareEngine::new(&chi, 1e-6).unwrap();
        let t = 3.0;
        let full = engine.eval(t).unwrap();
        // Z = q T / 2^omega with T = 10
        let z = 5.0 * 10.0 / 1.0;
        let (a, b) = engine.eval_split(t, z).unwrap();
        let recon = 2.0 * (a + b);
        assert!((recon.re - full).abs() < 1e-6, "recon={} full={full}", recon.re);
        assert!(recon.im.abs() < 1e-9);
        // Z < 1: empty head
        let (a0, b0) = engine.eval_split(t, 0.5).unwrap();
        assert_eq!(a0, Complex64::new(0.0, 0.0));
        assert!((2.0 * b0.re - full).abs() < 1e-6);
        // Z at the truncation bound: tail below eps
        let (_, b_big) = engine.eval_split(t, 1e6).unwrap();
        assert!(b_big.norm() < 1e-6, "B={b_big}");
    }

    #[test]
    fn smoothed_handles_the_riemann_case() {
        // q = 1: |zeta(1/2 + it)|^2 requires the pole-residue terms
        let chi1 = primitive(1, 0);
        for &t in &[0.7, 2.0, 6.0] {
            let smoothed = smoothed_l_square(t, &chi1, 1e-6).unwrap();
            let oracle = l_oracle(Complex64::new(0.5, t), &chi1).unwrap().value().norm_sqr();
            assert!(
                (smoothed - oracle).abs() < 1e-5,
                "t={t} smoothed={smoothed} oracle={oracle}"
            );
        }
        // |zeta(1/2)|^2 = 1.4603545...^2 through the merged-pole limit
        let at_zero = smoothed_l_square(0.0, &chi1, 1e-7).unwrap();
        assert!((at_zero - 1.4603545088095868f64.powi(2)).abs() < 1e-6, "{at_zero}");
    }
}
