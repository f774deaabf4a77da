//! Power moments of `L(1/2 + it, chi)` over `t in [0, T]` and primitive
//! characters mod q, by fixed-width Gauss-Legendre panels, plus the
//! head/tail decomposition experiment.
//!
//! Work is data-parallel over (character, panel) tasks; partial results are
//! collected into a vector indexed by task and reduced sequentially in
//! lexicographic (character, panel) order with compensated summation, so the
//! output is bit-identical for any worker count.

use crate::analytic::LSquareEngine;
use crate::arith;
use crate::characters::{build_group, enumerate_characters, DirichletCharacter};
use crate::numeric::{gauss_legendre, KahanSum};
use crate::{predict, Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

/// Moment order; the experiments cover the second and fourth powers only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MomentOrder {
    Second,
    Fourth,
}

impl MomentOrder {
    pub fn as_u8(self) -> u8 {
        match self {
            MomentOrder::Second => 2,
            MomentOrder::Fourth => 4,
        }
    }

    pub fn from_u8(v: u8) -> Result<MomentOrder> {
        match v {
            2 => Ok(MomentOrder::Second),
            4 => Ok(MomentOrder::Fourth),
            other => Err(Error::InvalidParameter(format!(
                "order must be 2 or 4, got {other}"
            ))),
        }
    }
}

/// One moment request.
#[derive(Debug, Clone, Serialize)]
pub struct MomentSpec {
    pub q: u64,
    pub t_max: f64,
    pub order: MomentOrder,
    pub panel_width: f64,
    pub points_per_panel: usize,
    pub eps_series: f64,
    pub parity_filter: Option<u8>,
}

impl MomentSpec {
    pub fn new(q: u64, t_max: f64, order: MomentOrder) -> MomentSpec {
        MomentSpec {
            q,
            t_max,
            order,
            panel_width: 0.25,
            points_per_panel: 8,
            eps_series: 1e-4,
            parity_filter: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.q == 0 {
            return Err(Error::domain("modulus must be positive"));
        }
        if !(self.t_max >= 0.0) {
            return Err(Error::domain("T must be nonnegative"));
        }
        if !(self.panel_width > 0.0 && self.panel_width <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "panel width must lie in (0, 1], got {}",
                self.panel_width
            )));
        }
        if self.points_per_panel < 4 {
            return Err(Error::InvalidParameter(format!(
                "points per panel must be at least 4, got {}",
                self.points_per_panel
            )));
        }
        if let Some(p) = self.parity_filter {
            if p > 1 {
                return Err(Error::InvalidParameter("parity filter must be 0 or 1".into()));
            }
        }
        Ok(())
    }
}

/// An empirical moment with its predicted main term.
#[derive(Debug, Clone, Serialize)]
pub struct MomentResult {
    pub q: u64,
    pub t_max: f64,
    pub order: u8,
    pub empirical: f64,
    pub predicted: f64,
    pub ratio: f64,
    pub char_count: u64,
    pub quadrature_error: f64,
}

/// Head/tail cutoffs of the decomposition: `Z = q T / 2^omega(q)` and the
/// inner diagonal cutoff `Z0 = Z / 9^omega(q)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SplitCutoffs {
    pub z: f64,
    pub z0: f64,
}

impl SplitCutoffs {
    pub fn new(q: u64, t_max: f64) -> Result<SplitCutoffs> {
        let f = arith::factorize(q)?;
        let omega = arith::omega(&f);
        let z = q as f64 * t_max / 2f64.powi(omega as i32);
        let z0 = z / 9f64.powi(omega as i32);
        debug_assert!(z0 <= z);
        Ok(SplitCutoffs { z, z0 })
    }
}

/// The panels covering `[t0, t1]`; the last one may be narrower.
fn panels(t0: f64, t1: f64, width: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut a = t0;
    while a < t1 - 1e-12 {
        let b = (a + width).min(t1);
        out.push((a, b));
        a = b;
    }
    out
}

/// Integrals of `|L|^2` and `|L|^4` over one panel.
fn eval_panel(
    engine: &mut LSquareEngine,
    nodes: &[f64],
    gl_weights: &[f64],
    a: f64,
    b: f64,
) -> Result<(f64, f64)> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut s2 = 0.0;
    let mut s4 = 0.0;
    for (&x, &w) in nodes.iter().zip(gl_weights) {
        let v = engine.eval(mid + half * x)?;
        s2 += w * v;
        s4 += w * v * v;
    }
    Ok((half * s2, half * s4))
}

#[derive(Debug, Clone, Copy)]
struct PanelOut {
    second: f64,
    fourth: f64,
    err2: f64,
    err4: f64,
}

/// Scale from the sampled panel-halving gaps (every tenth panel) to the
/// reported error: ten for the sampling share, two as a safety margin for
/// panels the sample missed.
const ERROR_EXTRAPOLATION: f64 = 20.0;

/// One panel's integrals; every tenth panel is re-integrated with two half
/// panels to sample the quadrature error.
fn panel_with_error(
    engine: &mut LSquareEngine,
    nodes: &[f64],
    gl_weights: &[f64],
    a: f64,
    b: f64,
    sampled: bool,
) -> Result<PanelOut> {
    let (s2, s4) = eval_panel(engine, nodes, gl_weights, a, b)?;
    let (err2, err4) = if sampled {
        let mid = 0.5 * (a + b);
        let (l2, l4) = eval_panel(engine, nodes, gl_weights, a, mid)?;
        let (r2, r4) = eval_panel(engine, nodes, gl_weights, mid, b)?;
        (
            (s2 - l2 - r2).abs() * ERROR_EXTRAPOLATION,
            (s4 - l4 - r4).abs() * ERROR_EXTRAPOLATION,
        )
    } else {
        (0.0, 0.0)
    };
    Ok(PanelOut { second: s2, fourth: s4, err2, err4 })
}

/// Panel outputs for one character over `[t0, t1]`, in panel order.
fn char_panels(
    chi: &DirichletCharacter,
    t0: f64,
    t1: f64,
    spec: &MomentSpec,
) -> Result<Vec<PanelOut>> {
    let (nodes, gl_weights) = gauss_legendre(spec.points_per_panel);
    let mut engine = LSquareEngine::new(chi, spec.eps_series)?;
    panels(t0, t1, spec.panel_width)
        .iter()
        .enumerate()
        .map(|(idx, &(a, b))| {
            panel_with_error(&mut engine, &nodes, &gl_weights, a, b, idx % 10 == 0)
        })
        .collect()
}

/// `integral over [0, T] of |L(1/2 + it, chi)|^order dt` with a
/// panel-halving error estimate. Requires a primitive character.
pub fn integrate_power(
    chi: &DirichletCharacter,
    t_max: f64,
    order: MomentOrder,
    spec: &MomentSpec,
) -> Result<(f64, f64)> {
    integrate_power_range(chi, 0.0, t_max, order, spec)
}

/// Same integral over `[t0, t1]`, panels laid from `t0`.
pub fn integrate_power_range(
    chi: &DirichletCharacter,
    t0: f64,
    t1: f64,
    order: MomentOrder,
    spec: &MomentSpec,
) -> Result<(f64, f64)> {
    if !chi.is_primitive() {
        return Err(Error::NotPrimitive(chi.id()));
    }
    if !(t1 >= t0) {
        return Err(Error::domain("integration range is reversed"));
    }
    spec.validate()?;
    let mut value = KahanSum::new();
    let mut err = KahanSum::new();
    for p in char_panels(chi, t0, t1, spec)? {
        match order {
            MomentOrder::Second => {
                value.add(p.second);
                err.add(p.err2);
            }
            MomentOrder::Fourth => {
                value.add(p.fourth);
                err.add(p.err4);
            }
        }
    }
    Ok((value.value(), err.value()))
}

/// The characters a spec sums over, in enumeration order.
fn selected_characters(spec: &MomentSpec) -> Result<Vec<DirichletCharacter>> {
    let group = build_group(spec.q)?;
    let mut chars = enumerate_characters(&group, true);
    if let Some(parity) = spec.parity_filter {
        chars.retain(|c| c.parity() == parity);
    }
    Ok(chars)
}

/// Both moment orders in one pass over the (character, panel) task grid.
pub fn moment_pair(spec: &MomentSpec) -> Result<(MomentResult, MomentResult)> {
    spec.validate()?;
    let chars = selected_characters(spec)?;
    let panel_list = panels(0.0, spec.t_max, spec.panel_width);
    let tasks: Vec<(usize, usize)> = (0..chars.len())
        .flat_map(|c| (0..panel_list.len()).map(move |p| (c, p)))
        .collect();
    let results: Vec<Result<PanelOut>> = tasks
        .par_iter()
        .map(|&(c, p)| {
            let (nodes, gl_weights) = gauss_legendre(spec.points_per_panel);
            let mut engine = LSquareEngine::new(&chars[c], spec.eps_series)?;
            let (a, b) = panel_list[p];
            panel_with_error(&mut engine, &nodes, &gl_weights, a, b, p % 10 == 0)
        })
        .collect();
    let mut v2 = KahanSum::new();
    let mut v4 = KahanSum::new();
    let mut e2 = KahanSum::new();
    let mut e4 = KahanSum::new();
    for r in results {
        let p = r?;
        v2.add(p.second);
        v4.add(p.fourth);
        e2.add(p.err2);
        e4.add(p.err4);
    }
    let char_count = chars.len() as u64;
    let f = arith::factorize(spec.q)?;
    let phi_star = arith::phi_star(&f);
    // predictions refer to the full primitive family; under a parity filter
    // they are scaled by the share of characters kept
    let share = if phi_star == 0 { 0.0 } else { char_count as f64 / phi_star as f64 };
    let predicted4 = predict::fourth_moment_main(spec.q, spec.t_max) * share;
    let predicted2 = predict::second_moment_main(spec.q, spec.t_max) * char_count as f64;
    let make = |order: MomentOrder, empirical: f64, predicted: f64, err: f64| MomentResult {
        q: spec.q,
        t_max: spec.t_max,
        order: order.as_u8(),
        empirical,
        predicted,
        ratio: empirical / predicted,
        char_count,
        quadrature_error: err,
    };
    Ok((
        make(MomentOrder::Second, v2.value(), predicted2, e2.value()),
        make(MomentOrder::Fourth, v4.value(), predicted4, e4.value()),
    ))
}

/// The moment of the order selected in the request.
pub fn moment(spec: &MomentSpec) -> Result<MomentResult> {
    let (second, fourth) = moment_pair(spec)?;
    Ok(match spec.order {
        MomentOrder::Second => second,
        MomentOrder::Fourth => fourth,
    })
}

/// Head/tail split of the smoothed series at cutoff `z`: the head `A` sums
/// pairs with `ab <= z`, and `2 (A + B)` rebuilds `|L(1/2 + it, chi)|^2`.
pub fn series_split(
    t: f64,
    chi: &DirichletCharacter,
    z: f64,
    eps: f64,
) -> Result<(Complex64, Complex64)> {
    LSquareEngine::new(chi, eps)?.eval_split(t, z)
}

/// The decomposition experiment: `|L|^4 = 4 (A^2 + 2AB + B^2)` integrated
/// over `[0, T]` and summed over primitive characters.
#[derive(Debug, Clone, Serialize)]
pub struct DecomposedFourthMoment {
    pub q: u64,
    pub t_max: f64,
    pub cutoffs: SplitCutoffs,
    /// `sum over chi of integral of A^2`.
    pub a_square: f64,
    /// `sum over chi of integral of A B`.
    pub cross: f64,
    /// `sum over chi of integral of B^2`.
    pub b_square: f64,
    /// `4 (a_square + 2 cross + b_square)`.
    pub total: f64,
    /// The fourth moment computed independently by [`moment`].
    pub fourth_moment: f64,
    /// `a_square` against the head-square main term.
    pub head_main_ratio: f64,
    pub char_count: u64,
}

pub fn decomposed_fourth_moment(q: u64, t_max: f64, spec: &MomentSpec) -> Result<DecomposedFourthMoment> {
    spec.validate()?;
    let cutoffs = SplitCutoffs::new(q, t_max)?;
    let mut spec = spec.clone();
    spec.q = q;
    spec.t_max = t_max;
    let chars = selected_characters(&spec)?;
    let panel_list = panels(0.0, t_max, spec.panel_width);
    let tasks: Vec<(usize, usize)> = (0..chars.len())
        .flat_map(|c| (0..panel_list.len()).map(move |p| (c, p)))
        .collect();
    let results: Vec<Result<(f64, f64, f64)>> = tasks
        .par_iter()
        .map(|&(c, p)| {
            let (nodes, gl_weights) = gauss_legendre(spec.points_per_panel);
            let mut engine = LSquareEngine::new(&chars[c], spec.eps_series)?;
            let (a, b) = panel_list[p];
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            let mut sa2 = 0.0;
            let mut sab = 0.0;
            let mut sb2 = 0.0;
            for (&x, &w) in nodes.iter().zip(&gl_weights) {
                let (head, tail) = engine.eval_split(mid + half * x, cutoffs.z)?;
                let (av, bv) = (head.re, tail.re);
                sa2 += w * av * av;
                sab += w * av * bv;
                sb2 += w * bv * bv;
            }
            Ok((half * sa2, half * sab, half * sb2))
        })
        .collect();
    let mut a2 = KahanSum::new();
    let mut ab = KahanSum::new();
    let mut b2 = KahanSum::new();
    for r in results {
        let (x, y, z) = r?;
        a2.add(x);
        ab.add(y);
        b2.add(z);
    }
    let total = 4.0 * (a2.value() + 2.0 * ab.value() + b2.value());
    let mut fourth_spec = spec.clone();
    fourth_spec.order = MomentOrder::Fourth;
    let fourth = moment(&fourth_spec)?;
    Ok(DecomposedFourthMoment {
        q,
        t_max,
        cutoffs,
        a_square: a2.value(),
        cross: ab.value(),
        b_square: b2.value(),
        total,
        fourth_moment: fourth.empirical,
        head_main_ratio: a2.value() / predict::truncated_square_main(q, t_max),
        char_count: chars.len() as u64,
    })
}

/// Run `f` inside a dedicated thread pool of `workers` threads. Results are
/// bitwise independent of the worker count because all reductions happen in
/// task order.
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool")
        .install(f)
}
