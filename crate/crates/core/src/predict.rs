//! Closed-form main-term predictors for the moment experiments, plus the
//! classical comparison scales.

use crate::arith::{self, Factorization};
use serde::Serialize;

/// Euler's constant.
#[allow(clippy::excessive_precision)]
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_86;

/// Main term of the fourth moment summed over primitive characters mod q and
/// integrated over t in [0, T]:
/// `phi*(q) T / (2 pi^2) * prod_{p | q} (1 - 1/p)^3 / (1 + 1/p) * log(qT)^4`.
pub fn fourth_moment_main(q: u64, t_max: f64) -> f64 {
    let f = factorize(q);
    let phi_star = arith::phi_star(&f) as f64;
    let euler = arith::fourth_moment_euler_product(&f);
    let log_qt = (q as f64 * t_max).ln();
    phi_star * t_max / (2.0 * std::f64::consts::PI.powi(2)) * euler * log_qt.powi(4)
}

/// Main term of the mean square of the truncated (head) series; exactly a
/// quarter of [`fourth_moment_main`]. Exposed separately because the head
/// decomposition experiment compares against it directly.
pub fn truncated_square_main(q: u64, t_max: f64) -> f64 {
    fourth_moment_main(q, t_max) / 4.0
}

/// Second-moment main term for one primitive character (Motohashi's
/// asymptotic): `phi(q) T / q * (log(qT / 2 pi) + 2 gamma + 2 sum_{p|q} log p / (p-1))`.
pub fn second_moment_main(q: u64, t_max: f64) -> f64 {
    let f = factorize(q);
    let phi = arith::euler_phi(&f) as f64;
    let prime_sum: f64 = f.primes().map(|p| (p as f64).ln() / (p as f64 - 1.0)).sum();
    let log_term = (q as f64 * t_max / (2.0 * std::f64::consts::PI)).ln();
    phi * t_max / q as f64 * (log_term + 2.0 * EULER_GAMMA + 2.0 * prime_sum)
}

/// The classical upper-bound scale `phi(q) T log(qT)^4` (Montgomery), which
/// overshoots the truth by about `(q / phi(q))^5`.
pub fn montgomery_scale(q: u64, t_max: f64) -> f64 {
    let f = factorize(q);
    arith::euler_phi(&f) as f64 * t_max * (q as f64 * t_max).ln().powi(4)
}

/// All predictors for one (q, T), as rendered by the `predict` subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct PredictionTable {
    pub q: u64,
    pub t_max: f64,
    /// Fourth-moment main term (sum over primitive characters).
    pub fourth_moment: f64,
    /// Head-square main term; exactly `fourth_moment / 4`.
    pub truncated_square: f64,
    /// Per-character second-moment main term.
    pub second_moment: f64,
    /// Montgomery upper-bound scale `phi(q) T log(qT)^4`.
    pub montgomery_scale: f64,
    /// `(q / phi(q))^5`, the factor by which the classical bound overshoots.
    pub excess_ratio: f64,
    /// False when (q, T) lies outside the q, T >= 2 hypothesis of the
    /// asymptotics.
    pub in_hypothesis: bool,
}

impl PredictionTable {
    pub fn new(q: u64, t_max: f64) -> PredictionTable {
        let f = factorize(q);
        let phi = arith::euler_phi(&f) as f64;
        PredictionTable {
            q,
            t_max,
            fourth_moment: fourth_moment_main(q, t_max),
            truncated_square: truncated_square_main(q, t_max),
            second_moment: second_moment_main(q, t_max),
            montgomery_scale: montgomery_scale(q, t_max),
            excess_ratio: (q as f64 / phi).powi(5),
            in_hypothesis: q >= 2 && t_max >= 2.0,
        }
    }
}

fn factorize(q: u64) -> Factorization {
    arith::factorize(q).expect("positive modulus")
}
