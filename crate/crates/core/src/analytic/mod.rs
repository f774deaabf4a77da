//! Analytic kernels: log-gamma, the contour cutoff weight, Hurwitz zeta,
//! and the two routes to `|L(1/2 + it, chi)|`.

pub mod gamma;
pub mod hurwitz;
pub mod lvalue;
pub mod weight;

pub use gamma::{digamma, log_gamma};
pub use hurwitz::{hurwitz_zeta, HurwitzEval};
pub use lvalue::{
    completed_lambda, functional_equation_residual, l_oracle, smoothed_l_square, LMethod,
    LSquareEngine, LValueResult,
};
pub use weight::{weight, weight_dt, weight_shifted, WeightEval, WeightKernel};
