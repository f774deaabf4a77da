//! Dirichlet L-functions on the critical line and their power moments.
//!
//! The crate computes `|L(1/2 + it, chi)|` two independent ways (a Hurwitz-zeta
//! oracle and a smoothed double Dirichlet series driven by a contour-integral
//! cutoff weight), integrates the second and fourth powers over `t in [0, T]`
//! averaged over the primitive characters mod `q`, and checks the supporting
//! arithmetic identities (orthogonality of primitive characters, the diagonal
//! parametrization of `ac = bd`, restricted harmonic sums) by brute force.
//!
//! Modules:
//! - [`arith`]: exact integer kernel (factorization, multiplicative functions)
//! - [`characters`]: the character group mod q, conductors, parity, Gauss sums
//! - [`analytic`]: log-gamma, the cutoff weight, Hurwitz zeta, L-values
//! - [`moments`]: panel quadrature of |L|^k and the head/tail decomposition
//! - [`predict`]: closed-form main-term predictors
//! - [`verify`]: brute-force identity checks producing [`verify::LemmaReport`]s

pub mod analytic;
pub mod arith;
pub mod characters;
pub mod error;
pub mod moments;
pub mod numeric;
pub mod predict;
pub mod verify;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
