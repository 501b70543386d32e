//! Numerical laboratory for the value-distribution of the Riemann zeta-function
//! and of functions satisfying a Riemann-type functional equation, near the
//! critical line.
//!
//! The crate is organized around the objects it computes with:
//!
//! * [`coeffs`]: exact algebra on Dirichlet-series coefficients (convolution,
//!   generalized divisor functions, coefficients of powers, logarithms,
//!   logarithmic derivatives and derivatives of an Euler product).
//! * [`funceq`]: the functional-equation factor `Delta_p`, its invariants,
//!   asymptotics, analytic square root, Hardy Z-functions and synthetic
//!   members of the class of Delta-symmetric functions.
//! * [`eval`]: numerical backends (zeta in the critical strip, derivatives by
//!   contour quadrature, branch-tracked logarithms, truncated Euler products
//!   and Gonek's zeta_X model).
//! * [`apoints`]: locating/counting roots of `f(s) = a` by the argument
//!   principle, Littlewood's lemma numerically, Riemann-von Mangoldt
//!   comparisons, clustering statistics and dense interpolating curves.
//! * [`scaling`]: the rescaling maps `phi_tau`, limit shapes of the rescaled
//!   functional-equation factor, tau-sequence construction and Lehto-style
//!   filling-disc scans.
//! * [`torus`]: finite truncations of the infinite torus carrying vertical
//!   shifts: twisted series, Plancherel and Birkhoff checks, block exclusion
//!   sets, probabilistic moments on density-zero complements, and the Selberg
//!   central-limit statistics.

pub mod apoints;
pub mod coeffs;
pub mod eval;
pub mod funceq;
pub mod gamma;
pub mod numerics;
pub mod scaling;
pub mod tolerances;
pub mod torus;

/// Complex double, the working scalar of the whole crate.
pub type C64 = num_complex::Complex<f64>;

/// Shorthand constructor used throughout.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Crate-wide error type. Every fallible operation returns one of these;
/// the command-line front end maps them uniformly to its domain-error exit
/// code.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("requested length {requested} exceeds available data of length {available}")]
    Length { requested: usize, available: usize },

    #[error("Euler product spec lacks roots for prime {prime} (prime bound {bound})")]
    IncompleteSpec { prime: u64, bound: u64 },

    #[error("degenerate fit: partial sums vanish on the whole sample grid")]
    DegenerateFit,

    #[error("argument outside the supported domain: {0}")]
    OutOfDomain(String),

    #[error("functional equation violated: {0}")]
    FunctionalEquationViolation(String),

    #[error("evaluation too close to the pole at s = 1 (|s - 1| = {dist:.3e})")]
    NearPole { dist: f64 },

    #[error("winding integral failed to stabilize: residual {residual:.3} from nearest integer")]
    WindingUnstable { residual: f64 },

    #[error("contour keeps passing too close to the target value; perturbation retries exhausted")]
    BoundaryRetriesExhausted,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
