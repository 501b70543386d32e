//! Crate-wide accuracy contract.
//!
//! Tolerances intrinsic to a single algorithm (step-refinement thresholds,
//! series truncation cutoffs) live next to that algorithm. The constants here
//! are shared across modules and define what "exact up to rounding" means for
//! the laboratory as a whole.

/// Target relative accuracy of the special-function backends (log-gamma,
/// digamma, zeta) away from their singularities.
pub const SPECIAL_FN_REL: f64 = 1e-12;

/// Tolerance for identities that hold exactly in analysis and are limited
/// only by rounding: functional-equation products, unit modulus of the
/// completed factor on the critical line, Plancherel identities.
pub const IDENTITY_ABS: f64 = 1e-9;

/// Largest imaginary part a Hardy Z-function value may carry before the
/// evaluation is rejected as violating the functional equation.
pub const HARDY_IMAG_ABS: f64 = 1e-8;

/// Maximum distance of a winding-number integral from the nearest integer
/// before the contour evaluation is rejected and refined.
pub const WINDING_RESIDUAL: f64 = 0.25;

/// Absolute tolerance for exact coefficient identities (convolution inverses,
/// additivity of powers, log/exp round trips) computed in floating point.
pub const COEFF_IDENTITY_ABS: f64 = 1e-9;
