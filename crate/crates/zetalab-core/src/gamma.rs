//! Principal-branch log-gamma and digamma for complex arguments.
//!
//! Both functions are computed by pushing the argument to the right with the
//! recurrence `Gamma(z+1) = z Gamma(z)` until the Stirling series applies,
//! then summing the asymptotic series with Bernoulli coefficients. On the
//! closed upper and lower half-planes the sum of principal logarithms of the
//! recurrence factors stays on the principal branch, so `log_gamma` is the
//! analytic continuation of the real function `ln Gamma` into the plane cut
//! along the non-positive real axis. Arguments on the cut itself are treated
//! as limits from above when `im == 0.0` carries a positive sign bit, which
//! is the behaviour of `atan2`.

use crate::numerics::BERNOULLI_2K;
use crate::C64;

/// `(1/2) ln(2 pi)`.
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_74;

/// Push the argument until its real part reaches this before applying the
/// Stirling series.
const STIRLING_RE_MIN: f64 = 10.0;

/// Above this imaginary part the Stirling series is already far inside its
/// accuracy floor for any real part we encounter, so no push is needed.
const STIRLING_IM_BIG: f64 = 200.0;

/// Number of Bernoulli terms used in the Stirling series for `log_gamma`.
const STIRLING_TERMS: usize = 14;

/// Number of Bernoulli terms used in the asymptotic series for `digamma`.
const DIGAMMA_TERMS: usize = 12;

/// Stirling series for `log Gamma(z)`, valid once `z` is well inside the
/// right half-plane or high above the real axis.
fn stirling_log_gamma(z: C64) -> C64 {
    let mut acc = (z - 0.5) * z.ln() - z + HALF_LN_TWO_PI;
    let z2_inv = (z * z).inv();
    // pow = z^{-(2k-1)}
    let mut pow = z.inv();
    for k in 1..=STIRLING_TERMS {
        let denom = (2 * k * (2 * k - 1)) as f64;
        let term = (BERNOULLI_2K[k - 1] / denom) * pow;
        acc += term;
        if term.norm_sqr() < 1e-34 * acc.norm_sqr() {
            break;
        }
        pow *= z2_inv;
    }
    acc
}

/// Principal-branch `log Gamma(z)`.
///
/// At the poles `z = 0, -1, -2, ...` the real part of the result is
/// `+infinity`. Everywhere else the function is finite and satisfies
/// `log_gamma(z + 1) = log_gamma(z) + ln z` with principal logarithms, as
/// long as `z` stays within one closed half-plane.
pub fn log_gamma(z: C64) -> C64 {
    let mut w = z;
    let mut shift = C64::new(0.0, 0.0);
    while w.re < STIRLING_RE_MIN && w.im.abs() < STIRLING_IM_BIG {
        shift += w.ln();
        w += 1.0;
    }
    stirling_log_gamma(w) - shift
}

/// `Gamma(z)` via the exponential of [`log_gamma`]. Overflows to infinity
/// for large arguments; intended for moderate `|z|`.
pub fn gamma(z: C64) -> C64 {
    log_gamma(z).exp()
}

/// Digamma function `psi(z) = Gamma'(z)/Gamma(z)` for complex arguments.
pub fn digamma(z: C64) -> C64 {
    let mut w = z;
    let mut shift = C64::new(0.0, 0.0);
    while w.re < STIRLING_RE_MIN && w.im.abs() < STIRLING_IM_BIG {
        shift += w.inv();
        w += 1.0;
    }
    let w2_inv = (w * w).inv();
    let mut acc = w.ln() - 0.5 * w.inv();
    // pow = w^{-2k}
    let mut pow = w2_inv;
    for k in 1..=DIGAMMA_TERMS {
        let term = (BERNOULLI_2K[k - 1] / (2.0 * k as f64)) * pow;
        acc -= term;
        if term.norm_sqr() < 1e-34 * acc.norm_sqr() {
            break;
        }
        pow *= w2_inv;
    }
    acc - shift
}
