//! The Riemann-type functional-equation factor `Delta_p`.
//!
//! A parameter tuple `p = (omega, Q, lambda_1..lambda_f, mu_1..mu_f)` defines
//!
//! `Delta_p(s) = omega Q^{1-2s} prod_j Gamma(lambda_j (1-s) + conj(mu_j)) /
//! Gamma(lambda_j s + mu_j)`.
//!
//! This module evaluates `Delta_p` exactly and asymptotically, extracts its
//! invariants `(d_p, Q^2 lambda_p, Im mu_p, omega_p)`, constructs the
//! analytic square root on the slit plane, builds Hardy Z-functions, and
//! provides synthetic members of the class of functions satisfying the
//! equation `G(s) = Delta_p(s) conj(G(1 - conj(s)))`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::eval::{cauchy_derivative, Domain, FunctionEvaluator};
use crate::gamma::{digamma, log_gamma};
use crate::tolerances::HARDY_IMAG_ABS;
use crate::{c64, C64, Error, Result};

/// Below this, an imaginary part counts as exactly zero for domain logic.
const REAL_TOL: f64 = 1e-12;
/// Distance below which a Gamma argument counts as sitting on one of its
/// poles, i.e. `Delta_p` is at a pole or zero.
const POLE_TOL: f64 = 1e-12;
/// Distance below which a real part counts as lying on a slit column.
const SLIT_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Parameter tuples
// ---------------------------------------------------------------------------

/// The data of a Riemann-type functional equation.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalEquationData {
    omega: C64,
    q: f64,
    lambdas: Vec<f64>,
    mus: Vec<C64>,
}

impl FunctionalEquationData {
    /// Validated constructor: `|omega| = 1` within `1e-12`, `Q > 0`, all
    /// `lambda_j > 0`, and as many `mu`s as `lambda`s.
    pub fn new(omega: C64, q: f64, lambdas: Vec<f64>, mus: Vec<C64>) -> Result<Self> {
        if (omega.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::OutOfDomain(format!(
                "omega must have modulus 1, got |omega| = {}",
                omega.norm()
            )));
        }
        if !(q > 0.0) {
            return Err(Error::OutOfDomain(format!("Q must be positive, got {q}")));
        }
        if lambdas.len() != mus.len() {
            return Err(Error::OutOfDomain(format!(
                "{} lambdas but {} mus",
                lambdas.len(),
                mus.len()
            )));
        }
        if lambdas.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::OutOfDomain("all lambda_j must be positive".into()));
        }
        Ok(Self {
            omega,
            q,
            lambdas,
            mus,
        })
    }

    /// The tuple of the Riemann zeta-function: `(1, pi^{-1/2}, 1/2, 0)`.
    pub fn zeta() -> Self {
        Self::new(
            c64(1.0, 0.0),
            1.0 / std::f64::consts::PI.sqrt(),
            vec![0.5],
            vec![c64(0.0, 0.0)],
        )
        .expect("zeta tuple is valid")
    }

    /// The tuple of `zeta^2`: two identical Gamma factors, `Q = pi^{-1}`.
    pub fn zeta_squared() -> Self {
        Self::new(
            c64(1.0, 0.0),
            1.0 / std::f64::consts::PI,
            vec![0.5, 0.5],
            vec![c64(0.0, 0.0); 2],
        )
        .expect("zeta^2 tuple is valid")
    }

    /// A degree-3 tuple built from three zeta-type factors.
    pub fn degree_three() -> Self {
        Self::new(
            c64(1.0, 0.0),
            std::f64::consts::PI.powf(-1.5),
            vec![0.5; 3],
            vec![c64(0.0, 0.0); 3],
        )
        .expect("degree-3 tuple is valid")
    }

    /// The zeta tuple rewritten through the Gauss duplication formula:
    /// `lambda = (1/4, 1/4)`, `mu = (0, 1/2)`, `Q = sqrt(2/pi)`. Defines the
    /// same function `Delta_zeta` with a different parameter tuple.
    pub fn zeta_gauss_doubled() -> Self {
        Self::new(
            c64(1.0, 0.0),
            (2.0 / std::f64::consts::PI).sqrt(),
            vec![0.25, 0.25],
            vec![c64(0.0, 0.0), c64(0.5, 0.0)],
        )
        .expect("doubled zeta tuple is valid")
    }

    /// A degenerate tuple with no Gamma factors: `Delta_p(s) = omega
    /// Q^{1-2s}`.
    pub fn degenerate(omega: C64, q: f64) -> Result<Self> {
        Self::new(omega, q, Vec::new(), Vec::new())
    }

    pub fn omega(&self) -> C64 {
        self.omega
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn mus(&self) -> &[C64] {
        &self.mus
    }

    /// Number of Gamma factors.
    pub fn f(&self) -> usize {
        self.lambdas.len()
    }

    /// `max_j |Im mu_j| / lambda_j`: the height to which slits may reach
    /// into the upper half-plane.
    pub fn max_im_mu_over_lambda(&self) -> f64 {
        self.lambdas
            .iter()
            .zip(&self.mus)
            .map(|(&l, m)| m.im.abs() / l)
            .fold(0.0, f64::max)
    }

    /// Whether every `mu_j` is real, so all slits hang below the real axis.
    pub fn has_real_mus(&self) -> bool {
        self.max_im_mu_over_lambda() < REAL_TOL
    }

    /// The conjugated tuple `p* = (conj omega, Q, lambda, conj mu)`, which
    /// satisfies `Delta_p(s) = conj(Delta_{p*}(conj s))`.
    pub fn conjugate_tuple(&self) -> Self {
        Self {
            omega: self.omega.conj(),
            q: self.q,
            lambdas: self.lambdas.clone(),
            mus: self.mus.iter().map(|m| m.conj()).collect(),
        }
    }

    /// Text form: omega as two reals, then `Q`, then one line per Gamma
    /// factor with `lambda Re(mu) Im(mu)`. `#`-comments are tolerated.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n{}\n", self.omega.re, self.omega.im, self.q);
        for (l, m) in self.lambdas.iter().zip(&self.mus) {
            out.push_str(&format!("{l} {} {}\n", m.re, m.im));
        }
        out
    }

    /// Inverse of [`FunctionalEquationData::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let parse =
            |field: &str| -> Result<f64> { field.parse().map_err(|e| Error::Parse(format!("{e}"))) };
        let omega_line = lines
            .next()
            .ok_or_else(|| Error::Parse("missing omega line".into()))?;
        let parts: Vec<&str> = omega_line.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(Error::Parse("omega line must hold two reals".into()));
        }
        let omega = c64(parse(parts[0])?, parse(parts[1])?);
        let q_line = lines
            .next()
            .ok_or_else(|| Error::Parse("missing Q line".into()))?;
        let q = parse(q_line)?;
        let mut lambdas = Vec::new();
        let mut mus = Vec::new();
        for line in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Parse(
                    "factor lines must hold lambda, Re mu, Im mu".into(),
                ));
            }
            lambdas.push(parse(parts[0])?);
            mus.push(c64(parse(parts[1])?, parse(parts[2])?));
        }
        Self::new(omega, q, lambdas, mus)
    }
}

// ---------------------------------------------------------------------------
// Evaluation and invariants
// ---------------------------------------------------------------------------

/// Distance from `z` to the nearest non-positive integer (a Gamma pole).
fn nonpositive_integer_distance(z: C64) -> f64 {
    let k = z.re.round();
    if k > 0.5 {
        f64::INFINITY
    } else {
        (z - c64(k, 0.0)).norm()
    }
}

/// Distances from `s` to the nearest pole and nearest zero of `Delta_p`,
/// measured in Gamma-argument coordinates.
fn singularity_distances(p: &FunctionalEquationData, s: C64) -> (f64, f64) {
    let mut pole = f64::INFINITY;
    let mut zero = f64::INFINITY;
    for (&lam, mu) in p.lambdas.iter().zip(&p.mus) {
        pole = pole.min(nonpositive_integer_distance(lam * (1.0 - s) + mu.conj()));
        zero = zero.min(nonpositive_integer_distance(lam * s + *mu));
    }
    (pole, zero)
}

/// The principal-branch sum `log omega + (1-2s) log Q + sum_j [log Gamma(
/// lambda_j(1-s) + conj mu_j) - log Gamma(lambda_j s + mu_j)]`. Its
/// imaginary part is continuous wherever all Gamma arguments avoid the cut.
fn principal_log_delta(p: &FunctionalEquationData, s: C64) -> C64 {
    let mut l = p.omega.ln() + (1.0 - 2.0 * s) * p.q.ln();
    for (&lam, mu) in p.lambdas.iter().zip(&p.mus) {
        l += log_gamma(lam * (1.0 - s) + mu.conj()) - log_gamma(lam * s + *mu);
    }
    l
}

/// Exact evaluation of `Delta_p(s)`. Returns 0 at the zeros; evaluation at a
/// pole is a `NearPole` error.
pub fn delta_eval(p: &FunctionalEquationData, s: C64) -> Result<C64> {
    let (pole, zero) = singularity_distances(p, s);
    if pole < POLE_TOL {
        return Err(Error::NearPole { dist: pole });
    }
    if zero < POLE_TOL {
        return Ok(c64(0.0, 0.0));
    }
    Ok(principal_log_delta(p, s).exp())
}

/// The invariants `(d_p, Q^2 lambda_p, Im mu_p, omega_p)` of `Delta_p`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DeltaInvariants {
    /// Degree `d_p = 2 sum_j lambda_j`.
    pub degree: f64,
    /// `Q^2 lambda_p` with `lambda_p = prod_j lambda_j^{2 lambda_j}`.
    pub q2lambda: f64,
    /// `Im mu_p` with `mu_p = sum_j (1 - 2 mu_j)`.
    pub im_mu_p: f64,
    /// The unit-modulus constant of the asymptotic expansion.
    pub omega_p: C64,
}

/// Compute the invariants; a degenerate tuple (`f = 0`) yields
/// `(0, Q^2, 0, omega)`.
pub fn delta_invariants(p: &FunctionalEquationData) -> DeltaInvariants {
    if p.f() == 0 {
        return DeltaInvariants {
            degree: 0.0,
            q2lambda: p.q * p.q,
            im_mu_p: 0.0,
            omega_p: p.omega,
        };
    }
    let degree: f64 = 2.0 * p.lambdas.iter().sum::<f64>();
    let lambda_p = (p
        .lambdas
        .iter()
        .map(|&l| 2.0 * l * l.ln())
        .sum::<f64>())
    .exp();
    let re_mu_p: f64 = p.mus.iter().map(|m| 1.0 - 2.0 * m.re).sum();
    let im_mu_p: f64 = p.mus.iter().map(|m| -2.0 * m.im).sum();
    let root_phase: f64 = p
        .lambdas
        .iter()
        .zip(&p.mus)
        .map(|(&l, m)| -2.0 * m.im * l.ln())
        .sum();
    let omega_p = p.omega
        * c64(
            0.0,
            std::f64::consts::FRAC_PI_4 * (2.0 * re_mu_p - degree) - im_mu_p + root_phase,
        )
        .exp();
    DeltaInvariants {
        degree,
        q2lambda: p.q * p.q * lambda_p,
        im_mu_p,
        omega_p,
    }
}

/// Leading-order asymptotic form `omega_p (lambda_p Q^2 |t|^{d_p})^{1/2 - s}
/// exp(i d_p t + i Im mu_p log |t|)`, valid up to a relative error `O(1/|t|)`.
pub fn delta_asymptotic(p: &FunctionalEquationData, s: C64) -> Result<C64> {
    let t = s.im;
    if t.abs() < 2.0 {
        return Err(Error::OutOfDomain(
            "asymptotic expansion requires |Im s| >= 2".into(),
        ));
    }
    if t < 0.0 {
        // The expansion is stated for t -> +infinity; reach the lower
        // half-plane through the conjugated tuple.
        return Ok(delta_asymptotic(&p.conjugate_tuple(), s.conj())?.conj());
    }
    let inv = delta_invariants(p);
    let base = inv.q2lambda * t.powf(inv.degree);
    let value = inv.omega_p
        * ((0.5 - s) * base.ln()).exp()
        * c64(0.0, inv.degree * t + inv.im_mu_p * t.ln()).exp();
    Ok(value)
}

// ---------------------------------------------------------------------------
// Branch-tracked logarithm and square root
// ---------------------------------------------------------------------------

/// Wrap into `[-pi, pi)`.
fn wrap_to_pm_pi(x: f64) -> f64 {
    if (-std::f64::consts::PI..std::f64::consts::PI).contains(&x) {
        return x;
    }
    let y = x.rem_euclid(std::f64::consts::TAU);
    if y >= std::f64::consts::PI {
        y - std::f64::consts::TAU
    } else {
        y
    }
}

/// Whether `sigma` lies on a slit column (real part of a pole or zero of
/// `Delta_p`); only meaningful for tuples with real `mu`s.
fn sigma_on_slit_column(p: &FunctionalEquationData, sigma: f64) -> bool {
    for (&lam, mu) in p.lambdas.iter().zip(&p.mus) {
        // Poles at 1 + (n + mu)/lambda for n >= 0.
        let n = (lam * (sigma - 1.0) - mu.re).round();
        if n >= -0.5 && (sigma - (1.0 + (n + mu.re) / lam)).abs() < SLIT_TOL {
            return true;
        }
        // Zeros at (-n - mu)/lambda for n >= 0.
        let n = (-lam * sigma - mu.re).round();
        if n >= -0.5 && (sigma - (-n - mu.re) / lam).abs() < SLIT_TOL {
            return true;
        }
    }
    false
}

/// Validate that `s` lies in the region where the normalized branch is
/// defined: everything off the slits for real-`mu` tuples, and the region
/// `Im s > max_j |Im mu_j|/lambda_j + 1` otherwise.
fn branch_domain_check(p: &FunctionalEquationData, s: C64) -> Result<()> {
    let m = p.max_im_mu_over_lambda();
    if m >= REAL_TOL {
        if s.im <= m + 1.0 {
            return Err(Error::OutOfDomain(format!(
                "branch-dependent evaluation for this tuple requires Im s > {:.6}",
                m + 1.0
            )));
        }
        return Ok(());
    }
    if s.im < 0.0 && sigma_on_slit_column(p, s.re) {
        return Err(Error::OutOfDomain(format!(
            "s = {s} lies on a vertical slit of the cut plane"
        )));
    }
    Ok(())
}

/// The point carrying the argument normalization `arg Delta_p in [-pi, pi)`:
/// `1/2` itself, nudged right if `1/2` is a zero or pole, or lifted to the
/// first admissible height when the slits invade the upper half-plane.
fn branch_anchor(p: &FunctionalEquationData) -> C64 {
    let m = p.max_im_mu_over_lambda();
    if m >= REAL_TOL {
        return c64(0.5, m + 1.0 + 1e-9);
    }
    let mut anchor = c64(0.5, 0.0);
    let (pole, zero) = singularity_distances(p, anchor);
    if pole.min(zero) < 1e-9 {
        anchor.re += 1e-6;
    }
    anchor
}

/// Branch-tracked `log Delta_p(s)` on the slit plane, normalized so that the
/// argument at the anchor lies in `[-pi, pi)`.
pub fn delta_log(p: &FunctionalEquationData, s: C64) -> Result<C64> {
    branch_domain_check(p, s)?;
    let (pole, zero) = singularity_distances(p, s);
    if pole.min(zero) < POLE_TOL {
        return Err(Error::OutOfDomain(
            "log Delta is undefined at a zero or pole of Delta".into(),
        ));
    }
    let anchor = branch_anchor(p);
    let theta_anchor = principal_log_delta(p, anchor).im;
    let offset = wrap_to_pm_pi(theta_anchor) - theta_anchor;
    let l = principal_log_delta(p, s);
    if s.im >= 0.0 || !p.has_real_mus() {
        // In the upper region every Gamma argument stays off its cut, so the
        // principal sum is itself the analytic continuation from the anchor.
        return Ok(c64(l.re, l.im + offset));
    }
    // Lower half-plane: continue down the vertical segment from sigma,
    // accumulating wrapped increments of the principal argument. Wrapping
    // absorbs the 2 pi jumps where a Gamma argument crosses its cut.
    let sigma = s.re;
    let mut t_cur = 0.0f64;
    let mut theta_cur = principal_log_delta(p, c64(sigma, 0.0)).im;
    let mut arg = theta_cur + offset;
    let mut dt: f64 = (s.im / 8.0).max(-0.25);
    while t_cur > s.im {
        let t_next = (t_cur + dt).max(s.im);
        let theta_next = principal_log_delta(p, c64(sigma, t_next)).im;
        let step = wrap_to_pm_pi(theta_next - theta_cur);
        if step.abs() > 1.5 {
            if (t_next - t_cur).abs() <= 1e-6 {
                return Err(Error::OutOfDomain(
                    "branch continuation unstable: path runs too close to a slit".into(),
                ));
            }
            dt /= 2.0;
            continue;
        }
        arg += step;
        theta_cur = theta_next;
        t_cur = t_next;
        dt = (dt * 1.5).max(-0.5);
    }
    Ok(c64(l.re, arg))
}

/// The normalized continuous argument of `Delta_p`.
pub fn delta_arg(p: &FunctionalEquationData, s: C64) -> Result<f64> {
    delta_log(p, s).map(|l| l.im)
}

/// The analytic square root `Delta_p^{1/2}` on the slit plane.
pub fn delta_sqrt(p: &FunctionalEquationData, s: C64) -> Result<C64> {
    delta_log(p, s).map(|l| (0.5 * l).exp())
}

/// Exact logarithmic derivative `Delta_p'/Delta_p(s)` through the digamma
/// function.
pub fn delta_logderiv(p: &FunctionalEquationData, s: C64) -> Result<C64> {
    let (pole, zero) = singularity_distances(p, s);
    let dist = pole.min(zero);
    if dist < POLE_TOL {
        return Err(Error::NearPole { dist });
    }
    let mut v = c64(-2.0 * p.q.ln(), 0.0);
    for (&lam, mu) in p.lambdas.iter().zip(&p.mus) {
        v -= lam * (digamma(lam * (1.0 - s) + mu.conj()) + digamma(lam * s + *mu));
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// Hardy Z and the logarithmic-derivative identity
// ---------------------------------------------------------------------------

/// Hardy's Z-function `Z(t) = f(1/2 + it) Delta_p^{-1/2}(1/2 + it)`.
///
/// For an `f` genuinely satisfying the functional equation of `p` this is
/// real; an imaginary residual above tolerance is rejected loudly, because it
/// signals a mismatched tuple rather than rounding.
pub fn hardy_z(f: &dyn FunctionEvaluator, p: &FunctionalEquationData, t: f64) -> Result<f64> {
    let rho = c64(0.5, t);
    let v = f.value(rho)?;
    let root = delta_sqrt(p, rho)?;
    let z = v / root;
    if z.im.abs() >= HARDY_IMAG_ABS {
        return Err(Error::FunctionalEquationViolation(format!(
            "Hardy Z at t = {t} has imaginary part {:.3e}; tuple and function disagree",
            z.im
        )));
    }
    Ok(z.re)
}

/// On the critical line, logarithmic differentiation of the functional
/// equation forces `2 Re(f'/f)(1/2+it) = (Delta'/Delta)(1/2+it)`.
///
/// Returns `(residual, delta_logderiv_value)` where the residual is the
/// absolute defect of that identity. Also enforces the induced lower bound
/// `|f'/f| >= (d/2) log|t| + (1/2) log(Q^2 lambda_p) - c/|t|` with the
/// conservative slack constant `c = 4 (1 + d_p)`.
pub fn logderiv_identity(
    f: &dyn FunctionEvaluator,
    p: &FunctionalEquationData,
    t: f64,
) -> Result<(f64, f64)> {
    let rho = c64(0.5, t);
    let v = f.value(rho)?;
    if !v.is_finite() || v.norm() < 1e-300 {
        return Err(Error::OutOfDomain(format!(
            "f has a zero or singularity at 1/2 + {t}i"
        )));
    }
    let ld_f = f.derivative(rho, 1)? / v;
    let delta_ld = delta_logderiv(p, rho)?;
    if delta_ld.im.abs() > 1e-8 {
        return Err(Error::FunctionalEquationViolation(format!(
            "Delta'/Delta on the critical line came out non-real ({:.3e})",
            delta_ld.im
        )));
    }
    let residual = (2.0 * ld_f.re - delta_ld.re).abs();
    let inv = delta_invariants(p);
    if t.abs() > 2.0 {
        let bound = 0.5 * inv.degree * t.abs().ln() + 0.5 * inv.q2lambda.ln()
            - 4.0 * (1.0 + inv.degree) / t.abs();
        if ld_f.norm() < bound - 1e-9 {
            return Err(Error::FunctionalEquationViolation(format!(
                "|f'/f| = {:.6} below the functional-equation lower bound {:.6} at t = {t}",
                ld_f.norm(),
                bound
            )));
        }
    }
    Ok((residual, delta_ld.re))
}

// ---------------------------------------------------------------------------
// Synthetic class-G members
// ---------------------------------------------------------------------------

/// The flavours of synthetic Delta-symmetric functions.
#[derive(Clone)]
pub enum ClassGKind {
    /// `G_alpha(s) = (c1 + c2 sin(-i(s - 1/2))) Delta^{1/2}(s)` whose
    /// critical-line modulus oscillates within `[alpha1, alpha2]`.
    Oscillating { alpha1: f64, alpha2: f64 },
    /// `G_0(s) = exp(-s(1-s)) Delta^{1/2}(s)`, Gaussian-damped on vertical
    /// lines.
    GaussianDamped,
    /// `G(s) = 1 + Delta_p(s)`.
    OnePlusDelta,
    /// An externally supplied evaluator taken on trust to satisfy the
    /// functional equation of the tuple.
    External(Arc<dyn FunctionEvaluator + Send + Sync>),
}

impl fmt::Debug for ClassGKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassGKind::Oscillating { alpha1, alpha2 } => {
                write!(f, "Oscillating {{ alpha1: {alpha1}, alpha2: {alpha2} }}")
            }
            ClassGKind::GaussianDamped => write!(f, "GaussianDamped"),
            ClassGKind::OnePlusDelta => write!(f, "OnePlusDelta"),
            ClassGKind::External(_) => write!(f, "External(..)"),
        }
    }
}

/// A synthetic (or wrapped) member of the class G for the tuple `p`.
#[derive(Debug, Clone)]
pub struct ClassGEvaluator {
    kind: ClassGKind,
    p: FunctionalEquationData,
}

/// Construct a class-G member, validating kind-specific parameters.
pub fn synthetic_class_g(kind: ClassGKind, p: FunctionalEquationData) -> Result<ClassGEvaluator> {
    if let ClassGKind::Oscillating { alpha1, alpha2 } = kind {
        if !(0.0 <= alpha1 && alpha1 <= alpha2) || alpha2 == 0.0 {
            return Err(Error::OutOfDomain(format!(
                "oscillating class-G member needs 0 <= alpha1 <= alpha2 with alpha2 > 0, \
                 got ({alpha1}, {alpha2})"
            )));
        }
    }
    Ok(ClassGEvaluator { kind, p })
}

impl ClassGEvaluator {
    pub fn tuple(&self) -> &FunctionalEquationData {
        &self.p
    }

    /// The holomorphic prefactor `h` with `G = h Delta^{1/2}` for the kinds
    /// built that way.
    fn prefactor(&self, s: C64) -> Option<C64> {
        match &self.kind {
            ClassGKind::Oscillating { alpha1, alpha2 } => {
                let c1 = 0.5 * (alpha1 + alpha2);
                let c2 = 0.5 * (alpha2 - alpha1);
                Some(c1 + c2 * (c64(0.0, -1.0) * (s - 0.5)).sin())
            }
            ClassGKind::GaussianDamped => Some((-s * (1.0 - s)).exp()),
            _ => None,
        }
    }

    fn prefactor_derivative(&self, s: C64) -> Option<C64> {
        match &self.kind {
            ClassGKind::Oscillating { alpha1, alpha2 } => {
                let c2 = 0.5 * (alpha2 - alpha1);
                Some(c64(0.0, -1.0) * c2 * (c64(0.0, -1.0) * (s - 0.5)).cos())
            }
            ClassGKind::GaussianDamped => Some((2.0 * s - 1.0) * (-s * (1.0 - s)).exp()),
            _ => None,
        }
    }

    /// `|G(s) - Delta_p(s) conj(G(1 - conj s))|`: the functional-equation
    /// residual, zero in exact arithmetic for every kind by construction.
    pub fn fe_residual(&self, s: C64) -> Result<f64> {
        let lhs = self.value(s)?;
        let mirrored = self.value(1.0 - s.conj())?;
        let rhs = delta_eval(&self.p, s)? * mirrored.conj();
        Ok((lhs - rhs).norm())
    }
}

impl FunctionEvaluator for ClassGEvaluator {
    fn value(&self, s: C64) -> Result<C64> {
        match &self.kind {
            ClassGKind::Oscillating { .. } | ClassGKind::GaussianDamped => {
                Ok(self.prefactor(s).unwrap() * delta_sqrt(&self.p, s)?)
            }
            ClassGKind::OnePlusDelta => Ok(1.0 + delta_eval(&self.p, s)?),
            ClassGKind::External(f) => f.value(s),
        }
    }

    fn derivative(&self, s: C64, k: u32) -> Result<C64> {
        match k {
            0 => self.value(s),
            1 => match &self.kind {
                ClassGKind::Oscillating { .. } | ClassGKind::GaussianDamped => {
                    let root = delta_sqrt(&self.p, s)?;
                    let ld = delta_logderiv(&self.p, s)?;
                    let h = self.prefactor(s).unwrap();
                    let hp = self.prefactor_derivative(s).unwrap();
                    Ok(root * (hp + 0.5 * h * ld))
                }
                ClassGKind::OnePlusDelta => {
                    Ok(delta_eval(&self.p, s)? * delta_logderiv(&self.p, s)?)
                }
                ClassGKind::External(f) => f.derivative(s, 1),
            },
            _ => match &self.kind {
                ClassGKind::External(f) => f.derivative(s, k),
                _ => cauchy_derivative(&|w| self.value(w), s, k, 0.1, 1e-10),
            },
        }
    }

    fn log_value(&self, s: C64) -> Result<C64> {
        match &self.kind {
            ClassGKind::Oscillating { .. } | ClassGKind::GaussianDamped => {
                let h = self.prefactor(s).unwrap();
                if h.norm() == 0.0 {
                    return Err(Error::OutOfDomain("log of a zero of G".into()));
                }
                Ok(h.ln() + 0.5 * delta_log(&self.p, s)?)
            }
            ClassGKind::OnePlusDelta => {
                let v = 1.0 + delta_eval(&self.p, s)?;
                if v.norm() == 0.0 {
                    return Err(Error::OutOfDomain("log of a zero of G".into()));
                }
                Ok(v.ln())
            }
            ClassGKind::External(f) => f.log_value(s),
        }
    }

    fn domain(&self) -> Domain {
        match &self.kind {
            ClassGKind::External(f) => f.domain(),
            _ => Domain::whole_plane(),
        }
    }
}
