//! Rescaling maps, limit shapes, and filling-disc scans.
//!
//! The conformal map `phi_tau` carries the unit disc onto a shrinking
//! neighborhood of `1/2 + i tau`. Along suitable profiles `mu(tau)` the
//! completed factor `Delta_p` composed with `phi_tau` approaches explicit
//! limit shapes, the functional equation restricts to an exact symmetry of
//! the rescaled family, and the spherical derivative along the critical
//! line exhibits the filling-disc lower bound.

use serde::Serialize;

use crate::eval::{spherical_derivative, FunctionEvaluator};
use crate::funceq::{delta_eval, delta_invariants, FunctionalEquationData};
use crate::numerics::Dd;
use crate::{c64, C64, Error, Result};

/// Choice of the scaling function `mu(tau)`, constrained by
/// `mu(tau) <= (1/2) log tau` wherever it is evaluated.
#[derive(Debug, Clone, Serialize)]
pub enum ScalingProfile {
    /// `mu(tau) = c`.
    Constant(f64),
    /// `mu(tau) = (loglog tau)^a`; `a = 1` diverges slowly, `a = -1` decays.
    LogLogPower(f64),
    /// `mu(tau) = coeff (log tau)^power`, the divergent log-power family.
    LogPower { coeff: f64, power: f64 },
    /// Piecewise-linear interpolation of `(tau, mu)` pairs with constant
    /// extension outside the table range.
    Table(Vec<(f64, f64)>),
}

impl ScalingProfile {
    pub fn mu(&self, tau: f64) -> Result<f64> {
        if !(tau >= 2.0) {
            return Err(Error::OutOfDomain(format!(
                "scaling profiles are defined for tau >= 2, got {tau}"
            )));
        }
        let value = match self {
            ScalingProfile::Constant(c) => *c,
            ScalingProfile::LogLogPower(a) => tau.ln().ln().powf(*a),
            ScalingProfile::LogPower { coeff, power } => coeff * tau.ln().powf(*power),
            ScalingProfile::Table(rows) => {
                if rows.is_empty() {
                    return Err(Error::OutOfDomain("empty profile table".into()));
                }
                interpolate_table(rows, tau)?
            }
        };
        if !(value > 0.0) {
            return Err(Error::OutOfDomain(format!(
                "profile must be positive, got mu({tau}) = {value}"
            )));
        }
        if value > 0.5 * tau.ln() {
            return Err(Error::OutOfDomain(format!(
                "profile violates mu(tau) <= (1/2) log tau at tau = {tau}: \
                 {value} > {}",
                0.5 * tau.ln()
            )));
        }
        Ok(value)
    }

    /// The disc radius `lambda(tau) = mu(tau) / log tau`.
    pub fn lambda(&self, tau: f64) -> Result<f64> {
        Ok(self.mu(tau)? / tau.ln())
    }
}

fn interpolate_table(rows: &[(f64, f64)], tau: f64) -> Result<f64> {
    for pair in rows.windows(2) {
        if pair[1].0 <= pair[0].0 {
            return Err(Error::OutOfDomain(
                "profile table must have strictly increasing tau".into(),
            ));
        }
    }
    let n = rows.len();
    if tau <= rows[0].0 {
        return Ok(rows[0].1);
    }
    if tau >= rows[n - 1].0 {
        return Ok(rows[n - 1].1);
    }
    let idx = rows.partition_point(|&(t, _)| t <= tau);
    let (t0, m0) = rows[idx - 1];
    let (t1, m1) = rows[idx];
    Ok(m0 + (m1 - m0) * (tau - t0) / (t1 - t0))
}

/// The disc map `phi_tau(z) = 1/2 + lambda(tau) z + i tau`.
pub fn phi_map(tau: f64, profile: &ScalingProfile, z: C64) -> Result<C64> {
    if !(z.norm() < 1.0) {
        return Err(Error::OutOfDomain(format!(
            "phi_map needs |z| < 1, got |z| = {}",
            z.norm()
        )));
    }
    let lambda = profile.lambda(tau)?;
    Ok(c64(0.5, tau) + lambda * z)
}

/// Limit regime of a profile as `tau` grows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LimitRegime {
    /// `mu -> 0`: the limit shape is a unimodular constant.
    Zero,
    /// `mu -> c`: the limit shape is `a exp(-c d_p z)`; carries the
    /// estimated constant.
    Constant(f64),
    /// `mu -> infinity`: the moduli split by the sign of `Re z`.
    Infinity,
}

/// Classify the regime from the profile alone: the profile decides the
/// limit statement, so the decision reads `mu` at the largest scale and
/// estimates the constant by the tail mean.
pub fn classify_regime(profile: &ScalingProfile, taus: &[f64]) -> Result<LimitRegime> {
    if taus.is_empty() {
        return Err(Error::OutOfDomain("regime classification needs scales".into()));
    }
    let mut sorted = taus.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let top = profile.mu(*sorted.last().unwrap())?;
    if top < 0.05 {
        return Ok(LimitRegime::Zero);
    }
    if top > 20.0 {
        return Ok(LimitRegime::Infinity);
    }
    let tail_from = sorted.len() - sorted.len().div_ceil(4);
    let tail = &sorted[tail_from..];
    let mut mean = 0.0;
    for &tau in tail {
        mean += profile.mu(tau)?;
    }
    Ok(LimitRegime::Constant(mean / tail.len() as f64))
}

/// `nu_p(tau) = d_p tau log tau + tau log(lambda_p Q^2) - d_p tau
///  - Im mu_p log tau`, the rotation phase of the rescaled factor,
/// accumulated in double-double precision.
fn nu_dd(p: &FunctionalEquationData, tau: f64) -> Dd {
    let inv = delta_invariants(p);
    let log_tau = tau.ln();
    Dd::from_prod(tau, log_tau)
        .mul_f64(inv.degree)
        .add(Dd::from_prod(tau, inv.q2lambda.ln()))
        .add(Dd::from_prod(-inv.degree, tau))
        .add(Dd::from_prod(-inv.im_mu_p, log_tau))
}

/// The phase `nu_p(tau)` as a plain float (loses precision for large tau;
/// use for reporting, not for phase arithmetic).
pub fn nu_p(p: &FunctionalEquationData, tau: f64) -> f64 {
    nu_dd(p, tau).to_f64()
}

fn nu_prime(p: &FunctionalEquationData, tau: f64) -> f64 {
    let inv = delta_invariants(p);
    inv.degree * tau.ln() + inv.q2lambda.ln() - inv.im_mu_p / tau
}

/// Deviation of `Delta_p(phi_tau(z))` from the limit-shape model at one
/// scale.
#[derive(Debug, Clone, Serialize)]
pub struct LimitShapeRow {
    pub tau: f64,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitShapeReport {
    pub rows: Vec<LimitShapeRow>,
    pub regime: LimitRegime,
}

/// Compare `Delta_p(phi_tau(z))` against the model
/// `omega_p exp(-(d_p mu(tau) + lambda(tau) log(lambda_p Q^2)) z
///  - i nu_p(tau))` over the grid. The `lambda(tau)` term is the
/// first-order refinement of the limit-shape statement; it vanishes in the
/// limit but at desk scales it contributes at the percent level and the
/// comparison is meaningless without it.
pub fn delta_limit_shape(
    p: &FunctionalEquationData,
    profile: &ScalingProfile,
    tau_list: &[f64],
    z_grid: &[C64],
) -> Result<LimitShapeReport> {
    if tau_list.is_empty() || z_grid.is_empty() {
        return Err(Error::OutOfDomain(
            "limit-shape comparison needs scales and grid points".into(),
        ));
    }
    let inv = delta_invariants(p);
    let mut rows = Vec::with_capacity(tau_list.len());
    for &tau in tau_list {
        if !(tau >= 10.0) {
            return Err(Error::OutOfDomain(format!(
                "limit-shape comparison needs tau >= 10, got {tau}"
            )));
        }
        let mu = profile.mu(tau)?;
        let lambda = profile.lambda(tau)?;
        let slope = inv.degree * mu + lambda * inv.q2lambda.ln();
        let phase = nu_dd(p, tau).rem_two_pi();
        let rotation = c64(phase.cos(), -phase.sin());
        let mut worst = 0.0f64;
        for &z in z_grid {
            let exact = delta_eval(p, phi_map(tau, profile, z)?)?;
            let model = inv.omega_p * (-slope * z).exp() * rotation;
            let dev = (exact - model).norm() / model.norm();
            worst = worst.max(dev);
        }
        rows.push(LimitShapeRow {
            tau,
            max_deviation: worst,
        });
    }
    let regime = classify_regime(profile, tau_list)?;
    Ok(LimitShapeReport { rows, regime })
}

/// Signed distance of `-nu_p(tau) - ell` from the nearest multiple of
/// `2 pi`, in `[-pi, pi)`. Decreasing in `tau` wherever `nu_p` increases.
fn phase_gap(p: &FunctionalEquationData, ell: f64, tau: f64) -> f64 {
    -(nu_dd(p, tau).add_f64(ell).rem_two_pi())
}

/// The first `count` solutions `tau >= tau_min` of
/// `-nu_p(tau) = ell (mod 2 pi)`, by monotone bracketing of the increasing
/// phase and Newton polish.
pub fn construct_tau_sequence(
    p: &FunctionalEquationData,
    ell: f64,
    count: usize,
    tau_min: f64,
) -> Result<Vec<f64>> {
    let inv = delta_invariants(p);
    if inv.degree == 0.0 {
        return Err(Error::OutOfDomain(
            "tau sequences need a nondegenerate phase: d_p = 0 makes \
             nu_p affine and the solution set empty or everything"
                .into(),
        ));
    }
    if !(0.0..std::f64::consts::TAU).contains(&ell) {
        return Err(Error::OutOfDomain(format!(
            "target phase must lie in [0, 2pi), got {ell}"
        )));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    if !(tau_min >= 10.0) || nu_prime(p, tau_min) <= 0.0 {
        return Err(Error::OutOfDomain(format!(
            "tau_min = {tau_min} is below the monotone range of nu_p"
        )));
    }
    let mut out = Vec::with_capacity(count);
    let mut tau = tau_min;
    let mut gap = phase_gap(p, ell, tau);
    // Walk with steps of an eighth of the local phase wavelength; the
    // wrapped gap decreases through zero once per wavelength, and that
    // sign change brackets a solution. The sawtooth jump back up happens
    // near the endpoints -pi and pi, never at a crossing, because each
    // step moves the phase by about a quarter of pi.
    let mut guard = 0usize;
    while out.len() < count {
        guard += 1;
        if guard > 100_000_000 {
            return Err(Error::OutOfDomain("tau sequence walk did not close".into()));
        }
        let step = std::f64::consts::TAU / nu_prime(p, tau) / 8.0;
        let next = tau + step;
        let next_gap = phase_gap(p, ell, next);
        if gap >= 0.0 && next_gap < 0.0 {
            // Bracketed: polish by Newton on the wrapped gap.
            let mut root = 0.5 * (tau + next);
            for _ in 0..60 {
                let g = phase_gap(p, ell, root);
                if g.abs() < 1e-9 {
                    break;
                }
                root += g / nu_prime(p, root);
            }
            let residual = phase_gap(p, ell, root).abs();
            if residual >= 1e-8 || !(root >= tau_min) {
                return Err(Error::OutOfDomain(format!(
                    "phase root polish failed near tau = {root}: residual {residual}"
                )));
            }
            // Steps are an eighth of the wavelength, so each root is seen
            // exactly once.
            out.push(root);
        }
        tau = next;
        gap = next_gap;
    }
    Ok(out)
}

/// Maximum over the grid of the rescaled functional-equation residual
/// `|f(phi(z)) - Delta_p(phi(z)) conj(f(phi(-conj z)))|`, exactly zero for
/// class-G members in theory.
pub fn rescaled_symmetry_check(
    f: &dyn FunctionEvaluator,
    p: &FunctionalEquationData,
    tau: f64,
    profile: &ScalingProfile,
    z_grid: &[C64],
) -> Result<f64> {
    if z_grid.is_empty() {
        return Err(Error::OutOfDomain("symmetry check needs grid points".into()));
    }
    let mut worst = 0.0f64;
    for &z in z_grid {
        let s = phi_map(tau, profile, z)?;
        let mirrored = phi_map(tau, profile, -z.conj())?;
        let lhs = f.value(s)?;
        let rhs = delta_eval(p, s)? * f.value(mirrored)?.conj();
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// One admissible ordinate of a filling-disc scan.
#[derive(Debug, Clone, Serialize)]
pub struct FillingDiscRecord {
    /// Center ordinate on the critical line.
    pub tau: f64,
    /// Disc radius `lambda(tau) = mu(tau)/log tau`.
    pub radius: f64,
    /// Spherical score `lambda(tau) f#(1/2 + i tau)`.
    pub score: f64,
    /// `|f(1/2 + i tau)|`.
    pub modulus: f64,
}

/// Scan the critical line over `t_range`, recording every grid ordinate
/// where `|f(1/2 + i tau)|` falls inside `band`, with the spherical score
/// of the disc at that ordinate. The grid step is an eighth of the local
/// phase wavelength `2 pi / (d_p log tau)`.
pub fn lehto_scan(
    f: &dyn FunctionEvaluator,
    p: &FunctionalEquationData,
    t_range: (f64, f64),
    profile: &ScalingProfile,
    band: (f64, f64),
) -> Result<Vec<FillingDiscRecord>> {
    let (t_lo, t_hi) = t_range;
    if !(10.0 <= t_lo) || !(t_lo < t_hi) {
        return Err(Error::OutOfDomain(format!(
            "scan range must satisfy 10 <= t_lo < t_hi, got [{t_lo}, {t_hi}]"
        )));
    }
    let (b_lo, b_hi) = band;
    if !(0.0 < b_lo) || !(b_lo < b_hi) {
        return Err(Error::OutOfDomain(format!(
            "band must satisfy 0 < lo < hi, got [{b_lo}, {b_hi}]"
        )));
    }
    let inv = delta_invariants(p);
    if inv.degree == 0.0 {
        return Err(Error::OutOfDomain(
            "filling-disc scans need d_p > 0 for the grid step".into(),
        ));
    }
    let mut out = Vec::new();
    let mut tau = t_lo;
    while tau <= t_hi {
        let modulus = f.value(c64(0.5, tau))?.norm();
        if (b_lo..=b_hi).contains(&modulus) {
            let radius = profile.lambda(tau)?;
            let score = radius * spherical_derivative(f, c64(0.5, tau))?;
            out.push(FillingDiscRecord {
                tau,
                radius,
                score,
                modulus,
            });
        }
        tau += std::f64::consts::TAU / (inv.degree * tau.ln()) / 8.0;
    }
    Ok(out)
}
