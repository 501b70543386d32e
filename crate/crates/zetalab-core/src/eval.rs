//! Numerical evaluation backends behind a uniform [`FunctionEvaluator`]
//! interface: the Riemann zeta-function in the critical strip, derivatives by
//! Cauchy circle quadrature, branch-tracked logarithms, truncated Euler
//! products and the zeta_X model.
//!
//! Two independent zeta backends are kept alive on purpose. An accelerated
//! alternating (eta) series covers the strip at small heights, and an
//! Euler-Maclaurin corrected direct series covers everything else, including
//! the large heights the alternating weights cannot reach in double
//! precision. Points with `Re s <= 0` go through the functional-equation
//! reflection.

use std::sync::atomic::{AtomicBool, Ordering};

use serde::Serialize;

use crate::funceq::{delta_eval, delta_logderiv, FunctionalEquationData};
use crate::numerics::{KahanSum, BERNOULLI_2K};
use crate::{c64, C64, Error, Result};

/// Region of the plane on which an evaluator promises validity. A half-plane
/// is expressed with an infinite bound.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Domain {
    pub sigma_min: f64,
    pub sigma_max: f64,
}

impl Domain {
    pub fn strip(sigma_min: f64, sigma_max: f64) -> Self {
        Self {
            sigma_min,
            sigma_max,
        }
    }

    pub fn whole_plane() -> Self {
        Self {
            sigma_min: f64::NEG_INFINITY,
            sigma_max: f64::INFINITY,
        }
    }

    pub fn contains(&self, s: C64) -> bool {
        s.re >= self.sigma_min && s.re <= self.sigma_max
    }
}

/// Uniform access to the functions of the laboratory: value, derivatives and
/// a branch-tracked logarithm, each with an advertised domain of validity.
pub trait FunctionEvaluator {
    fn value(&self, s: C64) -> Result<C64>;

    /// `k`-th derivative; `k = 0` must agree with [`FunctionEvaluator::value`].
    fn derivative(&self, s: C64, k: u32) -> Result<C64>;

    /// Branch-tracked logarithm satisfying `exp(log_value(s)) = value(s)`.
    fn log_value(&self, s: C64) -> Result<C64>;

    fn domain(&self) -> Domain;
}

/// `k`-th derivative of `f` at `s` by trapezoidal quadrature of the Cauchy
/// integral on a circle of the given radius, doubling the node count until
/// two consecutive estimates agree within `target_abs_error`.
pub fn cauchy_derivative(
    f: &dyn Fn(C64) -> Result<C64>,
    s: C64,
    k: u32,
    radius: f64,
    target_abs_error: f64,
) -> Result<C64> {
    if radius <= 0.0 {
        return Err(Error::OutOfDomain("quadrature radius must be positive".into()));
    }
    if k == 0 {
        return f(s);
    }
    let k_factorial: f64 = (1..=k).map(f64::from).product();
    let mut nodes = 32usize;
    let mut previous: Option<C64> = None;
    loop {
        let mut sum = C64::new(0.0, 0.0);
        for j in 0..nodes {
            let theta = std::f64::consts::TAU * j as f64 / nodes as f64;
            let dir = C64::new(theta.cos(), theta.sin());
            let w = s + radius * dir;
            // f(w) e^{-ik theta}
            let phase = C64::new((k as f64 * theta).cos(), -(k as f64 * theta).sin());
            sum += f(w)? * phase;
        }
        let estimate = sum * k_factorial / (nodes as f64 * radius.powi(k as i32));
        if let Some(prev) = previous {
            if (estimate - prev).norm() <= target_abs_error.max(1e-13 * estimate.norm()) {
                return Ok(estimate);
            }
        }
        previous = Some(estimate);
        nodes *= 2;
        if nodes > 1024 {
            return Ok(previous.unwrap());
        }
    }
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Accuracy and budget knobs for the zeta backends.
#[derive(Debug, Clone, Serialize)]
pub struct EvalConfig {
    /// Absolute error target of a single evaluation.
    pub target_abs_error: f64,
    /// Hard cap on series terms before giving up.
    pub max_terms: usize,
    /// Height up to which the error model is validated; beyond it values are
    /// still produced but flagged.
    pub t_cap: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            target_abs_error: 1e-10,
            max_terms: 2_000_000,
            t_cap: 1e5,
        }
    }
}

impl EvalConfig {
    pub fn new(target_abs_error: f64, max_terms: usize, t_cap: f64) -> Result<Self> {
        if !(target_abs_error > 0.0) {
            return Err(Error::OutOfDomain(
                "target_abs_error must be positive".into(),
            ));
        }
        if max_terms == 0 || !(t_cap > 0.0) {
            return Err(Error::OutOfDomain(
                "max_terms and t_cap must be positive".into(),
            ));
        }
        Ok(Self {
            target_abs_error,
            max_terms,
            t_cap,
        })
    }
}

/// Whether `s` lies beyond the validated height range of the configuration.
pub fn beyond_validated_range(s: C64, cfg: &EvalConfig) -> bool {
    s.im.abs() > cfg.t_cap
}

// ---------------------------------------------------------------------------
// Zeta backends
// ---------------------------------------------------------------------------

struct ComplexKahan {
    re: KahanSum,
    im: KahanSum,
}

impl ComplexKahan {
    fn new() -> Self {
        Self {
            re: KahanSum::new(),
            im: KahanSum::new(),
        }
    }

    fn add(&mut self, z: C64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    fn value(&self) -> C64 {
        c64(self.re.value(), self.im.value())
    }
}

/// One Euler-Maclaurin attempt with cutoff `big_n`; `None` when the
/// correction terms start diverging before reaching the tolerance.
fn zeta_em_once(s: C64, big_n: usize, target: f64) -> Option<C64> {
    let mut partial = ComplexKahan::new();
    for n in 1..big_n {
        let ln_n = (n as f64).ln();
        partial.add((-s * ln_n).exp());
    }
    let nf = big_n as f64;
    let n_minus_s = (-s * nf.ln()).exp();
    let mut total = partial.value() + n_minus_s * nf / (s - 1.0) + 0.5 * n_minus_s;
    // term_k = B_{2k}/(2k)! (s)_{2k-1} N^{-s-2k+1}, built as a running
    // product so no intermediate factor overflows.
    let mut term = s * n_minus_s / (12.0 * nf);
    let inv_n2 = 1.0 / (nf * nf);
    let mut prev_norm = f64::INFINITY;
    for k in 1..=BERNOULLI_2K.len() {
        total += term;
        let tn = term.norm();
        if tn <= (0.05 * target).max(1e-16 * total.norm()) {
            return Some(total);
        }
        if tn > prev_norm {
            return None;
        }
        prev_norm = tn;
        if k == BERNOULLI_2K.len() {
            break;
        }
        let bernoulli_ratio = BERNOULLI_2K[k] / BERNOULLI_2K[k - 1];
        let kf = 2.0 * k as f64;
        term = term * bernoulli_ratio / ((kf + 1.0) * (kf + 2.0))
            * (s + (kf - 1.0))
            * (s + kf)
            * inv_n2;
    }
    None
}

/// Euler-Maclaurin corrected direct series, the workhorse backend. Valid for
/// any `sigma > -1/2` at any height the term budget allows.
fn zeta_em(s: C64, target: f64, max_terms: usize) -> Result<C64> {
    let mut n = ((0.28 * s.im.abs()).ceil() as usize).max(24);
    for _ in 0..4 {
        if n > max_terms {
            return Err(Error::OutOfDomain(format!(
                "zeta evaluation at {s} exceeds the term budget {max_terms}"
            )));
        }
        if let Some(v) = zeta_em_once(s, n, target) {
            return Ok(v);
        }
        n *= 2;
    }
    Err(Error::OutOfDomain(format!(
        "Euler-Maclaurin tail failed to reach tolerance at {s}"
    )))
}

/// Raw binomial-weighted alternating sum for `eta(s)` with `n` weights.
fn eta_sum(s: C64, n: usize) -> C64 {
    // d_k = n sum_{i<=k} (n+i-1)! 4^i / ((n-i)! (2i)!), by the term ratio
    // t_{i+1} = t_i 4 (n+i)(n-i) / ((2i+1)(2i+2)).
    let nf = n as f64;
    let mut d = Vec::with_capacity(n + 1);
    let mut t_i = 1.0 / nf;
    let mut acc = t_i;
    d.push(nf * acc);
    for i in 0..n {
        let fi = i as f64;
        t_i *= 4.0 * (nf + fi) * (nf - fi) / ((2.0 * fi + 1.0) * (2.0 * fi + 2.0));
        acc += t_i;
        d.push(nf * acc);
    }
    let d_n = d[n];
    let mut sum = ComplexKahan::new();
    for k in 0..n {
        let weight = d_n - d[k];
        let signed = if k % 2 == 0 { weight } else { -weight };
        sum.add(signed * (-s * ((k + 1) as f64).ln()).exp());
    }
    sum.value() / d_n
}

/// Alternating-series backend: `zeta = eta / (1 - 2^{1-s})`. Returns `None`
/// where the prefactor is too close to one of its zeros for safe division.
fn zeta_eta(s: C64, target: f64) -> Option<C64> {
    let g = 1.0 - ((1.0 - s) * std::f64::consts::LN_2).exp();
    if g.norm() < 0.05 {
        return None;
    }
    let digits = (-target.log10()).clamp(6.0, 14.0);
    let n = (1.31 * digits + 0.9 * s.im.abs()).ceil() as usize + 5;
    Some(eta_sum(s, n) / g)
}

/// Dispatch for `sigma > 0`: alternating series in the strip at small
/// heights, Euler-Maclaurin otherwise.
fn zeta_right_half(s: C64, cfg: &EvalConfig) -> Result<C64> {
    if s.re > 0.0 && s.re <= 2.0 && s.im.abs() <= 40.0 {
        if let Some(v) = zeta_eta(s, cfg.target_abs_error) {
            return Ok(v);
        }
    }
    zeta_em(s, cfg.target_abs_error, cfg.max_terms)
}

/// Evaluate the Riemann zeta-function.
pub fn zeta_eval(s: C64, cfg: &EvalConfig) -> Result<C64> {
    let dist = (s - 1.0).norm();
    if dist < 1e-3 {
        return Err(Error::NearPole { dist });
    }
    if s.re <= 0.0 && s.norm() >= 0.25 {
        // Reflect through the functional equation; the mirrored point has
        // sigma >= 1. Near the origin the reflection pairs a zero of Delta
        // with the pole of zeta, so the corrected direct series is used
        // there instead.
        let p = FunctionalEquationData::zeta();
        let mirrored = zeta_right_half(1.0 - s, cfg)?;
        return Ok(delta_eval(&p, s)? * mirrored);
    }
    zeta_right_half(s, cfg)
}

/// `k`-th derivative of zeta by Cauchy circle quadrature with radius
/// `min(0.1, dist(s,1)/2)`.
pub fn zeta_derivative(s: C64, k: u32, cfg: &EvalConfig) -> Result<C64> {
    if k == 0 {
        return zeta_eval(s, cfg);
    }
    let dist = (s - 1.0).norm();
    if dist < 1e-3 {
        return Err(Error::NearPole { dist });
    }
    let radius = 0.1f64.min(dist / 2.0);
    cauchy_derivative(&|w| zeta_eval(w, cfg), s, k, radius, cfg.target_abs_error)
}

/// The Riemann zeta-function as a [`FunctionEvaluator`]. Evaluations beyond
/// the validated height range still return values but latch a warning flag.
#[derive(Debug, Default)]
pub struct ZetaEvaluator {
    cfg: EvalConfig,
    warning: AtomicBool,
}

impl ZetaEvaluator {
    pub fn new(cfg: EvalConfig) -> Self {
        Self {
            cfg,
            warning: AtomicBool::new(false),
        }
    }

    pub fn config(&self) -> &EvalConfig {
        &self.cfg
    }

    /// Whether any evaluation so far fell outside the validated range.
    pub fn accuracy_warning(&self) -> bool {
        self.warning.load(Ordering::Relaxed)
    }

    fn note_range(&self, s: C64) {
        if beyond_validated_range(s, &self.cfg) {
            self.warning.store(true, Ordering::Relaxed);
        }
    }
}

impl FunctionEvaluator for ZetaEvaluator {
    fn value(&self, s: C64) -> Result<C64> {
        self.note_range(s);
        zeta_eval(s, &self.cfg)
    }

    fn derivative(&self, s: C64, k: u32) -> Result<C64> {
        self.note_range(s);
        zeta_derivative(s, k, &self.cfg)
    }

    fn log_value(&self, s: C64) -> Result<C64> {
        self.note_range(s);
        log_along_path(self, s)
    }

    fn domain(&self) -> Domain {
        Domain::whole_plane()
    }
}

// ---------------------------------------------------------------------------
// Branch-tracked logarithm along horizontal paths
// ---------------------------------------------------------------------------

/// Continue the logarithm along the straight leg `from -> to`, given the
/// value at `from`; increments come from principal logs of value ratios,
/// with adaptive step halving to keep each ratio close to 1.
fn continue_log(
    f: &dyn FunctionEvaluator,
    from: C64,
    to: C64,
    v_from: C64,
    log: &mut C64,
) -> Result<C64> {
    if (to - from).norm() == 0.0 {
        return Ok(v_from);
    }
    let mut pos = 0.0f64;
    let mut v_cur = v_from;
    let mut step = 0.125f64;
    while pos < 1.0 {
        let p = (pos + step).min(1.0);
        let w = from + (to - from) * p;
        let v = f.value(w)?;
        let ratio = v / v_cur;
        if !(v.is_finite() && v.norm() > 0.0 && ratio.is_finite() && (ratio - 1.0).norm() <= 0.5) {
            if step <= 1e-6 {
                return Err(Error::OutOfDomain(
                    "branch continuation stalled at a zero of f on the path".into(),
                ));
            }
            step /= 2.0;
            continue;
        }
        *log += ratio.ln();
        v_cur = v;
        pos = p;
        step = (step * 1.5).min(0.125);
    }
    Ok(v_cur)
}

fn try_path(f: &dyn FunctionEvaluator, points: &[C64], v0: C64, log0: C64) -> Result<C64> {
    let mut log = log0;
    let mut v = v0;
    for pair in points.windows(2) {
        v = continue_log(f, pair[0], pair[1], v, &mut log)?;
    }
    Ok(log)
}

/// Branch of `log f` obtained by continuous continuation of the principal
/// value at `2 + i Im(s)` along the horizontal path to `s`. Zeros (or poles)
/// blocking the path trigger a vertical detour of `0.01` before giving up.
pub fn log_along_path(f: &dyn FunctionEvaluator, s: C64) -> Result<C64> {
    let start = c64(2.0, s.im);
    let v0 = f.value(start)?;
    if !v0.is_finite() || v0.norm() == 0.0 {
        return Err(Error::OutOfDomain(
            "cannot anchor the branch: f degenerate at sigma = 2".into(),
        ));
    }
    let log0 = v0.ln();
    if let Ok(l) = try_path(f, &[start, s], v0, log0) {
        return Ok(l);
    }
    for dir in [1.0, -1.0] {
        let delta = c64(0.0, 0.01 * dir);
        if let Ok(l) = try_path(f, &[start, start + delta, s + delta, s], v0, log0) {
            return Ok(l);
        }
    }
    Err(Error::OutOfDomain(format!(
        "branch continuation to {s} failed: an obstruction sits on the path and both detours"
    )))
}

// ---------------------------------------------------------------------------
// Truncated Euler products and the zeta_X model
// ---------------------------------------------------------------------------

/// `sum over prime powers p^k <= x of p^{-k s} / k`, the log of the
/// truncated Euler product.
fn prime_log_sum(x: f64, s: C64) -> C64 {
    let mut sum = ComplexKahan::new();
    for p in crate::coeffs::primes_up_to(x as u64) {
        let lp = (p as f64).ln();
        let mut k = 1u32;
        loop {
            let ks = k as f64;
            if ks * lp > x.ln() + 1e-12 {
                break;
            }
            sum.add((-s * (ks * lp)).exp() / ks);
            k += 1;
        }
    }
    sum.value()
}

/// `sum over prime powers p^k <= x of log(p) p^{-k s}`, a truncated von
/// Mangoldt Dirichlet series (the negated log-derivative of `P_X`).
fn mangoldt_dirichlet(x: f64, s: C64) -> C64 {
    let mut sum = ComplexKahan::new();
    for p in crate::coeffs::primes_up_to(x as u64) {
        let lp = (p as f64).ln();
        let mut k = 1u32;
        loop {
            let ks = k as f64;
            if ks * lp > x.ln() + 1e-12 {
                break;
            }
            sum.add(lp * (-s * (ks * lp)).exp());
            k += 1;
        }
    }
    sum.value()
}

/// Truncated Euler product `P_X(s) = exp(sum_{n <= X} Lambda(n) / (n^s log
/// n))` with the sharp von Mangoldt cutoff.
pub fn truncated_euler(x: f64, s: C64) -> Result<C64> {
    if !(x >= 2.0) {
        return Err(Error::OutOfDomain(format!(
            "truncation point must be at least 2, got {x}"
        )));
    }
    if s.re <= 0.0 {
        return Err(Error::OutOfDomain(
            "the truncated Euler product needs Re s > 0".into(),
        ));
    }
    Ok(prime_log_sum(x, s).exp())
}

/// The zeta_X model `P_X(s) + Delta_zeta(s) conj(P_X(1 - conj s))`,
/// Delta-symmetric by construction. Kept to the open strip `0 < Re s < 1`
/// where both Euler factors are meaningful.
pub fn gonek_zeta_x(x: f64, s: C64, p: &FunctionalEquationData) -> Result<C64> {
    if !(x >= 2.0) {
        return Err(Error::OutOfDomain(format!(
            "truncation point must be at least 2, got {x}"
        )));
    }
    if !(s.re > 0.0 && s.re < 1.0) {
        return Err(Error::OutOfDomain(
            "zeta_X is modelled on the open critical strip only".into(),
        ));
    }
    let direct = prime_log_sum(x, s).exp();
    let mirrored = prime_log_sum(x, 1.0 - s.conj()).exp();
    Ok(direct + delta_eval(p, s)? * mirrored.conj())
}

/// `zeta_X` as a [`FunctionEvaluator`] for downstream scans.
#[derive(Debug, Clone)]
pub struct GonekZetaX {
    x: f64,
    p: FunctionalEquationData,
    cfg: EvalConfig,
}

impl GonekZetaX {
    pub fn new(x: f64, p: FunctionalEquationData, cfg: EvalConfig) -> Result<Self> {
        if !(x >= 2.0) {
            return Err(Error::OutOfDomain(format!(
                "truncation point must be at least 2, got {x}"
            )));
        }
        Ok(Self { x, p, cfg })
    }

    pub fn truncation(&self) -> f64 {
        self.x
    }
}

impl FunctionEvaluator for GonekZetaX {
    fn value(&self, s: C64) -> Result<C64> {
        gonek_zeta_x(self.x, s, &self.p)
    }

    fn derivative(&self, s: C64, k: u32) -> Result<C64> {
        match k {
            0 => self.value(s),
            1 => {
                // Exact: (P_X)' = -P_X M with M the von Mangoldt sum, and
                // the mirrored term differentiates to Delta' g - Delta
                // conj(P_X'(1 - conj s)).
                if !(s.re > 0.0 && s.re < 1.0) {
                    return Err(Error::OutOfDomain(
                        "zeta_X is modelled on the open critical strip only".into(),
                    ));
                }
                let mirror = 1.0 - s.conj();
                let px = prime_log_sum(self.x, s).exp();
                let pm = prime_log_sum(self.x, mirror).exp();
                let px_prime = -px * mangoldt_dirichlet(self.x, s);
                let pm_prime = -pm * mangoldt_dirichlet(self.x, mirror);
                let d = delta_eval(&self.p, s)?;
                let dld = delta_logderiv(&self.p, s)?;
                Ok(px_prime + d * dld * pm.conj() - d * pm_prime.conj())
            }
            _ => {
                let radius = 0.1f64.min(s.re / 2.0).min((1.0 - s.re) / 2.0);
                cauchy_derivative(
                    &|w| self.value(w),
                    s,
                    k,
                    radius,
                    self.cfg.target_abs_error,
                )
            }
        }
    }

    fn log_value(&self, s: C64) -> Result<C64> {
        // The model lives on a strip with no right half-plane anchor for a
        // canonical branch, so the principal value is returned.
        let v = self.value(s)?;
        if v.norm() == 0.0 {
            return Err(Error::OutOfDomain("log of a zero of zeta_X".into()));
        }
        Ok(v.ln())
    }

    fn domain(&self) -> Domain {
        Domain::strip(0.0, 1.0)
    }
}

// ---------------------------------------------------------------------------
// Spherical derivative
// ---------------------------------------------------------------------------

/// The spherical derivative `|f'(s)| / (1 + |f(s)|^2)`, extended through
/// poles by the identity `f^# = (1/f)^#`.
pub fn spherical_derivative(f: &dyn FunctionEvaluator, s: C64) -> Result<f64> {
    match f.value(s) {
        Ok(v) if v.is_finite() && v.norm() <= 1e8 => {
            let d = f.derivative(s, 1)?;
            Ok(d.norm() / (1.0 + v.norm_sqr()))
        }
        _ => {
            let recip = |w: C64| f.value(w).map(|v| v.inv());
            let inv_here = match f.value(s) {
                Ok(v) if v.norm() > 0.0 && v.inv().is_finite() => v.inv(),
                _ => c64(0.0, 0.0),
            };
            let d = cauchy_derivative(&recip, s, 1, 0.05, 1e-10)?;
            Ok(d.norm() / (1.0 + inv_here.norm_sqr()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const PI: f64 = std::f64::consts::PI;

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    #[test]
    fn known_values_through_both_backends() {
        // zeta(2) = pi^2/6 through the dispatcher (eta at this point) and
        // through the Euler-Maclaurin backend directly.
        let exact = PI * PI / 6.0;
        let v = zeta_eval(c64(2.0, 0.0), &cfg()).unwrap();
        assert!((v - exact).norm() < 1e-12, "zeta(2) = {v}");
        let em = zeta_em(c64(2.0, 0.0), 1e-12, 1_000_000).unwrap();
        assert!((em - exact).norm() < 1e-12, "EM zeta(2) = {em}");
        // zeta(4) = pi^4 / 90.
        let v4 = zeta_eval(c64(4.0, 0.0), &cfg()).unwrap();
        assert!((v4 - PI.powi(4) / 90.0).norm() < 1e-12);
        // zeta(3) (Apery's constant).
        let v3 = zeta_eval(c64(3.0, 0.0), &cfg()).unwrap();
        assert!((v3.re - 1.202_056_903_159_594_3).abs() < 1e-12);
        assert!(v3.im.abs() < 1e-14);
    }

    #[test]
    fn values_left_of_the_strip() {
        // zeta(0) = -1/2, reached by the corrected direct series.
        let v0 = zeta_eval(c64(0.0, 0.0), &cfg()).unwrap();
        assert!((v0 - c64(-0.5, 0.0)).norm() < 1e-10, "zeta(0) = {v0}");
        // zeta(-1) = -1/12 via reflection.
        let vm1 = zeta_eval(c64(-1.0, 0.0), &cfg()).unwrap();
        assert!((vm1 - c64(-1.0 / 12.0, 0.0)).norm() < 1e-10, "zeta(-1) = {vm1}");
        // Trivial zeros are exact.
        assert_eq!(zeta_eval(c64(-2.0, 0.0), &cfg()).unwrap(), c64(0.0, 0.0));
        assert_eq!(zeta_eval(c64(-4.0, 0.0), &cfg()).unwrap(), c64(0.0, 0.0));
    }

    #[test]
    fn pole_neighbourhood_is_rejected() {
        assert!(matches!(
            zeta_eval(c64(1.0, 0.0), &cfg()),
            Err(Error::NearPole { .. })
        ));
        assert!(matches!(
            zeta_eval(c64(1.0005, 0.0), &cfg()),
            Err(Error::NearPole { .. })
        ));
        // Just outside the exclusion the explicit pole term keeps EM stable:
        // zeta(1 + eps) ~ 1/eps + gamma.
        let eps = 2e-3;
        let v = zeta_eval(c64(1.0 + eps, 0.0), &cfg()).unwrap();
        let model = 1.0 / eps + 0.577_215_664_901_532_9;
        assert!((v.re - model).abs() < 2e-3 * model, "zeta(1+eps) = {v}");
    }

    #[test]
    fn first_zero_is_where_it_should_be()
    {
        let v = zeta_eval(c64(0.5, 14.134_725), &cfg()).unwrap();
        assert!(v.norm() < 1e-4, "|zeta(rho_1)| = {}", v.norm());
    }

    #[test]
    fn eta_machinery_sums_ln_two() {
        // At s = 1 the alternating series is 1 - 1/2 + 1/3 - ... = ln 2;
        // this exercises the binomial weights independently of zeta.
        let v = eta_sum(c64(1.0, 0.0), 30);
        assert!((v - std::f64::consts::LN_2).norm() < 1e-13, "eta(1) = {v}");
    }

    #[test]
    fn backends_agree_on_the_overlap_strip() {
        for &sigma in &[1.5, 2.0, 2.5] {
            for &t in &[3.0, 15.0, 35.0] {
                let s = c64(sigma, t);
                let eta = zeta_eta(s, 1e-11).expect("prefactor safe here");
                let em = zeta_em(s, 1e-11, 1_000_000).unwrap();
                assert!(
                    (eta - em).norm() < 1e-9,
                    "backend disagreement {} at {s}",
                    (eta - em).norm()
                );
            }
        }
    }

    #[test]
    fn direct_series_oracle_at_height_1000() {
        // At sigma = 3 the plain Dirichlet series with tail bound 1/(2 N^2)
        // is an independent check of the EM backend at height 1000.
        let s = c64(3.0, 1000.0);
        let mut partial = c64(0.0, 0.0);
        for n in 1..20_000 {
            partial += (-s * (n as f64).ln()).exp();
        }
        let em = zeta_em(s, 1e-12, 1_000_000).unwrap();
        assert!((em - partial).norm() < 5e-9, "EM vs direct: {}", (em - partial).norm());
    }

    #[test]
    fn hardy_reality_anchors_the_high_backend() {
        // Z(t) real couples the EM backend to the independently tested
        // Gamma module through the functional equation.
        let p = FunctionalEquationData::zeta();
        let zeta = ZetaEvaluator::new(cfg());
        for &t in &[250.0, 1000.0] {
            let z = crate::funceq::hardy_z(&zeta, &p, t).unwrap();
            let v = zeta_eval(c64(0.5, t), &cfg()).unwrap();
            assert!((z.abs() - v.norm()).abs() < 1e-10, "|Z| vs |zeta| at {t}");
        }
    }

    #[test]
    fn reflection_formula_consistency() {
        let p = FunctionalEquationData::zeta();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let s = c64(rng.gen_range(0.05..0.95), rng.gen_range(2.0..35.0));
            let lhs = zeta_eval(s, &cfg()).unwrap();
            let rhs = delta_eval(&p, s).unwrap() * zeta_eval(1.0 - s, &cfg()).unwrap();
            assert!(
                (lhs - rhs).norm() < 1e-9,
                "reflection residual {} at {s}",
                (lhs - rhs).norm()
            );
        }
    }

    #[test]
    fn conjugation_symmetry() {
        for &s in &[
            c64(0.5, 21.3),
            c64(1.7, 9.0),
            c64(3.2, 400.0),
            c64(-1.3, 7.0),
            c64(0.2, 60.0),
        ] {
            let a = zeta_eval(s, &cfg()).unwrap();
            let b = zeta_eval(s.conj(), &cfg()).unwrap().conj();
            assert!(
                (a - b).norm() < 1e-10 * a.norm().max(1.0),
                "conjugation asymmetry at {s}"
            );
        }
    }

    #[test]
    fn derivative_order_zero_and_known_value() {
        let s = c64(0.7, 12.0);
        assert_eq!(
            zeta_derivative(s, 0, &cfg()).unwrap(),
            zeta_eval(s, &cfg()).unwrap()
        );
        // zeta'(2) against the term-wise differentiated Dirichlet series
        // with Euler-Maclaurin tail: for f = ln(x)/x^2 the sum over n > N
        // is int_N f - f(N)/2 - f'(N)/12 + ...
        let n_cut = 100_000usize;
        let mut oracle = KahanSum::new();
        for n in 2..=n_cut {
            let nf = n as f64;
            oracle.add(nf.ln() / (nf * nf));
        }
        let nf = n_cut as f64;
        let tail = (nf.ln() + 1.0) / nf - nf.ln() / (2.0 * nf * nf)
            + (2.0 * nf.ln() - 1.0) / (12.0 * nf * nf * nf);
        let oracle = -(oracle.value() + tail);
        assert!((oracle + 0.937_548_254_3).abs() < 1e-9, "oracle sanity");
        let d = zeta_derivative(c64(2.0, 0.0), 1, &cfg()).unwrap();
        assert!((d.re - oracle).abs() < 1e-9, "zeta'(2) = {} vs {oracle}", d.re);
        assert!(d.im.abs() < 1e-10);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let s = c64(0.5, 20.0);
        let d = zeta_derivative(s, 1, &cfg()).unwrap();
        // Richardson-extrapolated central differences.
        let fd = |h: f64| -> C64 {
            (zeta_eval(s + h, &cfg()).unwrap() - zeta_eval(s - h, &cfg()).unwrap()) / (2.0 * h)
        };
        let a = fd(1e-4);
        let b = fd(5e-5);
        let extrapolated = (4.0 * b - a) / 3.0;
        assert!((d - extrapolated).norm() < 1e-6, "FD mismatch {}", (d - extrapolated).norm());
    }

    #[test]
    fn derivative_orders_are_consistent() {
        let s = c64(0.5, 15.0);
        let d2 = zeta_derivative(s, 2, &cfg()).unwrap();
        let of_d1 = cauchy_derivative(
            &|w| zeta_derivative(w, 1, &cfg()),
            s,
            1,
            0.05,
            1e-8,
        )
        .unwrap();
        assert!((d2 - of_d1).norm() < 1e-5, "order consistency {}", (d2 - of_d1).norm());
    }

    #[test]
    fn derivative_near_pole_is_a_radius_error() {
        assert!(matches!(
            zeta_derivative(c64(1.0 + 1e-4, 0.0), 1, &cfg()),
            Err(Error::NearPole { .. })
        ));
    }

    #[test]
    fn log_along_path_properties() {
        let zeta = ZetaEvaluator::new(cfg());
        // Principal sheet near sigma = 2: |zeta(2+it) - 1| < 0.645 keeps the
        // argument well inside (-pi, pi).
        for &t in &[0.0, 7.7, 33.0, 100.0] {
            let l = log_along_path(&zeta, c64(2.0, t)).unwrap();
            assert!(l.im.abs() < 0.8, "principal argument {} at t = {t}", l.im);
        }
        for &s in &[c64(0.5, 30.0), c64(0.2, 18.4), c64(1.5, 64.0), c64(3.0, 5.0)] {
            let l = log_along_path(&zeta, s).unwrap();
            let v = zeta_eval(s, &cfg()).unwrap();
            assert!(
                (l.exp() - v).norm() < 1e-9 * v.norm().max(1.0),
                "exp(log) mismatch at {s}"
            );
            assert!((l.re - v.norm().ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn log_along_path_detours_around_a_zero() {
        let zeta = ZetaEvaluator::new(cfg());
        // The horizontal path at the height of the first zero passes
        // through it; the detour must still deliver the right value.
        let s = c64(0.2, 14.134_725);
        let l = log_along_path(&zeta, s).unwrap();
        let v = zeta_eval(s, &cfg()).unwrap();
        assert!(
            (l.exp() - v).norm() < 1e-9 * v.norm().max(1.0),
            "detoured exp(log) mismatch: {}",
            (l.exp() - v).norm()
        );
    }

    #[test]
    fn evaluator_warning_latch() {
        let zeta = ZetaEvaluator::new(cfg());
        zeta.value(c64(0.5, 50.0)).unwrap();
        assert!(!zeta.accuracy_warning());
        zeta.value(c64(0.5, 1.5e5)).unwrap();
        assert!(zeta.accuracy_warning());
    }

    #[test]
    fn truncated_euler_product_approaches_zeta() {
        let z3 = zeta_eval(c64(3.0, 0.0), &cfg()).unwrap();
        let p1000 = truncated_euler(1000.0, c64(3.0, 0.0)).unwrap();
        assert!((p1000 - z3).norm() < 1e-3, "P_1000(3) error {}", (p1000 - z3).norm());
        // Errors: short truncation and wrong half-plane.
        assert!(truncated_euler(1.5, c64(3.0, 0.0)).is_err());
        assert!(truncated_euler(100.0, c64(-0.5, 3.0)).is_err());
        // Conjugation symmetry of the finite sum.
        let s = c64(2.0, 5.0);
        let a = truncated_euler(500.0, s).unwrap();
        let b = truncated_euler(500.0, s.conj()).unwrap().conj();
        assert!((a - b).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn zeta_x_is_delta_symmetric() {
        let p = FunctionalEquationData::zeta();
        for &sigma in &[0.3, 0.5, 0.7] {
            for &t in &[10.0, 30.0] {
                let s = c64(sigma, t);
                let lhs = gonek_zeta_x(200.0, s, &p).unwrap();
                let mirrored = gonek_zeta_x(200.0, 1.0 - s.conj(), &p).unwrap();
                let rhs = delta_eval(&p, s).unwrap() * mirrored.conj();
                assert!(
                    (lhs - rhs).norm() < 1e-10 * lhs.norm().max(1.0),
                    "zeta_X functional equation residual at {s}"
                );
            }
        }
        assert!(gonek_zeta_x(200.0, c64(1.5, 3.0), &p).is_err());
        assert!(gonek_zeta_x(1.0, c64(0.5, 3.0), &p).is_err());
    }

    #[test]
    fn zeta_x_hardy_function_is_real() {
        let p = FunctionalEquationData::zeta();
        let model = GonekZetaX::new(150.0, p.clone(), cfg()).unwrap();
        for &t in &[8.0, 20.0, 45.0] {
            let z = crate::funceq::hardy_z(&model, &p, t).unwrap();
            assert!(z.is_finite());
        }
    }

    #[test]
    fn zeta_x_derivative_and_log() {
        let p = FunctionalEquationData::zeta();
        let model = GonekZetaX::new(100.0, p, cfg()).unwrap();
        let s = c64(0.6, 12.0);
        let h = 1e-6;
        let numeric = (model.value(s + h).unwrap() - model.value(s - h).unwrap()) / (2.0 * h);
        let exact = model.derivative(s, 1).unwrap();
        assert!(
            (numeric - exact).norm() < 1e-6 * exact.norm().max(1.0),
            "zeta_X derivative mismatch {}",
            (numeric - exact).norm()
        );
        let l = model.log_value(s).unwrap();
        assert!((l.exp() - model.value(s).unwrap()).norm() < 1e-9);
    }

    struct ConstEvaluator(C64);

    impl FunctionEvaluator for ConstEvaluator {
        fn value(&self, _s: C64) -> Result<C64> {
            Ok(self.0)
        }
        fn derivative(&self, s: C64, k: u32) -> Result<C64> {
            if k == 0 {
                self.value(s)
            } else {
                Ok(c64(0.0, 0.0))
            }
        }
        fn log_value(&self, _s: C64) -> Result<C64> {
            Ok(self.0.ln())
        }
        fn domain(&self) -> Domain {
            Domain::whole_plane()
        }
    }

    struct Reciprocal<'a>(&'a dyn FunctionEvaluator);

    impl FunctionEvaluator for Reciprocal<'_> {
        fn value(&self, s: C64) -> Result<C64> {
            self.0.value(s).map(|v| v.inv())
        }
        fn derivative(&self, s: C64, k: u32) -> Result<C64> {
            match k {
                0 => self.value(s),
                1 => {
                    let v = self.0.value(s)?;
                    let d = self.0.derivative(s, 1)?;
                    Ok(-d / (v * v))
                }
                _ => cauchy_derivative(&|w| self.value(w), s, k, 0.05, 1e-10),
            }
        }
        fn log_value(&self, s: C64) -> Result<C64> {
            self.0.log_value(s).map(|l| -l)
        }
        fn domain(&self) -> Domain {
            self.0.domain()
        }
    }

    #[test]
    fn spherical_derivative_properties() {
        let constant = ConstEvaluator(c64(2.5, -1.0));
        assert_eq!(spherical_derivative(&constant, c64(0.3, 5.0)).unwrap(), 0.0);

        let zeta = ZetaEvaluator::new(cfg());
        let s = c64(2.0, 3.0);
        let direct = spherical_derivative(&zeta, s).unwrap();
        let recip = Reciprocal(&zeta);
        let inverted = spherical_derivative(&recip, s).unwrap();
        assert!(
            (direct - inverted).abs() < 1e-9 * direct.max(1.0),
            "f and 1/f spherical derivatives differ: {direct} vs {inverted}"
        );

        // At the first zero |zeta| ~ 0, so f^# ~ |zeta'|.
        let rho = c64(0.5, 14.134_725);
        let sph = spherical_derivative(&zeta, rho).unwrap();
        let dz = zeta_derivative(rho, 1, &cfg()).unwrap().norm();
        assert!((sph - dz).abs() < 1e-7, "f^# = {sph} vs |zeta'| = {dz}");

        // Through the pole of zeta the reciprocal rule takes over.
        let near_pole = c64(1.0 + 2e-4, 0.0);
        let sph_pole = spherical_derivative(&zeta, near_pole).unwrap();
        assert!(sph_pole.is_finite() && sph_pole >= 0.0);
    }

    #[test]
    fn config_validation() {
        assert!(EvalConfig::new(0.0, 10, 1e5).is_err());
        assert!(EvalConfig::new(1e-10, 0, 1e5).is_err());
        assert!(EvalConfig::new(1e-10, 10, -1.0).is_err());
        assert!(EvalConfig::new(1e-8, 100_000, 1e4).is_ok());
    }
}
