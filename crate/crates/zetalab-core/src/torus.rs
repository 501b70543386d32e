//! The truncated torus model: twisted Dirichlet series, Plancherel and
//! Birkhoff averages, exclusion sets, moment estimates, and the Selberg
//! central limit theorem.
//!
//! The compact group behind vertical translations is represented by its
//! finite truncation: phases for each prime up to a bound, acting on
//! series whose support is smooth with respect to that bound. All
//! measure-theoretic statements are realized as Monte-Carlo or ergodic
//! averages over these truncations.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::coeffs::{
    is_prime, power_coeffs, primes_up_to, smallest_prime_factor_table, CoefficientSequence,
    EulerProductSpec,
};
use crate::eval::{log_along_path, FunctionEvaluator};
use crate::numerics::KahanSum;
use crate::{c64, C64, Error, Result};

/// Default prime truncation of the torus: the hundredth prime.
pub const DEFAULT_PRIME_BOUND: u64 = 541;

const TAU: f64 = std::f64::consts::TAU;

// ---------------------------------------------------------------------------
// Torus points

/// A point of the truncated torus: one phase per prime up to the bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorusPoint {
    phases: BTreeMap<u64, f64>,
    prime_bound: u64,
}

impl TorusPoint {
    /// The identity point with every phase zero.
    pub fn zero(prime_bound: u64) -> Result<Self> {
        if prime_bound < 2 {
            return Err(Error::OutOfDomain(format!(
                "torus needs at least one prime, bound {prime_bound}"
            )));
        }
        let phases = primes_up_to(prime_bound).into_iter().map(|p| (p, 0.0)).collect();
        Ok(Self {
            phases,
            prime_bound,
        })
    }

    /// The vertical-translation point `e_t` with `theta_p = -t log p`.
    pub fn e_t(prime_bound: u64, t: f64) -> Result<Self> {
        let mut x = Self::zero(prime_bound)?;
        for (p, theta) in x.phases.iter_mut() {
            *theta = (-t * (*p as f64).ln()).rem_euclid(TAU);
        }
        Ok(x)
    }

    /// A uniformly random point.
    pub fn random<R: Rng>(prime_bound: u64, rng: &mut R) -> Result<Self> {
        let mut x = Self::zero(prime_bound)?;
        for theta in x.phases.values_mut() {
            *theta = rng.gen_range(0.0..TAU);
        }
        Ok(x)
    }

    /// Set one phase; the prime must belong to the truncation and the
    /// phase to `[0, 2pi)`.
    pub fn set_phase(&mut self, p: u64, theta: f64) -> Result<()> {
        if !(0.0..TAU).contains(&theta) {
            return Err(Error::OutOfDomain(format!(
                "phase must lie in [0, 2pi), got {theta}"
            )));
        }
        match self.phases.get_mut(&p) {
            Some(slot) => {
                *slot = theta;
                Ok(())
            }
            None => Err(Error::OutOfDomain(format!(
                "prime {p} is outside the truncation (bound {})",
                self.prime_bound
            ))),
        }
    }

    pub fn phase(&self, p: u64) -> Option<f64> {
        self.phases.get(&p).copied()
    }

    pub fn prime_bound(&self) -> u64 {
        self.prime_bound
    }

    pub fn phases(&self) -> &BTreeMap<u64, f64> {
        &self.phases
    }

    /// Group translation: componentwise addition of phases modulo `2pi`.
    pub fn translate(&self, other: &TorusPoint) -> Result<TorusPoint> {
        if self.prime_bound != other.prime_bound {
            return Err(Error::OutOfDomain(format!(
                "cannot translate points with bounds {} and {}",
                self.prime_bound, other.prime_bound
            )));
        }
        let mut out = self.clone();
        for (p, theta) in out.phases.iter_mut() {
            *theta = (*theta + other.phases[p]).rem_euclid(TAU);
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Twisted series

/// Factor `n` over the torus primes, returning `(prime, multiplicity)`
/// pairs, or a truncation error when a factor exceeds the bound.
fn factor_against(spf: &[u32], n: usize, prime_bound: u64) -> Result<Vec<(u64, u32)>> {
    let mut out = Vec::new();
    let mut m = n;
    while m > 1 {
        let p = spf[m] as usize;
        if p as u64 > prime_bound {
            return Err(Error::OutOfDomain(format!(
                "coefficient index {n} has prime factor {p} beyond the torus bound {prime_bound}"
            )));
        }
        let mut nu = 0u32;
        while m % p == 0 {
            m /= p;
            nu += 1;
        }
        out.push((p as u64, nu));
    }
    Ok(out)
}

/// The twisted partial sum `sum_n a(n) exp(i sum_p nu(n;p) theta_p) / n^s`.
pub fn twisted_series(a: &CoefficientSequence, x: &TorusPoint, s: C64) -> Result<C64> {
    if a.is_empty() {
        return Err(Error::Length {
            requested: 1,
            available: 0,
        });
    }
    let spf = smallest_prime_factor_table(a.len());
    let mut re = KahanSum::new();
    let mut im = KahanSum::new();
    for n in 1..=a.len() {
        let coeff = a.get(n);
        if coeff.norm_sqr() == 0.0 {
            continue;
        }
        let mut phase = 0.0f64;
        for (p, nu) in factor_against(&spf, n, x.prime_bound)? {
            phase += nu as f64 * x.phases[&p];
        }
        let character = c64(phase.cos(), phase.sin());
        let radial = (-s * (n as f64).ln()).exp();
        let term = coeff * character * radial;
        re.add(term.re);
        im.add(term.im);
    }
    Ok(c64(re.value(), im.value()))
}

/// The Plancherel target `sum_n |a(n)|^2 / n^{2 sigma}` of a truncated
/// series.
pub fn series_target(a: &CoefficientSequence, sigma: f64) -> f64 {
    let mut sum = KahanSum::new();
    for n in 1..=a.len() {
        sum.add(a.get(n).norm_sqr() * (n as f64).powf(-2.0 * sigma));
    }
    sum.value()
}

/// Precomputed evaluation plan for repeated sampling of one series at a
/// fixed real abscissa.
struct SeriesPlan {
    terms: Vec<PlanTerm>,
    primes: Vec<u64>,
    log_primes: Vec<f64>,
}

struct PlanTerm {
    coeff: C64,
    radial: f64,
    factors: Vec<(u32, f64)>,
}

impl SeriesPlan {
    fn build(a: &CoefficientSequence, prime_bound: u64, sigma: f64) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Length {
                requested: 1,
                available: 0,
            });
        }
        let primes = primes_up_to(prime_bound);
        let index: BTreeMap<u64, u32> = primes
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i as u32))
            .collect();
        let spf = smallest_prime_factor_table(a.len());
        let mut terms = Vec::new();
        for n in 1..=a.len() {
            let coeff = a.get(n);
            if coeff.norm_sqr() == 0.0 {
                continue;
            }
            let factors = factor_against(&spf, n, prime_bound)?
                .into_iter()
                .map(|(p, nu)| (index[&p], nu as f64))
                .collect();
            terms.push(PlanTerm {
                coeff,
                radial: (n as f64).powf(-sigma),
                factors,
            });
        }
        let log_primes = primes.iter().map(|&p| (p as f64).ln()).collect();
        Ok(Self {
            terms,
            primes,
            log_primes,
        })
    }

    fn value(&self, thetas: &[f64]) -> C64 {
        let mut acc = c64(0.0, 0.0);
        for term in &self.terms {
            let mut phase = 0.0f64;
            for &(idx, nu) in &term.factors {
                phase += nu * thetas[idx as usize];
            }
            acc += term.coeff * c64(phase.cos(), phase.sin()) * term.radial;
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Plancherel and Birkhoff averages

/// Monte-Carlo mean of `|L(sigma, x)|^2` over uniform random torus points
/// against the Plancherel target. Returns `(mc_mean, target, z_score)`.
pub fn plancherel_check(
    a: &CoefficientSequence,
    sigma: f64,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64, f64)> {
    if sigma <= 0.5 {
        return Err(Error::OutOfDomain(format!(
            "Plancherel check needs sigma > 1/2, got {sigma}"
        )));
    }
    if samples < 100 {
        return Err(Error::OutOfDomain(format!(
            "Plancherel check needs at least 100 samples, got {samples}"
        )));
    }
    let plan = SeriesPlan::build(a, DEFAULT_PRIME_BOUND, sigma)?;
    let target = series_target(a, sigma);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut thetas = vec![0.0f64; plan.primes.len()];
    let mut mean = KahanSum::new();
    let mut square = KahanSum::new();
    for _ in 0..samples {
        for theta in thetas.iter_mut() {
            *theta = rng.gen_range(0.0..TAU);
        }
        let v = plan.value(&thetas).norm_sqr();
        mean.add(v);
        square.add(v * v);
    }
    let n = samples as f64;
    let mc_mean = mean.value() / n;
    let variance = ((square.value() - n * mc_mean * mc_mean) / (n - 1.0)).max(0.0);
    let se = (variance / n).sqrt();
    let z = if se > 0.0 { (mc_mean - target) / se } else { 0.0 };
    Ok((mc_mean, target, z))
}

const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_361_98,
    0.313_706_645_877_887_29,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

/// Accumulate a Gauss-Legendre 8 pass of `g` over `[x0, x1]` split into
/// `panels` equal panels.
fn gl8_integral(g: &mut dyn FnMut(f64) -> f64, x0: f64, x1: f64, panels: usize) -> f64 {
    let h = (x1 - x0) / panels as f64;
    let mut sum = KahanSum::new();
    for panel in 0..panels {
        let mid = x0 + (panel as f64 + 0.5) * h;
        for (x, w) in GL8_X.iter().zip(&GL8_W) {
            let dx = 0.5 * h * x;
            sum.add(0.5 * h * w * (g(mid - dx) + g(mid + dx)));
        }
    }
    sum.value()
}

/// Ergodic time average `(1/T) int_0^T |L(sigma, x0 + e_t)|^2 dt` against
/// the Plancherel space average. Returns `(time_avg, space_avg,
/// relative_gap)`.
pub fn birkhoff_vs_space(
    a: &CoefficientSequence,
    sigma: f64,
    big_t: f64,
    x0: &TorusPoint,
) -> Result<(f64, f64, f64)> {
    if sigma <= 0.5 {
        return Err(Error::OutOfDomain(format!(
            "time averages need sigma > 1/2, got {sigma}"
        )));
    }
    if !(big_t >= 1.0) {
        return Err(Error::OutOfDomain(format!(
            "time averages need T >= 1, got {big_t}"
        )));
    }
    let plan = SeriesPlan::build(a, x0.prime_bound, sigma)?;
    let base: Vec<f64> = plan.primes.iter().map(|p| x0.phases[p]).collect();
    let mut thetas = vec![0.0f64; base.len()];
    let mut g = |t: f64| {
        for ((theta, b), lp) in thetas.iter_mut().zip(&base).zip(&plan.log_primes) {
            *theta = b - t * lp;
        }
        plan.value(&thetas).norm_sqr()
    };
    let mut panels = (big_t.ceil() as usize).max(8);
    let mut coarse = gl8_integral(&mut g, 0.0, big_t, panels);
    let mut converged = None;
    for _ in 0..4 {
        panels *= 2;
        let fine = gl8_integral(&mut g, 0.0, big_t, panels);
        if (fine - coarse).abs() <= 1e-6 * (1.0 + fine.abs()) {
            converged = Some(fine);
            break;
        }
        coarse = fine;
    }
    let integral = converged.ok_or_else(|| {
        Error::OutOfDomain("time-average quadrature did not stabilize".into())
    })?;
    let time_avg = integral / big_t;
    let space_avg = series_target(a, sigma);
    let gap = (time_avg - space_avg).abs() / space_avg;
    Ok((time_avg, space_avg, gap))
}

// ---------------------------------------------------------------------------
// Exclusion sets

/// The set of horizontal blocks where a sampled sup of `|f|` exceeds a
/// threshold on the rectangle `[alpha, 2] x block`.
#[derive(Debug, Clone, Serialize)]
pub struct BlockExclusion {
    /// Block length.
    pub l: f64,
    /// The sup threshold `M`.
    pub threshold: f64,
    /// Left abscissa of the scanned rectangles.
    pub alpha: f64,
    excluded: BTreeSet<u64>,
    /// Fraction of excluded blocks among indices `1..=scanned_blocks`.
    pub density: f64,
    pub scanned_blocks: u64,
    t_floor: f64,
}

impl BlockExclusion {
    /// An exclusion-free set (used for absolutely convergent regimes).
    pub fn none(l: f64, alpha: f64) -> Result<Self> {
        if !(l > 0.0) {
            return Err(Error::OutOfDomain(format!("block length must be positive, got {l}")));
        }
        Ok(Self {
            l,
            threshold: f64::INFINITY,
            alpha,
            excluded: BTreeSet::new(),
            density: 0.0,
            scanned_blocks: 0,
            t_floor: 0.0,
        })
    }

    pub fn is_excluded(&self, n: u64) -> bool {
        (n as f64) * self.l < self.t_floor || self.excluded.contains(&n)
    }

    /// Whether the ordinate `t` lies in an included block.
    pub fn includes_t(&self, t: f64) -> bool {
        t >= self.t_floor && !self.excluded.contains(&((t / self.l).floor() as u64))
    }

    pub fn excluded_blocks(&self) -> impl Iterator<Item = u64> + '_ {
        self.excluded.iter().copied()
    }
}

/// Estimate the sup of `|f|` over `[alpha, 2] x [t0, t0 + l]` by a grid
/// whose step comes from a probed derivative bound; values above `cut`
/// shortcut the scan since only the threshold comparison matters.
fn sampled_sup(
    f: &dyn FunctionEvaluator,
    alpha: f64,
    t0: f64,
    l: f64,
    cut: f64,
) -> Result<f64> {
    let mut vmax = 0.0f64;
    let mut probes = [0.0f64; 3];
    for (i, frac) in [1.0 / 6.0, 0.5, 5.0 / 6.0].iter().enumerate() {
        probes[i] = f.value(c64(alpha, t0 + frac * l))?.norm();
        vmax = vmax.max(probes[i]);
    }
    let slope = ((probes[1] - probes[0]).abs().max((probes[2] - probes[1]).abs())) / (l / 3.0);
    // Safety factor on the probed slope plus a floor keyed to the value
    // scale, so flat probes do not produce an absurdly coarse grid.
    let bound = 4.0 * slope + 0.5 * vmax + 0.5;
    let h = (0.1 * vmax.max(0.5 * cut) / bound)
        .clamp(l / 64.0, (l / 4.0).min((2.0 - alpha) / 4.0));
    let t_steps = (l / h).ceil() as usize;
    let s_steps = ((2.0 - alpha) / h).ceil() as usize;
    let mut sup = vmax;
    for i in 0..=s_steps {
        let sigma = alpha + (2.0 - alpha) * i as f64 / s_steps as f64;
        for j in 0..=t_steps {
            let t = t0 + l * j as f64 / t_steps as f64;
            let v = f.value(c64(sigma, t))?.norm();
            sup = sup.max(v);
            if sup > cut {
                return Ok(sup);
            }
        }
    }
    Ok(sup)
}

/// Threshold the sampled sup of `|f|` block by block. Blocks starting
/// below `t = 1` are excluded by policy without evaluation.
pub fn build_exclusion(
    f: &dyn FunctionEvaluator,
    l: f64,
    alpha: f64,
    threshold: f64,
    n_blocks: u64,
) -> Result<BlockExclusion> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::OutOfDomain(format!("block length must be positive, got {l}")));
    }
    if !(alpha > 0.5 && alpha < 2.0) {
        return Err(Error::OutOfDomain(format!(
            "exclusion rectangles need 1/2 < alpha < 2, got {alpha}"
        )));
    }
    if !(threshold > 0.0) || n_blocks == 0 {
        return Err(Error::OutOfDomain(
            "exclusion needs a positive threshold and at least one block".into(),
        ));
    }
    let mut excluded = BTreeSet::new();
    for n in 0..=n_blocks {
        let t0 = n as f64 * l;
        if t0 < 1.0 {
            excluded.insert(n);
            continue;
        }
        if sampled_sup(f, alpha, t0, l, threshold)? > threshold {
            excluded.insert(n);
        }
    }
    let counted = excluded.iter().filter(|&&n| n >= 1 && n <= n_blocks).count();
    Ok(BlockExclusion {
        l,
        threshold,
        alpha,
        excluded,
        density: counted as f64 / n_blocks as f64,
        scanned_blocks: n_blocks,
        t_floor: 1.0,
    })
}

// ---------------------------------------------------------------------------
// Moment targets

/// One moment comparison: an empirical average against the coefficient
/// target `sum |a_kappa(n)|^2 / n^{2 sigma}`.
#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub sigma: f64,
    pub kappa: f64,
    pub empirical: f64,
    /// Partial-sum target, sharpened by an exact tail when the coefficient
    /// envelope is constant.
    pub target: f64,
    /// Rigorous bound on the mass beyond the truncation.
    pub tail_bound: f64,
    pub relative_gap: f64,
    /// `T` for continuous averages, `N` for discrete ones.
    pub scale: f64,
}

fn gen_binom(kappa: f64, nu: u32) -> f64 {
    (1..=nu).fold(1.0, |acc, i| acc * (kappa + i as f64 - 1.0) / i as f64)
}

/// Rankin bound on `sum_{n > n_cut} d_kappa(n)^2 / n^{2 sigma}` through
/// the Ramanujan envelope `|a_kappa(n)| <= d_kappa(n)`.
fn rankin_tail(kappa: f64, two_sigma: f64, n_cut: usize) -> f64 {
    if two_sigma <= 1.0 + 1e-9 {
        return f64::INFINITY;
    }
    let primes = primes_up_to(10_000);
    let mut best = f64::INFINITY;
    for j in 1..=20 {
        let eta = (two_sigma - 1.0) * j as f64 / 21.0;
        let u = two_sigma - eta;
        let mut log_value = 0.0f64;
        for &p in &primes {
            let pf = p as f64;
            let mut local = 1.0f64;
            let mut power = 1.0f64;
            for nu in 1..60u32 {
                power *= pf.powf(-u);
                let term = gen_binom(kappa, nu).powi(2) * power;
                local += term;
                if term < 1e-18 * local {
                    break;
                }
            }
            log_value += local.ln();
        }
        // Primes beyond the product cutoff contribute at most twice the
        // leading term of each local factor.
        let q = 10_000f64;
        log_value += 2.0 * kappa * kappa * q.powf(1.0 - u) / (u - 1.0);
        let bound = (n_cut as f64).powf(-eta) * log_value.exp();
        best = best.min(bound);
    }
    best
}

/// Euler-Maclaurin value of `sum_{n > n_cut} n^{-s}`, essentially exact
/// for `n_cut` beyond a few thousand.
fn zeta_tail(s: f64, n_cut: u64) -> f64 {
    let a = n_cut as f64 + 1.0;
    a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s) + s * a.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * a.powf(-s - 3.0) / 720.0
}

/// The coefficient target `(partial, tail_bound)` for the `2 kappa`-th
/// moment at abscissa `sigma`: `sum_{n <= n_cut} |a_kappa(n)|^2 / n^{2
/// sigma}`, with the tail added exactly when the squared coefficients are
/// identically one and bounded rigorously otherwise.
pub fn moment_target(
    spec: &EulerProductSpec,
    kappa: f64,
    sigma: f64,
    n_cut: usize,
) -> Result<(f64, f64)> {
    if sigma <= 0.5 {
        return Err(Error::OutOfDomain(format!(
            "moment targets need sigma > 1/2, got {sigma}"
        )));
    }
    if n_cut < 2 {
        return Err(Error::OutOfDomain("target truncation too small".into()));
    }
    if kappa == 0.0 {
        return Ok((1.0, 0.0));
    }
    let a = power_coeffs(spec, kappa, n_cut)?;
    let mut sum = KahanSum::new();
    let mut constant_envelope = true;
    for n in 1..=n_cut {
        let w = a.get(n).norm_sqr();
        if (w - 1.0).abs() > 1e-12 {
            constant_envelope = false;
        }
        sum.add(w * (n as f64).powf(-2.0 * sigma));
    }
    if constant_envelope {
        let tail = zeta_tail(2.0 * sigma, n_cut as u64);
        Ok((sum.value() + tail, 1e-12 * (sum.value() + tail)))
    } else {
        Ok((sum.value(), rankin_tail(kappa, 2.0 * sigma, n_cut)))
    }
}

fn target_cut(spec: &EulerProductSpec) -> usize {
    (spec.prime_bound() as usize).min(200_000)
}

// ---------------------------------------------------------------------------
// Continuous, integrated, and discrete moments

const GL24_HALF_X: [f64; 12] = [
    0.064_056_892_862_605_626,
    0.191_118_867_473_616_31,
    0.315_042_679_696_163_37,
    0.433_793_507_626_045_14,
    0.545_421_471_388_839_54,
    0.648_093_651_936_975_57,
    0.740_124_191_578_554_4,
    0.820_001_985_973_902_9,
    0.886_415_527_004_401_1,
    0.938_274_552_002_732_8,
    0.974_728_555_971_309_5,
    0.995_187_219_997_021_36,
];
const GL24_HALF_W: [f64; 12] = [
    0.127_938_195_346_752_16,
    0.125_837_456_346_828_3,
    0.121_670_472_927_803_39,
    0.115_505_668_053_725_6,
    0.107_444_270_115_965_63,
    0.097_618_652_104_113_89,
    0.086_190_161_531_953_27,
    0.073_346_481_411_080_3,
    0.059_298_584_915_436_78,
    0.044_277_438_817_419_81,
    0.028_531_388_628_933_66,
    0.012_341_229_799_987_2,
];

/// Gauss-Legendre 24 nodes and weights on `[0, 1]`.
fn gl24_unit() -> ([f64; 24], [f64; 24]) {
    let mut nodes = [0.0f64; 24];
    let mut weights = [0.0f64; 24];
    for i in 0..12 {
        nodes[i] = 0.5 * (1.0 - GL24_HALF_X[11 - i]);
        weights[i] = 0.5 * GL24_HALF_W[11 - i];
        nodes[12 + i] = 0.5 * (1.0 + GL24_HALF_X[i]);
        weights[12 + i] = 0.5 * GL24_HALF_W[i];
    }
    (nodes, weights)
}

fn validate_moment_scale(l: f64, big_t: f64) -> Result<u64> {
    let blocks = (big_t / l).floor() as u64;
    if blocks < 10 {
        return Err(Error::OutOfDomain(format!(
            "moment scale T = {big_t} covers fewer than 10 blocks of length {l}"
        )));
    }
    Ok(blocks)
}

/// `(1/T) int |f(sigma + it)|^{2k} 1_included(t) dt` against the
/// coefficient target.
pub fn continuous_moment(
    f: &dyn FunctionEvaluator,
    spec: &EulerProductSpec,
    sigma: f64,
    k: u32,
    big_t: f64,
    excl: &BlockExclusion,
) -> Result<MomentReport> {
    if k == 0 {
        return Err(Error::OutOfDomain("continuous moments need k >= 1".into()));
    }
    if sigma < excl.alpha {
        return Err(Error::OutOfDomain(format!(
            "sigma = {sigma} is left of the exclusion abscissa {}",
            excl.alpha
        )));
    }
    let blocks = validate_moment_scale(excl.l, big_t)?;
    let (nodes, weights) = gl24_unit();
    let mut sum = KahanSum::new();
    for n in 0..blocks {
        if excl.is_excluded(n) {
            continue;
        }
        let t0 = n as f64 * excl.l;
        for (x, w) in nodes.iter().zip(&weights) {
            let v = f.value(c64(sigma, t0 + x * excl.l))?.norm();
            sum.add(w * excl.l * v.powi(2 * k as i32));
        }
    }
    let empirical = sum.value() / big_t;
    let (target, tail_bound) = moment_target(spec, k as f64, sigma, target_cut(spec))?;
    Ok(MomentReport {
        sigma,
        kappa: k as f64,
        empirical,
        target,
        tail_bound,
        relative_gap: (empirical - target).abs() / target,
        scale: big_t,
    })
}

const GL16_HALF_X: [f64; 8] = [
    0.095_012_509_837_637_44,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_4,
    0.617_876_244_402_643_7,
    0.755_404_408_355_003_0,
    0.865_631_202_387_831_7,
    0.944_575_023_073_232_6,
    0.989_400_934_991_649_9,
];
const GL16_HALF_W: [f64; 8] = [
    0.189_450_610_455_068_5,
    0.182_603_415_044_923_6,
    0.169_156_519_395_002_54,
    0.149_595_988_816_576_73,
    0.124_628_971_255_533_87,
    0.095_158_511_682_492_79,
    0.062_253_523_938_647_89,
    0.027_152_459_411_754_096,
];

/// The sigma-integrated moment `(1/T) int int_alpha^2 |f|^{2k} dsigma
/// 1_included dt` against the sigma-integrated target.
pub fn integrated_moment(
    f: &dyn FunctionEvaluator,
    spec: &EulerProductSpec,
    alpha: f64,
    k: u32,
    big_t: f64,
    excl: &BlockExclusion,
) -> Result<MomentReport> {
    if k == 0 {
        return Err(Error::OutOfDomain("integrated moments need k >= 1".into()));
    }
    if alpha < excl.alpha || alpha >= 2.0 {
        return Err(Error::OutOfDomain(format!(
            "integration abscissa {alpha} incompatible with exclusion at {}",
            excl.alpha
        )));
    }
    let blocks = validate_moment_scale(excl.l, big_t)?;
    let (nodes, weights) = gl24_unit();
    let width = 2.0 - alpha;
    let mut sum = KahanSum::new();
    for n in 0..blocks {
        if excl.is_excluded(n) {
            continue;
        }
        let t0 = n as f64 * excl.l;
        for (x, w) in nodes.iter().zip(&weights) {
            let t = t0 + x * excl.l;
            let mut slice = 0.0f64;
            for (hx, hw) in GL16_HALF_X.iter().zip(&GL16_HALF_W) {
                let ds = 0.5 * width * hx;
                let mid = alpha + 0.5 * width;
                let lo = f.value(c64(mid - ds, t))?.norm();
                let hi = f.value(c64(mid + ds, t))?.norm();
                slice += 0.5 * width * hw * (lo.powi(2 * k as i32) + hi.powi(2 * k as i32));
            }
            sum.add(w * excl.l * slice);
        }
    }
    let empirical = sum.value() / big_t;
    let n_cut = target_cut(spec);
    let a = power_coeffs(spec, k as f64, n_cut)?;
    let mut target_sum = KahanSum::new();
    for n in 1..=n_cut {
        let w = a.get(n).norm_sqr();
        let weight = if n == 1 {
            width
        } else {
            let ln = (n as f64).ln();
            ((n as f64).powf(-2.0 * alpha) - (n as f64).powf(-4.0)) / (2.0 * ln)
        };
        target_sum.add(w * weight);
    }
    let target = target_sum.value();
    let tail_bound =
        rankin_tail(k as f64, 2.0 * alpha, n_cut) / (2.0 * (n_cut as f64).ln());
    Ok(MomentReport {
        sigma: alpha,
        kappa: k as f64,
        empirical,
        target,
        tail_bound,
        relative_gap: (empirical - target).abs() / target,
        scale: big_t,
    })
}

/// Report on whether a sampling step avoids the resonance set.
#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    /// `(k, n, m, residual)` with `l log(n/m) = 2 pi k` within tolerance.
    pub witnesses: Vec<(u64, u64, u64, f64)>,
    /// Near-misses within a thousand times the tolerance.
    pub near_misses: Vec<(u64, u64, u64, f64)>,
}

/// Bounded search for resonances `l = 2 pi k / log(n/m)` with `k, n, m`
/// up to `search_bound`.
pub fn l_admissible(l: f64, search_bound: u64, tol: f64) -> Result<AdmissibilityReport> {
    if !(l > 0.0) || !(tol > 0.0) || search_bound < 2 {
        return Err(Error::OutOfDomain(
            "admissibility search needs positive l, tolerance, and bound >= 2".into(),
        ));
    }
    let mut witnesses = Vec::new();
    let mut near_misses = Vec::new();
    for m in 1..search_bound {
        for n in (m + 1)..=search_bound {
            let r = l * ((n as f64) / (m as f64)).ln() / TAU;
            let k = r.round();
            if k < 1.0 || k > search_bound as f64 {
                continue;
            }
            let residual = (r - k).abs();
            if residual < tol {
                witnesses.push((k as u64, n, m, residual));
            } else if residual < 1e3 * tol {
                near_misses.push((k as u64, n, m, residual));
            }
        }
    }
    Ok(AdmissibilityReport {
        admissible: witnesses.is_empty(),
        witnesses,
        near_misses,
    })
}

/// Discrete moment `(1/N) sum_{n <= N, included} |f(sigma + i lambda + i n
/// l)|^{2k}` against the coefficient target; `k = 0` measures the included
/// density.
#[allow(clippy::too_many_arguments)]
pub fn discrete_moment(
    f: &dyn FunctionEvaluator,
    spec: &EulerProductSpec,
    sigma: f64,
    lambda: f64,
    l: f64,
    k: u32,
    n_samples: u64,
    excl: &BlockExclusion,
) -> Result<MomentReport> {
    if !(l > 0.0) || !(0.0..=l).contains(&lambda) {
        return Err(Error::OutOfDomain(format!(
            "need 0 <= lambda <= l, got lambda = {lambda}, l = {l}"
        )));
    }
    if sigma < excl.alpha {
        return Err(Error::OutOfDomain(format!(
            "sigma = {sigma} is left of the exclusion abscissa {}",
            excl.alpha
        )));
    }
    if n_samples < 10 {
        return Err(Error::OutOfDomain("discrete moments need at least 10 samples".into()));
    }
    let admissibility = l_admissible(l, 1_000, 1e-9)?;
    if !admissibility.admissible {
        let (k_hit, n_hit, m_hit, _) = admissibility.witnesses[0];
        return Err(Error::OutOfDomain(format!(
            "step l = {l} resonates: l log({n_hit}/{m_hit}) = 2 pi {k_hit}"
        )));
    }
    let mut sum = KahanSum::new();
    for n in 1..=n_samples {
        let t = lambda + n as f64 * l;
        if !excl.includes_t(t) {
            continue;
        }
        if k == 0 {
            sum.add(1.0);
        } else {
            let v = f.value(c64(sigma, t))?.norm();
            sum.add(v.powi(2 * k as i32));
        }
    }
    let empirical = sum.value() / n_samples as f64;
    let (target, tail_bound) = if k == 0 {
        (1.0, 0.0)
    } else {
        moment_target(spec, k as f64, sigma, target_cut(spec))?
    };
    Ok(MomentReport {
        sigma,
        kappa: k as f64,
        empirical,
        target,
        tail_bound,
        relative_gap: (empirical - target).abs() / target,
        scale: n_samples as f64,
    })
}

/// The rearranged target for resonant steps `l = 2 pi k / log p`:
/// `prod_j |1 - alpha_j(p) p^{-sigma}|^{-2 kappa} * sum_{p not| n}
/// |a_kappa(n)|^2 / n^{2 sigma}`.
pub fn moment_target_special_l(
    spec: &EulerProductSpec,
    sigma: f64,
    kappa: f64,
    p: u64,
    k: u32,
) -> Result<f64> {
    if sigma <= 0.5 {
        return Err(Error::OutOfDomain(format!(
            "special-l targets need sigma > 1/2, got {sigma}"
        )));
    }
    if k == 0 {
        return Err(Error::OutOfDomain("the resonance multiple k must be >= 1".into()));
    }
    if !is_prime(p) {
        return Err(Error::OutOfDomain(format!("{p} is not prime")));
    }
    if kappa == 0.0 {
        return Ok(1.0);
    }
    let ps = (p as f64).powf(-sigma);
    let mut prefactor = 1.0f64;
    for &alpha_j in spec.roots_at(p)? {
        let local = (1.0 - alpha_j * ps).norm();
        if local < 1e-12 {
            return Err(Error::OutOfDomain(format!(
                "singular local factor at p = {p}: alpha_j p^-sigma = 1"
            )));
        }
        prefactor *= local.powf(-2.0 * kappa);
    }
    let n_cut = target_cut(spec);
    let a = power_coeffs(spec, kappa, n_cut)?;
    let mut sum = KahanSum::new();
    let mut constant_envelope = true;
    for n in 1..=n_cut {
        let w = a.get(n).norm_sqr();
        if (w - 1.0).abs() > 1e-12 {
            constant_envelope = false;
        }
        if n as u64 % p != 0 {
            sum.add(w * (n as f64).powf(-2.0 * sigma));
        }
    }
    let mut total = sum.value();
    if constant_envelope {
        // sum over n > n_cut with p not dividing n, exactly.
        let all = zeta_tail(2.0 * sigma, n_cut as u64);
        let multiples = (p as f64).powf(-2.0 * sigma) * zeta_tail(2.0 * sigma, n_cut as u64 / p);
        total += all - multiples;
    }
    Ok(prefactor * total)
}

// ---------------------------------------------------------------------------
// Selberg central limit theorem

/// Histogram of normalized samples on a fixed symmetric range.
#[derive(Debug, Clone, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    fn collect(lo: f64, hi: f64, bins: usize, samples: &[f64]) -> Self {
        let mut counts = vec![0u64; bins];
        for &x in samples {
            let pos = ((x - lo) / (hi - lo) * bins as f64).floor();
            let idx = (pos.max(0.0) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        Self { lo, hi, counts }
    }
}

/// Sampling configuration for the central limit theorem run.
#[derive(Debug, Clone, Serialize)]
pub struct CltConfig {
    /// Threshold parameter of the W-sets `(-inf, 1/m)`, `[1/m, m)`,
    /// `[m, inf)` on the normalized scale; must be at least 1.
    pub m: f64,
    /// Equispaced ordinates for the real part (plain `log |f|`).
    pub re_samples: usize,
    /// Ordinates for the imaginary part (branch-tracked `log f`).
    pub im_samples: usize,
}

impl Default for CltConfig {
    fn default() -> Self {
        Self {
            m: 1.0,
            re_samples: 20_000,
            im_samples: 500,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SelbergCltReport {
    pub ks_re: f64,
    pub ks_im: f64,
    pub histogram: Histogram,
    /// Sample measures of the three W-sets; the last is defined by
    /// complement so the three sum to one.
    pub w_measures: [f64; 3],
    pub w_counts: [u64; 3],
    /// Fraction of real-part ordinates discarded for sitting within the
    /// zero-avoidance threshold.
    pub removed_measure: f64,
    pub im_removed: usize,
    pub branch_failures: usize,
    /// The normalization `sqrt((1/2) loglog T)`.
    pub norm: f64,
    pub scale_t: f64,
}

fn ks_distance(samples: &mut [f64]) -> f64 {
    let normal = Normal::new(0.0, 1.0).unwrap();
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let phi = normal.cdf(x);
        d = d.max(((i + 1) as f64 / n - phi).abs());
        d = d.max((phi - i as f64 / n).abs());
    }
    d
}

const ZERO_AVOIDANCE: f64 = 1e-3;

/// Sample `log f(1/2 + it) / sqrt((1/2) loglog T)` over `t in (T, 2T]` and
/// compare both components with the standard normal.
pub fn selberg_clt(
    f: &dyn FunctionEvaluator,
    big_t: f64,
    bins: usize,
    cfg: &CltConfig,
) -> Result<SelbergCltReport> {
    if !(big_t >= 1e3) {
        return Err(Error::OutOfDomain(format!(
            "the central limit window needs T >= 1e3, got {big_t}"
        )));
    }
    if bins == 0 || cfg.re_samples < 100 || cfg.im_samples < 10 {
        return Err(Error::OutOfDomain(
            "central limit run needs bins >= 1, re_samples >= 100, im_samples >= 10".into(),
        ));
    }
    if !(cfg.m >= 1.0) {
        return Err(Error::OutOfDomain(format!(
            "the W-set parameter must satisfy m >= 1, got {}",
            cfg.m
        )));
    }
    let norm = (0.5 * big_t.ln().ln()).sqrt();
    let s_re = cfg.re_samples;
    let mut kappas = Vec::with_capacity(s_re);
    let mut removed = 0usize;
    for i in 1..=s_re {
        let t = big_t + (i as f64 - 0.5) * big_t / s_re as f64;
        let v = f.value(c64(0.5, t))?.norm();
        if v < ZERO_AVOIDANCE {
            removed += 1;
            continue;
        }
        kappas.push(v.ln() / norm);
    }
    let retained = kappas.len() as u64;
    let mut c = [0u64; 3];
    for &x in &kappas {
        if x < 1.0 / cfg.m {
            c[0] += 1;
        } else if x < cfg.m {
            c[1] += 1;
        } else {
            c[2] += 1;
        }
    }
    let nu0 = c[0] as f64 / retained as f64;
    let nu1 = c[1] as f64 / retained as f64;
    let w_measures = [nu0, nu1, 1.0 - nu0 - nu1];
    let histogram = Histogram::collect(-4.0, 4.0, bins, &kappas);
    let ks_re = ks_distance(&mut kappas);

    let s_im = cfg.im_samples;
    let mut im_kappas = Vec::with_capacity(s_im);
    let mut branch_failures = 0usize;
    let mut im_removed = 0usize;
    for j in 1..=s_im {
        let t = big_t + (j as f64 - 0.5) * big_t / s_im as f64;
        match log_along_path(f, c64(0.5, t)) {
            Ok(log) => {
                if log.re < ZERO_AVOIDANCE.ln() {
                    im_removed += 1;
                } else {
                    im_kappas.push(log.im / norm);
                }
            }
            Err(_) => branch_failures += 1,
        }
    }
    if branch_failures * 100 > s_im {
        return Err(Error::OutOfDomain(format!(
            "branch continuation failed on {branch_failures} of {s_im} ordinates"
        )));
    }
    let ks_im = ks_distance(&mut im_kappas);
    Ok(SelbergCltReport {
        ks_re,
        ks_im,
        histogram,
        w_measures,
        w_counts: c,
        removed_measure: removed as f64 / s_re as f64,
        im_removed,
        branch_failures,
        norm,
        scale_t: big_t,
    })
}
