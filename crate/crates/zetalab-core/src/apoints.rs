//! Locating and counting a-points.
//!
//! The a-points of a function `f` are the roots of `f(s) = a`. This module
//! counts them in rectangles through the argument principle, locates them by
//! recursive quadrisection with Newton refinement, compares counts against
//! Riemann-von Mangoldt-type main terms, verifies Littlewood's lemma
//! numerically, computes clustering statistics near the critical line, and
//! interpolates dense curves through located points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::eval::FunctionEvaluator;
use crate::funceq::{delta_invariants, FunctionalEquationData};
use crate::tolerances::WINDING_RESIDUAL;
use crate::{c64, C64, Error, Result};

/// Minimum boundary distance of `f - a` before a contour is declared unsafe.
const BOUNDARY_MIN: f64 = 1e-7;
/// Cells smaller than this record a multiple point instead of splitting.
const MIN_CELL: f64 = 1e-6;
/// Step for the central-difference derivative of the winding integrand.
const FD_STEP: f64 = 1e-6;

/// An axis-aligned rectangle in the upper half-plane.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScanRectangle {
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl ScanRectangle {
    pub fn new(sigma_lo: f64, sigma_hi: f64, t_lo: f64, t_hi: f64) -> Result<Self> {
        if !(sigma_lo < sigma_hi) || !(0.0 < t_lo) || !(t_lo < t_hi) {
            return Err(Error::OutOfDomain(format!(
                "invalid rectangle [{sigma_lo}, {sigma_hi}] x [{t_lo}, {t_hi}]"
            )));
        }
        Ok(Self {
            sigma_lo,
            sigma_hi,
            t_lo,
            t_hi,
        })
    }

    /// Like [`ScanRectangle::new`] but allowing any vertical position, for
    /// internal mirrored and symmetric-box counting.
    fn new_unchecked_vertical(sigma_lo: f64, sigma_hi: f64, t_lo: f64, t_hi: f64) -> Result<Self> {
        if !(sigma_lo < sigma_hi) || !(t_lo < t_hi) {
            return Err(Error::OutOfDomain(format!(
                "invalid rectangle [{sigma_lo}, {sigma_hi}] x [{t_lo}, {t_hi}]"
            )));
        }
        Ok(Self {
            sigma_lo,
            sigma_hi,
            t_lo,
            t_hi,
        })
    }

    pub fn contains(&self, s: C64) -> bool {
        self.sigma_lo <= s.re && s.re <= self.sigma_hi && self.t_lo <= s.im && s.im <= self.t_hi
    }

    fn corners(&self) -> [C64; 4] {
        [
            c64(self.sigma_lo, self.t_lo),
            c64(self.sigma_hi, self.t_lo),
            c64(self.sigma_hi, self.t_hi),
            c64(self.sigma_lo, self.t_hi),
        ]
    }

    fn max_side(&self) -> f64 {
        (self.sigma_hi - self.sigma_lo).max(self.t_hi - self.t_lo)
    }
}

/// A located a-point.
#[derive(Debug, Clone, Serialize)]
pub struct APoint {
    pub location: C64,
    pub target: C64,
    pub multiplicity: u32,
    pub residual: f64,
}

/// Outcome of a Riemann-von Mangoldt comparison.
#[derive(Debug, Clone, Serialize)]
pub struct CountReport {
    pub located: usize,
    pub rvm_main_term: f64,
    pub discrepancy: f64,
    pub boundary_perturbation: f64,
}

// ---------------------------------------------------------------------------
// Winding numbers
// ---------------------------------------------------------------------------

const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn numeric_derivative(f: &dyn FunctionEvaluator, s: C64) -> Result<C64> {
    Ok((f.value(s + FD_STEP)? - f.value(s - FD_STEP)?) / (2.0 * FD_STEP))
}

struct EdgePass {
    /// Raw `integral of f'/(f-a) ds` along the edge.
    value: C64,
    /// Smallest and largest `|f - a|` over the nodes.
    min_value: f64,
    max_value: f64,
    /// Smallest Newton distance estimate `|f - a| / |f'|` over the nodes.
    min_estimate: f64,
}

/// One composite Gauss-Legendre pass along the segment from `z0` to `z1`.
fn edge_pass(
    f: &dyn FunctionEvaluator,
    a: C64,
    z0: C64,
    z1: C64,
    panels: usize,
) -> Result<EdgePass> {
    let span = z1 - z0;
    let mut sum = c64(0.0, 0.0);
    let mut min_value = f64::INFINITY;
    let mut max_value = 0.0f64;
    let mut min_estimate = f64::INFINITY;
    for panel in 0..panels {
        let x0 = panel as f64 / panels as f64;
        let x1 = (panel + 1) as f64 / panels as f64;
        let mid = 0.5 * (x0 + x1);
        let half = 0.5 * (x1 - x0);
        for i in 0..4 {
            for sign in [-1.0, 1.0] {
                let x = mid + sign * half * GL8_X[i];
                let s = z0 + span * x;
                let v = f.value(s)? - a;
                min_value = min_value.min(v.norm());
                max_value = max_value.max(v.norm());
                let d = numeric_derivative(f, s)?;
                if d.norm() > 0.0 {
                    min_estimate = min_estimate.min(v.norm() / d.norm());
                }
                sum += GL8_W[i] * half * (d / v);
            }
        }
    }
    Ok(EdgePass {
        value: sum * span,
        min_value,
        max_value,
        min_estimate,
    })
}

enum Strict {
    Counted(usize),
    TooClose,
}

/// An a-point effectively sits on this edge: either the sampled `|f - a|`
/// collapses relative to its scale along the edge, or the Newton distance
/// estimate pins a root closer than anything the quadrature can resolve.
fn edge_grazes(p: &EdgePass) -> bool {
    (p.min_value < BOUNDARY_MIN && p.min_value < 1e-3 * p.max_value) || p.min_estimate < 1e-8
}

/// Winding number over the rectangle with fixed boundary. Each edge refines
/// its panel count independently until two successive passes agree; the
/// contour closes only when the pre-rounding residual is below tolerance.
fn winding_strict(f: &dyn FunctionEvaluator, a: C64, rect: &ScanRectangle) -> Result<Strict> {
    let corners = rect.corners();
    let mut values = [c64(0.0, 0.0); 4];
    let mut panels = [0usize; 4];
    let mut deltas = [f64::INFINITY; 4];
    let mut stable = [false; 4];
    for e in 0..4 {
        let len = (corners[(e + 1) % 4] - corners[e]).norm();
        panels[e] = ((len * 4.0).ceil() as usize).max(4);
        let pass = edge_pass(f, a, corners[e], corners[(e + 1) % 4], panels[e])?;
        if edge_grazes(&pass) {
            return Ok(Strict::TooClose);
        }
        values[e] = pass.value;
    }
    let mut tol = 0.03;
    let mut last_residual = f64::INFINITY;
    for _ in 0..40 {
        for e in 0..4 {
            if stable[e] {
                continue;
            }
            let next_panels = panels[e] * 2;
            if next_panels > 1 << 20 {
                return Err(Error::WindingUnstable {
                    residual: last_residual,
                });
            }
            let len = (corners[(e + 1) % 4] - corners[e]).norm();
            let pass = edge_pass(f, a, corners[e], corners[(e + 1) % 4], next_panels)?;
            if edge_grazes(&pass) {
                return Ok(Strict::TooClose);
            }
            let delta = (pass.value - values[e]).norm();
            let spacing = len / next_panels as f64;
            if delta >= tol && delta > 0.5 * deltas[e] && next_panels >= 512 {
                // Refinement is not converging and a root estimate sits
                // below the node resolution: a point is grazing the edge.
                if pass.min_estimate < 2.0 * spacing {
                    return Ok(Strict::TooClose);
                }
            }
            if delta < tol {
                stable[e] = true;
            }
            deltas[e] = delta;
            values[e] = pass.value;
            panels[e] = next_panels;
        }
        if stable.iter().all(|&s| s) {
            let w = values.iter().sum::<C64>() / c64(0.0, std::f64::consts::TAU);
            let nearest = w.re.round();
            let residual = (w - c64(nearest, 0.0)).norm();
            last_residual = residual;
            if residual < WINDING_RESIDUAL {
                if nearest < -0.5 {
                    return Err(Error::OutOfDomain(format!(
                        "negative winding number {nearest} over {rect:?}: \
                         a pole of f lies inside"
                    )));
                }
                return Ok(Strict::Counted(nearest as usize));
            }
            // Agreement per edge was not enough for the contour: tighten.
            tol /= 4.0;
            stable = [false; 4];
        }
    }
    Err(Error::WindingUnstable {
        residual: last_residual,
    })
}

/// Random edge nudges in `[1e-6, 1e-5]`, expanding the rectangle outward
/// (the lower edge moves inward when it would otherwise cross `t = 0`).
fn perturbed(rect: &ScanRectangle, rng: &mut ChaCha8Rng) -> ScanRectangle {
    let mut d = [0.0f64; 4];
    for v in &mut d {
        *v = rng.gen_range(1e-6..1e-5);
    }
    let t_lo = if rect.t_lo - d[2] > 0.0 || rect.t_lo <= 0.0 {
        rect.t_lo - d[2]
    } else {
        rect.t_lo + d[2]
    };
    ScanRectangle {
        sigma_lo: rect.sigma_lo - d[0],
        sigma_hi: rect.sigma_hi + d[1],
        t_lo,
        t_hi: rect.t_hi + d[3],
    }
}

/// Winding count with automatic boundary perturbation; returns the count
/// together with the total nudging that proved necessary.
fn winding_with_perturbation(
    f: &dyn FunctionEvaluator,
    a: C64,
    rect: &ScanRectangle,
) -> Result<(usize, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA9);
    let mut current = *rect;
    let mut moved = 0.0f64;
    for _ in 0..=5 {
        match winding_strict(f, a, &current)? {
            Strict::Counted(count) => return Ok((count, moved)),
            Strict::TooClose => {
                let next = perturbed(&current, &mut rng);
                moved += (next.sigma_lo - current.sigma_lo).abs()
                    + (next.sigma_hi - current.sigma_hi).abs()
                    + (next.t_lo - current.t_lo).abs()
                    + (next.t_hi - current.t_hi).abs();
                current = next;
            }
        }
    }
    Err(Error::BoundaryRetriesExhausted)
}

/// Count the a-points of `f` inside the rectangle by the argument principle.
pub fn count_apoints(f: &dyn FunctionEvaluator, a: C64, rect: &ScanRectangle) -> Result<usize> {
    winding_with_perturbation(f, a, rect).map(|(count, _)| count)
}

/// Winding number around a small circle, used to validate located points.
pub fn winding_on_circle(
    f: &dyn FunctionEvaluator,
    a: C64,
    center: C64,
    radius: f64,
) -> Result<i64> {
    if radius <= 0.0 {
        return Err(Error::OutOfDomain("circle radius must be positive".into()));
    }
    let h = (radius / 100.0).min(FD_STEP);
    let mut nodes = 64usize;
    let mut previous: Option<C64> = None;
    while nodes <= 4096 {
        let mut sum = c64(0.0, 0.0);
        for j in 0..nodes {
            let theta = std::f64::consts::TAU * j as f64 / nodes as f64;
            let dir = c64(theta.cos(), theta.sin());
            let s = center + radius * dir;
            let v = f.value(s)? - a;
            let d = (f.value(s + h)? - f.value(s - h)?) / (2.0 * h);
            // ds = i r e^{i theta} d theta
            sum += d / v * dir * c64(0.0, radius);
        }
        let w = sum * std::f64::consts::TAU / nodes as f64 / c64(0.0, std::f64::consts::TAU);
        let nearest = w.re.round();
        if (w - c64(nearest, 0.0)).norm() < WINDING_RESIDUAL {
            if let Some(prev) = previous {
                if (w - prev).norm() < WINDING_RESIDUAL {
                    return Ok(nearest as i64);
                }
            }
        }
        previous = Some(w);
        nodes *= 2;
    }
    Err(Error::WindingUnstable { residual: 1.0 })
}

// ---------------------------------------------------------------------------
// Locating
// ---------------------------------------------------------------------------

fn newton_refine(
    f: &dyn FunctionEvaluator,
    a: C64,
    cell: &ScanRectangle,
) -> Result<APoint> {
    let cx = 0.5 * (cell.sigma_lo + cell.sigma_hi);
    let cy = 0.5 * (cell.t_lo + cell.t_hi);
    let wx = cell.sigma_hi - cell.sigma_lo;
    let wy = cell.t_hi - cell.t_lo;
    let starts = [
        c64(cx, cy),
        c64(cx - 0.25 * wx, cy - 0.25 * wy),
        c64(cx + 0.25 * wx, cy - 0.25 * wy),
        c64(cx - 0.25 * wx, cy + 0.25 * wy),
        c64(cx + 0.25 * wx, cy + 0.25 * wy),
    ];
    let tol = 1e-10 * (1.0 + a.norm());
    let diag = (wx * wx + wy * wy).sqrt();
    // Accept limited overshoot: the winding count pins the point to this
    // cell, Newton only polishes it.
    let pad = 0.05 * cell.max_side() + 1e-9;
    for &start in &starts {
        let mut s = start;
        let mut converged = false;
        for _ in 0..60 {
            let v = f.value(s)? - a;
            if v.norm() < tol {
                converged = true;
                break;
            }
            let d = numeric_derivative(f, s)?;
            if d.norm() == 0.0 {
                break;
            }
            let step = v / d;
            if !step.is_finite() || step.norm() > 4.0 * diag {
                break;
            }
            s -= step;
            if !s.is_finite() {
                break;
            }
        }
        if !converged {
            continue;
        }
        let inside = s.re >= cell.sigma_lo - pad
            && s.re <= cell.sigma_hi + pad
            && s.im >= cell.t_lo - pad
            && s.im <= cell.t_hi + pad;
        if !inside {
            continue;
        }
        let residual = (f.value(s)? - a).norm();
        if residual < 1e-8 * (1.0 + a.norm()) {
            return Ok(APoint {
                location: s,
                target: a,
                multiplicity: 1,
                residual,
            });
        }
    }
    Err(Error::OutOfDomain(format!(
        "Newton refinement failed in cell [{}, {}] x [{}, {}]",
        cell.sigma_lo, cell.sigma_hi, cell.t_lo, cell.t_hi
    )))
}

fn subdivide(
    f: &dyn FunctionEvaluator,
    a: C64,
    cell: &ScanRectangle,
    count: usize,
    depth: u32,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<APoint>,
) -> Result<()> {
    if count == 0 {
        return Ok(());
    }
    if count == 1 && cell.max_side() <= 1.0 {
        out.push(newton_refine(f, a, cell)?);
        return Ok(());
    }
    if cell.max_side() < MIN_CELL || depth > 64 {
        // A cluster that never separates is one point of higher
        // multiplicity.
        let center = c64(
            0.5 * (cell.sigma_lo + cell.sigma_hi),
            0.5 * (cell.t_lo + cell.t_hi),
        );
        let residual = (f.value(center)? - a).norm();
        out.push(APoint {
            location: center,
            target: a,
            multiplicity: count as u32,
            residual,
        });
        return Ok(());
    }
    // Quadrisect, jittering the split lines away from any a-point they
    // happen to hit; children share exact split coordinates, so the four
    // counts must reproduce the parent count.
    for attempt in 0..5 {
        let (jx, jy) = if attempt == 0 {
            (0.0, 0.0)
        } else {
            (
                rng.gen_range(-0.1..0.1) * (cell.sigma_hi - cell.sigma_lo),
                rng.gen_range(-0.1..0.1) * (cell.t_hi - cell.t_lo),
            )
        };
        let sm = 0.5 * (cell.sigma_lo + cell.sigma_hi) + jx;
        let tm = 0.5 * (cell.t_lo + cell.t_hi) + jy;
        let children = [
            ScanRectangle {
                sigma_lo: cell.sigma_lo,
                sigma_hi: sm,
                t_lo: cell.t_lo,
                t_hi: tm,
            },
            ScanRectangle {
                sigma_lo: sm,
                sigma_hi: cell.sigma_hi,
                t_lo: cell.t_lo,
                t_hi: tm,
            },
            ScanRectangle {
                sigma_lo: cell.sigma_lo,
                sigma_hi: sm,
                t_lo: tm,
                t_hi: cell.t_hi,
            },
            ScanRectangle {
                sigma_lo: sm,
                sigma_hi: cell.sigma_hi,
                t_lo: tm,
                t_hi: cell.t_hi,
            },
        ];
        let mut counts = [0usize; 4];
        let mut clean = true;
        for (i, child) in children.iter().enumerate() {
            match winding_strict(f, a, child) {
                Ok(Strict::Counted(count)) => counts[i] = count,
                Ok(Strict::TooClose) | Err(Error::WindingUnstable { .. }) => {
                    clean = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if !clean || counts.iter().sum::<usize>() != count {
            continue;
        }
        for (child, &child_count) in children.iter().zip(&counts) {
            subdivide(f, a, child, child_count, depth + 1, rng, out)?;
        }
        return Ok(());
    }
    Err(Error::BoundaryRetriesExhausted)
}

/// Locate all a-points in the rectangle: quadrisection until cells hold one
/// point each, then Newton refinement. Multiplicities come from cells whose
/// winding count never separates.
pub fn locate_apoints(
    f: &dyn FunctionEvaluator,
    a: C64,
    rect: &ScanRectangle,
) -> Result<Vec<APoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA9);
    let mut current = *rect;
    let mut top_count = None;
    for _ in 0..=5 {
        match winding_strict(f, a, &current)? {
            Strict::Counted(count) => {
                top_count = Some(count);
                break;
            }
            Strict::TooClose => current = perturbed(&current, &mut rng),
        }
    }
    let count = top_count.ok_or(Error::BoundaryRetriesExhausted)?;
    let mut out = Vec::with_capacity(count);
    subdivide(f, a, &current, count, 0, &mut rng, &mut out)?;
    out.sort_by(|p, q| {
        (p.location.im, p.location.re)
            .partial_cmp(&(q.location.im, q.location.re))
            .unwrap()
    });
    Ok(out)
}

/// Count a-points in the box `[sigma_lo, sigma_hi] x [-h, h]` symmetric
/// about the real axis. The box straddles `t = 0`, which [`ScanRectangle`]
/// excludes, so real-axis roots (trivial zeros among them) are caught by a
/// single winding contour around the whole box.
pub fn count_symmetric_box(
    f: &dyn FunctionEvaluator,
    a: f64,
    sigma_lo: f64,
    sigma_hi: f64,
    half_height: f64,
) -> Result<usize> {
    if !(half_height > 0.0) {
        return Err(Error::OutOfDomain("half height must be positive".into()));
    }
    let rect =
        ScanRectangle::new_unchecked_vertical(sigma_lo, sigma_hi, -half_height, half_height)?;
    winding_with_perturbation(f, c64(a, 0.0), &rect).map(|(count, _)| count)
}

// ---------------------------------------------------------------------------
// Riemann-von Mangoldt comparison
// ---------------------------------------------------------------------------

/// Evaluator for `q^s / a_q (f(s) - 1)`, whose zeros are the 1-points of f.
struct OneShift<'a> {
    inner: &'a dyn FunctionEvaluator,
    q: f64,
    a_q: C64,
}

impl FunctionEvaluator for OneShift<'_> {
    fn value(&self, s: C64) -> Result<C64> {
        let v = self.inner.value(s)?;
        Ok((s * self.q.ln()).exp() / self.a_q * (v - 1.0))
    }

    fn derivative(&self, s: C64, k: u32) -> Result<C64> {
        match k {
            0 => self.value(s),
            1 => {
                let v = self.inner.value(s)?;
                let d = self.inner.derivative(s, 1)?;
                Ok((s * self.q.ln()).exp() / self.a_q * (self.q.ln() * (v - 1.0) + d))
            }
            _ => crate::eval::cauchy_derivative(&|w| self.value(w), s, k, 0.1, 1e-10),
        }
    }

    fn log_value(&self, s: C64) -> Result<C64> {
        let v = self.value(s)?;
        if v.norm() == 0.0 {
            return Err(Error::OutOfDomain("log of zero".into()));
        }
        Ok(v.ln())
    }

    fn domain(&self) -> crate::eval::Domain {
        self.inner.domain()
    }
}

/// The Riemann-von Mangoldt-type main term for a-point counts up to `T`.
pub fn rvm_main_term(p: &FunctionalEquationData, a: C64, big_t: f64, q_for_one: f64) -> f64 {
    let inv = delta_invariants(p);
    let two_pi = std::f64::consts::TAU;
    let mut main = inv.degree / two_pi * big_t * (big_t.ln() - 1.0)
        + big_t / two_pi * inv.q2lambda.ln();
    if (a - 1.0).norm() < 1e-12 {
        main -= big_t / two_pi * q_for_one.ln();
    }
    main
}

/// Compare the located a-point count for `0 < gamma <= T` against the
/// Riemann-von Mangoldt-type main term. The case `a = 1` first passes to
/// `q^s/a_q (f - 1)` with `q` the least index with nonzero coefficient in
/// the supplied Dirichlet prefix (`a(2) = 1` assumed when absent).
pub fn rvm_compare(
    f: &dyn FunctionEvaluator,
    a: C64,
    p: &FunctionalEquationData,
    big_t: f64,
    coefficient_prefix: Option<&[C64]>,
) -> Result<CountReport> {
    if big_t < 10.0 {
        return Err(Error::OutOfDomain("RvM comparison requires T >= 10".into()));
    }
    let rect = ScanRectangle::new(-1.0, 3.0, 0.05, big_t)?;
    let one = (a - 1.0).norm() < 1e-12;
    let (q, a_q) = if one {
        match coefficient_prefix {
            Some(prefix) => {
                let mut found = None;
                for (i, &c) in prefix.iter().enumerate().skip(1) {
                    if c.norm() > 1e-12 {
                        found = Some(((i + 1) as f64, c));
                        break;
                    }
                }
                found.ok_or_else(|| {
                    Error::OutOfDomain("no nonzero coefficient beyond the first".into())
                })?
            }
            None => (2.0, c64(1.0, 0.0)),
        }
    } else {
        (2.0, c64(1.0, 0.0))
    };
    let (located, moved) = if one {
        let shifted = OneShift { inner: f, q, a_q };
        winding_with_perturbation(&shifted, c64(0.0, 0.0), &rect)?
    } else {
        winding_with_perturbation(f, a, &rect)?
    };
    let main = rvm_main_term(p, a, big_t, q);
    Ok(CountReport {
        located,
        rvm_main_term: main,
        discrepancy: located as f64 - main,
        boundary_perturbation: moved,
    })
}

// ---------------------------------------------------------------------------
// Littlewood's lemma
// ---------------------------------------------------------------------------

/// Adaptive composite Gauss-Legendre for a real integrand on `[x0, x1]`.
fn gl_adaptive(g: &mut dyn FnMut(f64) -> Result<f64>, x0: f64, x1: f64) -> Result<f64> {
    let mut panels = 8usize;
    let mut previous: Option<f64> = None;
    loop {
        let mut total = 0.0;
        for panel in 0..panels {
            let a = x0 + (x1 - x0) * panel as f64 / panels as f64;
            let b = x0 + (x1 - x0) * (panel + 1) as f64 / panels as f64;
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            for i in 0..4 {
                for sign in [-1.0, 1.0] {
                    total += GL8_W[i] * half * g(mid + sign * half * GL8_X[i])?;
                }
            }
        }
        if let Some(prev) = previous {
            if (total - prev).abs() < 1e-8 * (1.0 + total.abs()) {
                return Ok(total);
            }
        }
        previous = Some(total);
        panels *= 2;
        if panels > 1 << 14 {
            return Ok(previous.unwrap());
        }
    }
}

fn wrap_pm_pi(x: f64) -> f64 {
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

/// `integral over [sigma_lo, sigma_hi] of arg(f(sigma + i t) - a) d sigma`,
/// with the argument continued leftward from its principal value at the
/// right endpoint.
fn horizontal_arg_integral(
    f: &dyn FunctionEvaluator,
    a: C64,
    t: f64,
    sigma_lo: f64,
    sigma_hi: f64,
) -> Result<f64> {
    let mut samples = 256usize;
    let mut previous: Option<f64> = None;
    loop {
        // Walk right to left, unwinding the principal argument.
        let mut args = Vec::with_capacity(samples + 1);
        let mut prev_theta = (f.value(c64(sigma_hi, t))? - a).arg();
        let mut arg = prev_theta;
        args.push(arg);
        let mut ok = true;
        for i in 1..=samples {
            let sigma = sigma_hi - (sigma_hi - sigma_lo) * i as f64 / samples as f64;
            let theta = (f.value(c64(sigma, t))? - a).arg();
            let d = wrap_pm_pi(theta - prev_theta);
            if d.abs() > 1.5 {
                ok = false;
                break;
            }
            arg += d;
            prev_theta = theta;
            args.push(arg);
        }
        if ok {
            // Trapezoid over the uniform grid (walked right to left).
            let h = (sigma_hi - sigma_lo) / samples as f64;
            let mut integral = 0.5 * (args[0] + args[samples]);
            for v in args.iter().take(samples).skip(1) {
                integral += v;
            }
            let integral = integral * h;
            if let Some(prev) = previous {
                if (integral - prev).abs() < 1e-8 * (1.0 + integral.abs()) {
                    return Ok(integral);
                }
            }
            previous = Some(integral);
        }
        samples *= 2;
        if samples > 1 << 20 {
            return previous.ok_or(Error::WindingUnstable { residual: 1.0 });
        }
    }
}

/// Numerical check of Littlewood's lemma on the rectangle with left
/// abscissa `b`: the boundary integrals against `sum of (beta - b)` over
/// the enclosed a-points. Returns the absolute residual.
pub fn littlewood_check(
    f: &dyn FunctionEvaluator,
    a: C64,
    rect: &ScanRectangle,
    b: f64,
) -> Result<f64> {
    if (b - rect.sigma_lo).abs() > 1e-12 {
        return Err(Error::OutOfDomain(
            "b must coincide with the left abscissa of the rectangle".into(),
        ));
    }
    let c = rect.sigma_hi;
    // Boundary sanity scan.
    let scan = 64usize;
    for i in 0..=scan {
        let t = rect.t_lo + (rect.t_hi - rect.t_lo) * i as f64 / scan as f64;
        for sigma in [b, c] {
            if (f.value(c64(sigma, t))? - a).norm() < BOUNDARY_MIN {
                return Err(Error::BoundaryRetriesExhausted);
            }
        }
        let sigma = b + (c - b) * i as f64 / scan as f64;
        for t_edge in [rect.t_lo, rect.t_hi] {
            if (f.value(c64(sigma, t_edge))? - a).norm() < BOUNDARY_MIN {
                return Err(Error::BoundaryRetriesExhausted);
            }
        }
    }
    let mut left = |t: f64| -> Result<f64> { Ok((f.value(c64(b, t))? - a).norm().ln()) };
    let i_left = gl_adaptive(&mut left, rect.t_lo, rect.t_hi)?;
    let mut right = |t: f64| -> Result<f64> { Ok((f.value(c64(c, t))? - a).norm().ln()) };
    let i_right = gl_adaptive(&mut right, rect.t_lo, rect.t_hi)?;
    let i_top = horizontal_arg_integral(f, a, rect.t_hi, b, c)?;
    let i_bottom = horizontal_arg_integral(f, a, rect.t_lo, b, c)?;
    let lhs = (i_left - i_right + i_top - i_bottom) / std::f64::consts::TAU;
    let points = locate_apoints(f, a, rect)?;
    let rhs: f64 = points
        .iter()
        .map(|p| (p.location.re - b) * p.multiplicity as f64)
        .sum();
    Ok((lhs - rhs).abs())
}

// ---------------------------------------------------------------------------
// Clustering statistics and dense curves
// ---------------------------------------------------------------------------

/// Width profiles for clustering about the critical line, all with
/// `mu(t) = loglog t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClusteringProfile {
    /// `(loglog gamma)^2 / log gamma`.
    Levinson,
    /// `mu(gamma) sqrt(loglog gamma) / log gamma`.
    Selberg,
    /// `mu(gamma) / log gamma`.
    MuOverLog,
}

impl ClusteringProfile {
    pub fn width(&self, gamma: f64) -> f64 {
        let lg = gamma.ln();
        let llg = lg.ln();
        match self {
            ClusteringProfile::Levinson => llg * llg / lg,
            ClusteringProfile::Selberg => llg * llg.sqrt() / lg,
            ClusteringProfile::MuOverLog => llg / lg,
        }
    }
}

/// Fraction of the points with `|beta - 1/2|` below the profile width at
/// their ordinate. All points must have `T < gamma <= 2T`.
pub fn clustering_stats(
    points: &[APoint],
    big_t: f64,
    profile: ClusteringProfile,
) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::OutOfDomain(
            "clustering fraction undefined for an empty point list".into(),
        ));
    }
    let mut inside = 0usize;
    let mut total = 0usize;
    for p in points {
        let gamma = p.location.im;
        if !(big_t < gamma && gamma <= 2.0 * big_t) {
            return Err(Error::OutOfDomain(format!(
                "point ordinate {gamma} outside ({big_t}, {}]",
                2.0 * big_t
            )));
        }
        let m = p.multiplicity as usize;
        total += m;
        if (p.location.re - 0.5).abs() <= profile.width(gamma) {
            inside += m;
        }
    }
    Ok(inside as f64 / total as f64)
}

/// Piecewise-linear deviation curve through a-points: `eps(gamma_k) =
/// beta_k - 1/2`, constant beyond the ordinate range.
#[derive(Debug, Clone, Serialize)]
pub struct DenseCurve {
    ordinates: Vec<f64>,
    deviations: Vec<f64>,
}

impl DenseCurve {
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.ordinates.len();
        if t <= self.ordinates[0] {
            return self.deviations[0];
        }
        if t >= self.ordinates[n - 1] {
            return self.deviations[n - 1];
        }
        let idx = self.ordinates.partition_point(|&g| g <= t);
        let (g0, g1) = (self.ordinates[idx - 1], self.ordinates[idx]);
        let (e0, e1) = (self.deviations[idx - 1], self.deviations[idx]);
        e0 + (e1 - e0) * (t - g0) / (g1 - g0)
    }

    /// The interpolated point on the curve: `1/2 + eps(t) + it`.
    pub fn point(&self, t: f64) -> C64 {
        c64(0.5 + self.eval(t), t)
    }
}

/// Build the dense curve through points sorted by strictly increasing
/// ordinate.
pub fn dense_curve(points: &[APoint]) -> Result<DenseCurve> {
    if points.is_empty() {
        return Err(Error::OutOfDomain("dense curve needs at least one point".into()));
    }
    let mut ordinates = Vec::with_capacity(points.len());
    let mut deviations = Vec::with_capacity(points.len());
    for p in points {
        let gamma = p.location.im;
        if let Some(&last) = ordinates.last() {
            if gamma <= last {
                return Err(Error::OutOfDomain(
                    "dense curve needs strictly increasing ordinates".into(),
                ));
            }
        }
        ordinates.push(gamma);
        deviations.push(p.location.re - 0.5);
    }
    Ok(DenseCurve {
        ordinates,
        deviations,
    })
}
