//! Exact algebra on Dirichlet-series coefficients.
//!
//! Everything here is finite and deterministic: convolution of coefficient
//! prefixes, the generalized divisor function `d_kappa`, coefficients of
//! powers, logarithms, logarithmic derivatives and derivatives of polynomial
//! Euler products, and empirical estimates of convergence abscissae.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::{c64, C64, Error, Result};

// ---------------------------------------------------------------------------
// Prime utilities
// ---------------------------------------------------------------------------

/// All primes `<= n` by sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
    }
    primes
}

/// Smallest-prime-factor table for `0..=n`; entries 0 and 1 hold 0.
pub fn smallest_prime_factor_table(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// Primality by trial division; adequate for the odd validation call.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization `n = prod p^nu` as `(p, nu)` pairs, ascending in `p`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut nu = 0;
            while n % p == 0 {
                n /= p;
                nu += 1;
            }
            out.push((p, nu));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

// ---------------------------------------------------------------------------
// CoefficientSequence
// ---------------------------------------------------------------------------

/// A prefix `a(1), ..., a(N)` of a Dirichlet-series coefficient sequence.
///
/// Values are stored densely; `get(n)` uses the natural 1-based index.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSequence {
    values: Vec<C64>,
    /// Claim that the sequence is multiplicative on its stored range; set by
    /// constructors that guarantee it, checkable via
    /// [`CoefficientSequence::check_multiplicative`].
    pub multiplicative: bool,
}

impl CoefficientSequence {
    /// Wrap an explicit value vector; `values[0]` is `a(1)`.
    pub fn from_values(values: Vec<C64>, multiplicative: bool) -> Self {
        Self {
            values,
            multiplicative,
        }
    }

    /// The all-ones sequence `d_1` of length `n`.
    pub fn constant_ones(n: usize) -> Self {
        Self::from_values(vec![c64(1.0, 0.0); n], true)
    }

    /// The convolution unit `d_0 = (1, 0, 0, ...)` of length `n`.
    pub fn unit(n: usize) -> Self {
        let mut values = vec![c64(0.0, 0.0); n];
        if n > 0 {
            values[0] = c64(1.0, 0.0);
        }
        Self::from_values(values, true)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `a(n)` with the natural index `1 <= n <= len`.
    #[inline]
    pub fn get(&self, n: usize) -> C64 {
        self.values[n - 1]
    }

    /// The raw slice, shifted: `values()[n - 1]` is `a(n)`.
    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Exhaustively verify `a(1) = 1` and `a(mn) = a(m) a(n)` for coprime
    /// `m, n` with `mn <= len`, up to absolute tolerance `tol`.
    pub fn check_multiplicative(&self, tol: f64) -> bool {
        if self.is_empty() || (self.get(1) - 1.0).norm() > tol {
            return false;
        }
        let n_max = self.len();
        for m in 2..=n_max {
            for n in m..=n_max / m {
                if gcd(m, n) == 1 && (self.get(m * n) - self.get(m) * self.get(n)).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Serialize as CSV with columns `n, re, im`, preceded by a comment line
    /// recording the multiplicativity claim.
    pub fn to_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# multiplicative: {}", self.multiplicative)?;
        writeln!(w, "n,re,im")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{},{}", i + 1, v.re, v.im)?;
        }
        Ok(())
    }

    /// Inverse of [`CoefficientSequence::to_csv`]. Rows may arrive in any
    /// order but must cover `1..=N` without gaps.
    pub fn from_csv<R: Read>(mut r: R) -> Result<Self> {
        let mut text = String::new();
        r.read_to_string(&mut text)?;
        let mut multiplicative = false;
        for line in text.lines() {
            let line = line.trim();
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(flag) = rest.trim().strip_prefix("multiplicative:") {
                    multiplicative = flag.trim() == "true";
                }
            }
        }

        #[derive(Deserialize)]
        struct Row {
            n: usize,
            re: f64,
            im: f64,
        }

        let mut rows: BTreeMap<usize, C64> = BTreeMap::new();
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        for record in reader.deserialize::<Row>() {
            let row = record.map_err(|e| Error::Parse(format!("coefficient CSV: {e}")))?;
            if row.n == 0 {
                return Err(Error::Parse("coefficient index 0 is invalid".into()));
            }
            rows.insert(row.n, c64(row.re, row.im));
        }
        let n_max = rows.keys().next_back().copied().unwrap_or(0);
        if rows.len() != n_max {
            return Err(Error::Parse(format!(
                "coefficient CSV covers {} of {} indices",
                rows.len(),
                n_max
            )));
        }
        let values = (1..=n_max).map(|n| rows[&n]).collect();
        Ok(Self {
            values,
            multiplicative,
        })
    }
}

// ---------------------------------------------------------------------------
// Convolution
// ---------------------------------------------------------------------------

/// Dirichlet convolution `(a * b)(n) = sum_{d | n} a(d) b(n/d)` for
/// `n <= n_max`.
pub fn dirichlet_convolve(
    a: &CoefficientSequence,
    b: &CoefficientSequence,
    n_max: usize,
) -> Result<CoefficientSequence> {
    let available = a.len().min(b.len());
    if n_max > available {
        return Err(Error::Length {
            requested: n_max,
            available,
        });
    }
    let mut out = vec![c64(0.0, 0.0); n_max];
    for d in 1..=n_max {
        let ad = a.get(d);
        if ad.norm_sqr() == 0.0 {
            continue;
        }
        for m in 1..=n_max / d {
            out[d * m - 1] += ad * b.get(m);
        }
    }
    Ok(CoefficientSequence::from_values(
        out,
        a.multiplicative && b.multiplicative,
    ))
}

/// Exact integer Dirichlet convolution of equal-length prefixes;
/// `a[n - 1]` is the coefficient at `n`.
pub fn dirichlet_convolve_int(a: &[i64], b: &[i64]) -> Vec<i64> {
    let n_max = a.len().min(b.len());
    let mut out = vec![0i64; n_max];
    for d in 1..=n_max {
        if a[d - 1] == 0 {
            continue;
        }
        for m in 1..=n_max / d {
            out[d * m - 1] += a[d - 1] * b[m - 1];
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Generalized divisor function
// ---------------------------------------------------------------------------

/// `binom(kappa + nu - 1, nu)` by the cancellation-free product recurrence.
fn generalized_binomial(kappa: f64, nu: u32) -> f64 {
    let mut d = 1.0;
    for i in 1..=nu {
        d *= (kappa + i as f64 - 1.0) / i as f64;
    }
    d
}

/// Generalized divisor function `d_kappa(n)`: the multiplicative extension of
/// `d_kappa(p^nu) = binom(kappa + nu - 1, nu)`.
pub fn divisor_kappa(kappa: f64, n: u64) -> f64 {
    factorize(n)
        .into_iter()
        .map(|(_, nu)| generalized_binomial(kappa, nu))
        .product()
}

/// Exact integer `d_k(p^nu)` for integer `k` of either sign.
fn integer_binomial(k: i64, nu: u32) -> i64 {
    if k >= 0 {
        // binom(k + nu - 1, nu); each multiply-then-divide step is exact.
        let mut d = 1i64;
        for i in 1..=i64::from(nu) {
            d = d * (k + i - 1) / i;
        }
        d
    } else {
        // d_{-m}(p^nu) = (-1)^nu binom(m, nu).
        let m = -k;
        if i64::from(nu) > m {
            return 0;
        }
        let mut d = 1i64;
        for i in 1..=i64::from(nu) {
            d = d * (m - i + 1) / i;
        }
        if nu % 2 == 0 {
            d
        } else {
            -d
        }
    }
}

/// Exact integer-valued `d_k(n)` for integer `k` (negative `k` gives the
/// coefficients of `1/zeta^{|k|}`, so `k = -1` is the Moebius function).
pub fn divisor_kappa_int(k: i64, n: u64) -> i64 {
    factorize(n)
        .into_iter()
        .map(|(_, nu)| integer_binomial(k, nu))
        .product()
}

/// The prefix `d_kappa(1), ..., d_kappa(n_max)` as a sequence.
pub fn divisor_sequence(kappa: f64, n_max: usize) -> CoefficientSequence {
    let spf = smallest_prime_factor_table(n_max);
    let mut values = vec![c64(0.0, 0.0); n_max + 1];
    if n_max >= 1 {
        values[1] = c64(1.0, 0.0);
    }
    for n in 2..=n_max {
        let p = spf[n] as usize;
        let mut q = n;
        let mut nu = 0u32;
        while q % p == 0 {
            q /= p;
            nu += 1;
        }
        values[n] = values[q] * generalized_binomial(kappa, nu);
    }
    CoefficientSequence::from_values(values[1..].to_vec(), true)
}

/// Exact integer prefix of `d_k`; the entry for `n` is at index `n - 1`.
pub fn divisor_sequence_int(k: i64, n_max: usize) -> Vec<i64> {
    let spf = smallest_prime_factor_table(n_max);
    let mut values = vec![0i64; n_max + 1];
    if n_max >= 1 {
        values[1] = 1;
    }
    for n in 2..=n_max {
        let p = spf[n] as usize;
        let mut q = n;
        let mut nu = 0u32;
        while q % p == 0 {
            q /= p;
            nu += 1;
        }
        values[n] = values[q] * integer_binomial(k, nu);
    }
    values[1..].to_vec()
}

// ---------------------------------------------------------------------------
// EulerProductSpec
// ---------------------------------------------------------------------------

/// A polynomial Euler product `L(s) = prod_p prod_{j=1}^m
/// (1 - alpha_j(p) p^{-s})^{-1}`, described by its inverse roots.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerProductSpec {
    order: usize,
    roots: BTreeMap<u64, Vec<C64>>,
    prime_bound: u64,
}

impl EulerProductSpec {
    /// Build from an explicit root map. Every entry must list exactly
    /// `order` roots and every key must be prime.
    pub fn new(order: usize, roots: BTreeMap<u64, Vec<C64>>) -> Result<Self> {
        if order == 0 {
            return Err(Error::OutOfDomain("Euler product order must be >= 1".into()));
        }
        for (&p, list) in &roots {
            if !is_prime(p) {
                return Err(Error::Parse(format!("{p} is not prime")));
            }
            if list.len() != order {
                return Err(Error::Parse(format!(
                    "prime {p} lists {} roots, expected {order}",
                    list.len()
                )));
            }
        }
        let prime_bound = roots.keys().next_back().copied().unwrap_or(0);
        Ok(Self {
            order,
            roots,
            prime_bound,
        })
    }

    /// Roots generated by a closure `f(p, j)` over all primes up to the bound.
    pub fn from_fn(
        order: usize,
        prime_bound: u64,
        mut f: impl FnMut(u64, usize) -> C64,
    ) -> Self {
        let roots = primes_up_to(prime_bound)
            .into_iter()
            .map(|p| (p, (0..order).map(|j| f(p, j)).collect()))
            .collect();
        Self::new(order, roots).expect("generated roots are structurally valid")
    }

    /// The Riemann zeta-function: order 1, every root equal to 1.
    pub fn zeta(prime_bound: u64) -> Self {
        Self::from_fn(1, prime_bound, |_, _| c64(1.0, 0.0))
    }

    /// The square of zeta as a degree-2 product (both roots 1 at every prime).
    pub fn zeta_squared(prime_bound: u64) -> Self {
        Self::from_fn(2, prime_bound, |_, _| c64(1.0, 0.0))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn prime_bound(&self) -> u64 {
        self.prime_bound
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.roots.keys().copied()
    }

    /// The root list at `p`, or an incomplete-spec error.
    pub fn roots_at(&self, p: u64) -> Result<&[C64]> {
        self.roots
            .get(&p)
            .map(Vec::as_slice)
            .ok_or(Error::IncompleteSpec {
                prime: p,
                bound: self.prime_bound,
            })
    }

    /// Whether every stored root satisfies `|alpha_j(p)| <= 1 + tol`.
    pub fn ramanujan_bound_holds(&self, tol: f64) -> bool {
        self.roots
            .values()
            .flatten()
            .all(|alpha| alpha.norm() <= 1.0 + tol)
    }

    fn ensure_covers(&self, n: u64) -> Result<()> {
        for p in primes_up_to(n) {
            self.roots_at(p)?;
        }
        Ok(())
    }

    /// Text form: first line the order `m`, then one line per prime with
    /// `p re_1 im_1 ... re_m im_m`. Lines starting with `#` are comments.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{}\n", self.order));
        for (p, list) in &self.roots {
            out.push_str(&format!("{p}"));
            for alpha in list {
                out.push_str(&format!(" {} {}", alpha.re, alpha.im));
            }
            out.push('\n');
        }
        out
    }

    /// Inverse of [`EulerProductSpec::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let order: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty Euler product file".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("order line: {e}")))?;
        let mut roots = BTreeMap::new();
        for line in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 1 + 2 * order {
                return Err(Error::Parse(format!(
                    "expected prime plus {} re/im pairs, got {} fields",
                    order,
                    fields.len()
                )));
            }
            let p: u64 = fields[0]
                .parse()
                .map_err(|e| Error::Parse(format!("prime field: {e}")))?;
            let mut list = Vec::with_capacity(order);
            for j in 0..order {
                let re: f64 = fields[1 + 2 * j]
                    .parse()
                    .map_err(|e| Error::Parse(format!("root field: {e}")))?;
                let im: f64 = fields[2 + 2 * j]
                    .parse()
                    .map_err(|e| Error::Parse(format!("root field: {e}")))?;
                list.push(c64(re, im));
            }
            roots.insert(p, list);
        }
        Self::new(order, roots)
    }
}

// ---------------------------------------------------------------------------
// Coefficients of powers, logs and derivatives of Euler products
// ---------------------------------------------------------------------------

/// Coefficients of the local factor `prod_j (1 - alpha_j x)^{-kappa}` up to
/// `x^{nu_max}`.
fn local_coeffs(roots: &[C64], kappa: f64, nu_max: usize) -> Vec<C64> {
    let binom: Vec<f64> = {
        let mut row = Vec::with_capacity(nu_max + 1);
        let mut d = 1.0;
        row.push(d);
        for nu in 1..=nu_max as u32 {
            d *= (kappa + nu as f64 - 1.0) / nu as f64;
            row.push(d);
        }
        row
    };
    let mut acc = vec![c64(0.0, 0.0); nu_max + 1];
    acc[0] = c64(1.0, 0.0);
    for &alpha in roots {
        let mut powers = Vec::with_capacity(nu_max + 1);
        let mut ap = c64(1.0, 0.0);
        for k in 0..=nu_max {
            powers.push(binom[k] * ap);
            ap *= alpha;
        }
        let mut next = vec![c64(0.0, 0.0); nu_max + 1];
        for i in 0..=nu_max {
            if acc[i].norm_sqr() == 0.0 {
                continue;
            }
            for (k, &w) in powers.iter().enumerate().take(nu_max - i + 1) {
                next[i + k] += acc[i] * w;
            }
        }
        acc = next;
    }
    acc
}

/// Shared assembly: multiplicative extension of per-prime local coefficients.
fn assemble_multiplicative(
    spec: &EulerProductSpec,
    kappa: f64,
    n_max: usize,
) -> Result<CoefficientSequence> {
    spec.ensure_covers(n_max as u64)?;
    let spf = smallest_prime_factor_table(n_max);
    let mut locals: HashMap<usize, Vec<C64>> = HashMap::new();
    for p in primes_up_to(n_max as u64) {
        let mut nu_max = 0;
        let mut pw = p;
        while pw <= n_max as u64 {
            nu_max += 1;
            pw = pw.saturating_mul(p);
        }
        locals.insert(p as usize, local_coeffs(spec.roots_at(p)?, kappa, nu_max));
    }
    let mut values = vec![c64(0.0, 0.0); n_max + 1];
    if n_max >= 1 {
        values[1] = c64(1.0, 0.0);
    }
    for n in 2..=n_max {
        let p = spf[n] as usize;
        let mut q = n;
        let mut nu = 0usize;
        while q % p == 0 {
            q /= p;
            nu += 1;
        }
        values[n] = values[q] * locals[&p][nu];
    }
    Ok(CoefficientSequence::from_values(values[1..].to_vec(), true))
}

/// Coefficients `a(n)` of the Euler product itself.
pub fn euler_coeffs(spec: &EulerProductSpec, n_max: usize) -> Result<CoefficientSequence> {
    assemble_multiplicative(spec, 1.0, n_max)
}

/// Coefficients `a_kappa(n)` of `L(s)^kappa` for real `kappa`.
pub fn power_coeffs(
    spec: &EulerProductSpec,
    kappa: f64,
    n_max: usize,
) -> Result<CoefficientSequence> {
    assemble_multiplicative(spec, kappa, n_max)
}

/// Coefficients of `log L`: supported on prime powers, with
/// `a_log(p^nu) = (1/nu) sum_j alpha_j(p)^nu`.
pub fn log_coeffs(spec: &EulerProductSpec, n_max: usize) -> Result<CoefficientSequence> {
    spec.ensure_covers(n_max as u64)?;
    let mut values = vec![c64(0.0, 0.0); n_max + 1];
    for p in primes_up_to(n_max as u64) {
        let roots = spec.roots_at(p)?;
        let mut powers: Vec<C64> = vec![c64(1.0, 0.0); roots.len()];
        let mut pw = p;
        let mut nu = 1u32;
        while pw <= n_max as u64 {
            let mut sum = c64(0.0, 0.0);
            for (w, &alpha) in powers.iter_mut().zip(roots) {
                *w *= alpha;
                sum += *w;
            }
            values[pw as usize] = sum / f64::from(nu);
            pw = pw.saturating_mul(p);
            nu += 1;
        }
    }
    Ok(CoefficientSequence::from_values(values[1..].to_vec(), false))
}

/// Coefficients `Lambda_L(n)` of `-L'/L`: supported on prime powers, with
/// `Lambda_L(p^nu) = (sum_j alpha_j(p)^nu) log p`.
pub fn logderiv_coeffs(spec: &EulerProductSpec, n_max: usize) -> Result<CoefficientSequence> {
    spec.ensure_covers(n_max as u64)?;
    let mut values = vec![c64(0.0, 0.0); n_max + 1];
    for p in primes_up_to(n_max as u64) {
        let roots = spec.roots_at(p)?;
        let log_p = (p as f64).ln();
        let mut powers: Vec<C64> = vec![c64(1.0, 0.0); roots.len()];
        let mut pw = p;
        while pw <= n_max as u64 {
            let mut sum = c64(0.0, 0.0);
            for (w, &alpha) in powers.iter_mut().zip(roots) {
                *w *= alpha;
                sum += *w;
            }
            values[pw as usize] = sum * log_p;
            pw = pw.saturating_mul(p);
        }
    }
    Ok(CoefficientSequence::from_values(values[1..].to_vec(), false))
}

/// Coefficients of the `ell`-th derivative: `(-1)^ell a(n) (log n)^ell`.
pub fn derivative_coeffs(
    a: &CoefficientSequence,
    ell: u32,
    n_max: usize,
) -> Result<CoefficientSequence> {
    if n_max > a.len() {
        return Err(Error::Length {
            requested: n_max,
            available: a.len(),
        });
    }
    let sign = if ell % 2 == 0 { 1.0 } else { -1.0 };
    let values = (1..=n_max)
        .map(|n| a.get(n) * sign * (n as f64).ln().powi(ell as i32))
        .collect();
    Ok(CoefficientSequence::from_values(
        values,
        a.multiplicative && ell == 0,
    ))
}

/// Coefficient exponential: given `c` with `exp(sum c(n) n^{-s}) = sum a(n)
/// n^{-s}`, recover `a` by the Newton-style recurrence
/// `a(n) log n = sum_{d | n, d >= 2} c(d) log d a(n/d)`.
pub fn exp_coeffs(c: &CoefficientSequence, n_max: usize) -> Result<CoefficientSequence> {
    if n_max > c.len() {
        return Err(Error::Length {
            requested: n_max,
            available: c.len(),
        });
    }
    let mut a = vec![c64(0.0, 0.0); n_max + 1];
    if n_max >= 1 {
        a[1] = c.get(1).exp();
    }
    let weighted: Vec<C64> = (1..=n_max).map(|d| c.get(d) * (d as f64).ln()).collect();
    for n in 2..=n_max {
        let mut sum = c64(0.0, 0.0);
        for d in 2..=n {
            if n % d == 0 {
                sum += weighted[d - 1] * a[n / d];
            }
        }
        a[n] = sum / (n as f64).ln();
    }
    Ok(CoefficientSequence::from_values(a[1..].to_vec(), false))
}

// ---------------------------------------------------------------------------
// Abscissa estimation
// ---------------------------------------------------------------------------

/// Empirical growth exponents of the partial sums of a coefficient prefix.
#[derive(Debug, Clone, Serialize)]
pub struct AbscissaReport {
    /// Estimated abscissa of convergence (growth of signed partial sums).
    pub sigma_c_estimate: f64,
    /// Estimated abscissa of absolute convergence.
    pub sigma_a_estimate: f64,
    /// `(x, slope)` pairs from the windowed fits of the signed sums.
    pub sample_points: Vec<(f64, f64)>,
}

/// Max of least-squares slopes over sliding windows in the last half of the
/// usable points; returns the estimate and the window sample pairs.
fn windowed_max_slope(points: &[(f64, f64)]) -> Option<(f64, Vec<(f64, f64)>)> {
    let start = points.len() / 2;
    let tail = &points[start..];
    if tail.len() < 2 {
        return None;
    }
    let w = tail.len().min(3.max(tail.len() / 4)).max(2);
    let mut best = f64::NEG_INFINITY;
    let mut samples = Vec::new();
    for window in tail.windows(w) {
        let n = window.len() as f64;
        let mx = window.iter().map(|p| p.0).sum::<f64>() / n;
        let my = window.iter().map(|p| p.1).sum::<f64>() / n;
        let mut sxx = 0.0;
        let mut sxy = 0.0;
        for &(x, y) in window {
            sxx += (x - mx) * (x - mx);
            sxy += (x - mx) * (y - my);
        }
        if sxx == 0.0 {
            continue;
        }
        let slope = sxy / sxx;
        best = best.max(slope);
        samples.push((window[w - 1].0.exp(), slope));
    }
    if best.is_finite() {
        Some((best, samples))
    } else {
        None
    }
}

/// Estimate the abscissae of convergence and absolute convergence from the
/// growth of partial sums sampled on `x_grid`.
pub fn abscissa_estimates(a: &CoefficientSequence, x_grid: &[usize]) -> Result<AbscissaReport> {
    if x_grid.is_empty() {
        return Err(Error::OutOfDomain("empty abscissa sample grid".into()));
    }
    if !x_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::OutOfDomain(
            "abscissa sample grid must be strictly increasing".into(),
        ));
    }
    let x_max = *x_grid.last().unwrap();
    if x_max > a.len() {
        return Err(Error::Length {
            requested: x_max,
            available: a.len(),
        });
    }

    let mut signed = c64(0.0, 0.0);
    let mut absolute = 0.0;
    let mut signed_points = Vec::new();
    let mut absolute_points = Vec::new();
    let mut next = 0;
    for n in 1..=x_max {
        signed += a.get(n);
        absolute += a.get(n).norm();
        if n == x_grid[next] {
            let lx = (n as f64).ln();
            if signed.norm() > 0.0 && n > 1 {
                signed_points.push((lx, signed.norm().ln()));
            }
            if absolute > 0.0 && n > 1 {
                absolute_points.push((lx, absolute.ln()));
            }
            next += 1;
            if next == x_grid.len() {
                break;
            }
        }
    }

    let (sigma_c, samples) = windowed_max_slope(&signed_points).ok_or(Error::DegenerateFit)?;
    let (sigma_a, _) = windowed_max_slope(&absolute_points).ok_or(Error::DegenerateFit)?;
    Ok(AbscissaReport {
        sigma_c_estimate: sigma_c,
        sigma_a_estimate: sigma_a,
        sample_points: samples,
    })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
