//! Stieltjes integration `∫ f(t) dM(t)` of a scalar continuous `f` against an
//! increasing operator-valued `M`.
//!
//! [`integrate`] picks a mesh from a sampled modulus of continuity of `f`
//! (the mesh at which any refinement moves the Riemann–Stieltjes sum by at most
//! `ε`), and falls back to successive halvings when that mesh is too fine to
//! afford. Jumps of `M` get their own tiny partition interval so atoms are
//! tagged at their exact location.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::operator::{self, HermitianOperator, PositiveOperator, TOL_PSD};

/// An increasing `n×n` Hermitian-valued function on `[a, b]`.
pub trait IncreasingOperatorFunction: Sync {
    fn dim(&self) -> usize;
    fn domain(&self) -> (f64, f64);
    fn value(&self, t: f64) -> ComplexMatrix;
    /// Known jump locations. Detection still runs; hints only make it exact.
    fn jump_hints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<T: IncreasingOperatorFunction + ?Sized> IncreasingOperatorFunction for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn domain(&self) -> (f64, f64) {
        (**self).domain()
    }
    fn value(&self, t: f64) -> ComplexMatrix {
        (**self).value(t)
    }
    fn jump_hints(&self) -> Vec<f64> {
        (**self).jump_hints()
    }
}

/// Closure-backed increasing function.
pub struct OperatorFunction<F> {
    dim: usize,
    domain: (f64, f64),
    f: F,
    jumps: Vec<f64>,
}

impl<F> OperatorFunction<F>
where
    F: Fn(f64) -> ComplexMatrix + Sync,
{
    pub fn new(dim: usize, a: f64, b: f64, f: F) -> Self {
        Self { dim, domain: (a, b), f, jumps: Vec::new() }
    }

    pub fn with_jumps(mut self, jumps: Vec<f64>) -> Self {
        self.jumps = jumps;
        self
    }
}

impl<F> IncreasingOperatorFunction for OperatorFunction<F>
where
    F: Fn(f64) -> ComplexMatrix + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn domain(&self) -> (f64, f64) {
        self.domain
    }
    fn value(&self, t: f64) -> ComplexMatrix {
        (self.f)(t)
    }
    fn jump_hints(&self) -> Vec<f64> {
        self.jumps.clone()
    }
}

/// Evidence that `M` is positive and increasing on a sample grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityCertificate {
    pub grid: Vec<f64>,
    pub min_value_eigenvalue: f64,
    pub min_increment_eigenvalue: f64,
    pub total_variation_norm: f64,
}

pub const DEFAULT_CERTIFICATE_POINTS: usize = 257;

pub fn certify_monotone(m: &dyn IncreasingOperatorFunction, points: usize) -> Result<MonotonicityCertificate> {
    let (a, b) = m.domain();
    if !(a < b) {
        return Err(Error::Precondition(format!("empty domain [{a}, {b}]")));
    }
    let points = points.max(2);
    let grid: Vec<f64> = (0..points).map(|k| a + (b - a) * k as f64 / (points - 1) as f64).collect();
    let values: Vec<ComplexMatrix> = grid.iter().map(|&t| m.value(t)).collect();
    for v in &values {
        if v.nrows() != m.dim() || v.ncols() != m.dim() {
            return Err(Error::DimensionMismatch(format!("M(t) is {}x{}, expected {}", v.nrows(), v.ncols(), m.dim())));
        }
        linalg::ensure_finite(v)?;
    }
    let scale = values.iter().map(linalg::hermitian_spectral_norm).fold(1.0_f64, f64::max);
    let tol = TOL_PSD * scale;
    let mut min_value = f64::INFINITY;
    let mut min_inc = f64::INFINITY;
    for (k, v) in values.iter().enumerate() {
        let lo = linalg::hermitian_eigen(v).min();
        min_value = min_value.min(lo);
        if lo < -tol {
            return Err(Error::NotIncreasing { t: grid[k], min_eigenvalue: lo });
        }
        if k > 0 {
            let inc = linalg::hermitian_eigen(&(v - &values[k - 1])).min();
            min_inc = min_inc.min(inc);
            if inc < -tol {
                return Err(Error::NotIncreasing { t: grid[k], min_eigenvalue: inc });
            }
        }
    }
    let total = linalg::hermitian_spectral_norm(&(&values[points - 1] - &values[0]));
    Ok(MonotonicityCertificate {
        grid,
        min_value_eigenvalue: min_value,
        min_increment_eigenvalue: min_inc,
        total_variation_norm: total,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TagRule {
    Left,
    #[default]
    Midpoint,
    Right,
}

impl TagRule {
    fn place(self, t0: f64, t1: f64) -> f64 {
        match self {
            TagRule::Left => t0,
            TagRule::Midpoint => 0.5 * (t0 + t1),
            TagRule::Right => t1,
        }
    }
}

/// Knots `a = t₀ ≤ … ≤ t_m = b` with tags `ξ_j ∈ [t_{j−1}, t_j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    knots: Vec<f64>,
    tags: Vec<f64>,
}

impl Partition {
    pub fn new(knots: Vec<f64>, tags: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 || tags.len() + 1 != knots.len() {
            return Err(Error::Precondition(format!(
                "partition needs m+1 knots and m tags, got {} knots and {} tags",
                knots.len(),
                tags.len()
            )));
        }
        for (j, xi) in tags.iter().enumerate() {
            let (lo, hi) = (knots[j], knots[j + 1]);
            if !(lo <= *xi && *xi <= hi) {
                return Err(Error::Precondition(format!("tag {xi} outside [{lo}, {hi}]")));
            }
        }
        Ok(Self { knots, tags })
    }

    pub fn uniform(a: f64, b: f64, m: usize, rule: TagRule) -> Self {
        let m = m.max(1);
        let knots: Vec<f64> = (0..=m).map(|k| if k == m { b } else { a + (b - a) * k as f64 / m as f64 }).collect();
        let tags = knots.windows(2).map(|w| rule.place(w[0], w[1])).collect();
        Self { knots, tags }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn tags(&self) -> &[f64] {
        &self.tags
    }

    pub fn intervals(&self) -> usize {
        self.tags.len()
    }

    pub fn mesh(&self) -> f64 {
        self.knots.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiemannStieltjesSum {
    pub value: ComplexMatrix,
    pub mesh: f64,
}

impl RiemannStieltjesSum {
    /// The sum as a Hermitian operator; fails when `f` was not real.
    pub fn hermitian(&self) -> Result<HermitianOperator> {
        HermitianOperator::with_tolerance(self.value.clone(), Default::default(), 1e-10)
    }
}

/// `Σ f(ξ_j)(M(t_j) − M(t_{j−1}))`, every increment certified PSD.
pub fn rs_sum(
    f: &dyn Fn(f64) -> Complex64,
    m: &dyn IncreasingOperatorFunction,
    p: &Partition,
) -> Result<RiemannStieltjesSum> {
    let (a, b) = m.domain();
    let (first, last) = (p.knots[0], p.knots[p.knots.len() - 1]);
    if (first - a).abs() > 1e-12 * (b - a).abs().max(1.0) || (last - b).abs() > 1e-12 * (b - a).abs().max(1.0) {
        return Err(Error::Precondition(format!("partition spans [{first}, {last}], domain is [{a}, {b}]")));
    }
    let values: Vec<ComplexMatrix> = p.knots.iter().map(|&t| m.value(t)).collect();
    let scale = values.iter().map(linalg::hermitian_spectral_norm).fold(1.0_f64, f64::max);
    let n = m.dim();
    let mut acc = linalg::zeros(n, n);
    for j in 0..p.intervals() {
        let inc = &values[j + 1] - &values[j];
        let lo = linalg::hermitian_eigen(&inc).min();
        if lo < -TOL_PSD * scale {
            return Err(Error::NotIncreasing { t: p.knots[j + 1], min_eigenvalue: lo });
        }
        acc += inc * f(p.tags[j]);
    }
    Ok(RiemannStieltjesSum { value: acc, mesh: p.mesh() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrodBound {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `‖Σ α_j H_j‖ ≤ ‖Σ |β_j| H_j‖` for positive `H_j` and `|α_j| ≤ |β_j|`.
pub fn brod_bound_check(alpha: &[Complex64], beta: &[Complex64], h: &[PositiveOperator]) -> Result<BrodBound> {
    if alpha.len() != beta.len() || alpha.len() != h.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients α, {} coefficients β, {} operators",
            alpha.len(),
            beta.len(),
            h.len()
        )));
    }
    let Some(first) = h.first() else {
        return Ok(BrodBound { lhs: 0.0, rhs: 0.0, holds: true });
    };
    let n = first.dim();
    if h.iter().any(|op| op.dim() != n) {
        return Err(Error::DimensionMismatch("operators differ in size".into()));
    }
    for (j, (a, b)) in alpha.iter().zip(beta).enumerate() {
        if a.norm() > b.norm() {
            return Err(Error::Precondition(format!("|α_{j}| = {} exceeds |β_{j}| = {}", a.norm(), b.norm())));
        }
    }
    let mut lhs_m = linalg::zeros(n, n);
    let mut rhs_m = linalg::zeros(n, n);
    for ((a, b), op) in alpha.iter().zip(beta).zip(h) {
        lhs_m += op.matrix() * *a;
        rhs_m += op.matrix() * linalg::re(b.norm());
    }
    let lhs = linalg::spectral_norm(&lhs_m);
    let rhs = linalg::spectral_norm(&rhs_m);
    Ok(BrodBound { lhs, rhs, holds: lhs <= rhs + 1e-12 * (1.0 + rhs) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    pub eps: f64,
    pub initial_intervals: usize,
    pub max_intervals: usize,
    pub modulus_samples: usize,
    pub certificate_points: usize,
    pub tag_rule: TagRule,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            eps: 1e-8,
            initial_intervals: 64,
            max_intervals: 1 << 21,
            modulus_samples: 4097,
            certificate_points: DEFAULT_CERTIFICATE_POINTS,
            tag_rule: TagRule::Midpoint,
        }
    }
}

impl IntegrationOptions {
    pub fn with_eps(eps: f64) -> Self {
        Self { eps, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Integral {
    pub value: ComplexMatrix,
    /// Uniform intervals used (jump intervals excluded).
    pub intervals: usize,
    pub mesh: f64,
    /// Mesh met the modulus-of-continuity bound, so every refinement stays within `ε`.
    pub certified_by_modulus: bool,
    /// `‖S_final − S_previous‖₂` of the last halving (0 when not halved).
    pub last_change: f64,
    pub jumps: Vec<f64>,
}

/// Sampled modulus of continuity of `f` on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Modulus {
    pub step: f64,
    /// `osc[k]` ≈ oscillation over windows of `2^k` sample steps.
    pub osc: Vec<f64>,
    pub range: f64,
}

impl Modulus {
    pub fn sample(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, samples: usize) -> Self {
        let samples = samples.max(3);
        let step = (b - a) / (samples - 1) as f64;
        let vals: Vec<Complex64> = (0..samples).map(|k| f(a + step * k as f64)).collect();
        let mut osc = Vec::new();
        let mut window = 1;
        let mut prev = 0.0_f64;
        while window < samples {
            let w = (0..samples - window).map(|i| (vals[i + window] - vals[i]).norm()).fold(0.0, f64::max);
            prev = prev.max(w);
            osc.push(prev);
            window *= 2;
        }
        let range = vals.iter().map(|z| (z - vals[0]).norm()).fold(0.0, f64::max);
        Self { step, osc, range }
    }

    /// Largest `δ` with sampled `osc_δ(f) ≤ target`; linear extrapolation below
    /// the sample step.
    pub fn delta_for(&self, target: f64, width: f64) -> f64 {
        let finest = self.osc.first().copied().unwrap_or(0.0);
        if finest == 0.0 {
            return width;
        }
        if finest > target {
            return self.step * target / finest;
        }
        let mut delta = self.step;
        for (k, &o) in self.osc.iter().enumerate() {
            if o <= target {
                delta = self.step * (1u64 << k) as f64;
            } else {
                break;
            }
        }
        delta.min(width)
    }

    /// Oscillation that does not shrink with the window indicates a jump in `f`.
    pub fn looks_discontinuous(&self) -> bool {
        if self.osc.len() < 3 {
            return false;
        }
        let (o1, o4) = (self.osc[0], self.osc[2]);
        o1 > 1e-6 * (1.0 + self.range) && o1 > 0.6 * o4
    }

    /// Total variation estimate from the same samples is not kept; this is the
    /// coarse bound `range`.
    pub fn range(&self) -> f64 {
        self.range
    }
}

fn trace_increment(m: &dyn IncreasingOperatorFunction, lo: f64, hi: f64) -> f64 {
    linalg::trace_re(&(m.value(hi) - m.value(lo)))
}

/// Locates jumps of `M` by bisection: an increment that does not shrink as the
/// bracket halves is a jump.
pub fn detect_jumps(m: &dyn IncreasingOperatorFunction, samples: usize) -> Vec<f64> {
    let (a, b) = m.domain();
    let samples = samples.max(3);
    let grid: Vec<f64> = (0..samples).map(|k| a + (b - a) * k as f64 / (samples - 1) as f64).collect();
    let traces: Vec<f64> = grid.iter().map(|&t| linalg::trace_re(&m.value(t))).collect();
    let inc: Vec<f64> = traces.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect();
    let total = (traces[samples - 1] - traces[0]).abs();
    let floor = 1e-12 * total.max(1e-300);
    let mut jumps = Vec::new();
    for j in 0..inc.len() {
        let left = if j > 0 { inc[j - 1] } else { 0.0 };
        let right = if j + 1 < inc.len() { inc[j + 1] } else { 0.0 };
        if inc[j] <= floor || inc[j] < 2.0 * 0.5 * (left + right) {
            continue;
        }
        let (mut lo, mut hi) = (grid[j], grid[j + 1]);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if trace_increment(m, lo, mid) >= trace_increment(m, mid, hi) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let jump = trace_increment(m, lo, hi);
        if jump > 0.25 * inc[j] && jump > floor {
            jumps.push(0.5 * (lo + hi));
        }
    }
    jumps
}

struct Interval {
    t0: f64,
    t1: f64,
    tag: f64,
}

fn build_intervals(a: f64, b: f64, m: usize, jumps: &[f64], rule: TagRule) -> Vec<Interval> {
    let eta = 1e-12 * (b - a);
    let uniform: Vec<f64> = (0..=m).map(|k| if k == m { b } else { a + (b - a) * k as f64 / m as f64 }).collect();
    let mut out = Vec::with_capacity(m + 2 * jumps.len() + 2);
    let mut cursor = a;
    let mut u = 1;
    for &j in jumps {
        let lo = (j - eta).max(a).max(cursor);
        let hi = (j + eta).min(b);
        while u < uniform.len() && uniform[u] < lo - eta {
            let t1 = uniform[u];
            if t1 > cursor {
                out.push(Interval { t0: cursor, t1, tag: rule.place(cursor, t1) });
                cursor = t1;
            }
            u += 1;
        }
        if lo > cursor {
            out.push(Interval { t0: cursor, t1: lo, tag: rule.place(cursor, lo) });
        }
        if hi > lo {
            out.push(Interval { t0: lo, t1: hi, tag: j.clamp(lo, hi) });
            cursor = hi;
        } else if hi == lo && lo == a {
            // jump at the left end: nothing to integrate over, M(a) already holds it
            cursor = lo;
        }
        while u < uniform.len() && uniform[u] <= cursor + eta {
            u += 1;
        }
    }
    while u < uniform.len() {
        let t1 = uniform[u];
        if t1 > cursor {
            out.push(Interval { t0: cursor, t1, tag: rule.place(cursor, t1) });
            cursor = t1;
        }
        u += 1;
    }
    if cursor < b {
        out.push(Interval { t0: cursor, t1: b, tag: rule.place(cursor, b) });
    }
    out
}

fn sum_over(f: &dyn Fn(f64) -> Complex64, m: &dyn IncreasingOperatorFunction, intervals: &[Interval]) -> ComplexMatrix {
    let n = m.dim();
    let mut acc = linalg::zeros(n, n);
    let Some(first) = intervals.first() else {
        return acc;
    };
    let mut prev = m.value(first.t0);
    for iv in intervals {
        let next = m.value(iv.t1);
        let w = f(iv.tag);
        if w != Complex64::new(0.0, 0.0) {
            acc += (&next - &prev) * w;
        }
        prev = next;
    }
    acc
}

fn merge_jumps(mut jumps: Vec<f64>, a: f64, b: f64) -> Vec<f64> {
    let eta = 1e-12 * (b - a);
    jumps.retain(|t| t.is_finite() && *t >= a && *t <= b);
    jumps.sort_by(f64::total_cmp);
    let mut merged: Vec<f64> = Vec::with_capacity(jumps.len());
    for t in jumps {
        match merged.last() {
            Some(&last) if t - last <= 4.0 * eta => {}
            _ => merged.push(t),
        }
    }
    merged
}

/// `∫_a^b f(t) dM(t)` to within `ε` in spectral norm.
pub fn integrate(
    f: &dyn Fn(f64) -> Complex64,
    m: &dyn IncreasingOperatorFunction,
    options: &IntegrationOptions,
) -> Result<Integral> {
    if !(options.eps > 0.0) {
        return Err(Error::Precondition("ε must be positive".into()));
    }
    let cert = certify_monotone(m, options.certificate_points)?;
    let (a, b) = m.domain();
    let n = m.dim();
    let total = {
        let d = m.value(b) - m.value(a);
        linalg::hermitian_spectral_norm(&d).max(cert.total_variation_norm)
    };
    if total == 0.0 {
        return Ok(Integral {
            value: linalg::zeros(n, n),
            intervals: 0,
            mesh: b - a,
            certified_by_modulus: true,
            last_change: 0.0,
            jumps: Vec::new(),
        });
    }
    let modulus = Modulus::sample(f, a, b, options.modulus_samples);
    if modulus.looks_discontinuous() {
        return Err(Error::NotConverged("oscillation of f does not shrink with the window; f looks discontinuous".into()));
    }
    let delta = modulus.delta_for(options.eps / total, b - a);
    let m_cert = ((b - a) / delta).ceil();
    let mut hints = m.jump_hints();
    hints.extend(detect_jumps(m, options.modulus_samples));
    let jumps = merge_jumps(hints, a, b);

    let sum_at = |count: usize| {
        let iv = build_intervals(a, b, count, &jumps, options.tag_rule);
        sum_over(f, m, &iv)
    };

    let mut count = options.initial_intervals.max(1);
    if m_cert <= count as f64 {
        count = (m_cert as usize).max(1);
        return Ok(Integral {
            value: sum_at(count),
            intervals: count,
            mesh: (b - a) / count as f64,
            certified_by_modulus: true,
            last_change: 0.0,
            jumps,
        });
    }
    let mut current = sum_at(count);
    loop {
        if count as f64 >= m_cert {
            return Ok(Integral {
                value: current,
                intervals: count,
                mesh: (b - a) / count as f64,
                certified_by_modulus: true,
                last_change: 0.0,
                jumps,
            });
        }
        let next_count = count * 2;
        if next_count > options.max_intervals {
            return Err(Error::NotConverged(format!(
                "halvings did not settle within {} intervals (ε = {:.1e})",
                options.max_intervals, options.eps
            )));
        }
        let next = sum_at(next_count);
        let change = linalg::spectral_norm(&(&next - &current));
        if change <= 0.5 * options.eps {
            return Ok(Integral {
                value: next,
                intervals: next_count,
                mesh: (b - a) / next_count as f64,
                certified_by_modulus: next_count as f64 >= m_cert,
                last_change: change,
                jumps,
            });
        }
        current = next;
        count = next_count;
    }
}

/// The same Riemann–Stieltjes sum `integrate` would form with `intervals`
/// uniform intervals, exposed for refinement-stability checks.
pub fn sum_with_intervals(
    f: &dyn Fn(f64) -> Complex64,
    m: &dyn IncreasingOperatorFunction,
    intervals: usize,
    jumps: &[f64],
    rule: TagRule,
) -> ComplexMatrix {
    let (a, b) = m.domain();
    let iv = build_intervals(a, b, intervals.max(1), jumps, rule);
    sum_over(f, m, &iv)
}

/// Checks a Hermitian result is PSD within tolerance.
pub fn is_psd_result(value: &ComplexMatrix) -> bool {
    HermitianOperator::with_tolerance(value.clone(), Default::default(), 1e-9)
        .map(|h| operator::is_positive(&h).is_positive())
        .unwrap_or(false)
}
