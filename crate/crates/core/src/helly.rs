//! Helly selection for bounded sequences of increasing operator-valued
//! functions on `[0, 2π]`.
//!
//! Members are sampled on a dyadic grid and compared through weak pairings
//! `⟨F_n(t)x, y⟩ = yᴴ F_n(t) x` over a probe family `E`. The diagonal process
//! visits grid points in dyadic order; at each stage it keeps the largest group
//! of surviving members whose pairings lie in a ball of radius `tol/2`, so the
//! kept members are Cauchy to within `tol` at every visited point.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, re, ComplexMatrix, ComplexVector};
use crate::operator::{PositiveOperator, TOL_PSD};
use crate::random;
use crate::stieltjes::{self, IncreasingOperatorFunction, IntegrationOptions, Modulus};

pub const DEFAULT_PROBE_SEED: u64 = 0x48454C4C59;
pub const DEFAULT_EXTRA_PROBES: usize = 4;
pub const DEFAULT_GRID_DEPTH: u32 = 10;
/// Stage tolerance relative to `‖F₀‖`.
pub const DEFAULT_RELATIVE_TOL: f64 = 1e-7;

/// `a + (b − a)·j/2^depth`, `j = 0..=2^depth`.
pub fn dyadic_grid(a: f64, b: f64, depth: u32) -> Vec<f64> {
    let m = 1usize << depth;
    (0..=m).map(|j| if j == m { b } else { a + (b - a) * j as f64 / m as f64 }).collect()
}

/// Indices of a `2^depth + 1` dyadic grid, coarse levels first: both ends,
/// then the midpoint, then the quarter points, and so on.
pub fn dyadic_order(depth: u32) -> Vec<usize> {
    let m = 1usize << depth;
    let mut out = vec![0, m];
    let mut stride = m;
    while stride > 1 {
        let half = stride / 2;
        out.extend((half..m).step_by(stride));
        stride = half;
    }
    out
}

/// Right-continuous step function through grid values.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    knots: Vec<f64>,
    values: Vec<ComplexMatrix>,
    dim: usize,
}

impl GridFunction {
    pub fn new(knots: Vec<f64>, values: Vec<ComplexMatrix>) -> Result<Self> {
        if knots.len() != values.len() || knots.len() < 2 {
            return Err(Error::DimensionMismatch(format!("{} knots, {} values", knots.len(), values.len())));
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Precondition("grid knots must be strictly increasing".into()));
        }
        let dim = values[0].nrows();
        for v in &values {
            if v.nrows() != dim || v.ncols() != dim {
                return Err(Error::DimensionMismatch("grid values differ in shape".into()));
            }
            linalg::ensure_finite(v)?;
        }
        Ok(Self { knots, values, dim })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[ComplexMatrix] {
        &self.values
    }

    /// Index of the knot that governs `t`.
    pub fn cell(&self, t: f64) -> usize {
        self.knots.partition_point(|&x| x <= t).saturating_sub(1)
    }
}

impl IncreasingOperatorFunction for GridFunction {
    fn dim(&self) -> usize {
        self.dim
    }
    fn domain(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }
    fn value(&self, t: f64) -> ComplexMatrix {
        self.values[self.cell(t)].clone()
    }
    fn jump_hints(&self) -> Vec<f64> {
        (1..self.knots.len())
            .filter(|&k| self.values[k] != self.values[k - 1])
            .map(|k| self.knots[k])
            .collect()
    }
}

/// The finite stand-in for a dense countable subset of `B`: the standard basis
/// plus seeded random unit vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSet {
    pub vectors: Vec<ComplexVector>,
}

impl ProbeSet {
    pub fn new(n: usize, extra: usize, seed: u64) -> Self {
        let mut rng = random::rng(seed);
        let mut vectors: Vec<ComplexVector> = (0..n)
            .map(|a| {
                let mut e = ComplexVector::zeros(n);
                e[a] = re(1.0);
                e
            })
            .collect();
        vectors.extend((0..extra).map(|_| random::unit_vector(&mut rng, n)));
        Self { vectors }
    }

    pub fn standard(n: usize) -> Self {
        Self::new(n, DEFAULT_EXTRA_PROBES, DEFAULT_PROBE_SEED)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, |v| v.len())
    }

    /// `yᴴ A x` for every ordered pair `(x, y)`, `x` major.
    pub fn pairings(&self, a: &ComplexMatrix) -> Vec<Complex64> {
        let images: Vec<ComplexVector> = self.vectors.iter().map(|x| a * x).collect();
        let mut out = Vec::with_capacity(self.len() * self.len());
        for ax in &images {
            for y in &self.vectors {
                out.push(y.dotc(ax));
            }
        }
        out
    }

    /// Least-squares inverse of [`ProbeSet::pairings`], symmetrized.
    pub fn polarize(&self, pairings: &[Complex64]) -> ComplexMatrix {
        let n = self.dim();
        let p = self.len();
        // Row (x, y) of the design acts on vec(A) (column-major).
        let mut design = linalg::zeros(p * p, n * n);
        for (ix, x) in self.vectors.iter().enumerate() {
            for (iy, y) in self.vectors.iter().enumerate() {
                for col in 0..n {
                    for row in 0..n {
                        design[(ix * p + iy, col * n + row)] = y[row].conj() * x[col];
                    }
                }
            }
        }
        let rhs = ComplexMatrix::from_column_slice(p * p, 1, pairings);
        let sol = design.svd(true, true).solve(&rhs, 1e-12).expect("SVD with U and V");
        let a = ComplexMatrix::from_column_slice(n, n, sol.as_slice());
        linalg::hermitian_part(&a)
    }

    fn spans(&self) -> bool {
        let n = self.dim();
        if self.len() < n {
            return false;
        }
        let mut m = linalg::zeros(n, self.len());
        for (k, v) in self.vectors.iter().enumerate() {
            m.set_column(k, v);
        }
        let s = linalg::singular_values(&m);
        s.last().is_some_and(|&lo| lo > 1e-10 * s[0]) && s.len() == n
    }
}

/// A finite budget of members `F_n` with the bound `0 ≤ F_n(t) ≤ F₀`,
/// certified on the grid.
pub struct MonotoneSequence<'a> {
    members: Vec<Box<dyn IncreasingOperatorFunction + 'a>>,
    bound: PositiveOperator,
    grid: Vec<f64>,
    samples: Vec<Vec<ComplexMatrix>>,
}

impl<'a> MonotoneSequence<'a> {
    pub fn new(members: Vec<Box<dyn IncreasingOperatorFunction + 'a>>, bound: PositiveOperator, grid: Vec<f64>) -> Result<Self> {
        if grid.len() < 2 {
            return Err(Error::Precondition("grid needs at least two points".into()));
        }
        let n = bound.dim();
        let (a, b) = (grid[0], grid[grid.len() - 1]);
        let f0 = bound.matrix();
        let tol = TOL_PSD * bound.norm().max(1.0);
        let mut samples = Vec::with_capacity(members.len());
        for (idx, m) in members.iter().enumerate() {
            if m.dim() != n {
                return Err(Error::DimensionMismatch(format!("member {idx} has dimension {}, bound has {n}", m.dim())));
            }
            let (ma, mb) = m.domain();
            if (ma - a).abs() > 1e-12 * (1.0 + a.abs()) || (mb - b).abs() > 1e-12 * (1.0 + b.abs()) {
                return Err(Error::Precondition(format!("member {idx} has domain [{ma}, {mb}], grid spans [{a}, {b}]")));
            }
            let vals: Vec<ComplexMatrix> = grid.iter().map(|&t| m.value(t)).collect();
            for (k, v) in vals.iter().enumerate() {
                linalg::ensure_finite(v)?;
                let below = linalg::hermitian_eigen(&(f0 - v));
                let own = linalg::hermitian_eigen(v);
                let inc = if k > 0 { linalg::hermitian_eigen(&(v - &vals[k - 1])).min() } else { 0.0 };
                if below.min() < -tol {
                    return Err(Error::BoundViolated { member: idx, t: grid[k], witness: linalg::to_pairs(&below.vector(0)) });
                }
                if own.min() < -tol {
                    return Err(Error::BoundViolated { member: idx, t: grid[k], witness: linalg::to_pairs(&own.vector(0)) });
                }
                if inc < -tol {
                    return Err(Error::NotIncreasing { t: grid[k], min_eigenvalue: inc });
                }
            }
            samples.push(vals);
        }
        Ok(Self { members, bound, grid, samples })
    }

    /// Members `gen(0), …, gen(budget − 1)`.
    pub fn from_generator<M, G>(budget: usize, mut gen: G, bound: PositiveOperator, grid: Vec<f64>) -> Result<Self>
    where
        M: IncreasingOperatorFunction + 'a,
        G: FnMut(usize) -> M,
    {
        let members = (0..budget).map(|k| Box::new(gen(k)) as Box<dyn IncreasingOperatorFunction + 'a>).collect();
        Self::new(members, bound, grid)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.bound.dim()
    }

    pub fn bound(&self) -> &PositiveOperator {
        &self.bound
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn member(&self, k: usize) -> &dyn IncreasingOperatorFunction {
        self.members[k].as_ref()
    }

    pub fn samples(&self, k: usize) -> &[ComplexMatrix] {
        &self.samples[k]
    }

    /// The same bound and grid restricted to `indices`, in that order.
    pub fn subsequence(self, indices: &[usize]) -> Result<Self> {
        let mut members: Vec<Option<Box<dyn IncreasingOperatorFunction + 'a>>> = self.members.into_iter().map(Some).collect();
        let mut samples: Vec<Option<Vec<ComplexMatrix>>> = self.samples.into_iter().map(Some).collect();
        let mut kept_m = Vec::with_capacity(indices.len());
        let mut kept_s = Vec::with_capacity(indices.len());
        for &i in indices {
            let m = members.get_mut(i).and_then(Option::take);
            let s = samples.get_mut(i).and_then(Option::take);
            match (m, s) {
                (Some(m), Some(s)) => {
                    kept_m.push(m);
                    kept_s.push(s);
                }
                _ => return Err(Error::Precondition(format!("index {i} is out of range or repeated"))),
            }
        }
        Ok(Self { members: kept_m, bound: self.bound, grid: self.grid, samples: kept_s })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageLog {
    pub t: f64,
    /// Upper bound for the pairwise spread of the kept pairings.
    pub residual: f64,
    pub kept: usize,
}

/// Worst ratios of the two bounds used in the selection argument:
/// `|⟨F_n(t)x,y⟩| ≤ ‖F₀‖‖x‖‖y‖` and `Σ_ℓ |⟨Δ_ℓ F_n x, y⟩| ≤ 2‖F₀‖‖x‖‖y‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityReport {
    pub max_value_ratio: f64,
    pub max_variation_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub subsequence: Vec<usize>,
    pub limit: GridFunction,
    pub convergence_log: Vec<StageLog>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub inequalities: InequalityReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSelection {
    pub subsequence: Vec<usize>,
    pub limit: Vec<f64>,
    pub convergence_log: Vec<StageLog>,
    pub max_residual: f64,
}

fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Shared diagonal process. `values(stage, member)` gives the comparison vector.
fn select_core<V>(members: usize, stages: &[(usize, f64)], tol: f64, mut values: V) -> Result<(Vec<usize>, Vec<StageLog>)>
where
    V: FnMut(usize, usize) -> Vec<Complex64>,
{
    if members < 2 {
        return Err(Error::SelectionFailed(format!("need at least two members, have {members}")));
    }
    let radius = 0.5 * tol;
    let mut alive: Vec<usize> = (0..members).collect();
    let mut log = Vec::with_capacity(stages.len());
    for &(stage, t) in stages {
        let vals: Vec<Vec<Complex64>> = alive.iter().map(|&m| values(stage, m)).collect();
        let mut best: Option<(usize, Vec<usize>, f64)> = None;
        for c in 0..alive.len() {
            let mut group = Vec::new();
            let mut spread = 0.0_f64;
            for k in 0..alive.len() {
                let d = distance(&vals[c], &vals[k]);
                if d <= radius {
                    group.push(k);
                    spread = spread.max(d);
                }
            }
            let better = best.as_ref().is_none_or(|(_, g, _)| group.len() > g.len());
            if better {
                let full = group.len() == alive.len();
                best = Some((c, group, spread));
                if full {
                    break;
                }
            }
        }
        let (_, group, spread) = best.expect("alive is nonempty");
        if group.len() < 2 {
            return Err(Error::SelectionFailed(format!(
                "no two members agree within {tol:.3e} at t={t:.6}; the budget is too small for this tolerance"
            )));
        }
        alive = group.into_iter().map(|k| alive[k]).collect();
        log.push(StageLog { t, residual: 2.0 * spread, kept: alive.len() });
    }
    Ok((alive, log))
}

/// Scalar Helly selection for sampled real functions `g[n][k] = g_n(grid[k])`.
pub fn scalar_helly_select(g: &[Vec<f64>], grid: &[f64], tol: f64) -> Result<ScalarSelection> {
    if g.iter().any(|row| row.len() != grid.len()) {
        return Err(Error::DimensionMismatch("every member must be sampled on the grid".into()));
    }
    let bound = g.iter().flatten().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    let variation = g
        .iter()
        .map(|row| row.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    if !bound.is_finite() || !variation.is_finite() {
        return Err(Error::NonFinite);
    }
    let stages: Vec<(usize, f64)> = stage_order(grid.len()).into_iter().map(|k| (k, grid[k])).collect();
    let (subsequence, log) = select_core(g.len(), &stages, tol, |k, m| vec![re(g[m][k])])?;
    let last = *subsequence.last().expect("nonempty");
    let max_residual = log.iter().map(|s| s.residual).fold(0.0, f64::max);
    Ok(ScalarSelection { subsequence, limit: g[last].clone(), convergence_log: log, max_residual })
}

/// Dyadic order when the grid size is `2^d + 1`, natural order otherwise.
fn stage_order(points: usize) -> Vec<usize> {
    let m = points.saturating_sub(1);
    if m.is_power_of_two() {
        dyadic_order(m.trailing_zeros())
    } else {
        (0..points).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HellyOptions {
    /// Absolute stage tolerance; `None` means `1e-7·‖F₀‖`.
    pub tolerance: Option<f64>,
    pub probes: Option<ProbeSet>,
}

fn check_inequalities(seq: &MonotoneSequence<'_>, probes: &ProbeSet, members: &[usize]) -> Result<InequalityReport> {
    let f0 = seq.bound().norm();
    let scale = f0.max(f64::MIN_POSITIVE);
    let slack = 1e-9 * f0.max(1.0);
    let norms: Vec<f64> = probes.vectors.iter().map(linalg::vector_norm).collect();
    let p = probes.len();
    let mut report = InequalityReport { max_value_ratio: 0.0, max_variation_ratio: 0.0 };
    for &m in members {
        let samples = seq.samples(m);
        let mut variation = vec![0.0_f64; p * p];
        let mut prev: Option<Vec<Complex64>> = None;
        for (k, s) in samples.iter().enumerate() {
            let pr = probes.pairings(s);
            for (idx, v) in pr.iter().enumerate() {
                let xy = norms[idx / p] * norms[idx % p];
                let ratio = v.norm() / (scale * xy);
                report.max_value_ratio = report.max_value_ratio.max(ratio);
                if v.norm() > f0 * xy + slack {
                    return Err(Error::BoundViolated { member: m, t: seq.grid()[k], witness: linalg::to_pairs(&probes.vectors[idx / p]) });
                }
                if let Some(prev) = &prev {
                    variation[idx] += (v - prev[idx]).norm();
                }
            }
            prev = Some(pr);
        }
        for (idx, var) in variation.iter().enumerate() {
            let xy = norms[idx / p] * norms[idx % p];
            report.max_variation_ratio = report.max_variation_ratio.max(var / (scale * xy));
            if *var > 2.0 * f0 * xy + slack {
                return Err(Error::BoundViolated {
                    member: m,
                    t: seq.grid()[seq.grid().len() - 1],
                    witness: linalg::to_pairs(&probes.vectors[idx / p]),
                });
            }
        }
    }
    Ok(report)
}

/// Diagonal selection over (grid point, probe pair) stages.
pub fn helly_select(seq: &MonotoneSequence<'_>, options: &HellyOptions) -> Result<SelectionResult> {
    let n = seq.dim();
    let probes = options.probes.clone().unwrap_or_else(|| ProbeSet::standard(n));
    if probes.dim() != n || !probes.spans() {
        return Err(Error::Precondition("probe family must span the space".into()));
    }
    let f0 = seq.bound().norm();
    let tol = options.tolerance.unwrap_or(DEFAULT_RELATIVE_TOL * f0.max(f64::MIN_POSITIVE));
    let all: Vec<usize> = (0..seq.len()).collect();
    let inequalities = check_inequalities(seq, &probes, &all)?;
    let grid = seq.grid();
    let stages: Vec<(usize, f64)> = stage_order(grid.len()).into_iter().map(|k| (k, grid[k])).collect();
    let (subsequence, log) = select_core(seq.len(), &stages, tol, |k, m| probes.pairings(&seq.samples(m)[k]))?;
    let last = *subsequence.last().expect("nonempty");
    let values: Vec<ComplexMatrix> = seq.samples(last).iter().map(|s| probes.polarize(&probes.pairings(s))).collect();
    let limit = GridFunction::new(grid.to_vec(), values)?;
    let max_residual = log.iter().map(|s| s.residual).fold(0.0, f64::max);
    Ok(SelectionResult { subsequence, limit, convergence_log: log, max_residual, tolerance: tol, inequalities })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PassToLimit {
    /// `∫ f dF` against the selected limit.
    pub value: ComplexMatrix,
    /// `∫ f dF_{n_k}` for the compared tail members.
    pub tail: Vec<(usize, ComplexMatrix)>,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// `(x, y)` probe indices of the worst pairing when `pass` is false.
    pub failing_pair: Option<(usize, usize)>,
}

/// Compares `∫ f dF` for the selected limit with the tail of the subsequence.
///
/// Tolerance: `2ε + residual·(|f(a)| + |f(b)| + TV(f)) + 2‖F₀‖·osc_h(f)`, the
/// last term covering the step interpolation of the limit between grid points.
pub fn pass_to_limit(
    f: &dyn Fn(f64) -> Complex64,
    seq: &MonotoneSequence<'_>,
    selection: &SelectionResult,
    options: &IntegrationOptions,
    tail: usize,
) -> Result<PassToLimit> {
    let n = seq.dim();
    let probes = ProbeSet::standard(n);
    let value = stieltjes::integrate(f, &selection.limit, options)?.value;
    let grid = seq.grid();
    let (a, b) = (grid[0], grid[grid.len() - 1]);
    let samples = 4097;
    let fine: Vec<Complex64> = (0..samples).map(|k| f(a + (b - a) * k as f64 / (samples - 1) as f64)).collect();
    let tv: f64 = fine.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
    let h = grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let modulus = Modulus::sample(f, a, b, samples);
    let steps = (h / modulus.step).ceil().max(1.0) as usize;
    let level = (usize::BITS - steps.next_power_of_two().leading_zeros()) as usize;
    let osc_h = modulus.osc.get(level.min(modulus.osc.len().saturating_sub(1))).copied().unwrap_or(modulus.range);
    let f0 = seq.bound().norm();
    let tolerance =
        2.0 * options.eps + selection.max_residual * (f(a).norm() + f(b).norm() + tv) + 2.0 * f0 * osc_h;

    let start = selection.subsequence.len().saturating_sub(tail.max(1));
    let p = probes.len();
    let mut out = PassToLimit { value, tail: Vec::new(), max_deviation: 0.0, tolerance, pass: true, failing_pair: None };
    for &m in &selection.subsequence[start..] {
        let v = stieltjes::integrate(f, seq.member(m), options)?.value;
        let diff = &out.value - &v;
        for (idx, d) in probes.pairings(&diff).iter().enumerate() {
            let dev = d.norm() / (linalg::vector_norm(&probes.vectors[idx / p]) * linalg::vector_norm(&probes.vectors[idx % p]));
            if dev > out.max_deviation {
                out.max_deviation = dev;
                if dev > tolerance {
                    out.failing_pair = Some((idx / p, idx % p));
                }
            }
        }
        out.tail.push((m, v));
    }
    out.pass = out.max_deviation <= tolerance;
    if out.pass {
        out.failing_pair = None;
    }
    Ok(out)
}

/// `t/(2π)·I` on `[0, 2π]`.
pub fn uniform_distribution(n: usize, scale: f64) -> impl IncreasingOperatorFunction {
    stieltjes::OperatorFunction::new(n, 0.0, TAU, move |t| linalg::identity(n) * re(scale * t / TAU))
}

/// `0` before `t0`, `I` from `t0` on.
pub fn unit_step(n: usize, t0: f64) -> impl IncreasingOperatorFunction {
    stieltjes::OperatorFunction::new(n, 0.0, TAU, move |t| linalg::identity(n) * re(if t >= t0 { 1.0 } else { 0.0 }))
        .with_jumps(vec![t0])
}
