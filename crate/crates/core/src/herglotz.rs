//! Riesz–Herglotz measures: `φ(z) = D + ∫₀^{2π} (e^{it}+z)/(e^{it}−z) dM(t)`.
//!
//! A measure is a list of atoms `Δ_k` at angles `t_k`, a piecewise-constant
//! density on cells, and a skew-Hermitian `D`. The distribution function is
//! normalized by `M(0) = 0` and `M(t) = Σ_{t_k ≤ t} Δ_k + ∫₀ᵗ m` for `t > 0`,
//! so an atom at angle `0` is counted by every `M(t)` with `t > 0`.
//!
//! [`recover`] goes the other way, from radial samples of `φ`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::helly::{self, GridFunction, HellyOptions, MonotoneSequence, SelectionResult};
use crate::kernel::CaratheodoryFunction;
use crate::linalg::{self, re, ComplexMatrix};
use crate::operator::{DualityTag, PositiveOperator, TOL_PSD};
use crate::stieltjes::{self, IncreasingOperatorFunction, IntegrationOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub t: f64,
    pub mass: ComplexMatrix,
}

/// Constant density `m` on `[t0, t1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityCell {
    pub t0: f64,
    pub t1: f64,
    pub m: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HerglotzMeasure {
    dim: usize,
    atoms: Vec<Atom>,
    density: Vec<DensityCell>,
    d: ComplexMatrix,
    tag: DualityTag,
}

fn psd_tol(m: &ComplexMatrix) -> f64 {
    TOL_PSD * linalg::hermitian_spectral_norm(m).max(1.0)
}

fn check_psd(m: &ComplexMatrix, what: &str) -> Result<()> {
    let herm = linalg::frobenius(&(m - m.adjoint()));
    if herm > 1e-12 * linalg::frobenius(m).max(1.0) {
        return Err(Error::NotHermitian { defect: herm, tolerance: 1e-12 * linalg::frobenius(m).max(1.0) });
    }
    let eig = linalg::hermitian_eigen(m);
    if eig.min() < -psd_tol(m) {
        return Err(Error::Precondition(format!("{what} is not positive: min eigenvalue {:.3e}", eig.min())));
    }
    Ok(())
}

impl HerglotzMeasure {
    /// Atoms are sorted by angle and density cells by `t0`; cells may not overlap.
    pub fn new(dim: usize, mut atoms: Vec<Atom>, mut density: Vec<DensityCell>, d: ComplexMatrix, tag: DualityTag) -> Result<Self> {
        let shape = |m: &ComplexMatrix, what: &str| -> Result<()> {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch(format!("{what} is {}x{}, expected {dim}x{dim}", m.nrows(), m.ncols())));
            }
            linalg::ensure_finite(m)
        };
        shape(&d, "D")?;
        let skew = linalg::frobenius(&(&d + d.adjoint()));
        if skew > 1e-10 * linalg::frobenius(&d).max(1.0) {
            return Err(Error::Precondition(format!("D is not skew-Hermitian: ‖D + Dᴴ‖_F = {skew:.3e}")));
        }
        for a in &atoms {
            shape(&a.mass, "atom mass")?;
            if !(a.t >= 0.0 && a.t < TAU) {
                return Err(Error::Precondition(format!("atom angle {} is outside [0, 2π)", a.t)));
            }
            check_psd(&a.mass, "atom mass")?;
        }
        for c in &density {
            shape(&c.m, "density")?;
            if !(c.t0 >= 0.0 && c.t0 < c.t1 && c.t1 <= TAU) {
                return Err(Error::Precondition(format!("density cell [{}, {}] is not inside [0, 2π]", c.t0, c.t1)));
            }
            check_psd(&c.m, "density")?;
        }
        atoms.sort_by(|a, b| a.t.total_cmp(&b.t));
        density.sort_by(|a, b| a.t0.total_cmp(&b.t0));
        if density.windows(2).any(|w| w[1].t0 < w[0].t1 - 1e-12) {
            return Err(Error::Precondition("density cells overlap".into()));
        }
        Ok(Self { dim, atoms, density, d, tag })
    }

    pub fn zero(dim: usize, d: ComplexMatrix) -> Result<Self> {
        Self::new(dim, Vec::new(), Vec::new(), d, DualityTag::BToBstar)
    }

    /// Scalar unit atom at `t`.
    pub fn unit_atom(t: f64) -> Self {
        Self::new(1, vec![Atom { t, mass: linalg::scalar_matrix(re(1.0)) }], Vec::new(), linalg::zeros(1, 1), DualityTag::BToBstar)
            .expect("valid unit atom")
    }

    /// `m ≡ scale/(2π)·I` on `cells` equal cells.
    pub fn uniform(dim: usize, cells: usize, scale: f64) -> Self {
        let w = TAU / cells as f64;
        let density = (0..cells)
            .map(|k| DensityCell {
                t0: k as f64 * w,
                t1: if k + 1 == cells { TAU } else { (k + 1) as f64 * w },
                m: linalg::identity(dim) * re(scale / TAU),
            })
            .collect();
        Self::new(dim, Vec::new(), density, linalg::zeros(dim, dim), DualityTag::BToBstar).expect("valid uniform measure")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> &[DensityCell] {
        &self.density
    }

    pub fn d(&self) -> &ComplexMatrix {
        &self.d
    }

    pub fn tag(&self) -> DualityTag {
        self.tag
    }

    pub fn total_mass(&self) -> ComplexMatrix {
        let mut acc = linalg::zeros(self.dim, self.dim);
        for a in &self.atoms {
            acc += &a.mass;
        }
        for c in &self.density {
            acc += &c.m * re(c.t1 - c.t0);
        }
        acc
    }

    pub fn distribution(&self) -> Distribution<'_> {
        let mut cell_prefix = Vec::with_capacity(self.density.len() + 1);
        let mut acc = linalg::zeros(self.dim, self.dim);
        cell_prefix.push(acc.clone());
        for c in &self.density {
            acc += &c.m * re(c.t1 - c.t0);
            cell_prefix.push(acc.clone());
        }
        let mut atom_prefix = Vec::with_capacity(self.atoms.len() + 1);
        let mut acc = linalg::zeros(self.dim, self.dim);
        atom_prefix.push(acc.clone());
        for a in &self.atoms {
            acc += &a.mass;
            atom_prefix.push(acc.clone());
        }
        Distribution { measure: self, cell_prefix, atom_prefix }
    }

    pub fn eval(&self, z: Complex64) -> Result<ComplexMatrix> {
        if z.norm() >= 1.0 {
            if z.norm() == 1.0 && self.atoms.iter().any(|a| (Complex64::from_polar(1.0, a.t) - z).norm() < 1e-15) {
                return Err(Error::Undefined([z.re, z.im]));
            }
            return Err(Error::OutsideDisk([z.re, z.im]));
        }
        let mut acc = self.d.clone();
        for a in &self.atoms {
            let u = Complex64::from_polar(1.0, a.t);
            let w = (u + z) / (u - z);
            acc.zip_apply(&a.mass, |x, y| *x += w * y);
        }
        // log(e^{it} − z) at the previous right edge, reused by an adjacent cell.
        let mut prev: Option<(f64, Complex64)> = None;
        let log_at = |t: f64| {
            let v = Complex64::from_polar(1.0, t) - z;
            Complex64::new(0.5 * v.norm_sqr().ln(), v.arg())
        };
        for c in &self.density {
            let delta = c.t1 - c.t0;
            let w = if principal_branch_ok(c.t0, c.t1, z) {
                let l0 = match prev {
                    Some((t, l)) if t == c.t0 => l,
                    _ => log_at(c.t0),
                };
                let l1 = log_at(c.t1);
                prev = Some((c.t1, l1));
                let mut darg = l1.im - l0.im;
                if darg > PI {
                    darg -= TAU;
                } else if darg <= -PI {
                    darg += TAU;
                }
                -delta - Complex64::new(0.0, 2.0) * Complex64::new(l1.re - l0.re, darg)
            } else {
                prev = None;
                herglotz_cell_integral(c.t0, c.t1, z)
            };
            acc.zip_apply(&c.m, |x, y| *x += w * y);
        }
        Ok(acc)
    }

    /// `∫ e^{−ikt} dM(t)`, `k = 0..=k_max`, in closed form.
    pub fn trig_moments(&self, k_max: usize) -> Vec<ComplexMatrix> {
        (0..=k_max)
            .map(|k| {
                let kf = k as f64;
                let mut acc = linalg::zeros(self.dim, self.dim);
                for a in &self.atoms {
                    acc += &a.mass * Complex64::from_polar(1.0, -kf * a.t);
                }
                for c in &self.density {
                    let w = if k == 0 {
                        re(c.t1 - c.t0)
                    } else {
                        (Complex64::from_polar(1.0, -kf * c.t1) - Complex64::from_polar(1.0, -kf * c.t0)) / Complex64::new(0.0, -kf)
                    };
                    acc += &c.m * w;
                }
                acc
            })
            .collect()
    }

    /// The same moments through [`stieltjes::integrate`] on the distribution function.
    pub fn trig_moments_by_integration(&self, k_max: usize, options: &IntegrationOptions) -> Result<Vec<ComplexMatrix>> {
        let dist = self.distribution();
        (0..=k_max)
            .map(|k| {
                let kf = k as f64;
                stieltjes::integrate(&|t| Complex64::from_polar(1.0, -kf * t), &dist, options).map(|r| r.value)
            })
            .collect()
    }

    pub fn as_function(&self) -> CaratheodoryFunction {
        CaratheodoryFunction::Measure(self.clone())
    }
}

/// `∫_{t0}^{t1} (e^{it}+z)/(e^{it}−z) dt = −(t1−t0) − 2i[log(e^{it1}−z) − log(e^{it0}−z)]`
/// along a continuous branch. The arc is split until the principal argument
/// difference is that branch, i.e. until `z` lies off the circular segment
/// cut by the chord.
pub fn herglotz_cell_integral(t0: f64, t1: f64, z: Complex64) -> Complex64 {
    fn go(t0: f64, t1: f64, z: Complex64, depth: u32) -> Complex64 {
        let delta = t1 - t0;
        if depth < 64 && !principal_branch_ok(t0, t1, z) {
            let mid = 0.5 * (t0 + t1);
            return go(t0, mid, z, depth + 1) + go(mid, t1, z, depth + 1);
        }
        let ratio = (Complex64::from_polar(1.0, t1) - z) / (Complex64::from_polar(1.0, t0) - z);
        let log = Complex64::new(ratio.norm().ln(), ratio.arg());
        -delta - Complex64::new(0.0, 2.0) * log
    }
    go(t0, t1, z, 0)
}

/// The arg of `e^{it} − z` turns by less than `π` over `[t0, t1]`: the arc is
/// shorter than a half circle and `z` is on the far side of its chord.
fn principal_branch_ok(t0: f64, t1: f64, z: Complex64) -> bool {
    let delta = t1 - t0;
    let mid = Complex64::from_polar(1.0, 0.5 * (t0 + t1));
    delta < PI && (z * mid.conj()).re < (0.5 * delta).cos() - 1e-9
}

/// `P_r(x) = (1 − r²)/(1 − 2r cos x + r²)`, in a form that stays accurate near `x = 0`.
pub fn poisson_kernel(r: f64, x: f64) -> f64 {
    let s = (0.5 * x).sin();
    (1.0 - r * r) / ((1.0 - r) * (1.0 - r) + 4.0 * r * s * s)
}

/// The distribution function `t ↦ M(t)` on `[0, 2π]`.
pub struct Distribution<'a> {
    measure: &'a HerglotzMeasure,
    cell_prefix: Vec<ComplexMatrix>,
    atom_prefix: Vec<ComplexMatrix>,
}

impl IncreasingOperatorFunction for Distribution<'_> {
    fn dim(&self) -> usize {
        self.measure.dim
    }
    fn domain(&self) -> (f64, f64) {
        (0.0, TAU)
    }
    fn value(&self, t: f64) -> ComplexMatrix {
        if t <= 0.0 {
            return linalg::zeros(self.measure.dim, self.measure.dim);
        }
        let atoms = self.measure.atoms.partition_point(|a| a.t <= t);
        let cells = &self.measure.density;
        let k = cells.partition_point(|c| c.t1 <= t);
        let mut v = &self.atom_prefix[atoms] + &self.cell_prefix[k];
        if let Some(c) = cells.get(k) {
            if t > c.t0 {
                v += &c.m * re(t.min(c.t1) - c.t0);
            }
        }
        v
    }
    fn jump_hints(&self) -> Vec<f64> {
        self.measure.atoms.iter().map(|a| a.t).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelIntegralReport {
    pub pass: bool,
    pub max_deviation: f64,
    pub worst_pair: Option<(usize, usize)>,
    pub tolerance: f64,
    pub pairs: usize,
}

/// Compares `k_φ(z,w)` from the forward map with
/// `∫ dM(t) / ((e^{it}−z)·conj(e^{it}−w))` computed by Stieltjes integration.
pub fn kernel_integral_check(mu: &HerglotzMeasure, points: &[Complex64], tol: f64, eps: f64) -> Result<KernelIntegralReport> {
    let values = points.iter().map(|&z| mu.eval(z)).collect::<Result<Vec<_>>>()?;
    let dist = mu.distribution();
    let options = IntegrationOptions::with_eps(eps);
    let mut report = KernelIntegralReport { pass: true, max_deviation: 0.0, worst_pair: None, tolerance: tol, pairs: 0 };
    for (i, &z) in points.iter().enumerate() {
        for (j, &w) in points.iter().enumerate() {
            let k = crate::kernel::kernel_from_values(&values[i], &values[j], z, w);
            let f = move |t: f64| {
                let u = Complex64::from_polar(1.0, t);
                1.0 / ((u - z) * (u - w).conj())
            };
            let integral = stieltjes::integrate(&f, &dist, &options)?.value;
            let dev = linalg::spectral_norm(&(&k - integral)) / linalg::spectral_norm(&k).max(1.0);
            report.pairs += 1;
            if dev > report.max_deviation {
                report.max_deviation = dev;
                report.worst_pair = Some((i, j));
            }
        }
    }
    report.pass = report.max_deviation <= tol;
    Ok(report)
}

/// Max spectral-norm deviation between two moment lists.
pub fn moment_deviation(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| linalg::spectral_norm(&(x - y))).fold(0.0, f64::max)
}

/// `M_r` with `dM_r = Re φ(re^{it})/(2π) dt`, sampled on the recovery grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialStage {
    pub r: f64,
    pub nodes: usize,
    pub distribution: GridFunction,
    /// Smallest eigenvalue of `Re φ(re^{it})` over the nodes.
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoverOptions {
    pub radii: Vec<f64>,
    /// Density cells; a power of two.
    pub cells: usize,
    pub min_nodes: usize,
    /// Helly stage tolerance relative to `‖Re φ(0)‖`.
    pub helly_relative_tol: f64,
    pub max_atoms: usize,
    /// Pair-of-cells mass over the average of its neighbours that flags an atom.
    pub atom_ratio: f64,
}

impl Default for RecoverOptions {
    fn default() -> Self {
        Self {
            radii: (3..=12).map(|n| 1.0 - 0.5f64.powi(n)).collect(),
            cells: 1024,
            min_nodes: 4096,
            helly_relative_tol: 0.25,
            max_atoms: 16,
            atom_ratio: 10.0,
        }
    }
}

impl RecoverOptions {
    /// Node count on the circle of radius `r`: at least `32/(1−r)` so the
    /// periodic midpoint rule resolves the Poisson peak width `1 − r`.
    pub fn nodes_for(&self, r: f64) -> usize {
        let need = (32.0 / (1.0 - r)).ceil() as usize;
        need.next_power_of_two().max(self.min_nodes).max(self.cells)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recovery {
    pub measure: HerglotzMeasure,
    pub stages: Vec<RadialStage>,
    pub selection: SelectionResult,
    /// Radius whose stage built the measure.
    pub radius: f64,
    /// `max ‖eval(μ, z) − φ(z)‖ / (1 + ‖φ(z)‖)` over a few interior points.
    pub validation_error: f64,
}

struct NodeSamples {
    r: f64,
    /// `Re φ(r e^{it_j}) h/(2π)` at `t_j = (j + ½)h`.
    mass: Vec<ComplexMatrix>,
    min_eigenvalue: f64,
}

fn sample_circle(phi: &CaratheodoryFunction, r: f64, nodes: usize, scale: f64) -> Result<NodeSamples> {
    let h = TAU / nodes as f64;
    let tol = TOL_PSD * scale.max(1.0);
    let mut mass = Vec::with_capacity(nodes);
    let mut min_eigenvalue = f64::INFINITY;
    for j in 0..nodes {
        let t = (j as f64 + 0.5) * h;
        let v = phi.eval(Complex64::from_polar(r, t))?;
        let re_part = linalg::hermitian_part(&v);
        let lo = linalg::hermitian_eigen(&re_part).min();
        min_eigenvalue = min_eigenvalue.min(lo);
        if lo < -tol {
            return Err(Error::NotCaratheodory { r, t, min_eigenvalue: lo });
        }
        mass.push(re_part * re(h / TAU));
    }
    Ok(NodeSamples { r, mass, min_eigenvalue })
}

fn stage_from_nodes(s: &NodeSamples, cells: usize, n: usize) -> Result<RadialStage> {
    let per = s.mass.len() / cells;
    let grid = helly::dyadic_grid(0.0, TAU, cells.trailing_zeros());
    let mut values = Vec::with_capacity(cells + 1);
    let mut acc = linalg::zeros(n, n);
    values.push(acc.clone());
    for c in 0..cells {
        for m in &s.mass[c * per..(c + 1) * per] {
            acc += m;
        }
        values.push(acc.clone());
    }
    Ok(RadialStage { r: s.r, nodes: s.mass.len(), distribution: GridFunction::new(grid, values)?, min_eigenvalue: s.min_eigenvalue })
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
        if hi - lo <= 1e-15 * (1.0 + hi.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Peels atoms off the node masses one at a time. Each atom is located by
/// maximizing the residual real part along the circle, its mass is the
/// window sum minus a background estimated from the surrounding annulus,
/// divided by the Poisson weight of the window, and its exact Poisson
/// contribution is then subtracted from every node.
fn peel_atoms(phi: &CaratheodoryFunction, s: &mut NodeSamples, options: &RecoverOptions) -> Result<Vec<Atom>> {
    let nodes = s.mass.len();
    let cells = options.cells;
    let per = nodes / cells;
    let h = TAU / nodes as f64;
    let r = s.r;
    let total: f64 = s.mass.iter().map(linalg::trace_re).sum();
    let half = ((40.0 * (1.0 - r)).min(0.05) / h).ceil().max(8.0) as isize;
    let mut atoms: Vec<Atom> = Vec::new();
    let mut blocked: Vec<usize> = Vec::new();
    while atoms.len() < options.max_atoms && total > 0.0 {
        let cell_mass: Vec<f64> =
            (0..cells).map(|c| s.mass[c * per..(c + 1) * per].iter().map(linalg::trace_re).sum()).collect();
        let pair = |c: usize| cell_mass[c % cells] + cell_mass[(c + 1) % cells];
        let mut best: Option<(usize, f64)> = None;
        for c in 0..cells {
            if blocked.iter().any(|&b| {
                let d = (c as isize - b as isize).rem_euclid(cells as isize) as usize;
                d.min(cells - d) <= 3
            }) {
                continue;
            }
            let p = pair(c);
            let around = 0.5 * (pair(c + cells - 2) + pair(c + 2));
            if p > options.atom_ratio * around && p > 1e-8 * total && best.is_none_or(|(_, bp)| p > bp) {
                best = Some((c, p));
            }
        }
        let Some((c, _)) = best else { break };
        blocked.push(c);

        let start = c * per;
        let j0 = (start..start + 2 * per)
            .max_by(|&a, &b| linalg::trace_re(&s.mass[a % nodes]).total_cmp(&linalg::trace_re(&s.mass[b % nodes])))
            .expect("nonempty window");
        let peeled = atoms.clone();
        let residual = |t: f64| -> f64 {
            let v = phi.eval(Complex64::from_polar(r, t)).map(|v| linalg::trace_re(&v)).unwrap_or(f64::NEG_INFINITY);
            v - peeled.iter().map(|a| linalg::trace_re(&a.mass) * poisson_kernel(r, t - a.t)).sum::<f64>()
        };
        let tj = (j0 as f64 + 0.5) * h;
        let t0 = golden_max(&residual, tj - 1.5 * h, tj + 1.5 * h);

        let c0 = ((t0 / h - 0.5).round() as isize).rem_euclid(nodes as isize);
        let node = |k: isize| (c0 + k).rem_euclid(nodes as isize) as usize;
        let weight = |k: isize| {
            let t = (node(k) as f64 + 0.5) * h;
            poisson_kernel(r, t - t0) * h / TAU
        };
        let n = phi.dim();
        let mut window = linalg::zeros(n, n);
        let mut annulus = linalg::zeros(n, n);
        let (mut q_w, mut q_a) = (0.0, 0.0);
        for k in -half..=half {
            window += &s.mass[node(k)];
            q_w += weight(k);
        }
        for k in (half + 1)..=(2 * half) {
            annulus += &s.mass[node(k)] + &s.mass[node(-k)];
            q_a += weight(k) + weight(-k);
        }
        let rho = (2 * half + 1) as f64 / (2 * half) as f64;
        let mass = (window - annulus * re(rho)) / re(q_w - rho * q_a);
        let mass = linalg::psd_projection(&linalg::hermitian_part(&mass));
        if linalg::trace_re(&mass) <= 1e-12 * total {
            continue;
        }
        for (j, m) in s.mass.iter_mut().enumerate() {
            let t = (j as f64 + 0.5) * h;
            *m -= &mass * re(poisson_kernel(r, t - t0) * h / TAU);
        }
        let mut t = t0.rem_euclid(TAU);
        if t >= TAU {
            t = 0.0;
        }
        atoms.push(Atom { t, mass });
    }
    Ok(atoms)
}

/// Recovers a Herglotz measure of `φ` from the circles `|z| = r_n`.
pub fn recover(phi: &CaratheodoryFunction, options: &RecoverOptions) -> Result<Recovery> {
    if !phi.is_analytic() {
        return Err(Error::Unsupported("table-valued functions have no Herglotz measure".into()));
    }
    if options.radii.is_empty() || options.radii.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(Error::Precondition("radii must lie in (0, 1)".into()));
    }
    if !options.cells.is_power_of_two() || options.cells < 4 {
        return Err(Error::Precondition("cell count must be a power of two, at least 4".into()));
    }
    let n = phi.dim();
    let phi0 = phi.eval(Complex64::new(0.0, 0.0))?;
    let d = linalg::skew_part(&phi0);
    let real0 = linalg::hermitian_part(&phi0);
    let scale = linalg::hermitian_spectral_norm(&real0);
    let lo = linalg::hermitian_eigen(&real0).min();
    if lo < -TOL_PSD * scale.max(1.0) {
        return Err(Error::NotCaratheodory { r: 0.0, t: 0.0, min_eigenvalue: lo });
    }

    let mut stages = Vec::with_capacity(options.radii.len());
    let mut last: Option<NodeSamples> = None;
    for &r in &options.radii {
        let s = sample_circle(phi, r, options.nodes_for(r), scale)?;
        stages.push(stage_from_nodes(&s, options.cells, n)?);
        last = Some(s);
    }

    let bound = PositiveOperator::from_matrix(&real0 + linalg::identity(n) * re(1e-9 * scale.max(1e-300)))?;
    let grid = helly::dyadic_grid(0.0, TAU, options.cells.trailing_zeros());
    let members: Vec<Box<dyn IncreasingOperatorFunction>> =
        stages.iter().map(|s| Box::new(s.distribution.clone()) as Box<dyn IncreasingOperatorFunction>).collect();
    let selection = if members.len() >= 2 {
        let seq = MonotoneSequence::new(members, bound, grid)?;
        helly::helly_select(&seq, &HellyOptions { tolerance: Some(options.helly_relative_tol * scale), probes: None })?
    } else {
        let only = stages[0].distribution.clone();
        SelectionResult {
            subsequence: vec![0],
            limit: only,
            convergence_log: Vec::new(),
            max_residual: 0.0,
            tolerance: options.helly_relative_tol * scale,
            inequalities: helly::InequalityReport { max_value_ratio: 0.0, max_variation_ratio: 0.0 },
        }
    };
    let chosen = *selection.subsequence.last().expect("nonempty");
    let radius = options.radii[chosen];
    let mut samples = match last {
        Some(s) if s.r == radius => s,
        _ => sample_circle(phi, radius, options.nodes_for(radius), scale)?,
    };

    let atoms = peel_atoms(phi, &mut samples, options)?;
    let per = samples.mass.len() / options.cells;
    let width = TAU / options.cells as f64;
    let density = (0..options.cells)
        .map(|c| {
            let mut m = linalg::zeros(n, n);
            for v in &samples.mass[c * per..(c + 1) * per] {
                m += v;
            }
            DensityCell {
                t0: c as f64 * width,
                t1: if c + 1 == options.cells { TAU } else { (c + 1) as f64 * width },
                m: linalg::psd_projection(&linalg::hermitian_part(&m)) * re(1.0 / width),
            }
        })
        .collect();
    let measure = HerglotzMeasure::new(n, atoms, density, d, phi.tag())?;

    let mut validation_error = 0.0_f64;
    for k in 0..8 {
        let z = Complex64::from_polar(if k % 2 == 0 { 0.3 } else { 0.6 }, TAU * k as f64 / 8.0 + 0.1);
        let want = phi.eval(z)?;
        let got = measure.eval(z)?;
        validation_error = validation_error.max(linalg::spectral_norm(&(got - &want)) / (1.0 + linalg::spectral_norm(&want)));
    }
    Ok(Recovery { measure, stages, selection, radius, validation_error })
}
