//! The kernel `k_φ(z,w) = (φ(z) + φ(w)ᴴ) / (2(1 − z w̄))`, its Gram matrices,
//! positivity certificates, negative-square counts and finite sections of the
//! reproducing kernel space `L(φ)`.
//!
//! # Gram orientation
//!
//! Block `(i, j)` of the Gram matrix is `k_φ(w_i, w_j)`, so for a stacked
//! coefficient vector `c = (c_1, …, c_N)` the quadratic form
//! `cᴴ G c = Σ_{i,j} c_iᴴ k_φ(w_i, w_j) c_j` is exactly
//! `Σ ⟨k_φ(w_i, w_j) c_j, c_i⟩`. For two scalar points `{w_1, w_2}`:
//!
//! ```text
//! G = [ k(w_1,w_1)  k(w_1,w_2) ]
//!     [ k(w_2,w_1)  k(w_2,w_2) ]
//! ```
//!
//! and `G[0][1] = k(w_1, w_2) = conj(G[1][0])`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::herglotz::HerglotzMeasure;
use crate::linalg::{self, re, ComplexMatrix, ComplexVector};
use crate::operator::DualityTag;
use crate::realization::Realization;

/// Eigenvalues with `|λ| ≤ ZERO_CUTOFF·(1 + λ_max)` count as zero.
pub const ZERO_CUTOFF: f64 = 1e-10;
/// Gram eigenvalues above `SECTION_RANK_CUTOFF·λ_max` span the section.
pub const SECTION_RANK_CUTOFF: f64 = 1e-10;
/// `certify_positive_kernel` passes when `λ_min ≥ −tol·(1 + λ_max)`.
pub const DEFAULT_KERNEL_TOL: f64 = 1e-10;

/// `φ(z) = N(z) Q(z)⁻¹` with matrix polynomial coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    pub numerator: Vec<ComplexMatrix>,
    pub denominator: Vec<ComplexMatrix>,
}

impl RationalFunction {
    pub fn new(numerator: Vec<ComplexMatrix>, denominator: Vec<ComplexMatrix>) -> Result<Self> {
        let n = numerator
            .first()
            .map(|m| m.nrows())
            .ok_or_else(|| Error::Format("numerator needs at least one coefficient".into()))?;
        if denominator.is_empty() {
            return Err(Error::Format("denominator needs at least one coefficient".into()));
        }
        for m in numerator.iter().chain(&denominator) {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch(format!("coefficient is {}x{}, expected {n}x{n}", m.nrows(), m.ncols())));
            }
            linalg::ensure_finite(m)?;
        }
        Ok(Self { numerator, denominator })
    }

    pub fn dim(&self) -> usize {
        self.numerator[0].nrows()
    }

    fn horner(coeffs: &[ComplexMatrix], z: Complex64) -> ComplexMatrix {
        let n = coeffs[0].nrows();
        coeffs.iter().rev().fold(linalg::zeros(n, n), |acc, m| acc * z + m)
    }

    pub fn eval(&self, z: Complex64) -> Result<ComplexMatrix> {
        let num = Self::horner(&self.numerator, z);
        let den = Self::horner(&self.denominator, z);
        if linalg::condition_number(&den) > 1e14 {
            return Err(Error::Undefined([z.re, z.im]));
        }
        // N Q⁻¹ = (Q⁻ᴴ Nᴴ)ᴴ
        Ok(linalg::solve(&den.adjoint(), &num.adjoint())?.adjoint())
    }
}

/// Explicit point values; not analytic, admitted only for kernel and Gram work.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTable {
    pub dim: usize,
    pub points: Vec<Complex64>,
    pub values: Vec<ComplexMatrix>,
}

impl SampleTable {
    pub fn new(dim: usize, points: Vec<Complex64>, values: Vec<ComplexMatrix>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::DimensionMismatch(format!("{} points, {} values", points.len(), values.len())));
        }
        for v in &values {
            if v.nrows() != dim || v.ncols() != dim {
                return Err(Error::DimensionMismatch(format!("value is {}x{}, expected {dim}x{dim}", v.nrows(), v.ncols())));
            }
            linalg::ensure_finite(v)?;
        }
        Ok(Self { dim, points, values })
    }

    /// `φ(0) = 1` and `φ(z) = 0` at `others`: positive real part everywhere
    /// sampled, yet the kernel has a negative square.
    pub fn origin_spike(others: &[Complex64]) -> Self {
        let mut points = vec![Complex64::new(0.0, 0.0)];
        let mut values = vec![linalg::scalar_matrix(re(1.0))];
        for &w in others {
            points.push(w);
            values.push(linalg::scalar_matrix(re(0.0)));
        }
        Self { dim: 1, points, values }
    }

    pub fn lookup(&self, z: Complex64) -> Result<ComplexMatrix> {
        self.points
            .iter()
            .position(|p| (p - z).norm() <= 1e-12)
            .map(|k| self.values[k].clone())
            .ok_or(Error::Undefined([z.re, z.im]))
    }
}

/// A candidate Carathéodory function in one of its concrete presentations.
#[derive(Debug, Clone, PartialEq)]
pub enum CaratheodoryFunction {
    Rational { function: RationalFunction, tag: DualityTag },
    Realization(Realization),
    Measure(HerglotzMeasure),
    Table { table: SampleTable, tag: DualityTag },
}

impl CaratheodoryFunction {
    pub fn constant(value: ComplexMatrix) -> Result<Self> {
        let n = value.nrows();
        Ok(Self::Rational {
            function: RationalFunction::new(vec![value], vec![linalg::identity(n)])?,
            tag: DualityTag::BToBstar,
        })
    }

    pub fn scalar_constant(value: Complex64) -> Self {
        Self::constant(linalg::scalar_matrix(value)).expect("1x1 constant")
    }

    /// Scalar `p(z)/q(z)`.
    pub fn scalar_rational(numerator: &[Complex64], denominator: &[Complex64]) -> Result<Self> {
        let wrap = |cs: &[Complex64]| cs.iter().map(|&c| linalg::scalar_matrix(c)).collect::<Vec<_>>();
        Ok(Self::Rational {
            function: RationalFunction::new(wrap(numerator), wrap(denominator))?,
            tag: DualityTag::BToBstar,
        })
    }

    /// `(1 + z)/(1 − z)`.
    pub fn unit_atom_scalar() -> Self {
        Self::scalar_rational(&[re(1.0), re(1.0)], &[re(1.0), re(-1.0)]).expect("valid")
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Rational { function, .. } => function.dim(),
            Self::Realization(r) => r.dim(),
            Self::Measure(m) => m.dim(),
            Self::Table { table, .. } => table.dim,
        }
    }

    pub fn tag(&self) -> DualityTag {
        match self {
            Self::Rational { tag, .. } | Self::Table { tag, .. } => *tag,
            Self::Realization(r) => r.tag(),
            Self::Measure(m) => m.tag(),
        }
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self, Self::Table { .. })
    }

    pub fn eval(&self, z: Complex64) -> Result<ComplexMatrix> {
        if z.norm() >= 1.0 && !matches!(self, Self::Rational { .. }) {
            return Err(Error::OutsideDisk([z.re, z.im]));
        }
        match self {
            Self::Rational { function, .. } => function.eval(z),
            Self::Realization(r) => r.evaluate(z),
            Self::Measure(m) => m.eval(z),
            Self::Table { table, .. } => table.lookup(z),
        }
    }
}

/// Points `w_i` of the open disk, optionally with direction vectors `b_i`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SampleSet {
    #[serde(with = "crate::io::complex_list")]
    pub points: Vec<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::io::opt_vector_list")]
    pub vectors: Option<Vec<ComplexVector>>,
    #[serde(default)]
    pub include_origin: bool,
}

impl SampleSet {
    pub fn new(points: Vec<Complex64>) -> Result<Self> {
        let include_origin = points.iter().any(|p| p.norm() == 0.0);
        let s = Self { points, vectors: None, include_origin };
        s.validate()?;
        Ok(s)
    }

    pub fn with_vectors(mut self, vectors: Vec<ComplexVector>) -> Result<Self> {
        self.vectors = Some(vectors);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        for p in &self.points {
            if !(p.norm() < 1.0) {
                return Err(Error::OutsideDisk([p.re, p.im]));
            }
        }
        for (i, p) in self.points.iter().enumerate() {
            if self.points[..i].iter().any(|q| q == p) {
                return Err(Error::Precondition(format!("sample point {p} repeated")));
            }
        }
        if self.include_origin && !self.points.iter().any(|p| p.norm() == 0.0) {
            return Err(Error::Precondition("sample set is flagged to include the origin but 0 is missing".into()));
        }
        if let Some(v) = &self.vectors {
            if v.len() != self.points.len() {
                return Err(Error::DimensionMismatch(format!("{} points, {} vectors", self.points.len(), v.len())));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn origin_index(&self) -> Option<usize> {
        self.points.iter().position(|p| p.norm() == 0.0)
    }
}

/// Gram matrix of kernel sections with its eigenvalue signature.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    pub matrix: ComplexMatrix,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
    pub n_negative: usize,
    pub n_zero: usize,
    pub n_positive: usize,
}

impl GramMatrix {
    pub fn from_matrix(matrix: ComplexMatrix) -> Self {
        let eig = linalg::hermitian_eigen(&matrix);
        let lambda_max = eig.max().max(0.0);
        let cutoff = ZERO_CUTOFF * (1.0 + lambda_max);
        let n_negative = eig.values.iter().filter(|&&l| l < -cutoff).count();
        let n_zero = eig.values.iter().filter(|&&l| l.abs() <= cutoff).count();
        let n_positive = eig.values.len() - n_negative - n_zero;
        Self { matrix, eigenvalues: eig.values, eigenvectors: eig.vectors, n_negative, n_zero, n_positive }
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Eigenvector of the smallest eigenvalue; a negative direction when one exists.
    pub fn witness(&self) -> Option<ComplexVector> {
        (self.size() > 0).then(|| self.eigenvectors.column(0).into_owned())
    }

    pub fn hermiticity_defect(&self) -> f64 {
        linalg::frobenius(&(&self.matrix - self.matrix.adjoint()))
    }

    /// `min λ / (1 + λ_max)`.
    pub fn relative_min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue() / (1.0 + self.max_eigenvalue().max(0.0))
    }
}

/// `k_φ(z, w)` from the values `φ(z)`, `φ(w)`.
pub fn kernel_from_values(phi_z: &ComplexMatrix, phi_w: &ComplexMatrix, z: Complex64, w: Complex64) -> ComplexMatrix {
    (phi_z + phi_w.adjoint()) / (re(2.0) * (re(1.0) - z * w.conj()))
}

pub fn kernel_eval(phi: &CaratheodoryFunction, z: Complex64, w: Complex64) -> Result<ComplexMatrix> {
    for p in [z, w] {
        if !(p.norm() < 1.0) {
            return Err(Error::OutsideDisk([p.re, p.im]));
        }
    }
    let pz = phi.eval(z)?;
    let pw = if z == w { pz.clone() } else { phi.eval(w)? };
    Ok(kernel_from_values(&pz, &pw, z, w))
}

/// Block Gram matrix from sampled values `φ(w_i)`.
pub fn gram_from_values(points: &[Complex64], values: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    if points.len() != values.len() {
        return Err(Error::DimensionMismatch(format!("{} points, {} values", points.len(), values.len())));
    }
    let n = values.first().map_or(0, |v| v.nrows());
    let size = points.len() * n;
    let block = |i: usize| -> Vec<ComplexMatrix> {
        (0..points.len()).map(|j| kernel_from_values(&values[i], &values[j], points[i], points[j])).collect()
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<ComplexMatrix>> = {
        use rayon::prelude::*;
        (0..points.len()).into_par_iter().map(block).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<ComplexMatrix>> = (0..points.len()).map(block).collect();
    let mut g = linalg::zeros(size, size);
    for (i, row) in rows.iter().enumerate() {
        for (j, b) in row.iter().enumerate() {
            g.view_mut((i * n, j * n), (n, n)).copy_from(b);
        }
    }
    Ok(g)
}

fn sample_values(phi: &CaratheodoryFunction, s: &SampleSet) -> Result<Vec<ComplexMatrix>> {
    s.validate()?;
    s.points.iter().map(|&w| phi.eval(w)).collect()
}

fn directional(g: ComplexMatrix, n: usize, vectors: &[ComplexVector]) -> Result<ComplexMatrix> {
    let count = vectors.len();
    let mut b = linalg::zeros(count * n, count);
    for (i, v) in vectors.iter().enumerate() {
        if v.len() != n {
            return Err(Error::DimensionMismatch(format!("direction vector has length {}, expected {n}", v.len())));
        }
        b.view_mut((i * n, i), (n, 1)).copy_from(v);
    }
    Ok(b.adjoint() * g * b)
}

/// Gram matrix over `S`. With direction vectors `b_i` the result is the
/// `N×N` matrix `[⟨k(w_i,w_j) b_j, b_i⟩]`; otherwise the `Nn×Nn` block matrix.
pub fn gram_assemble(phi: &CaratheodoryFunction, s: &SampleSet) -> Result<GramMatrix> {
    let values = sample_values(phi, s)?;
    let mut g = gram_from_values(&s.points, &values)?;
    if let Some(v) = &s.vectors {
        g = directional(g, phi.dim(), v)?;
    }
    Ok(GramMatrix::from_matrix(g))
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelReport {
    pub pass: bool,
    pub grams_checked: usize,
    /// Smallest `λ_min/(1+λ_max)` over the family.
    pub worst_relative_eigenvalue: f64,
    pub worst_eigenvalue: f64,
    pub worst_set: Option<usize>,
    /// Negative direction in the worst Gram when the check fails.
    pub witness: Option<ComplexVector>,
    pub n_negative_max: usize,
}

pub fn certify_positive_kernel(phi: &CaratheodoryFunction, family: &[SampleSet]) -> Result<KernelReport> {
    certify_positive_kernel_with(phi, family, DEFAULT_KERNEL_TOL)
}

pub fn certify_positive_kernel_with(phi: &CaratheodoryFunction, family: &[SampleSet], tol: f64) -> Result<KernelReport> {
    let grams = family.iter().map(|s| gram_assemble(phi, s)).collect::<Result<Vec<_>>>()?;
    Ok(report_from_grams(&grams, tol))
}

pub fn report_from_grams(grams: &[GramMatrix], tol: f64) -> KernelReport {
    let mut report = KernelReport {
        pass: true,
        grams_checked: grams.len(),
        worst_relative_eigenvalue: f64::INFINITY,
        worst_eigenvalue: f64::INFINITY,
        worst_set: None,
        witness: None,
        n_negative_max: 0,
    };
    for (k, g) in grams.iter().enumerate() {
        report.n_negative_max = report.n_negative_max.max(g.n_negative);
        if g.size() == 0 {
            continue;
        }
        let rel = g.relative_min_eigenvalue();
        if rel < report.worst_relative_eigenvalue {
            report.worst_relative_eigenvalue = rel;
            report.worst_eigenvalue = g.min_eigenvalue();
            report.worst_set = Some(k);
            report.witness = g.witness();
        }
        if rel < -tol {
            report.pass = false;
        }
    }
    if report.pass {
        report.witness = None;
    }
    if report.worst_set.is_none() {
        report.worst_relative_eigenvalue = 0.0;
        report.worst_eigenvalue = 0.0;
    }
    report
}

/// Largest negative-eigenvalue count over the family: a lower bound for the
/// number of negative squares of `k_φ`, never the true count.
pub fn negative_squares_estimate(phi: &CaratheodoryFunction, family: &[SampleSet]) -> Result<usize> {
    let mut best = 0;
    for s in family {
        best = best.max(gram_assemble(phi, s)?.n_negative);
    }
    Ok(best)
}

/// Orthonormal coordinates for `span{k_φ(·, w_i) b}` in `L(φ)`.
///
/// A member `f = Σ_j k_φ(·, w_j) x_j` is identified with its stacked
/// coefficient vector `x`; its coordinates are `L x` with `L = Λ^{1/2} Qᴴ`
/// restricted to the retained eigenpairs of the Gram matrix `G = Q Λ Qᴴ`, so
/// `⟨f, g⟩ = (L y)ᴴ (L x) = yᴴ G x`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSection {
    pub points: Vec<Complex64>,
    pub values: Vec<ComplexMatrix>,
    pub dim: usize,
    pub gram: GramMatrix,
    pub rank: usize,
    /// `r × Nn`, coefficient vector to coordinates.
    pub coordinate_map: ComplexMatrix,
    /// `Nn × r`, with `Wᴴ G W = I_r`.
    pub orthonormal_basis: ComplexMatrix,
    /// `λ_max / λ_min` over the retained eigenvalues.
    pub condition: f64,
}

impl KernelSection {
    pub fn from_values(points: Vec<Complex64>, values: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = values.first().map_or(0, |v| v.nrows());
        let gram = GramMatrix::from_matrix(gram_from_values(&points, &values)?);
        if gram.n_negative > 0 {
            return Err(Error::IndefiniteGram { n_negative: gram.n_negative, min_eigenvalue: gram.min_eigenvalue() });
        }
        let lambda_max = gram.max_eigenvalue().max(0.0);
        let cutoff = SECTION_RANK_CUTOFF * lambda_max;
        let size = gram.size();
        let kept: Vec<usize> = (0..size).rev().filter(|&k| lambda_max > 0.0 && gram.eigenvalues[k] > cutoff).collect();
        let rank = kept.len();
        let mut coordinate_map = linalg::zeros(rank, size);
        let mut orthonormal_basis = linalg::zeros(size, rank);
        for (row, &k) in kept.iter().enumerate() {
            let lambda = gram.eigenvalues[k];
            let q = gram.eigenvectors.column(k);
            for j in 0..size {
                coordinate_map[(row, j)] = q[j].conj() * lambda.sqrt();
                orthonormal_basis[(j, row)] = q[j] / lambda.sqrt();
            }
        }
        let condition = match (kept.first(), kept.last()) {
            (Some(&hi), Some(&lo)) => gram.eigenvalues[hi] / gram.eigenvalues[lo],
            _ => 1.0,
        };
        Ok(Self { points, values, dim, gram, rank, coordinate_map, orthonormal_basis, condition })
    }

    /// Stacked coefficient vector of `k_φ(·, w_i) b`.
    pub fn section_coefficients(&self, i: usize, b: &ComplexVector) -> ComplexVector {
        let mut x = ComplexVector::zeros(self.points.len() * self.dim);
        x.rows_mut(i * self.dim, self.dim).copy_from(b);
        x
    }

    pub fn coordinates(&self, coefficients: &ComplexVector) -> ComplexVector {
        &self.coordinate_map * coefficients
    }

    /// `⟨f, g⟩` for members with coefficients `x` (for `f`) and `y` (for `g`).
    pub fn inner(&self, x: &ComplexVector, y: &ComplexVector) -> Complex64 {
        self.coordinates(y).dotc(&self.coordinates(x))
    }

    /// `f(w_i) = Σ_j k_φ(w_i, w_j) x_j`, evaluated from the kernel directly.
    pub fn member_value_at_sample(&self, x: &ComplexVector, i: usize) -> ComplexVector {
        let n = self.dim;
        let mut out = ComplexVector::zeros(n);
        for j in 0..self.points.len() {
            let k = kernel_from_values(&self.values[i], &self.values[j], self.points[i], self.points[j]);
            out += k * x.rows(j * n, n);
        }
        out
    }

    /// Max deviation of `⟨f, k(·,w_i) b⟩ = ⟨f(w_i), b⟩` over the given members,
    /// all sample points and the standard basis directions.
    pub fn reproducing_defect(&self, members: &[ComplexVector]) -> f64 {
        let mut worst = 0.0_f64;
        for x in members {
            for i in 0..self.points.len() {
                let fw = self.member_value_at_sample(x, i);
                for a in 0..self.dim {
                    let mut b = ComplexVector::zeros(self.dim);
                    b[a] = re(1.0);
                    let lhs = self.inner(x, &self.section_coefficients(i, &b));
                    let rhs = fw[a];
                    worst = worst.max((lhs - rhs).norm());
                }
            }
        }
        worst
    }
}

pub fn rkhs_section(phi: &CaratheodoryFunction, s: &SampleSet) -> Result<KernelSection> {
    let values = sample_values(phi, s)?;
    KernelSection::from_values(s.points.clone(), values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CayleyValue {
    /// `(I − φ)(I + φ)⁻¹`
    pub s: ComplexMatrix,
    /// 2-norm condition number of `I + φ`.
    pub condition: f64,
}

pub fn cayley(phi_value: &ComplexMatrix) -> Result<CayleyValue> {
    let n = linalg::ensure_square(phi_value)?;
    let plus = linalg::identity(n) + phi_value;
    let condition = linalg::condition_number(&plus);
    if !(condition < 1e14) {
        return Err(Error::Singular(format!("I + φ has condition number {condition:.3e}")));
    }
    // I − φ and (I + φ)⁻¹ commute.
    let s = linalg::solve(&plus, &(linalg::identity(n) - phi_value))?;
    Ok(CayleyValue { s, condition })
}

pub fn cayley_at(phi: &CaratheodoryFunction, z: Complex64) -> Result<CayleyValue> {
    cayley(&phi.eval(z)?)
}

/// Gram of the Schur kernel `(I − s(z)s(w)ᴴ)/(1 − z w̄)`.
pub fn schur_gram(points: &[Complex64], s_values: &[ComplexMatrix]) -> Result<GramMatrix> {
    if points.len() != s_values.len() {
        return Err(Error::DimensionMismatch(format!("{} points, {} values", points.len(), s_values.len())));
    }
    let n = s_values.first().map_or(0, |v| v.nrows());
    let size = n * points.len();
    let mut g = linalg::zeros(size, size);
    for (i, (zi, si)) in points.iter().zip(s_values).enumerate() {
        for (j, (zj, sj)) in points.iter().zip(s_values).enumerate() {
            let block = (linalg::identity(n) - si * sj.adjoint()) / (re(1.0) - zi * zj.conj());
            g.view_mut((i * n, j * n), (n, n)).copy_from(&block);
        }
    }
    Ok(GramMatrix::from_matrix(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use approx::assert_relative_eq;

    fn one() -> CaratheodoryFunction {
        CaratheodoryFunction::scalar_constant(re(1.0))
    }

    fn spike() -> CaratheodoryFunction {
        CaratheodoryFunction::Table { table: SampleTable::origin_spike(&[re(0.5)]), tag: DualityTag::BToBstar }
    }

    #[test]
    fn kernel_eval_examples() {
        assert_relative_eq!(kernel_eval(&one(), re(0.0), re(0.0)).unwrap()[(0, 0)].re, 1.0);
        assert_relative_eq!(kernel_eval(&one(), re(0.5), re(0.5)).unwrap()[(0, 0)].re, 4.0 / 3.0, epsilon = 1e-15);
        let s = spike();
        assert_eq!(kernel_eval(&s, re(0.0), re(0.0)).unwrap()[(0, 0)], re(1.0));
        assert_eq!(kernel_eval(&s, re(0.5), re(0.0)).unwrap()[(0, 0)], re(0.5));
        assert_eq!(kernel_eval(&s, re(0.5), re(0.5)).unwrap()[(0, 0)], re(0.0));
        assert!(matches!(kernel_eval(&s, re(0.25), re(0.0)), Err(Error::Undefined(_))));
        assert!(kernel_eval(&one(), re(1.0), re(0.0)).is_err());
    }

    #[test]
    fn gram_orientation_two_points() {
        let phi = CaratheodoryFunction::unit_atom_scalar();
        let (w1, w2) = (c(0.3, 0.1), c(-0.2, 0.4));
        let s = SampleSet::new(vec![w1, w2]).unwrap();
        let g = gram_assemble(&phi, &s).unwrap();
        let k12 = kernel_eval(&phi, w1, w2).unwrap()[(0, 0)];
        assert!((g.matrix[(0, 1)] - k12).norm() < 1e-15);
        assert!((g.matrix[(1, 0)] - k12.conj()).norm() < 1e-15);
    }

    #[test]
    fn gram_examples() {
        let g = gram_assemble(&one(), &SampleSet::new(vec![re(0.0), re(0.5)]).unwrap()).unwrap();
        assert_eq!(g.n_positive, 2);
        // [[1,1],[1,4/3]] → λ = (7/3 ± √(16/9+4·... )) / 2 oracle: det = 1/3, trace = 7/3
        let (l0, l1) = (g.eigenvalues[0], g.eigenvalues[1]);
        assert_relative_eq!(l0 * l1, 1.0 / 3.0, epsilon = 1e-14);
        assert_relative_eq!(l0 + l1, 7.0 / 3.0, epsilon = 1e-14);

        let g = gram_assemble(&spike(), &SampleSet::new(vec![re(0.0), re(0.5)]).unwrap()).unwrap();
        assert_eq!(g.matrix, linalg::from_real_rows(&[&[1.0, 0.5], &[0.5, 0.0]]));
        assert_eq!(g.n_negative, 1);
        assert_relative_eq!(g.eigenvalues[0] * g.eigenvalues[1], -0.25, epsilon = 1e-15);

        let g = gram_assemble(&one(), &SampleSet::default()).unwrap();
        assert_eq!((g.size(), g.n_negative), (0, 0));
    }

    #[test]
    fn directional_gram_matches_block_form() {
        let phi = CaratheodoryFunction::unit_atom_scalar();
        let pts = vec![re(0.0), c(0.2, 0.3)];
        let vecs = vec![linalg::vector(&[c(2.0, 0.0)]), linalg::vector(&[c(0.0, 1.0)])];
        let s = SampleSet::new(pts.clone()).unwrap().with_vectors(vecs.clone()).unwrap();
        let g = gram_assemble(&phi, &s).unwrap();
        let k = kernel_eval(&phi, pts[0], pts[1]).unwrap()[(0, 0)];
        assert!((g.matrix[(0, 1)] - vecs[0][0].conj() * k * vecs[1][0]).norm() < 1e-14);
    }

    #[test]
    fn certify_examples() {
        let neg = CaratheodoryFunction::scalar_constant(re(-1.0));
        let r = certify_positive_kernel(&neg, &[SampleSet::new(vec![c(0.1, 0.2)]).unwrap()]).unwrap();
        assert!(!r.pass);
        assert!(r.witness.is_some());
        let r = certify_positive_kernel(&one(), &[SampleSet::new(vec![re(0.0), re(0.5), re(-0.5)]).unwrap()]).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn negative_squares_examples() {
        let fam = vec![SampleSet::new(vec![re(0.0), re(0.5)]).unwrap()];
        assert_eq!(negative_squares_estimate(&one(), &fam).unwrap(), 0);
        assert_eq!(negative_squares_estimate(&spike(), &fam).unwrap(), 1);
    }

    #[test]
    fn section_examples() {
        let s = rkhs_section(&one(), &SampleSet::new(vec![re(0.0)]).unwrap()).unwrap();
        assert_eq!(s.rank, 1);
        let s = rkhs_section(&one(), &SampleSet::new(vec![re(0.0), re(0.5), re(-0.5)]).unwrap()).unwrap();
        assert_eq!(s.rank, 3);
        let g = &s.gram.matrix;
        let wgw = s.orthonormal_basis.adjoint() * g * &s.orthonormal_basis;
        assert!(linalg::frobenius(&(wgw - linalg::identity(3))) < 1e-12);

        let phi = CaratheodoryFunction::unit_atom_scalar();
        let s = rkhs_section(&phi, &SampleSet::new(vec![re(0.0), re(0.3), c(0.1, -0.4)]).unwrap()).unwrap();
        let member = linalg::vector(&[c(0.5, 0.1), c(-1.0, 0.2), c(0.3, 0.3)]);
        assert!(s.reproducing_defect(&[member]) < 1e-10);

        let bad = rkhs_section(&spike(), &SampleSet::new(vec![re(0.0), re(0.5)]).unwrap());
        assert!(matches!(bad, Err(Error::IndefiniteGram { n_negative: 1, .. })));
    }

    #[test]
    fn cayley_examples() {
        let s = cayley(&linalg::scalar_matrix(re(1.0))).unwrap();
        assert_eq!(s.s[(0, 0)], re(0.0));
        let s = cayley(&linalg::scalar_matrix(re(0.0))).unwrap();
        assert_eq!(s.s[(0, 0)], re(1.0));
        let phi = CaratheodoryFunction::unit_atom_scalar();
        for z in [c(0.3, 0.2), c(-0.7, 0.1), re(0.0)] {
            let s = cayley_at(&phi, z).unwrap();
            assert!((s.s[(0, 0)] + z).norm() < 1e-14);
        }
        assert!(cayley(&linalg::scalar_matrix(re(-1.0))).is_err());
    }

    #[test]
    fn rational_matrix_eval() {
        let f = RationalFunction::new(
            vec![linalg::identity(2), linalg::identity(2)],
            vec![linalg::identity(2) * re(2.0)],
        )
        .unwrap();
        let v = f.eval(re(0.5)).unwrap();
        assert!(linalg::frobenius(&(v - linalg::identity(2) * re(0.75))) < 1e-15);
    }

    #[test]
    fn sample_set_validation() {
        assert!(SampleSet::new(vec![re(1.0)]).is_err());
        assert!(SampleSet::new(vec![re(0.1), re(0.1)]).is_err());
        let s = SampleSet { points: vec![re(0.1)], vectors: None, include_origin: true };
        assert!(s.validate().is_err());
    }
}
