//! Dense complex linear algebra shared by every module.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`; vectors are `DVector<Complex64>`.
//! Eigenvalues from [`hermitian_eigen`] are always sorted ascending.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Real scalar promoted to complex.
#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

pub fn scalar_matrix(z: Complex64) -> ComplexMatrix {
    ComplexMatrix::from_element(1, 1, z)
}

pub fn from_rows(rows: &[&[Complex64]]) -> ComplexMatrix {
    let r = rows.len();
    let cols = rows.first().map_or(0, |row| row.len());
    ComplexMatrix::from_fn(r, cols, |i, j| rows[i][j])
}

pub fn from_real_rows(rows: &[&[f64]]) -> ComplexMatrix {
    let r = rows.len();
    let cols = rows.first().map_or(0, |row| row.len());
    ComplexMatrix::from_fn(r, cols, |i, j| re(rows[i][j]))
}

pub fn vector(entries: &[Complex64]) -> ComplexVector {
    ComplexVector::from_column_slice(entries)
}

pub fn real_vector(entries: &[f64]) -> ComplexVector {
    ComplexVector::from_iterator(entries.len(), entries.iter().map(|&x| re(x)))
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() == m.ncols() {
        Ok(m.nrows())
    } else {
        Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() })
    }
}

pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vector_norm(v: &ComplexVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// (A + Aᴴ)/2
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * re(0.5)
}

/// (A − Aᴴ)/2
pub fn skew_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m - m.adjoint()) * re(0.5)
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn vector(&self, k: usize) -> ComplexVector {
        self.vectors.column(k).into_owned()
    }
}

/// Eigen-decomposition of the Hermitian part of `m`.
pub fn hermitian_eigen(m: &ComplexMatrix) -> HermitianEigen {
    let n = m.nrows();
    if n == 0 {
        return HermitianEigen { values: vec![], vectors: zeros(0, 0) };
    }
    let h = hermitian_part(m);
    let eig = nalgebra::SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    HermitianEigen { values, vectors }
}

pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    hermitian_eigen(m).values
}

/// Largest singular value.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    // Gram of the smaller side keeps the eigenproblem small.
    let g = if m.nrows() <= m.ncols() { m * m.adjoint() } else { m.adjoint() * m };
    hermitian_eigen(&g).max().max(0.0).sqrt()
}

/// Spectral norm of a Hermitian matrix, max |λ|.
pub fn hermitian_spectral_norm(m: &ComplexMatrix) -> f64 {
    let e = hermitian_eigenvalues(m);
    e.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.is_empty() {
        return vec![];
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// 2-norm condition number; infinite for singular input.
pub fn condition_number(m: &ComplexMatrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Solve `a x = b` by partial-pivot LU.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_square(a)?;
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "system is {}x{}, right-hand side has {} rows",
            a.nrows(),
            a.ncols(),
            b.nrows()
        )));
    }
    if a.nrows() == 0 {
        return Ok(zeros(0, b.ncols()));
    }
    let lu = a.clone().lu();
    let x = lu.solve(b).ok_or_else(|| Error::Singular("LU factor has a zero pivot".into()))?;
    ensure_finite(&x).map_err(|_| Error::Singular("solution is not finite".into()))?;
    Ok(x)
}

/// Orthonormal basis (columns) of the orthogonal complement of the column span of
/// `q`, assumed to have orthonormal columns.
pub fn orthogonal_complement(q: &ComplexMatrix) -> ComplexMatrix {
    let n = q.nrows();
    let k = q.ncols();
    if k >= n {
        return zeros(n, 0);
    }
    let projector = identity(n) - q * q.adjoint();
    let eig = hermitian_eigen(&projector);
    // Top n-k eigenvalues are ~1.
    eig.vectors.columns(k, n - k).into_owned()
}

/// Unitary polar factor `U Wᴴ` of `m = U Σ Wᴴ`.
pub fn polar_unitary(m: &ComplexMatrix) -> ComplexMatrix {
    if m.is_empty() {
        return m.clone();
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    u * v_t
}

/// Projects a Hermitian matrix onto the PSD cone by clipping negative eigenvalues.
pub fn psd_projection(m: &ComplexMatrix) -> ComplexMatrix {
    let eig = hermitian_eigen(m);
    let n = m.nrows();
    let mut out = zeros(n, n);
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda > 0.0 {
            let v = eig.vector(k);
            out += (&v * v.adjoint()) * re(lambda);
        }
    }
    out
}

pub fn trace_re(m: &ComplexMatrix) -> f64 {
    (0..m.nrows().min(m.ncols())).map(|k| m[(k, k)].re).sum()
}

pub fn to_pairs(v: &ComplexVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn kron_identity_diag(weights: &[Complex64], n: usize) -> ComplexMatrix {
    let size = weights.len() * n;
    let mut out = zeros(size, size);
    for (i, &w) in weights.iter().enumerate() {
        for a in 0..n {
            out[(i * n + a, i * n + a)] = w;
        }
    }
    out
}
