//! Positive-operator calculus on the finite model `B = ℂⁿ`.
//!
//! An operator `A : B → B*` is a square complex matrix; the duality pairing
//! `⟨Ab, c⟩` is realized as `cᴴ A b`. Every operator carries a [`DualityTag`]
//! recording whether it maps `B → B*` or `B* → B`; in the finite model the
//! natural injection `B → B**` acts as the identity on coordinates, so the tag
//! is pure bookkeeping.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector};
use num_complex::Complex64;

/// Relative Hermiticity tolerance: `‖A−Aᴴ‖_F ≤ 1e-12·max(1, ‖A‖_F)`.
pub const TOL_HERM: f64 = 1e-12;
/// Relative PSD tolerance: `λ_min ≥ −1e-10·max(1, ‖A‖₂)`.
pub const TOL_PSD: f64 = 1e-10;
/// Relative factorization residual tolerance.
pub const TOL_FACT: f64 = 1e-10;
/// Eigenvalues at or below `1e-12·λ_max` are dropped from the factor.
pub const RANK_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum DualityTag {
    #[default]
    #[serde(rename = "B_to_Bstar")]
    BToBstar,
    #[serde(rename = "Bstar_to_B")]
    BstarToB,
}

impl DualityTag {
    pub fn flipped(self) -> Self {
        match self {
            DualityTag::BToBstar => DualityTag::BstarToB,
            DualityTag::BstarToB => DualityTag::BToBstar,
        }
    }
}

/// A self-adjoint operator. Construction symmetrizes small defects and
/// rejects large ones.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
    tag: DualityTag,
    hermiticity_defect: f64,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix, tag: DualityTag) -> Result<Self> {
        Self::with_tolerance(matrix, tag, TOL_HERM)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tag: DualityTag, rel_tol: f64) -> Result<Self> {
        linalg::ensure_square(&matrix)?;
        linalg::ensure_finite(&matrix)?;
        let defect = linalg::frobenius(&(&matrix - matrix.adjoint()));
        let tolerance = rel_tol * linalg::frobenius(&matrix).max(1.0);
        if defect > tolerance {
            return Err(Error::NotHermitian { defect, tolerance });
        }
        Ok(Self { matrix: linalg::hermitian_part(&matrix), tag, hermiticity_defect: defect })
    }

    /// Shorthand for a `B → B*` operator.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        Self::new(matrix, DualityTag::BToBstar)
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: linalg::identity(n), tag: DualityTag::BToBstar, hermiticity_defect: 0.0 }
    }

    pub fn zero(n: usize) -> Self {
        Self { matrix: linalg::zeros(n, n), tag: DualityTag::BToBstar, hermiticity_defect: 0.0 }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn tag(&self) -> DualityTag {
        self.tag
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.hermiticity_defect
    }

    pub fn norm(&self) -> f64 {
        linalg::hermitian_spectral_norm(&self.matrix)
    }

    pub fn eigen(&self) -> linalg::HermitianEigen {
        linalg::hermitian_eigen(&self.matrix)
    }
}

/// A Hermitian operator whose spectrum was certified nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveOperator {
    base: HermitianOperator,
    min_eigenvalue: f64,
}

impl PositiveOperator {
    pub fn operator(&self) -> &HermitianOperator {
        &self.base
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.base.matrix()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn norm(&self) -> f64 {
        self.base.norm()
    }

    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        match is_positive(&HermitianOperator::from_matrix(matrix)?) {
            Positivity::Positive(p) => Ok(p),
            Positivity::NotPositive(w) => Err(w.into_error()),
        }
    }
}

/// A vector `b` with `⟨Ab, b⟩ < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativeWitness {
    pub vector: ComplexVector,
    pub min_eigenvalue: f64,
    /// `⟨Ab, b⟩` for the witness.
    pub form_value: f64,
}

impl NegativeWitness {
    pub fn into_error(self) -> Error {
        Error::NotPositive { min_eigenvalue: self.min_eigenvalue, witness: linalg::to_pairs(&self.vector) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Positivity {
    Positive(PositiveOperator),
    NotPositive(NegativeWitness),
}

impl Positivity {
    pub fn is_positive(&self) -> bool {
        matches!(self, Positivity::Positive(_))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        match self {
            Positivity::Positive(p) => p.min_eigenvalue,
            Positivity::NotPositive(w) => w.min_eigenvalue,
        }
    }

    pub fn into_result(self) -> Result<PositiveOperator> {
        match self {
            Positivity::Positive(p) => Ok(p),
            Positivity::NotPositive(w) => Err(w.into_error()),
        }
    }
}

fn check_dims(a: &ComplexMatrix, b: &ComplexVector, c: &ComplexVector) -> Result<()> {
    if a.ncols() != b.len() || a.nrows() != c.len() {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, vectors have lengths {} and {}",
            a.nrows(),
            a.ncols(),
            b.len(),
            c.len()
        )));
    }
    Ok(())
}

/// `⟨Ab, c⟩ = cᴴ A b`.
pub fn pairing(a: &HermitianOperator, b: &ComplexVector, c: &ComplexVector) -> Result<Complex64> {
    pairing_matrix(a.matrix(), b, c)
}

pub fn pairing_matrix(a: &ComplexMatrix, b: &ComplexVector, c: &ComplexVector) -> Result<Complex64> {
    check_dims(a, b, c)?;
    Ok(c.dotc(&(a * b)))
}

pub fn is_positive(a: &HermitianOperator) -> Positivity {
    let eig = a.eigen();
    let norm = eig.values.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    let tol = TOL_PSD * norm.max(1.0);
    let min = eig.min();
    if a.dim() == 0 || min >= -tol {
        Positivity::Positive(PositiveOperator { base: a.clone(), min_eigenvalue: if a.dim() == 0 { 0.0 } else { min } })
    } else {
        let v = eig.vector(0);
        let form_value = v.dotc(&(a.matrix() * &v)).re;
        Positivity::NotPositive(NegativeWitness { vector: v, min_eigenvalue: min, form_value })
    }
}

/// `A = TᴴT` with `T` of minimal rank.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    /// `rank × n`
    pub t: ComplexMatrix,
    pub rank: usize,
    /// `‖A − TᴴT‖_F`
    pub residual: f64,
}

pub fn factorize(a: &PositiveOperator) -> Result<Factorization> {
    let n = a.dim();
    let eig = a.operator().eigen();
    let lambda_max = eig.max().max(0.0);
    let cutoff = RANK_CUTOFF * lambda_max;
    let kept: Vec<usize> = (0..n).rev().filter(|&k| eig.values[k] > cutoff).collect();
    let rank = kept.len();
    let mut t = linalg::zeros(rank, n);
    for (row, &k) in kept.iter().enumerate() {
        let scale = eig.values[k].sqrt();
        let q = eig.vector(k);
        for j in 0..n {
            t[(row, j)] = q[j].conj() * scale;
        }
    }
    let residual = linalg::frobenius(&(a.matrix() - t.adjoint() * &t));
    let limit = TOL_FACT * linalg::frobenius(a.matrix()).max(1.0);
    if residual > limit {
        return Err(Error::NotConverged(format!("factorization residual {residual:.3e} exceeds {limit:.3e}")));
    }
    Ok(Factorization { t, rank, residual })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchySchwarz {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `|⟨Ab,c⟩| ≤ ⟨Ab,b⟩^{1/2}⟨Ac,c⟩^{1/2}`.
pub fn cauchy_schwarz_check(a: &PositiveOperator, b: &ComplexVector, c: &ComplexVector) -> Result<CauchySchwarz> {
    let m = a.matrix();
    let lhs = pairing_matrix(m, b, c)?.norm();
    let bb = pairing_matrix(m, b, b)?.re.max(0.0);
    let cc = pairing_matrix(m, c, c)?.re.max(0.0);
    let rhs = bb.sqrt() * cc.sqrt();
    Ok(CauchySchwarz { lhs, rhs, holds: lhs <= rhs + 1e-12 * (1.0 + rhs) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderCheck {
    pub holds: bool,
    /// Vector `b` with `⟨(B−A)b, b⟩ < 0` when the order fails.
    pub witness: Option<ComplexVector>,
    pub norm_lhs: f64,
    pub norm_rhs: f64,
}

/// `A ≤ B` iff `B − A ≥ 0`.
///
/// For `A ≥ 0` the ordering forces `‖A‖ ≤ ‖B‖`; a violation of that corollary
/// is reported as an error since it would mean the certification is unsound.
pub fn order_leq(a: &HermitianOperator, b: &HermitianOperator) -> Result<OrderCheck> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", a.dim(), b.dim())));
    }
    if a.tag() != b.tag() {
        return Err(Error::TagMismatch);
    }
    let diff = HermitianOperator::with_tolerance(b.matrix() - a.matrix(), a.tag(), f64::INFINITY)?;
    let norm_lhs = a.norm();
    let norm_rhs = b.norm();
    match is_positive(&diff) {
        Positivity::Positive(_) => {
            let a_positive = is_positive(a).is_positive();
            let slack = TOL_PSD * norm_rhs.max(1.0) + 1e-12;
            if a_positive && norm_lhs > norm_rhs + slack {
                return Err(Error::NotConverged(format!(
                    "ordering certified but ‖A‖={norm_lhs:.6e} > ‖B‖={norm_rhs:.6e}"
                )));
            }
            Ok(OrderCheck { holds: true, witness: None, norm_lhs, norm_rhs })
        }
        Positivity::NotPositive(w) => {
            Ok(OrderCheck { holds: false, witness: Some(w.vector), norm_lhs, norm_rhs })
        }
    }
}

/// The duality flip: same coordinates, opposite tag. An involution.
pub fn dual_flip(a: &ComplexMatrix, tag: DualityTag) -> Result<(ComplexMatrix, DualityTag)> {
    linalg::ensure_square(a)?;
    Ok((a.clone(), tag.flipped()))
}
