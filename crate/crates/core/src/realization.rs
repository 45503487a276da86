//! Isometric colligations `(D, C, V)` with
//! `φ(z) = D + Cᴴ(I + zVᴴ)(I − zVᴴ)⁻¹C`, their synthesis from samples of `φ`
//! and their evaluation.
//!
//! Synthesis works in orthonormal coordinates of the finite kernel section
//! spanned by `k_φ(·, w_i)b`. The relation
//! `w̄ k_φ(·,w)b ↦ k_φ(·,w)b − k_φ(·,0)b` is isometric whenever `φ` is
//! Carathéodory; `V` is its least-squares solution on the domain span,
//! completed to a unitary on the orthogonal complement.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::herglotz::{self, HerglotzMeasure, RecoverOptions, Recovery};
use crate::kernel::{CaratheodoryFunction, KernelSection};
use crate::linalg::{self, re, ComplexMatrix};
use crate::operator::DualityTag;

pub const ISOMETRY_LIMIT: f64 = 1e-8;
pub const SKEW_LIMIT: f64 = 1e-10;
pub const RELATION_LIMIT: f64 = 1e-6;
/// Singular values of the domain coordinates above this fraction of the
/// largest span the relation's domain.
pub const DOMAIN_RANK_CUTOFF: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    v: ComplexMatrix,
    c: ComplexMatrix,
    d: ComplexMatrix,
    tag: DualityTag,
    isometry_defect: f64,
    skew_defect: f64,
}

impl Realization {
    /// `V` is `d×d`, `C` is `d×n`, `D` is `n×n`.
    pub fn new(v: ComplexMatrix, c: ComplexMatrix, d: ComplexMatrix, tag: DualityTag) -> Result<Self> {
        let state = linalg::ensure_square(&v)?;
        let n = linalg::ensure_square(&d)?;
        if c.nrows() != state || c.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "C is {}x{}, expected {state}x{n}",
                c.nrows(),
                c.ncols()
            )));
        }
        for m in [&v, &c, &d] {
            linalg::ensure_finite(m)?;
        }
        let isometry_defect = linalg::frobenius(&(v.adjoint() * &v - linalg::identity(state)));
        let skew_defect = linalg::frobenius(&(&d + d.adjoint()));
        if isometry_defect > ISOMETRY_LIMIT {
            return Err(Error::Precondition(format!("V is not isometric: ‖VᴴV − I‖_F = {isometry_defect:.3e}")));
        }
        if skew_defect > SKEW_LIMIT {
            return Err(Error::Precondition(format!("D is not skew-Hermitian: ‖D + Dᴴ‖_F = {skew_defect:.3e}")));
        }
        Ok(Self { v, c, d, tag, isometry_defect, skew_defect })
    }

    pub fn v(&self) -> &ComplexMatrix {
        &self.v
    }

    pub fn c(&self) -> &ComplexMatrix {
        &self.c
    }

    pub fn d(&self) -> &ComplexMatrix {
        &self.d
    }

    pub fn tag(&self) -> DualityTag {
        self.tag
    }

    pub fn dim(&self) -> usize {
        self.d.nrows()
    }

    pub fn state_dim(&self) -> usize {
        self.v.nrows()
    }

    pub fn isometry_defect(&self) -> f64 {
        self.isometry_defect
    }

    pub fn skew_defect(&self) -> f64 {
        self.skew_defect
    }

    pub fn evaluate(&self, z: Complex64) -> Result<ComplexMatrix> {
        if !(z.norm() < 1.0) {
            return Err(Error::OutsideDisk([z.re, z.im]));
        }
        let state = self.state_dim();
        if state == 0 {
            return Ok(self.d.clone());
        }
        let vz = self.v.adjoint() * z;
        let minus = linalg::identity(state) - &vz;
        let plus = linalg::identity(state) + &vz;
        let x = linalg::solve(&minus, &self.c)?;
        Ok(&self.d + self.c.adjoint() * plus * x)
    }

    pub fn as_function(&self) -> CaratheodoryFunction {
        CaratheodoryFunction::Realization(self.clone())
    }
}

/// The relation in section coordinates: columns of `domain` map to the
/// matching columns of `range`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationData {
    pub domain: ComplexMatrix,
    pub range: ComplexMatrix,
    /// `‖V·domain − range‖_F / max(1, ‖range‖_F)`.
    pub defect: f64,
    /// Dimension of the domain span.
    pub domain_rank: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synthesis {
    pub realization: Realization,
    pub relation: RelationData,
    pub section_rank: usize,
    pub gram_condition: f64,
    /// `max ‖Cᴴ f − f(0)‖` over the section members `k_φ(·, w_i)e_a`.
    pub adjoint_defect: f64,
}

/// Builds `(D, C, V)` from `φ(w_i)`; `0` must be one of the `w_i`.
pub fn synthesize(points: &[Complex64], values: &[ComplexMatrix]) -> Result<Synthesis> {
    synthesize_tagged(points, values, DualityTag::BToBstar)
}

pub fn synthesize_tagged(points: &[Complex64], values: &[ComplexMatrix], tag: DualityTag) -> Result<Synthesis> {
    let origin = points
        .iter()
        .position(|p| p.norm() == 0.0)
        .ok_or_else(|| Error::Precondition("sample set must include the origin 0".into()))?;
    crate::kernel::SampleSet::new(points.to_vec())?;
    let section = KernelSection::from_values(points.to_vec(), values.to_vec())?;
    let n = section.dim;
    let count = points.len();
    let size = count * n;
    let l = &section.coordinate_map;
    let r = section.rank;

    let conj: Vec<Complex64> = points.iter().map(|w| w.conj()).collect();
    let x = linalg::kron_identity_diag(&conj, n);
    let mut y = linalg::identity(size);
    for i in 0..count {
        for a in 0..n {
            y[(origin * n + a, i * n + a)] -= re(1.0);
        }
    }
    let xc = l * x;
    let yc = l * y;

    let (v, domain_rank) = solve_isometry(&xc, &yc, r);
    let defect = linalg::frobenius(&(&v * &xc - &yc)) / linalg::frobenius(&yc).max(1.0);
    if defect > RELATION_LIMIT {
        return Err(Error::RelationDefect { defect, limit: RELATION_LIMIT });
    }
    let c = l.columns(origin * n, n).into_owned();
    let d = linalg::skew_part(&values[origin]);
    let realization = Realization::new(v, c, d, tag)?;

    // Cᴴ f = f(0) for f = k_φ(·, w_i)e_a, in coordinates f ↦ L e_{(i,a)}.
    let mut adjoint_defect = 0.0_f64;
    for col in 0..size {
        let coords = l.column(col);
        let lhs = realization.c.adjoint() * coords;
        let (i, a) = (col / n, col % n);
        let k = crate::kernel::kernel_from_values(&values[origin], &values[i], Complex64::new(0.0, 0.0), points[i]);
        let rhs = k.column(a);
        adjoint_defect = adjoint_defect.max(linalg::vector_norm(&(lhs - rhs)));
    }

    Ok(Synthesis {
        realization,
        relation: RelationData { domain: xc, range: yc, defect, domain_rank },
        section_rank: r,
        gram_condition: section.condition,
        adjoint_defect,
    })
}

/// Least-squares `V` with `V Xc ≈ Yc` on the span of `Xc`, completed to a unitary.
fn solve_isometry(xc: &ComplexMatrix, yc: &ComplexMatrix, r: usize) -> (ComplexMatrix, usize) {
    if r == 0 {
        return (linalg::zeros(0, 0), 0);
    }
    let svd = xc.clone().svd(true, true);
    let u = svd.u.expect("U requested");
    let vt = svd.v_t.expect("Vᴴ requested");
    let sigma = &svd.singular_values;
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    let top = order.first().map_or(0.0, |&k| sigma[k]);
    let kept: Vec<usize> = order.into_iter().filter(|&k| top > 0.0 && sigma[k] > DOMAIN_RANK_CUTOFF * top).collect();
    let s = kept.len();
    let mut us = linalg::zeros(r, s);
    let mut z = linalg::zeros(r, s);
    for (col, &k) in kept.iter().enumerate() {
        us.set_column(col, &u.column(k));
        // V u_k = Yc p_k / σ_k where Xc p_k = σ_k u_k.
        let p = vt.row(k).adjoint();
        z.set_column(col, &((yc * p) / re(sigma[k])));
    }
    let z = linalg::polar_unitary(&z);
    let u_perp = linalg::orthogonal_complement(&us);
    let z_perp = linalg::orthogonal_complement(&z);
    let v = &z * us.adjoint() + z_perp * u_perp.adjoint();
    (v, s)
}

/// Samples of a function, then synthesis. The table variant is refused.
pub fn synthesize_from(phi: &CaratheodoryFunction, points: &[Complex64]) -> Result<Synthesis> {
    if !phi.is_analytic() {
        return Err(Error::Unsupported("table-valued functions have no realization".into()));
    }
    let values = points.iter().map(|&w| phi.eval(w)).collect::<Result<Vec<_>>>()?;
    synthesize_tagged(points, &values, phi.tag())
}

/// Deterministic validation points: the nonzero sample radii, cycled, at
/// angles rotated away from the samples by the golden angle.
pub fn holdout_points(points: &[Complex64], count: usize) -> Vec<Complex64> {
    let mut radii: Vec<f64> = points.iter().map(|p| p.norm()).filter(|&r| r > 0.0).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    if radii.is_empty() {
        radii.push(0.5);
    }
    let golden = TAU * (1.0 - 1.0 / ((1.0 + 5f64.sqrt()) / 2.0));
    let mut out = Vec::with_capacity(count);
    let mut k = 0usize;
    while out.len() < count {
        let r = radii[k % radii.len()];
        let base = points.iter().filter(|p| (p.norm() - r).abs() < 1e-15).map(|p| p.arg()).next().unwrap_or(0.0);
        let z = Complex64::from_polar(r, base + golden * (k + 1) as f64);
        if points.iter().chain(out.iter()).all(|p| (p - z).norm() > 1e-6) {
            out.push(z);
        }
        k += 1;
    }
    out
}

/// `max_z ‖φ₁(z) − φ₂(z)‖₂ / (1 + ‖φ₂(z)‖₂)`.
pub fn max_relative_error(
    candidate: &dyn Fn(Complex64) -> Result<ComplexMatrix>,
    reference: &dyn Fn(Complex64) -> Result<ComplexMatrix>,
    points: &[Complex64],
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for &z in points {
        let want = reference(z)?;
        let got = candidate(z)?;
        worst = worst.max(linalg::spectral_norm(&(got - &want)) / (1.0 + linalg::spectral_norm(&want)));
    }
    Ok(worst)
}

/// The measure of `evaluate(R, ·)` via radial recovery.
pub fn herglotz_from_realization(r: &Realization, options: &RecoverOptions) -> Result<Recovery> {
    herglotz::recover(&CaratheodoryFunction::Realization(r.clone()), options)
}

/// For unitary `V = Σ e^{iθ_k} P_k` the measure is atomic with masses `Cᴴ P_k C`.
pub fn spectral_measure(r: &Realization) -> Result<HerglotzMeasure> {
    let state = r.state_dim();
    let unitary_defect = linalg::frobenius(&(&r.v * r.v.adjoint() - linalg::identity(state)));
    if unitary_defect > ISOMETRY_LIMIT {
        return Err(Error::Unsupported("spectral measure needs a unitary V".into()));
    }
    let schur = r.v.clone().schur();
    let (q, t) = schur.unpack();
    let mut atoms = Vec::with_capacity(state);
    for k in 0..state {
        let lambda = t[(k, k)];
        let qk = q.column(k).into_owned();
        let cq = r.c.adjoint() * &qk;
        let mass = &cq * cq.adjoint();
        atoms.push(herglotz::Atom { t: lambda.arg().rem_euclid(TAU), mass: linalg::hermitian_part(&mass) });
    }
    HerglotzMeasure::new(r.dim(), atoms, Vec::new(), r.d.clone(), r.tag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{certify_positive_kernel, SampleSet};
    use crate::linalg::c;
    use crate::random;

    fn unit() -> Realization {
        Realization::new(
            linalg::scalar_matrix(re(1.0)),
            linalg::scalar_matrix(re(1.0)),
            linalg::scalar_matrix(re(0.0)),
            DualityTag::BToBstar,
        )
        .unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert!((unit().evaluate(re(0.5)).unwrap()[(0, 0)] - re(3.0)).norm() < 1e-15);
        let mut rng = random::rng(5);
        let r = random::colligation(&mut rng, 2, 4);
        let at0 = r.evaluate(re(0.0)).unwrap();
        let expected = r.d() + r.c().adjoint() * r.c();
        assert!(linalg::frobenius(&(at0 - expected)) < 1e-13);
        for k in 0..64 {
            let z = Complex64::from_polar(0.9, TAU * k as f64 / 64.0);
            let v = r.evaluate(z).unwrap();
            assert!(linalg::hermitian_eigen(&v).min() > -1e-10);
        }
        assert!(r.evaluate(re(1.0)).is_err());
    }

    #[test]
    fn rejects_bad_colligations() {
        let v = linalg::scalar_matrix(re(2.0));
        let one = linalg::scalar_matrix(re(1.0));
        assert!(Realization::new(v, one.clone(), linalg::scalar_matrix(re(0.0)), DualityTag::BToBstar).is_err());
        assert!(Realization::new(one.clone(), one.clone(), one, DualityTag::BToBstar).is_err());
    }

    #[test]
    fn synthesize_cayley_atom() {
        let phi = CaratheodoryFunction::unit_atom_scalar();
        let pts = vec![re(0.0), re(0.4), re(-0.4), c(0.0, 0.2), c(0.0, -0.2)];
        let s = synthesize_from(&phi, &pts).unwrap();
        assert!(s.realization.state_dim() >= 1);
        assert!(s.realization.isometry_defect() <= ISOMETRY_LIMIT);
        let hold = holdout_points(&pts, 10);
        let err = max_relative_error(&|z| s.realization.evaluate(z), &|z| phi.eval(z), &hold).unwrap();
        assert!(err <= 1e-6, "{err}");
        assert!(s.adjoint_defect <= 1e-9, "{}", s.adjoint_defect);
    }

    #[test]
    fn synthesize_imaginary_constant() {
        let phi = CaratheodoryFunction::scalar_constant(c(0.0, 0.7));
        let s = synthesize_from(&phi, &[re(0.0), re(0.5), c(0.0, 0.3)]).unwrap();
        assert_eq!(s.section_rank, 0);
        assert!((s.realization.d()[(0, 0)] - c(0.0, 0.7)).norm() < 1e-15);
        assert!((s.realization.evaluate(c(0.3, 0.3)).unwrap()[(0, 0)] - c(0.0, 0.7)).norm() < 1e-15);
    }

    #[test]
    fn synthesize_random_colligation() {
        let mut rng = random::rng(11);
        let r = random::colligation(&mut rng, 2, 6);
        let pts = random::disk_points(&mut rng, 10, 0.3, 0.85, true);
        let s = synthesize_from(&r.as_function(), &pts).unwrap();
        let hold = holdout_points(&pts, 10);
        let err = max_relative_error(&|z| s.realization.evaluate(z), &|z| r.evaluate(z), &hold).unwrap();
        assert!(err <= 1e-6, "{err}");
    }

    #[test]
    fn synthesis_requires_origin_and_positivity() {
        let phi = CaratheodoryFunction::unit_atom_scalar();
        assert!(matches!(synthesize_from(&phi, &[re(0.5), re(0.2)]), Err(Error::Precondition(_))));
        let vals = vec![linalg::scalar_matrix(re(1.0)), linalg::scalar_matrix(re(0.0))];
        assert!(matches!(synthesize(&[re(0.0), re(0.5)], &vals), Err(Error::IndefiniteGram { .. })));
    }

    #[test]
    fn spectral_measure_matches_realization() {
        let mut rng = random::rng(2);
        let r = random::colligation(&mut rng, 2, 4);
        let mu = spectral_measure(&r).unwrap();
        for z in [c(0.2, 0.3), c(-0.5, 0.1), re(0.0)] {
            let d = linalg::frobenius(&(mu.eval(z).unwrap() - r.evaluate(z).unwrap()));
            assert!(d < 1e-12, "{d}");
        }
    }

    #[test]
    fn realization_kernels_are_positive() {
        let mut rng = random::rng(8);
        let r = random::colligation(&mut rng, 2, 5);
        let fam: Vec<SampleSet> =
            (0..5).map(|_| SampleSet::new(random::disk_points(&mut rng, 6, 0.0, 0.95, false)).unwrap()).collect();
        assert!(certify_positive_kernel(&r.as_function(), &fam).unwrap().pass);
    }
}
