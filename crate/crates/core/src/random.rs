//! Seeded generators for test fixtures, self-tests and `--random` CLI inputs.
//!
//! Every generator takes the caller's RNG so a single seed drives a whole run.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::herglotz::{Atom, DensityCell, HerglotzMeasure};
use crate::linalg::{self, c, re, ComplexMatrix, ComplexVector};
use crate::operator::DualityTag;
use crate::realization::Realization;
use num_complex::Complex64;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian (Box–Muller, unit variance per component / √2).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, co) = (TAU * u2).sin_cos();
    c(r * co, r * s) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexVector {
    loop {
        let v = ComplexVector::from_fn(n, |_, _| complex_gaussian(rng));
        let norm = linalg::vector_norm(&v);
        if norm > 1e-8 {
            return v / re(norm);
        }
    }
}

/// `GᴴG` with `G` square Gaussian.
pub fn psd_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, n);
    g.adjoint() * g
}

/// PSD of random rank `≤ rank`.
pub fn low_rank_psd<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, rank, n);
    g.adjoint() * g
}

pub fn skew_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, n);
    linalg::skew_part(&g)
}

/// Haar-like unitary from the QR factor of a Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    if n == 0 {
        return linalg::zeros(0, 0);
    }
    let g = gaussian_matrix(rng, n, n);
    let q = g.clone().qr().q();
    // Polar clean-up so VᴴV = I to rounding.
    linalg::polar_unitary(&q)
}

pub fn disk_point<R: Rng + ?Sized>(rng: &mut R, r_min: f64, r_max: f64) -> Complex64 {
    let r = rng.gen_range(r_min..r_max);
    let theta = rng.gen_range(0.0..TAU);
    Complex64::from_polar(r, theta)
}

/// `count` distinct points in the annulus `r_min ≤ |w| < r_max`, optionally led by 0.
pub fn disk_points<R: Rng + ?Sized>(rng: &mut R, count: usize, r_min: f64, r_max: f64, origin: bool) -> Vec<Complex64> {
    let mut pts = Vec::with_capacity(count);
    if origin && count > 0 {
        pts.push(Complex64::new(0.0, 0.0));
    }
    while pts.len() < count {
        let p = disk_point(rng, r_min, r_max);
        if pts.iter().all(|q: &Complex64| (q - p).norm() > 1e-3) {
            pts.push(p);
        }
    }
    pts
}

/// Colligation with unitary `V` (`d×d`), Gaussian `C` scaled to `‖C‖ ~ 1`, random skew `D`.
pub fn colligation<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize) -> Realization {
    let v = unitary(rng, d);
    let scale = 1.0 / ((d.max(1) as f64).sqrt());
    let cm = gaussian_matrix(rng, d, n) * re(scale);
    let dm = skew_hermitian(rng, n) * re(0.5);
    Realization::new(v, cm, dm, DualityTag::BToBstar).expect("generated colligation is valid")
}

/// Up to `max_atoms` atoms plus a smooth trigonometric density sampled on
/// `cells` cells. Total mass has spectral norm of order one.
pub fn measure<R: Rng + ?Sized>(rng: &mut R, n: usize, max_atoms: usize, cells: usize) -> HerglotzMeasure {
    let atom_count = if max_atoms == 0 { 0 } else { rng.gen_range(1..=max_atoms) };
    let mut atoms = Vec::with_capacity(atom_count);
    while atoms.len() < atom_count {
        let t = rng.gen_range(0.0..TAU);
        // Keep atoms apart so the reported atom list is unambiguous.
        if atoms.iter().all(|a: &Atom| circular_distance(a.t, t) > 0.3) {
            let rank = rng.gen_range(1..=n);
            let mass = low_rank_psd(rng, n, rank) * re(0.5 / (n as f64) / atom_count as f64);
            atoms.push(Atom { t, mass });
        }
    }
    let base = psd_matrix(rng, n) * re(0.3 / n as f64) + linalg::identity(n) * re(0.05);
    let harmonic = gaussian_matrix(rng, n, n) * re(0.3 / n as f64);
    let phase = rng.gen_range(0.0..TAU);
    let width = TAU / cells as f64;
    let density = (0..cells)
        .map(|k| {
            let t0 = k as f64 * width;
            let t1 = if k + 1 == cells { TAU } else { (k + 1) as f64 * width };
            let tm = 0.5 * (t0 + t1);
            // base + Re(e^{i(t+phase)} H) symmetrized, clipped PSD.
            let rot = Complex64::from_polar(1.0, tm + phase);
            let wave = linalg::hermitian_part(&(&harmonic * rot));
            let m = linalg::psd_projection(&(&base + wave)) * re(1.0 / TAU);
            DensityCell { t0, t1, m }
        })
        .collect();
    HerglotzMeasure::new(n, atoms, density, skew_hermitian(rng, n) * re(0.3), DualityTag::BToBstar)
        .expect("generated measure is valid")
}

pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}
