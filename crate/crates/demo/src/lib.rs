//! Browser bindings: Herglotz recovery of a scalar measure, Gram signatures
//! of a few kernels, and the Cayley transform on a disk grid.

use std::f64::consts::TAU;

use caratheodory::herglotz::{self, Atom, DensityCell, RecoverOptions};
use caratheodory::kernel::{self, SampleTable};
use caratheodory::linalg::{self, re};
use caratheodory::{CaratheodoryFunction, DualityTag, HerglotzMeasure, SampleSet};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

const CELLS: usize = 256;

#[derive(Debug, Clone, Deserialize)]
pub struct MeasureSpec {
    /// `[angle, mass]` pairs.
    pub atoms: Vec<[f64; 2]>,
    /// Total mass of the flat part.
    pub background: f64,
}

impl MeasureSpec {
    pub fn build(&self) -> caratheodory::Result<HerglotzMeasure> {
        let atoms = self
            .atoms
            .iter()
            .map(|&[t, m]| Atom { t: t.rem_euclid(TAU), mass: linalg::scalar_matrix(re(m)) })
            .collect();
        let w = TAU / CELLS as f64;
        let density = if self.background > 0.0 {
            (0..CELLS)
                .map(|k| DensityCell {
                    t0: k as f64 * w,
                    t1: if k + 1 == CELLS { TAU } else { (k + 1) as f64 * w },
                    m: linalg::scalar_matrix(re(self.background / TAU)),
                })
                .collect()
        } else {
            Vec::new()
        };
        HerglotzMeasure::new(1, atoms, density, linalg::zeros(1, 1), DualityTag::BToBstar)
    }
}

#[derive(Debug, Serialize)]
pub struct RecoverResult {
    pub radius: f64,
    pub moments: Vec<[f64; 2]>,
    pub recovered_moments: Vec<[f64; 2]>,
    pub max_moment_deviation: f64,
    pub atoms: Vec<[f64; 2]>,
    /// Density on the recovery cells, as `[t0, t1, value]`.
    pub density: Vec<[f64; 3]>,
}

pub fn recover_json(spec: &str, depth: u32) -> caratheodory::Result<String> {
    let spec: MeasureSpec = caratheodory::io::from_json(spec)?;
    let mu = spec.build()?;
    let options = RecoverOptions {
        radii: (3..=depth.clamp(3, 12) as i32).map(|n| 1.0 - 0.5f64.powi(n)).collect(),
        cells: CELLS,
        min_nodes: 1024,
        ..RecoverOptions::default()
    };
    let rec = herglotz::recover(&mu.as_function(), &options)?;
    let want = mu.trig_moments(8);
    let got = rec.measure.trig_moments(8);
    let pair = |m: &caratheodory::ComplexMatrix| [m[(0, 0)].re, m[(0, 0)].im];
    let out = RecoverResult {
        radius: rec.radius,
        moments: want.iter().map(pair).collect(),
        recovered_moments: got.iter().map(pair).collect(),
        max_moment_deviation: herglotz::moment_deviation(&want, &got),
        atoms: rec.measure.atoms().iter().map(|a| [a.t, a.mass[(0, 0)].re]).collect(),
        density: rec.measure.density().iter().map(|c| [c.t0, c.t1, c.m[(0, 0)].re]).collect(),
    };
    caratheodory::io::to_json(&out)
}

#[derive(Debug, Serialize)]
pub struct Signature {
    pub eigenvalues: Vec<f64>,
    pub n_negative: usize,
    pub n_zero: usize,
    pub n_positive: usize,
}

/// `points` is flat `[re, im, re, im, …]`; the origin is added when absent.
pub fn gram_signature_json(points: &[f64], source: &str) -> caratheodory::Result<String> {
    let mut pts: Vec<Complex64> = points.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
    if !pts.iter().any(|p| p.norm() == 0.0) {
        pts.insert(0, Complex64::new(0.0, 0.0));
    }
    let phi = match source {
        "origin_spike" => {
            let others: Vec<Complex64> = pts.iter().copied().filter(|p| p.norm() > 0.0).collect();
            CaratheodoryFunction::Table { table: SampleTable::origin_spike(&others), tag: DualityTag::BToBstar }
        }
        "cayley_atom" => CaratheodoryFunction::unit_atom_scalar(),
        "negative_one" => CaratheodoryFunction::scalar_constant(re(-1.0)),
        other => return Err(caratheodory::Error::Precondition(format!("unknown source {other:?}"))),
    };
    let g = kernel::gram_assemble(&phi, &SampleSet::new(pts)?)?;
    caratheodory::io::to_json(&Signature {
        eigenvalues: g.eigenvalues.clone(),
        n_negative: g.n_negative,
        n_zero: g.n_zero,
        n_positive: g.n_positive,
    })
}

/// `‖s(z)‖` on a `size × size` grid over `[−1, 1]²`, row-major from the top;
/// `NaN` outside `|z| < 0.995`.
pub fn cayley_grid_values(spec: &str, size: usize) -> caratheodory::Result<Vec<f64>> {
    let spec: MeasureSpec = caratheodory::io::from_json(spec)?;
    let mu = spec.build()?;
    let size = size.clamp(2, 256);
    let step = 2.0 / (size - 1) as f64;
    let mut out = Vec::with_capacity(size * size);
    for row in 0..size {
        for col in 0..size {
            let z = Complex64::new(-1.0 + col as f64 * step, 1.0 - row as f64 * step);
            if z.norm() >= 0.995 {
                out.push(f64::NAN);
                continue;
            }
            out.push(kernel::cayley(&mu.eval(z)?)?.s[(0, 0)].norm());
        }
    }
    Ok(out)
}

fn js(e: caratheodory::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Recovers the measure of `{"atoms": [[t, m], …], "background": b}` from
/// its Herglotz transform on circles out to radius `1 − 2^{−depth}`.
#[wasm_bindgen]
pub fn recover(spec: &str, depth: u32) -> Result<String, JsError> {
    recover_json(spec, depth).map_err(js)
}

#[wasm_bindgen]
pub fn gram_signature(points: &[f64], source: &str) -> Result<String, JsError> {
    gram_signature_json(points, source).map_err(js)
}

#[wasm_bindgen]
pub fn cayley_grid(spec: &str, size: usize) -> Result<Vec<f64>, JsError> {
    cayley_grid_values(spec, size).map_err(js)
}
