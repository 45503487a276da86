//! Randomized invariant suites, one per module, driven by a single seed.
//!
//! Each [`Check`] runs a number of trials and records the worst value of its
//! metric against a fixed limit. A suite passes when every check does.

use std::f64::consts::TAU;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::helly::{self, GridFunction, HellyOptions, MonotoneSequence};
use crate::herglotz::{self, HerglotzMeasure, RecoverOptions};
use crate::kernel::{self, CaratheodoryFunction, SampleSet};
use crate::linalg::{self, re, ComplexMatrix, ComplexVector};
use crate::operator::{self, DualityTag, HermitianOperator, PositiveOperator};
use crate::random::{self, SeededRng};
use crate::realization;
use crate::stieltjes::{self, IncreasingOperatorFunction, IntegrationOptions, OperatorFunction, TagRule};

pub const SUITES: &[&str] = &["core", "kernel", "stieltjes", "helly", "realization", "herglotz", "full"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub trials: usize,
    pub passed: usize,
    /// Largest observed metric; the check wants `worst ≤ limit`.
    pub worst: f64,
    pub limit: f64,
    pub seconds: f64,
    /// First failing trial, if any.
    pub detail: Option<String>,
}

impl Check {
    pub fn pass(&self) -> bool {
        self.passed == self.trials
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(Check::pass)
    }

    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.pass()).count()
    }

    /// Plain-text table, one row per check.
    pub fn table(&self) -> String {
        let mut out = format!("{:<12} {:<34} {:>8} {:>11} {:>9} {:>8}\n", "suite", "check", "passed", "worst", "limit", "seconds");
        for c in &self.checks {
            out.push_str(&format!(
                "{:<12} {:<34} {:>4}/{:<3} {:>11.3e} {:>9.1e} {:>8.2}\n",
                c.suite, c.name, c.passed, c.trials, c.worst, c.limit, c.seconds
            ));
        }
        out
    }
}

struct Runner {
    suite: &'static str,
    seed: u64,
    checks: Vec<Check>,
}

impl Runner {
    /// Runs `trials` of `body`; a trial returns its metric or an error, both
    /// judged against `limit`.
    fn check(&mut self, name: &str, trials: usize, limit: f64, mut body: impl FnMut(&mut SeededRng, usize) -> Result<f64>) {
        let salt = name.bytes().fold(0xcbf2_9ce4_8422_2325_u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
        let mut rng = random::rng(self.seed ^ salt);
        let start = Instant::now();
        let mut c = Check {
            suite: self.suite.to_string(),
            name: name.to_string(),
            trials,
            passed: 0,
            worst: 0.0,
            limit,
            seconds: 0.0,
            detail: None,
        };
        for k in 0..trials {
            match body(&mut rng, k) {
                Ok(v) if v <= limit => {
                    c.passed += 1;
                    c.worst = c.worst.max(v);
                }
                Ok(v) => {
                    c.worst = c.worst.max(v);
                    c.detail.get_or_insert_with(|| format!("trial {k}: {v:.3e} > {limit:.1e}"));
                }
                Err(e) => {
                    c.worst = f64::INFINITY;
                    c.detail.get_or_insert_with(|| format!("trial {k}: {e}"));
                }
            }
        }
        c.seconds = start.elapsed().as_secs_f64();
        self.checks.push(c);
    }
}

/// Runs one suite; `full` runs them all.
pub fn run(suite: &str, seed: u64) -> Result<SuiteReport> {
    let parts: Vec<&'static str> = match suite {
        "full" => SUITES[..SUITES.len() - 1].to_vec(),
        s => match SUITES.iter().find(|&&k| k == s && k != "full") {
            Some(&k) => vec![k],
            None => return Err(Error::Precondition(format!("unknown suite `{suite}`; expected one of {}", SUITES.join(", ")))),
        },
    };
    let mut checks = Vec::new();
    for part in parts {
        let mut r = Runner { suite: part, seed, checks: Vec::new() };
        match part {
            "core" => core_suite(&mut r),
            "kernel" => kernel_suite(&mut r),
            "stieltjes" => stieltjes_suite(&mut r),
            "helly" => helly_suite(&mut r),
            "realization" => realization_suite(&mut r),
            "herglotz" => herglotz_suite(&mut r),
            _ => unreachable!(),
        }
        checks.extend(r.checks);
    }
    Ok(SuiteReport { suite: suite.to_string(), seed, checks })
}

fn random_psd(rng: &mut SeededRng, max_n: usize) -> ComplexMatrix {
    let n = rng.gen_range(1..=max_n);
    let rank = rng.gen_range(1..=n);
    let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
    random::low_rank_psd(rng, n, rank) * re(scale)
}

fn core_suite(r: &mut Runner) {
    r.check("factorization residual", 100, 1e-10, |rng, _| {
        let a = random_psd(rng, 16);
        let f = operator::factorize(&PositiveOperator::from_matrix(a.clone())?)?;
        Ok(f.residual / linalg::frobenius(&a).max(1.0))
    });
    r.check("factorization norm identity", 100, 1e-10, |rng, _| {
        let a = random_psd(rng, 16);
        let op = PositiveOperator::from_matrix(a)?;
        let f = operator::factorize(&op)?;
        let t2 = linalg::spectral_norm(&f.t).powi(2);
        Ok((op.norm() - t2).abs() / op.norm().max(1.0))
    });
    r.check("pairing conjugate symmetry", 100, 1e-12, |rng, _| {
        let n = rng.gen_range(1..=8);
        let h = HermitianOperator::from_matrix(linalg::hermitian_part(&random::gaussian_matrix(rng, n, n)))?;
        let b = random::unit_vector(rng, n);
        let c = random::unit_vector(rng, n);
        let bc = operator::pairing(&h, &b, &c)?;
        let cb = operator::pairing(&h, &c, &b)?;
        Ok((bc - cb.conj()).norm() / h.norm().max(1.0))
    });
    r.check("degenerate vectors are annihilated", 100, 1e-9, |rng, _| {
        let n = rng.gen_range(2..=8);
        let rank = rng.gen_range(1..n);
        let a = random::low_rank_psd(rng, n, rank);
        let eig = linalg::hermitian_eigen(&a);
        let b = eig.vector(0);
        let scale = linalg::hermitian_spectral_norm(&a).max(1.0);
        let quad = operator::pairing_matrix(&a, &b, &b)?.norm();
        if quad > 1e-10 * scale {
            return Err(Error::Precondition("kernel vector not found".into()));
        }
        Ok(linalg::vector_norm(&(&a * &b)) / scale)
    });
    r.check("order implies norm order", 100, 1e-12, |rng, _| {
        let n = rng.gen_range(1..=8);
        let a = random::psd_matrix(rng, n);
        let rank = rng.gen_range(1..=n);
        let b = &a + random::low_rank_psd(rng, n, rank);
        let ha = HermitianOperator::from_matrix(a)?;
        let hb = HermitianOperator::from_matrix(b)?;
        let o = operator::order_leq(&ha, &hb)?;
        if !o.holds {
            return Err(Error::Precondition("A ≤ A + P was not certified".into()));
        }
        Ok((o.norm_lhs - o.norm_rhs).max(0.0) / o.norm_rhs.max(1.0))
    });
    r.check("Cauchy-Schwarz", 100, 0.0, |rng, _| {
        let a = random_psd(rng, 8);
        let n = a.nrows();
        let b = random::unit_vector(rng, n);
        let c = random::unit_vector(rng, n);
        let cs = operator::cauchy_schwarz_check(&PositiveOperator::from_matrix(a)?, &b, &c)?;
        Ok(if cs.holds { 0.0 } else { cs.lhs - cs.rhs })
    });
    r.check("duality flip is an involution", 20, 0.0, |rng, _| {
        let n = rng.gen_range(1..=4);
        let a = random::gaussian_matrix(rng, n, n);
        let (m1, t1) = operator::dual_flip(&a, DualityTag::BToBstar)?;
        let (m2, t2) = operator::dual_flip(&m1, t1)?;
        Ok(if t2 == DualityTag::BToBstar && m2 == a { 0.0 } else { 1.0 })
    });
}

/// A random Carathéodory function: a realization or a measure.
fn random_source(rng: &mut SeededRng, k: usize) -> CaratheodoryFunction {
    let n = rng.gen_range(1..=2);
    if k.is_multiple_of(2) {
        let d = rng.gen_range(1..=6);
        random::colligation(rng, n, d).as_function()
    } else {
        random::measure(rng, n, 3, 64).as_function()
    }
}

fn kernel_suite(r: &mut Runner) {
    r.check("kernel Hermitian symmetry", 20, 1e-12, |rng, k| {
        let phi = random_source(rng, k);
        let z = random::disk_point(rng, 0.0, 0.9);
        let w = random::disk_point(rng, 0.0, 0.9);
        let kzw = kernel::kernel_eval(&phi, z, w)?;
        let kwz = kernel::kernel_eval(&phi, w, z)?;
        Ok(linalg::frobenius(&(kzw - kwz.adjoint())) / linalg::frobenius(&kwz).max(1.0))
    });
    r.check("Gram positivity of sources", 20, 1e-8, |rng, k| {
        let phi = random_source(rng, k);
        let s = SampleSet::new(random::disk_points(rng, 12, 0.0, 0.95, true))?;
        let g = kernel::gram_assemble(&phi, &s)?;
        Ok((-g.relative_min_eigenvalue()).max(0.0))
    });
    r.check("negative squares monotone", 20, 0.0, |rng, _| {
        let coeffs: Vec<Complex64> = (0..4).map(|_| random::complex_gaussian(rng)).collect();
        let phi = CaratheodoryFunction::scalar_rational(&coeffs, &[re(1.0)])?;
        let pts = random::disk_points(rng, 10, 0.1, 0.9, true);
        let mut prev = 0usize;
        let mut worst = 0.0_f64;
        for m in 2..=pts.len() {
            let est = kernel::negative_squares_estimate(&phi, &[SampleSet::new(pts[..m].to_vec())?])?;
            if est < prev {
                worst = worst.max((prev - est) as f64);
            }
            prev = est;
        }
        Ok(worst)
    });
    r.check("section reproducing identity", 20, 1e-9, |rng, k| {
        let phi = random_source(rng, k);
        let s = SampleSet::new(random::disk_points(rng, 6, 0.0, 0.8, true))?;
        let section = kernel::rkhs_section(&phi, &s)?;
        let size = s.len() * phi.dim();
        let members: Vec<ComplexVector> =
            (0..3).map(|_| ComplexVector::from_fn(size, |_, _| random::complex_gaussian(rng))).collect();
        let scale = linalg::hermitian_spectral_norm(&section.gram.matrix).max(1.0);
        Ok(section.reproducing_defect(&members) / scale)
    });
    r.check("Cayley transform contractive", 20, 1e-10, |rng, k| {
        let phi = random_source(rng, k);
        let pts = random::disk_points(rng, 32, 0.0, 0.95, true);
        let report = kernel::certify_positive_kernel(&phi, &[SampleSet::new(pts.clone())?])?;
        if !report.pass {
            return Err(Error::Precondition("source kernel not certified positive".into()));
        }
        let mut worst = 0.0_f64;
        for &z in &pts {
            let s = kernel::cayley_at(&phi, z)?;
            worst = worst.max(linalg::spectral_norm(&s.s) - 1.0);
        }
        Ok(worst.max(0.0))
    });
    r.check("Schur kernel positivity", 20, 1e-8, |rng, k| {
        let phi = random_source(rng, k);
        let pts = random::disk_points(rng, 16, 0.0, 0.95, true);
        let s = pts.iter().map(|&z| kernel::cayley_at(&phi, z).map(|c| c.s)).collect::<Result<Vec<_>>>()?;
        let g = kernel::schur_gram(&pts, &s)?;
        Ok((-g.relative_min_eigenvalue()).max(0.0))
    });
}

/// `Σ_k P_k g_k(t)` with PSD `P_k` and increasing `g_k`, on `[0, 2π]`.
fn random_increasing(rng: &mut SeededRng, n: usize) -> (impl IncreasingOperatorFunction, Vec<ComplexMatrix>, Vec<f64>) {
    let p: Vec<ComplexMatrix> = (0..3).map(|_| random::low_rank_psd(rng, n, 1) * re(0.5)).collect();
    let jump = rng.gen_range(0.5..TAU - 0.5);
    let pp = p.clone();
    let m = OperatorFunction::new(n, 0.0, TAU, move |t: f64| {
        let g = [t / TAU, (t / TAU).powi(2), if t >= jump { 1.0 } else { 0.0 }];
        let mut acc = linalg::zeros(n, n);
        for (pk, gk) in pp.iter().zip(g) {
            acc += pk * re(gk);
        }
        acc
    })
    .with_jumps(vec![jump]);
    (m, p, vec![jump])
}

fn random_trig(rng: &mut SeededRng) -> impl Fn(f64) -> Complex64 + Sync {
    let c: Vec<Complex64> = (0..4).map(|_| random::complex_gaussian(rng)).collect();
    move |t: f64| c.iter().enumerate().map(|(k, ck)| ck * Complex64::from_polar(1.0, (k as f64 - 1.5) * t)).sum()
}

fn stieltjes_suite(r: &mut Runner) {
    let eps = 1e-8;
    let opts = IntegrationOptions::with_eps(eps);
    r.check("refinement stability", 20, 1.0, |rng, _| {
        let n = rng.gen_range(1..=3);
        let (m, _, jumps) = random_increasing(rng, n);
        let f = random_trig(rng);
        let res = stieltjes::integrate(&f, &m, &opts)?;
        let finer = stieltjes::sum_with_intervals(&f, &m, res.intervals * 2, &jumps, TagRule::Midpoint);
        Ok(linalg::spectral_norm(&(finer - &res.value)) / eps)
    });
    r.check("linearity", 20, 2.0, |rng, _| {
        let n = rng.gen_range(1..=3);
        let (m, _, _) = random_increasing(rng, n);
        let f = random_trig(rng);
        let g = random_trig(rng);
        let (a, b) = (random::complex_gaussian(rng), random::complex_gaussian(rng));
        let h = |t: f64| a * f(t) + b * g(t);
        let lhs = stieltjes::integrate(&h, &m, &opts)?.value;
        let rhs = stieltjes::integrate(&f, &m, &opts)?.value * a + stieltjes::integrate(&g, &m, &opts)?.value * b;
        Ok(linalg::spectral_norm(&(lhs - rhs)) / (eps * (1.0 + a.norm() + b.norm())))
    });
    r.check("positivity", 20, 0.0, |rng, _| {
        let n = rng.gen_range(1..=3);
        let (m, _, _) = random_increasing(rng, n);
        let shift = rng.gen_range(0.0..TAU);
        let f = move |t: f64| re(1.0 + (t - shift).cos());
        let v = stieltjes::integrate(&f, &m, &opts)?.value;
        Ok(if stieltjes::is_psd_result(&v) { 0.0 } else { 1.0 })
    });
    r.check("Brod bound", 200, 0.0, |rng, _| {
        let count = rng.gen_range(1..=6);
        let n = rng.gen_range(1..=5);
        let mut alpha = Vec::with_capacity(count);
        let mut beta = Vec::with_capacity(count);
        let mut hs = Vec::with_capacity(count);
        for _ in 0..count {
            let b = random::complex_gaussian(rng);
            let a = Complex64::from_polar(b.norm() * rng.gen_range(0.0..1.0), rng.gen_range(0.0..TAU));
            alpha.push(a);
            beta.push(b);
            let rank = rng.gen_range(1..=n);
            hs.push(PositiveOperator::from_matrix(random::low_rank_psd(rng, n, rank))?);
        }
        let bb = stieltjes::brod_bound_check(&alpha, &beta, &hs)?;
        Ok(if bb.holds { 0.0 } else { bb.lhs - bb.rhs })
    });
    r.check("diagonal consistency", 20, 1.0, |rng, _| {
        let n = rng.gen_range(1..=3);
        let powers: Vec<i32> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
        let pw = powers.clone();
        let m = OperatorFunction::new(n, 0.0, TAU, move |t: f64| {
            ComplexMatrix::from_fn(n, n, |i, j| if i == j { re((t / TAU).powi(pw[i])) } else { re(0.0) })
        });
        let f = random_trig(rng);
        let v = stieltjes::integrate(&f, &m, &opts)?.value;
        let mut worst = 0.0_f64;
        for (i, &p) in powers.iter().enumerate() {
            // ∫ f dμ = ∫ f μ' dt by composite Simpson.
            let density = |t: f64| p as f64 * (t / TAU).powi(p - 1) / TAU;
            let steps = 1 << 14;
            let h = TAU / steps as f64;
            let mut s = f(0.0) * density(0.0) + f(TAU) * density(TAU);
            for k in 1..steps {
                let t = k as f64 * h;
                s += f(t) * density(t) * if k % 2 == 1 { 4.0 } else { 2.0 };
            }
            worst = worst.max((v[(i, i)] - s * (h / 3.0)).norm());
        }
        Ok(worst / eps)
    });
}

/// `F_k = c_k · base` on a dyadic grid, `base` a random increasing grid function.
fn scaled_sequence(rng: &mut SeededRng, n: usize, coeffs: &[f64], depth: u32) -> Result<MonotoneSequence<'static>> {
    let grid = helly::dyadic_grid(0.0, TAU, depth);
    let mut acc = linalg::zeros(n, n);
    let mut base = Vec::with_capacity(grid.len());
    base.push(acc.clone());
    for _ in 1..grid.len() {
        acc += random::low_rank_psd(rng, n, 1) * re(rng.gen_range(0.0..1.0));
        base.push(acc.clone());
    }
    let total = linalg::hermitian_spectral_norm(&acc).max(1e-300);
    let base: Vec<ComplexMatrix> = base.into_iter().map(|m| m / re(total)).collect();
    let bound_m = &base[base.len() - 1] + linalg::identity(n) * re(1e-3);
    let members = coeffs
        .iter()
        .map(|&c| -> Result<Box<dyn IncreasingOperatorFunction>> {
            let values = base.iter().map(|m| m * re(c)).collect();
            Ok(Box::new(GridFunction::new(grid.clone(), values)?))
        })
        .collect::<Result<Vec<_>>>()?;
    MonotoneSequence::new(members, PositiveOperator::from_matrix(bound_m)?, grid)
}

fn helly_suite(r: &mut Runner) {
    let converging: Vec<f64> = (0..30).map(|k| 1.0 - 0.5f64.powi(k + 1)).collect();
    r.check("selection inequalities", 10, 0.0, |rng, _| {
        let n = rng.gen_range(1..=3);
        let seq = scaled_sequence(rng, n, &converging, 6)?;
        let sel = helly::helly_select(&seq, &HellyOptions::default())?;
        let q = &sel.inequalities;
        Ok((q.max_value_ratio - 1.0).max(q.max_variation_ratio - 2.0).max(0.0))
    });
    r.check("limit is increasing", 10, 0.0, |rng, _| {
        let n = rng.gen_range(1..=3);
        let seq = scaled_sequence(rng, n, &converging, 6)?;
        let sel = helly::helly_select(&seq, &HellyOptions::default())?;
        let v = sel.limit.values();
        let scale = linalg::hermitian_spectral_norm(&v[v.len() - 1]).max(1.0);
        let mut worst = 0.0_f64;
        for w in v.windows(2) {
            worst = worst.max(-linalg::hermitian_eigen(&linalg::hermitian_part(&(&w[1] - &w[0]))).min() / scale - 1e-10);
        }
        Ok(worst.max(0.0))
    });
    r.check("two limit points, stage residual", 5, 1e-7, |rng, _| {
        let n = rng.gen_range(1..=3);
        let coeffs: Vec<f64> = (0..12).map(|k| if k % 2 == 0 { 1.0 } else { 0.5 }).collect();
        let seq = scaled_sequence(rng, n, &coeffs, 6)?;
        let sel = helly::helly_select(&seq, &HellyOptions::default())?;
        if sel.subsequence != vec![0, 2, 4, 6, 8, 10] {
            return Err(Error::NotConverged(format!("selected {:?}", sel.subsequence)));
        }
        Ok(sel.max_residual / seq.bound().norm())
    });
    r.check("selection idempotent", 10, 0.0, |rng, _| {
        let n = rng.gen_range(1..=2);
        let seq = scaled_sequence(rng, n, &converging, 5)?;
        let sel = helly::helly_select(&seq, &HellyOptions::default())?;
        let len = sel.subsequence.len();
        let again = helly::helly_select(&seq.subsequence(&sel.subsequence)?, &HellyOptions::default())?;
        Ok(if again.subsequence == (0..len).collect::<Vec<_>>() { 0.0 } else { 1.0 })
    });
    r.check("pass to limit scales with f", 5, 1.0, |rng, _| {
        let n = rng.gen_range(1..=2);
        let seq = scaled_sequence(rng, n, &converging, 6)?;
        let sel = helly::helly_select(&seq, &HellyOptions::default())?;
        let opts = IntegrationOptions::with_eps(1e-8);
        let alpha = rng.gen_range(0.5..4.0);
        let f = |t: f64| Complex64::from_polar(1.0, t);
        let g = |t: f64| Complex64::from_polar(alpha, t);
        let pf = helly::pass_to_limit(&f, &seq, &sel, &opts, 3)?;
        let pg = helly::pass_to_limit(&g, &seq, &sel, &opts, 3)?;
        if !pf.pass || !pg.pass {
            return Err(Error::NotConverged("pass_to_limit failed".into()));
        }
        Ok(linalg::spectral_norm(&(pg.value - pf.value * re(alpha))) / (alpha * pf.tolerance + pg.tolerance))
    });
}

fn colligation(rng: &mut SeededRng, max_state: usize) -> realization::Realization {
    let n = rng.gen_range(1..=2);
    let d = rng.gen_range(1..=max_state);
    random::colligation(rng, n, d)
}

fn realization_suite(r: &mut Runner) {
    r.check("round trip", 20, 1e-6, |rng, k| {
        let n = 1 + k % 2;
        let d = rng.gen_range(1..=8);
        let truth = random::colligation(rng, n, d);
        let pts = random::disk_points(rng, 10, 0.3, 0.85, true);
        let syn = realization::synthesize_from(&truth.as_function(), &pts)?;
        let hold = realization::holdout_points(&pts, 10);
        realization::max_relative_error(&|z| syn.realization.evaluate(z), &|z| truth.evaluate(z), &hold)
    });
    r.check("emitted isometry defect", 20, realization::ISOMETRY_LIMIT, |rng, _| {
        let truth = colligation(rng, 8);
        let pts = random::disk_points(rng, 10, 0.3, 0.85, true);
        let syn = realization::synthesize_from(&truth.as_function(), &pts)?;
        Ok(syn.realization.isometry_defect())
    });
    r.check("emitted skew defect", 20, realization::SKEW_LIMIT, |rng, _| {
        let truth = colligation(rng, 8);
        let pts = random::disk_points(rng, 10, 0.3, 0.85, true);
        let syn = realization::synthesize_from(&truth.as_function(), &pts)?;
        Ok(syn.realization.skew_defect())
    });
    r.check("induced kernel positive", 20, 1e-8, |rng, _| {
        let truth = colligation(rng, 8);
        let pts = random::disk_points(rng, 10, 0.3, 0.85, true);
        let syn = realization::synthesize_from(&truth.as_function(), &pts)?;
        let check = random::disk_points(rng, 16, 0.0, 0.95, true);
        let g = kernel::gram_assemble(&syn.realization.as_function(), &SampleSet::new(check)?)?;
        Ok((-g.relative_min_eigenvalue()).max(0.0))
    });
    r.check("weak continuity at the origin", 20, 1e-9, |rng, _| {
        let truth = colligation(rng, 8);
        let phi = truth.as_function();
        let s = SampleSet::new(random::disk_points(rng, 6, 0.1, 0.9, true))?;
        let section = kernel::rkhs_section(&phi, &s)?;
        let origin = s.origin_index().expect("origin included");
        let n = phi.dim();
        let mut worst = 0.0_f64;
        for (i, &w) in s.points.iter().enumerate() {
            let b = random::unit_vector(rng, n);
            let diff = section.section_coefficients(i, &b) - section.section_coefficients(origin, &b);
            let lhs = section.inner(&diff, &diff).re;
            let rhs = w.norm_sqr() / (1.0 - w.norm_sqr()) * operator::pairing_matrix(&section.values[i], &b, &b)?.re;
            worst = worst.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
        }
        Ok(worst)
    });
    r.check("resolvent identity", 20, 1e-8, |rng, _| {
        let truth = colligation(rng, 6);
        let phi = truth.as_function();
        let pts = random::disk_points(rng, 8, 0.2, 0.85, true);
        let syn = realization::synthesize_from(&phi, &pts)?;
        let section = kernel::rkhs_section(&phi, &SampleSet::new(pts.clone())?)?;
        let v = syn.realization.v();
        let c = syn.realization.c();
        let n = phi.dim();
        let state = v.nrows();
        let mut worst = 0.0_f64;
        for (i, &w) in pts.iter().enumerate() {
            let lhs = linalg::solve(&(linalg::identity(state) - v * w.conj()), c)?;
            let rhs = section.coordinate_map.columns(i * n, n);
            worst = worst.max(linalg::frobenius(&(lhs - rhs)) / linalg::frobenius(&rhs.into_owned()).max(1.0));
        }
        Ok(worst)
    });
}

fn small_measure(rng: &mut SeededRng) -> HerglotzMeasure {
    let n = rng.gen_range(1..=3);
    random::measure(rng, n, 4, 64)
}

fn herglotz_suite(r: &mut Runner) {
    r.check("real part positive", 10, 1e-10, |rng, _| {
        let mu = small_measure(rng);
        let mut worst = 0.0_f64;
        for z in random::disk_points(rng, 20, 0.0, 0.99, true) {
            let v = mu.eval(z)?;
            let re_part = linalg::hermitian_part(&v);
            let scale = linalg::hermitian_spectral_norm(&re_part).max(1.0);
            worst = worst.max(-linalg::hermitian_eigen(&re_part).min() / scale);
        }
        Ok(worst.max(0.0))
    });
    r.check("value at origin is total mass", 10, 1e-12, |rng, _| {
        let mu = small_measure(rng);
        let v = mu.eval(Complex64::new(0.0, 0.0))? - mu.d();
        Ok(linalg::spectral_norm(&(v - mu.total_mass())) / linalg::spectral_norm(&mu.total_mass()).max(1.0))
    });
    r.check("kernel integral identity", 3, 1e-7, |rng, _| {
        let mu = small_measure(rng);
        let pts = random::disk_points(rng, 4, 0.0, 0.6, true);
        let rep = herglotz::kernel_integral_check(&mu, &pts, 1e-7, 1e-8)?;
        Ok(rep.max_deviation)
    });
    r.check("moments by integration", 3, 1e-7, |rng, _| {
        let mu = small_measure(rng);
        let closed = mu.trig_moments(4);
        let integrated = mu.trig_moments_by_integration(4, &IntegrationOptions::with_eps(1e-9))?;
        Ok(herglotz::moment_deviation(&closed, &integrated))
    });
    let options = RecoverOptions { cells: 256, ..RecoverOptions::default() };
    r.check("forward-inverse round trip", 2, 1e-3, |rng, _| {
        let mu = small_measure(rng);
        let rec = herglotz::recover(&mu.as_function(), &options)?;
        Ok(herglotz::moment_deviation(&rec.measure.trig_moments(8), &mu.trig_moments(8)))
    });
    r.check("schedule subsequence invariance", 1, 1e-3, |rng, _| {
        let mu = small_measure(rng);
        let every_other = RecoverOptions { radii: options.radii.iter().copied().skip(1).step_by(2).collect(), ..options.clone() };
        let a = herglotz::recover(&mu.as_function(), &options)?;
        let b = herglotz::recover(&mu.as_function(), &every_other)?;
        Ok(herglotz::moment_deviation(&a.measure.trig_moments(8), &b.measure.trig_moments(8)))
    });
    r.check("realization spectral measure", 10, 1e-9, |rng, _| {
        let truth = colligation(rng, 6);
        let mu = realization::spectral_measure(&truth)?;
        let mut worst = 0.0_f64;
        for z in random::disk_points(rng, 8, 0.0, 0.9, true) {
            let want = truth.evaluate(z)?;
            worst = worst.max(linalg::spectral_norm(&(mu.eval(z)? - &want)) / (1.0 + linalg::spectral_norm(&want)));
        }
        Ok(worst)
    });
}
