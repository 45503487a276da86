use std::f64::consts::{PI, TAU};

use caratheodory::herglotz::{self, HerglotzMeasure, RecoverOptions};
use caratheodory::kernel::{self, SampleSet, SampleTable};
use caratheodory::linalg::{c, re};
use caratheodory::{CaratheodoryFunction, DualityTag};
use num_complex::Complex64;

#[test]
fn origin_spike_has_exactly_one_negative_square() {
    let others = [c(0.5, 0.0), c(-0.3, 0.4), c(0.0, -0.7), c(0.2, 0.2)];
    for k in 1..=others.len() {
        let phi = CaratheodoryFunction::Table { table: SampleTable::origin_spike(&others[..k]), tag: DualityTag::BToBstar };
        let mut pts = vec![c(0.0, 0.0)];
        pts.extend_from_slice(&others[..k]);
        let g = kernel::gram_assemble(&phi, &SampleSet::new(pts).unwrap()).unwrap();
        assert_eq!(g.n_negative, 1, "{k} extra points");
    }
    // Two points: [[1, ½], [½, 0]] with eigenvalues (1 ± √2)/2.
    let phi = CaratheodoryFunction::Table { table: SampleTable::origin_spike(&others[..1]), tag: DualityTag::BToBstar };
    let g = kernel::gram_assemble(&phi, &SampleSet::new(vec![c(0.0, 0.0), others[0]]).unwrap()).unwrap();
    assert!((g.eigenvalues[0] - (1.0 - 2f64.sqrt()) / 2.0).abs() < 1e-14);
    assert!((g.eigenvalues[1] - (1.0 + 2f64.sqrt()) / 2.0).abs() < 1e-14);
}

#[test]
fn constant_one_gives_the_szego_kernel() {
    let phi = CaratheodoryFunction::scalar_constant(re(1.0));
    let (z, w) = (c(0.3, -0.2), c(-0.5, 0.1));
    let k = kernel::kernel_eval(&phi, z, w).unwrap()[(0, 0)];
    assert!((k - 1.0 / (1.0 - z * w.conj())).norm() < 1e-15);
}

#[test]
fn point_mass_transforms_to_the_cayley_atom() {
    let mu = HerglotzMeasure::unit_atom(0.0);
    for z in [c(0.0, 0.0), c(0.5, 0.0), c(-0.2, 0.7), c(0.9, -0.3)] {
        let want = (1.0 + z) / (1.0 - z);
        assert!((mu.eval(z).unwrap()[(0, 0)] - want).norm() < 1e-13 * (1.0 + want.norm()));
    }
}

#[test]
fn normalized_arc_length_transforms_to_one() {
    let mu = HerglotzMeasure::uniform(2, 64, 1.0);
    for z in [c(0.0, 0.0), c(0.6, 0.3), c(-0.95, 0.0)] {
        let v = mu.eval(z).unwrap();
        assert!((v[(0, 0)] - 1.0).norm() < 1e-12 && (v[(1, 1)] - 1.0).norm() < 1e-12 && v[(0, 1)].norm() < 1e-12);
    }
}

#[test]
fn recovery_of_the_cayley_atom_is_a_point_mass_at_zero() {
    let rec = herglotz::recover(&CaratheodoryFunction::unit_atom_scalar(), &RecoverOptions::default()).unwrap();
    let atoms = rec.measure.atoms();
    assert_eq!(atoms.len(), 1);
    let t = atoms[0].t;
    assert!(t.min(TAU - t) < 1e-2, "atom at {t}");
    let m = rec.measure.trig_moments(4);
    for (k, mk) in m.iter().enumerate() {
        assert!((mk[(0, 0)] - 1.0).norm() < 1e-3, "moment {k}: {}", mk[(0, 0)]);
    }
}

#[test]
fn moments_of_a_half_circle_density() {
    // m = 1/π on [0, π): moments are (1 − e^{−ikπ})/(ikπ).
    let mu = HerglotzMeasure::new(
        1,
        vec![],
        vec![caratheodory::herglotz::DensityCell { t0: 0.0, t1: PI, m: caratheodory::linalg::scalar_matrix(re(1.0 / PI)) }],
        caratheodory::linalg::zeros(1, 1),
        DualityTag::BToBstar,
    )
    .unwrap();
    let m = mu.trig_moments(5);
    assert!((m[0][(0, 0)] - 1.0).norm() < 1e-15);
    for (k, mk) in m.iter().enumerate().skip(1) {
        let kf = k as f64;
        let want = (1.0 - Complex64::from_polar(1.0, -kf * PI)) / Complex64::new(0.0, kf * PI);
        assert!((mk[(0, 0)] - want).norm() < 1e-14);
    }
}
