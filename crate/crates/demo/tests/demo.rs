use caratheodory_demo::{cayley_grid_values, gram_signature_json, recover_json};
use serde_json::Value;

const SPEC: &str = r#"{"atoms": [[1.0, 0.4], [4.0, 0.3]], "background": 0.3}"#;

#[test]
fn recovery_finds_both_atoms() {
    let out: Value = serde_json::from_str(&recover_json(SPEC, 10).unwrap()).unwrap();
    assert!(out["max_moment_deviation"].as_f64().unwrap() < 1e-3, "{out}");
    let atoms = out["atoms"].as_array().unwrap();
    assert_eq!(atoms.len(), 2);
    assert!((atoms[0][0].as_f64().unwrap() - 1.0).abs() < 0.05);
    assert!((atoms[1][1].as_f64().unwrap() - 0.3).abs() < 0.02);
}

#[test]
fn origin_spike_has_one_negative_square() {
    let out: Value = serde_json::from_str(&gram_signature_json(&[0.5, 0.0, -0.1, 0.4], "origin_spike").unwrap()).unwrap();
    assert_eq!(out["n_negative"], 1);
    let out: Value = serde_json::from_str(&gram_signature_json(&[0.5, 0.0, -0.1, 0.4], "cayley_atom").unwrap()).unwrap();
    assert_eq!(out["n_negative"], 0);
    assert!(gram_signature_json(&[0.5, 0.0], "nope").is_err());
}

#[test]
fn cayley_grid_stays_in_the_unit_ball() {
    let v = cayley_grid_values(SPEC, 33).unwrap();
    assert_eq!(v.len(), 33 * 33);
    assert!(v[0].is_nan());
    let inside: Vec<f64> = v.iter().copied().filter(|x| !x.is_nan()).collect();
    assert!(!inside.is_empty());
    assert!(inside.iter().all(|&x| x <= 1.0 + 1e-10));
    // Total mass 1 and D = 0 give φ(0) = 1, so s(0) = 0.
    assert!(v[16 * 33 + 16] < 1e-12);
}
