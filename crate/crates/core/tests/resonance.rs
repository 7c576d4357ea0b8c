use std::f64::consts::PI;

use proptest::prelude::*;
use resolab_core::resonance::{
    canonical_solution, check_hypothesis, halfline_bound_states, is_resonant, resonant_couplings, shoot, TailMode,
};
use resolab_core::{Potential64, Tolerances};

const TOL: Tolerances = Tolerances::DEFAULT;

fn neg_box(alpha: f64) -> Potential64 {
    Potential64::piecewise_constant(vec![0.0, 1.0], vec![-1.0], alpha).unwrap()
}

fn box_coupling(n: usize) -> f64 {
    let k = (n as f64 + 0.5) * PI;
    k * k
}

#[test]
fn unit_box_couplings() {
    let got = resonant_couplings(&neg_box(1.0), 100.0, &TOL).unwrap();
    assert_eq!(got.len(), 3);
    for (n, alpha) in got.iter().enumerate() {
        let want = box_coupling(n);
        assert!((alpha - want).abs() <= 1e-8 * want, "{alpha} vs {want}");
    }
}

#[test]
fn deeper_box_couplings_are_rescaled() {
    // -4 chi is resonant at alpha when 4 alpha is a unit-box coupling.
    let got = resonant_couplings(&neg_box(4.0), 31.0, &TOL).unwrap();
    assert_eq!(got.len(), 4);
    for (n, alpha) in got.iter().enumerate() {
        let want = box_coupling(n) / 4.0;
        assert!((alpha - want).abs() <= 1e-8 * want);
    }
    assert_eq!(resonant_couplings(&neg_box(4.0), 10.0, &TOL).unwrap().len(), 2);
}

#[test]
fn coupling_scan_rejects_repulsive_profiles() {
    let v = Potential64::piecewise_constant(vec![0.0, 1.0], vec![1.0], 1.0).unwrap();
    assert!(resonant_couplings(&v, 200.0, &TOL).is_err());
    assert!(resonant_couplings(&neg_box(1.0), 2.0, &TOL).unwrap().is_empty());
}

#[test]
fn resonant_canonical_solution_is_a_sine() {
    let v = neg_box(box_coupling(1));
    let psi = canonical_solution(&v, &TOL).unwrap();
    assert_eq!(psi.mode, TailMode::Resonant);
    // psi_0 = sin(k t) / sin(k) with k = 3 pi / 2, so -sin(3 pi t / 2).
    for t in [0.1f64, 0.33, 0.5, 0.77, 1.0, 2.0] {
        let want = -(1.5 * PI * t.min(1.0)).sin();
        assert!((psi.value(t) - want).abs() < 1e-6, "t = {t}");
    }
    assert!((psi.sup_psi - 1.0).abs() < 1e-6);
    assert!((psi.sup_psi_minus_one - 2.0).abs() < 1e-6);
}

#[test]
fn non_resonant_solution_has_unit_slope_tail() {
    let v = Potential64::preset("zero", 1.0).unwrap();
    let psi = canonical_solution(&v, &TOL).unwrap();
    assert_eq!(psi.mode, TailMode::NonResonant);
    for t in [0.0, 0.4, 1.0, 3.5] {
        assert!((psi.value(t) - t).abs() < 1e-10);
        assert!((psi.value_and_derivative(t).1 - 1.0).abs() < 1e-8);
    }
}

#[test]
fn zero_piece_extension_gives_the_affine_tail() {
    let alpha = 5.0;
    let short = neg_box(alpha);
    let long = Potential64::piecewise_constant(vec![0.0, 1.0, 2.0], vec![-1.0, 0.0], alpha).unwrap();
    let s = shoot(&short, 0.0, &TOL).unwrap();
    let l = shoot(&long, 0.0, &TOL).unwrap();
    let scale = (s.log_scale - l.log_scale).exp();
    let predicted = s.value_at_a + s.derivative_at_a;
    assert!((l.value_at_a - predicted * scale).abs() < 1e-9 * predicted.abs().max(1.0));
    assert!((l.derivative_at_a - s.derivative_at_a * scale).abs() < 1e-9 * s.derivative_at_a.abs().max(1.0));
}

#[test]
fn normalization_is_idempotent() {
    let v = neg_box(box_coupling(2));
    let a = canonical_solution(&v, &TOL).unwrap();
    let b = canonical_solution(&v.scaled(1.0), &TOL).unwrap();
    assert_eq!(a, b);
}

#[test]
fn resonance_test_at_and_off_coupling() {
    assert!(is_resonant(&neg_box(box_coupling(0)), &TOL).unwrap());
    assert!(!is_resonant(&neg_box(box_coupling(0) * 1.01), &TOL).unwrap());
    assert!(!is_resonant(&neg_box(1.0), &TOL).unwrap());
}

#[test]
fn derivative_changes_sign_across_each_coupling() {
    for n in 0..3 {
        let alpha = box_coupling(n);
        let below = shoot(&neg_box(alpha * (1.0 - 1e-3)), 0.0, &TOL).unwrap();
        let above = shoot(&neg_box(alpha * (1.0 + 1e-3)), 0.0, &TOL).unwrap();
        assert!(below.derivative_at_a * above.derivative_at_a < 0.0, "n = {n}");
    }
}

#[test]
fn bound_states_count_the_nodes() {
    for n in 0..4 {
        let v = neg_box(box_coupling(n));
        let shot = shoot(&v, 0.0, &TOL).unwrap();
        let states = halfline_bound_states(&v, 10, &TOL).unwrap();
        assert_eq!(shot.nodes, n);
        assert_eq!(states.len(), n, "n = {n}");
        assert!(states.iter().all(|s| s.energy < 0.0));
        assert!(states.windows(2).all(|w| w[0].energy < w[1].energy));
    }
}

#[test]
fn hypothesis_needs_a_bound_state() {
    assert!(!check_hypothesis(&neg_box(box_coupling(0)), &TOL).unwrap().satisfied());
    let h = check_hypothesis(&neg_box(box_coupling(1)), &TOL).unwrap();
    assert!(h.satisfied());
    assert_eq!(h.negative_count, 1);
    assert!(h.mu.unwrap() < 0.0);
}

#[test]
fn repulsive_profiles_have_no_bound_states() {
    let v = Potential64::piecewise_constant(vec![0.0, 1.0], vec![3.0], 1.0).unwrap();
    assert!(halfline_bound_states(&v, 3, &TOL).unwrap().is_empty());
    assert!(halfline_bound_states(&v, 0, &TOL).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    /// The bound-state count equals the half-line zero count of the
    /// zero-energy solution, away from thresholds where a state is just forming.
    #[test]
    fn zero_count_matches_bound_states(alpha in 1.0f64..60.0) {
        let v = neg_box(alpha);
        let shot = shoot(&v, 0.0, &TOL).unwrap();
        let margin = (0..4).map(|n| (alpha / box_coupling(n) - 1.0).abs()).fold(f64::INFINITY, f64::min);
        prop_assume!(margin > 0.05);
        let states = halfline_bound_states(&v, 10, &TOL).unwrap();
        prop_assert_eq!(states.len(), shot.halfline_zero_count());
    }
}

#[test]
fn unresolvable_shooting_is_an_accuracy_error() {
    let tol = Tolerances { shoot_richardson_rel: 1e-18, shoot_max_doublings: 0, ..TOL };
    let err = shoot(&neg_box(box_coupling(3)), 0.0, &tol).unwrap_err();
    assert!(matches!(err, resolab_core::Error::Accuracy(_)));
}
