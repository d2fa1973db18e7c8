use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use proptest::prelude::*;

use quadphase::frames::{CoefficientSet, RotatingFieldCoefficients};
use quadphase::propagation::{general_solution, Dynamics, PropagationMethod};
use quadphase::pulses::{
    butterfly, compose_beam_splitters, compose_displacements, geometry_summary, mach_zehnder, sequence_effects,
    PulseEffect,
};
use quadphase::states::{detection_probability, detection_probability_general, GaussianState};
use quadphase::symplectic::{omega, phase_vector, symplectic_defect};
use quadphase::{Mat3, PhaseVector, Vec3, HBAR};

const M: f64 = 1.443e-25;

fn chi(x: f64, p: f64) -> PhaseVector {
    phase_vector(Vec3::new(0.0, 0.0, x), Vec3::new(0.0, 0.0, p))
}

fn state() -> GaussianState {
    GaussianState::thermal(phase_vector(Vec3::new(0.0, 0.0, 2e-5), Vec3::zeros()), Vec3::repeat(1e-4), 1e-8, M).unwrap()
}

fn effect(c: PhaseVector, phi: f64, area: f64) -> PulseEffect {
    PulseEffect { time: 0.0, area, chi: c, phi, chi_minus: c, phi_minus: phi }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn displacement_composition_is_associative(
        v in proptest::collection::vec(-1.0f64..1.0, 6),
    ) {
        let a = chi(v[0] * 1e-6, v[1] * 1e-27);
        let b = chi(v[2] * 1e-6, v[3] * 1e-27);
        let c = chi(v[4] * 1e-6, v[5] * 1e-27);
        let (ab, p1) = compose_displacements(&a, &b);
        let (ab_c, p2) = compose_displacements(&ab, &c);
        let (bc, q1) = compose_displacements(&b, &c);
        let (a_bc, q2) = compose_displacements(&a, &bc);
        prop_assert!((ab_c - a_bc).amax() <= 1e-12 * ab_c.amax());
        prop_assert!(((p1 + p2) - (q1 + q2)).abs() < 1e-9);
    }

    #[test]
    fn ports_sum_to_one(
        areas in proptest::collection::vec(0.2f64..6.0, 3..5),
        xs in proptest::collection::vec(-1.0f64..1.0, 4),
        phis in proptest::collection::vec(-3.0f64..3.0, 4),
    ) {
        let s = state();
        let effects: Vec<PulseEffect> = areas
            .iter()
            .enumerate()
            .map(|(i, &a)| effect(chi(xs[i] * 3e-6, 1.7e-27), phis[i], a))
            .collect();
        let u = compose_beam_splitters(&effects).unwrap();
        let g = detection_probability_general(&u[0][0], &s).unwrap();
        let e = detection_probability_general(&u[1][0], &s).unwrap();
        prop_assert!((g + e - 1.0).abs() < 1e-10);
        prop_assert!(g > -1e-12 && g < 1.0 + 1e-12);
    }

    #[test]
    fn closed_form_matches_operator_expansion(
        xs in proptest::collection::vec(-1.0f64..1.0, 4),
        phis in proptest::collection::vec(-1e4f64..1e4, 4),
        n in 3usize..5,
    ) {
        let s = state();
        let effects: Vec<PulseEffect> = (0..n)
            .map(|i| {
                let area = if i == 0 || i + 1 == n { FRAC_PI_2 } else { PI };
                effect(chi(xs[i] * 2e-6, 1.7e-27 * (1.0 + 0.01 * xs[i])), phis[i], area)
            })
            .collect();
        let closed = detection_probability(&geometry_summary(&effects).unwrap(), &s);
        let u = compose_beam_splitters(&effects).unwrap();
        let general = detection_probability_general(&u[0][0], &s).unwrap();
        prop_assert!((closed.probability - general).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&closed.visibility));
    }

    #[test]
    fn rotating_gradient_evolution_composes(
        t1 in 0.1f64..2.0,
        t2 in 0.1f64..2.0,
        w in proptest::collection::vec(-1e-3f64..1e-3, 3),
    ) {
        let rf = RotatingFieldCoefficients {
            mass: M,
            g0: Vec3::zeros(),
            gamma0: Mat3::from_diagonal(&Vec3::new(1.54e-6, 1.54e-6, -3.08e-6)),
            omega_g: Vec3::zeros(),
            omega_gamma: Vec3::new(w[0], w[1], w[2]),
        };
        let d = Dynamics::exact(rf).unwrap();
        let a = d.evolve(t1, 0.0).unwrap().matrix;
        let b = d.evolve(t1 + t2, t1).unwrap().matrix;
        let c = d.evolve(t1 + t2, 0.0).unwrap().matrix;
        let (_, b_, _, _) = quadphase::symplectic::blocks(&c);
        let err = (b * a - c).abs();
        let (ea, eb, ec, ed) = quadphase::symplectic::blocks(&err);
        let (ca, _, cc, cd) = quadphase::symplectic::blocks(&c);
        prop_assert!(ea.amax() < 1e-12 * ca.amax());
        prop_assert!(eb.amax() < 1e-12 * b_.amax());
        prop_assert!(ec.amax() < 1e-9 * cc.amax().max(1e-40) + 1e-40);
        prop_assert!(ed.amax() < 1e-12 * cd.amax());
    }
}

#[test]
fn free_fall_trajectory() {
    let g = Vec3::new(0.0, 0.0, -9.81);
    let d = Dynamics::exact(CoefficientSet::uniform(M, g, Mat3::zeros()).unwrap()).unwrap();
    let x0 = Vec3::new(1e-3, 0.0, 0.5);
    let v0 = Vec3::new(0.0, 0.02, 3.0);
    let t = 0.7;
    let tm = d.evolve(t, 0.0).unwrap();
    let drift = d.particular_drift(t, 0.0).unwrap();
    let xi = general_solution(&tm, &drift, &phase_vector(x0, v0 * M));
    let x = x0 + v0 * t + g * (0.5 * t * t);
    let v = v0 + g * t;
    for i in 0..3 {
        assert!((xi[i] - x[i]).abs() < 1e-12, "{i}");
        assert!((xi[i + 3] / M - v[i]).abs() < 1e-12, "{i}");
    }
}

#[test]
fn methods_agree_on_time_dependent_gradient() {
    let rf = RotatingFieldCoefficients {
        mass: M,
        g0: Vec3::new(0.0, 0.0, -9.81),
        gamma0: Mat3::from_diagonal(&Vec3::new(1.54e-6, 1.54e-6, -3.08e-6)),
        omega_g: Vec3::new(0.0, 7e-5, 0.0),
        omega_gamma: Vec3::new(0.0, 7e-5, 0.0),
    };
    let k = Vec3::new(0.0, 0.0, -1.61e7);
    let pulses = mach_zehnder(&k, &Vec3::zeros(), 0.0, 0.2, 0.2, [0.0; 3]);
    let s = state();
    let phase = |m: PropagationMethod| {
        let d = Dynamics::new(Arc::new(rf.clone()), m).unwrap();
        let sm = geometry_summary(&sequence_effects(&pulses, &d, 0.0).unwrap()).unwrap();
        detection_probability(&sm, &s).total_phase
    };
    let exact = phase(PropagationMethod::Exact);
    let oracle = phase(PropagationMethod::Oracle { step: 2e-3 });
    let pert = phase(PropagationMethod::perturbative(2));
    assert!((exact - oracle).abs() < 1e-9 * exact.abs(), "{exact} {oracle}");
    assert!((exact - pert).abs() < 1e-9 * exact.abs(), "{exact} {pert}");
}

#[test]
fn butterfly_is_closed_without_gradient_and_rotation() {
    let d = Dynamics::exact(CoefficientSet::uniform(M, Vec3::new(0.0, 0.0, -9.81), Mat3::zeros()).unwrap()).unwrap();
    let k = Vec3::new(0.0, 0.0, -1.61e7);
    let effects = sequence_effects(&butterfly(&k, &Vec3::zeros(), 0.0, 0.1, [0.0; 4]), &d, 0.0).unwrap();
    let sm = geometry_summary(&effects).unwrap();
    // χ_I vanishes up to the cancellation of O(ħkT/m) terms.
    assert!(sm.chi_i.fixed_rows::<3>(0).amax() < 1e-15);
    assert!(sm.chi_i.fixed_rows::<3>(3).amax() < 1e-12 * HBAR * 1.61e7);
    assert_eq!(sm.coefficients, vec![1.0, -2.0, 2.0, -1.0]);
    let p = detection_probability(&sm, &state());
    assert!((p.visibility - 1.0).abs() < 1e-12);
}

#[test]
fn symplectic_defect_rejects_non_finite() {
    let mut m = quadphase::Mat6::identity();
    m[(0, 1)] = f64::NAN;
    assert_eq!(symplectic_defect(&m), f64::INFINITY);
    let a = chi(1e-6, 0.0);
    let b = chi(0.0, 1e-27);
    assert!((omega(&a, &b) - 1e-33).abs() < 1e-45);
}
