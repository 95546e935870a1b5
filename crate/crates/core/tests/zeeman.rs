mod common;

use common::{like_pairs, max_abs, moment_oracle, positronium_pairs, transform_columns};
use num_complex::Complex64;
use proptest::prelude::*;
use ps2spin::coupling::{couple, CoupledBasis, CouplingTree};
use ps2spin::par::Execution;
use ps2spin::spin_core::{CMatrix, SpinSystem};
use ps2spin::zeeman::{
    classify, level_curves, level_curves_with, moment_matrix, quadratic_coefficients, DegeneracySpec, MomentMatrix,
    ZeemanOrder,
};
use ps2spin::{Error, HalfInt};

fn positronium() -> (SpinSystem, MomentMatrix) {
    let sys = SpinSystem::positronium();
    let basis = couple(&sys, &CouplingTree::sequential(2).unwrap()).unwrap();
    let mm = moment_matrix(&sys, basis.states()).unwrap();
    (sys, mm)
}

fn index(mm: &MomentMatrix, label: &str) -> usize {
    mm.labels.iter().position(|l| l == label).unwrap()
}

#[test]
fn every_moment_matrix_matches_oracle() {
    let sys = SpinSystem::dipositronium();
    for basis in [like_pairs(), positronium_pairs()] {
        let full = basis.transform();
        let mm = moment_matrix(&sys, &full.rows).unwrap();
        let oracle = moment_oracle(&sys, &full.matrix, &transform_columns(&full));
        assert!(max_abs(&(&mm.entries - oracle)) <= 1e-12);
        assert!(max_abs(&(&mm.entries - mm.entries.adjoint())) <= 1e-12);
        for m in basis.m_values() {
            let block = basis.m_sector(m);
            let mm = moment_matrix(&sys, &block.rows).unwrap();
            let oracle = moment_oracle(&sys, &block.matrix, &transform_columns(&block));
            assert!(max_abs(&(&mm.entries - oracle)) <= 1e-12);
        }
        // zero between different M
        for i in 0..16 {
            for j in 0..16 {
                if mm.ms[i] != mm.ms[j] {
                    assert!(mm.entries[(i, j)].norm() <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn mu0_scales_the_matrix() {
    let sys = SpinSystem::dipositronium().with_mu0(0.25).unwrap();
    let basis = couple(&sys, &CouplingTree::like_pairs()).unwrap();
    let block = basis.m_sector(HalfInt::ONE);
    let mm = moment_matrix(&sys, &block.rows).unwrap();
    assert!((mm.entries[(2, 2)].re + 0.5).abs() < 1e-15);
}

#[test]
fn positronium_moment_matrix() {
    let (_, mm) = positronium();
    let (t0, s0) = (index(&mm, "|1,0⟩"), index(&mm, "|0,0⟩"));
    assert!((mm.entries[(t0, s0)].re + 2.0).abs() <= 1e-12);
    for k in 0..4 {
        assert!(mm.entries[(k, k)].norm() <= 1e-12);
    }
}

#[test]
fn default_classification_like_pairs() {
    let sys = SpinSystem::dipositronium();
    let basis = like_pairs();
    let mm = moment_matrix(&sys, basis.states()).unwrap();
    let report = classify(&mm, &DegeneracySpec::singletons(16)).unwrap();
    let r = |l: &str| report.find(l).unwrap();
    assert_eq!(r("|1,1[1,0]⟩").classification, ZeemanOrder::Linear);
    assert!((r("|1,1[1,0]⟩").linear_slope - 2.0).abs() < 1e-12);
    assert!((r("|1,1[0,1]⟩").linear_slope + 2.0).abs() < 1e-12);
    for l in ["|1,0[0,1]⟩", "|1,0[1,0]⟩", "|0,0[0,0]⟩", "|2,2[2,2]⟩", "|2,-2[2,2]⟩"] {
        assert_eq!(r(l).classification, ZeemanOrder::None, "{l}");
    }
    for l in ["|2,0[2,2]⟩", "|1,0[2,2]⟩", "|0,0[2,2]⟩", "|2,1[2,2]⟩"] {
        assert_eq!(r(l).classification, ZeemanOrder::Quadratic, "{l}");
    }
    assert_eq!(report.count(ZeemanOrder::Linear), 4);
}

#[test]
fn default_classification_positronium_pairs() {
    let sys = SpinSystem::dipositronium();
    let basis = positronium_pairs();
    let block = basis.m_sector(HalfInt::ONE);
    let mm = moment_matrix(&sys, &block.rows).unwrap();
    let report = classify(&mm, &DegeneracySpec::singletons(4)).unwrap();
    assert!(report.states.iter().all(|s| s.classification == ZeemanOrder::Quadratic));
    let full = moment_matrix(&sys, basis.states()).unwrap();
    assert_eq!(classify(&full, &DegeneracySpec::singletons(16)).unwrap().count(ZeemanOrder::Linear), 0);
}

#[test]
fn degenerate_group_becomes_linear() {
    let sys = SpinSystem::dipositronium();
    let block = like_pairs().m_sector(HalfInt::ONE);
    let mm = moment_matrix(&sys, &block.rows).unwrap();
    let spec = DegeneracySpec::new(vec![vec![0, 1], vec![2], vec![3]], vec![0.0, 1.0, 2.0], 4, false).unwrap();
    let report = classify(&mm, &spec).unwrap();
    let mut slopes: Vec<f64> = report.states[..2].iter().map(|s| s.linear_slope).collect();
    slopes.sort_by(f64::total_cmp);
    assert!((slopes[0] + 2.0).abs() < 1e-12 && (slopes[1] - 2.0).abs() < 1e-12);
    assert!(report.states[..2].iter().all(|s| s.classification == ZeemanOrder::Linear));
    // zeroth-order states are the ± combinations
    for s in &report.states[..2] {
        assert!((s.adapted[0].norm() - 0.5f64.sqrt()).abs() < 1e-12);
    }
}

#[test]
fn sum_rule_over_groups() {
    let sys = SpinSystem::dipositronium();
    for basis in [like_pairs(), positronium_pairs()] {
        let mm = moment_matrix(&sys, basis.states()).unwrap();
        let groups: Vec<Vec<usize>> = vec![(0..5).collect(), (5..9).collect(), (9..16).collect()];
        let spec = DegeneracySpec::new(groups.clone(), vec![0.0, 1.0, 2.0], 16, false).unwrap();
        let report = classify(&mm, &spec).unwrap();
        for g in &groups {
            let slopes: f64 = g.iter().map(|&k| report.states[k].linear_slope).sum();
            let trace: Complex64 = g.iter().map(|&k| mm.entries[(k, k)]).sum();
            assert!((slopes + trace.re).abs() <= 1e-12);
        }
        let one = DegeneracySpec::new(vec![(0..16).collect()], vec![0.0], 16, false).unwrap();
        let all: f64 = classify(&mm, &one).unwrap().states.iter().map(|s| s.linear_slope).sum();
        assert!(all.abs() <= 1e-12);
    }
}

#[test]
fn m_minus_one_mirrors_m_plus_one() {
    let sys = SpinSystem::dipositronium();
    for basis in [like_pairs(), positronium_pairs()] {
        let up = moment_matrix(&sys, &basis.m_sector(HalfInt::ONE).rows).unwrap();
        let down = moment_matrix(&sys, &basis.m_sector(-HalfInt::ONE).rows).unwrap();
        let ru = classify(&up, &DegeneracySpec::singletons(4)).unwrap();
        let rd = classify(&down, &DegeneracySpec::singletons(4)).unwrap();
        for (a, b) in ru.states.iter().zip(&rd.states) {
            assert_eq!(a.classification, b.classification);
            assert!((a.linear_slope + b.linear_slope).abs() < 1e-12);
        }
    }
}

#[test]
fn energies_agree_across_schemes() {
    let sys = SpinSystem::dipositronium();
    let fields: Vec<f64> = (-4..=4).map(|k| f64::from(k) * 0.25).collect();
    let a = moment_matrix(&sys, like_pairs().states()).unwrap();
    let b = moment_matrix(&sys, positronium_pairs().states()).unwrap();
    let spec = DegeneracySpec::singletons(16);
    let (ca, cb) = (level_curves(&a, &spec, &fields).unwrap(), level_curves(&b, &spec, &fields).unwrap());
    for i in 0..fields.len() {
        let sorted = |c: &ps2spin::zeeman::LevelCurves| {
            let mut v: Vec<f64> = c.curves.iter().map(|x| x.energies[i]).collect();
            v.sort_by(f64::total_cmp);
            v
        };
        for (x, y) in sorted(&ca).iter().zip(sorted(&cb)) {
            assert!((x - y).abs() <= 1e-10);
        }
    }
}

#[test]
fn zero_h0_gives_straight_lines() {
    let sys = SpinSystem::dipositronium();
    let mm = moment_matrix(&sys, like_pairs().states()).unwrap();
    let fields = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let curves = level_curves(&mm, &DegeneracySpec::singletons(16), &fields).unwrap();
    for (i, b) in fields.iter().enumerate() {
        let mut e: Vec<f64> = curves.curves.iter().map(|c| c.energies[i]).collect();
        e.sort_by(f64::total_cmp);
        // slopes {-4,-2,0,2,4} with multiplicities (1,4,6,4,1)
        let mut want: Vec<f64> = [(-4.0, 1), (-2.0, 4), (0.0, 6), (2.0, 4), (4.0, 1)]
            .iter()
            .flat_map(|&(s, n)| std::iter::repeat_n(s * b, n))
            .collect();
        want.sort_by(f64::total_cmp);
        for (x, y) in e.iter().zip(&want) {
            assert!((x - y).abs() <= 1e-10);
        }
    }
}

#[test]
fn positronium_closed_form() {
    let (_, mm) = positronium();
    let delta = 0.7;
    let spec = DegeneracySpec::from_state_energies(&[0.0, 0.0, 0.0, delta]).unwrap();
    let fields: Vec<f64> = (-10..=10).map(|k| f64::from(k) * 0.1).collect();
    let curves = level_curves(&mm, &spec, &fields).unwrap();
    for (i, &b) in fields.iter().enumerate() {
        let root = ((delta / 2.0).powi(2) + (2.0 * b).powi(2)).sqrt();
        let (lo, hi) = (delta / 2.0 - root, delta / 2.0 + root);
        assert!((curves.curve("|1,0⟩").unwrap().energies[i] - lo).abs() <= 1e-10);
        assert!((curves.curve("|0,0⟩").unwrap().energies[i] - hi).abs() <= 1e-10);
        assert!(curves.curve("|1,1⟩").unwrap().energies[i].abs() <= 1e-10);
        assert!(curves.curve("|1,-1⟩").unwrap().energies[i].abs() <= 1e-10);
    }
    assert!(curves.curves.iter().all(|c| !c.ambiguous));
}

#[test]
fn parallel_and_sequential_sweeps_agree() {
    let sys = SpinSystem::dipositronium();
    let mm = moment_matrix(&sys, like_pairs().states()).unwrap();
    let energies: Vec<f64> = (0..16).map(|k| f64::from(k) * 0.37).collect();
    let spec = DegeneracySpec::from_state_energies(&energies).unwrap();
    let fields: Vec<f64> = (-50..=50).map(|k| f64::from(k) * 0.02).collect();
    let a = level_curves_with(&mm, &spec, &fields, Execution::Parallel).unwrap();
    let b = level_curves_with(&mm, &spec, &fields, Execution::Sequential).unwrap();
    assert_eq!(a, b);
}

fn distinct_spec(n: usize) -> DegeneracySpec {
    // irregular spacing keeps every coupled pair non-degenerate
    let e: Vec<f64> = (0..n).map(|k| (k as f64) * 1.3 + 0.11 * ((k * k) as f64)).collect();
    DegeneracySpec::from_state_energies(&e).unwrap()
}

#[test]
fn finite_difference_slopes_match_classify() {
    let sys = SpinSystem::dipositronium();
    for basis in [like_pairs(), positronium_pairs()] {
        let mm = moment_matrix(&sys, basis.states()).unwrap();
        let spec = distinct_spec(16);
        let report = classify(&mm, &spec).unwrap();
        let scale = max_abs(&mm.entries);
        let h = 1e-6 * scale;
        let curves = level_curves(&mm, &spec, &[-h, 0.0, h]).unwrap();
        for (s, c) in report.states.iter().zip(&curves.curves) {
            let fd = (c.energies[2] - c.energies[0]) / (2.0 * h);
            if s.classification == ZeemanOrder::Linear {
                assert!((fd - s.linear_slope).abs() <= 1e-5 * s.linear_slope.abs(), "{}", s.label);
            } else {
                assert!(fd.abs() <= 1e-5, "{}", s.label);
            }
        }
    }
}

#[test]
fn finite_difference_curvature_matches_quadratic() {
    let sys = SpinSystem::dipositronium();
    for basis in [like_pairs(), positronium_pairs()] {
        let mm = moment_matrix(&sys, basis.states()).unwrap();
        let spec = distinct_spec(16);
        let coeffs = quadratic_coefficients(&mm, &spec).unwrap();
        let h = 1e-3;
        let curves = level_curves(&mm, &spec, &[-h, 0.0, h]).unwrap();
        for (k, c) in curves.curves.iter().enumerate() {
            let fd = (c.energies[2] + c.energies[0] - 2.0 * c.energies[1]) / (2.0 * h * h);
            if coeffs[k] == 0.0 {
                assert!(fd.abs() <= 1e-4, "{}", c.label);
            } else {
                assert!((fd - coeffs[k]).abs() <= 1e-4 * coeffs[k].abs(), "{}: {fd} vs {}", c.label, coeffs[k]);
            }
        }
    }
}

#[test]
fn quadratic_examples() {
    let (_, mm) = positronium();
    let delta = 0.8;
    // triplet Δ above the singlet
    let spec = DegeneracySpec::from_state_energies(&[delta, delta, delta, 0.0]).unwrap();
    let q = quadratic_coefficients(&mm, &spec).unwrap();
    assert!((q[index(&mm, "|1,0⟩")] - 4.0 / delta).abs() <= 1e-12);
    assert!((q[index(&mm, "|0,0⟩")] + 4.0 / delta).abs() <= 1e-12);
    assert_eq!(q[index(&mm, "|1,1⟩")], 0.0);

    let sys = SpinSystem::dipositronium();
    let block = like_pairs().m_sector(HalfInt::ZERO);
    let mm = moment_matrix(&sys, &block.rows).unwrap();
    let spec = DegeneracySpec::from_state_energies(&[5.0, 6.0, 7.0, 0.0, 1.0, 0.0]).unwrap();
    let q = quadratic_coefficients(&mm, &spec).unwrap();
    assert!((q[4] - (16.0 / 3.0 + 32.0 / 3.0)).abs() <= 1e-12);
    assert_eq!(&q[..3], &[0.0, 0.0, 0.0]);
    // partners 1 below: -16/3 and -32/3
    assert!((q[3] + 16.0 / 3.0).abs() <= 1e-12 && (q[5] + 32.0 / 3.0).abs() <= 1e-12);
}

#[test]
fn quadratic_rejects_equal_energies_across_coupled_groups() {
    let sys = SpinSystem::dipositronium();
    let block = like_pairs().m_sector(HalfInt::ONE);
    let mm = moment_matrix(&sys, &block.rows).unwrap();
    let spec = DegeneracySpec::new(vec![vec![0], vec![1], vec![2, 3]], vec![0.0, 0.0, 1.0], 4, true).unwrap();
    assert!(matches!(quadratic_coefficients(&mm, &spec), Err(Error::Singular(_))));
}

#[test]
fn overlapping_groups_rejected() {
    let (_, mm) = positronium();
    assert!(DegeneracySpec::new(vec![vec![0, 1], vec![1, 2, 3]], vec![0.0, 1.0], 4, false).is_err());
    let short = DegeneracySpec::singletons(3);
    assert!(classify(&mm, &short).is_err());
}

fn rephase(basis: &CoupledBasis, signs: &[bool]) -> Vec<ps2spin::coupling::CoupledState> {
    basis
        .states()
        .iter()
        .zip(signs)
        .map(|(s, &flip)| {
            let mut s = s.clone();
            if flip {
                s.vector = -s.vector;
            }
            s
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn verdicts_survive_rephasing(signs in prop::collection::vec(any::<bool>(), 16), like in any::<bool>()) {
        let sys = SpinSystem::dipositronium();
        let basis = if like { like_pairs() } else { positronium_pairs() };
        let spec = DegeneracySpec::singletons(16);
        let base = classify(&moment_matrix(&sys, basis.states()).unwrap(), &spec).unwrap();
        let flipped = classify(&moment_matrix(&sys, &rephase(&basis, &signs)).unwrap(), &spec).unwrap();
        for (a, b) in base.states.iter().zip(&flipped.states) {
            prop_assert_eq!(a.classification, b.classification);
            prop_assert!((a.linear_slope - b.linear_slope).abs() <= 1e-12);
            prop_assert_eq!(&a.quadratic_partners, &b.quadratic_partners);
        }
    }

    #[test]
    fn group_trace_sum_rule(cut in 1usize..15, e0 in -3.0f64..3.0) {
        let sys = SpinSystem::dipositronium();
        let mm = moment_matrix(&sys, like_pairs().states()).unwrap();
        let spec = DegeneracySpec::new(vec![(0..cut).collect(), (cut..16).collect()], vec![e0, e0 + 1.0], 16, false).unwrap();
        let report = classify(&mm, &spec).unwrap();
        let lhs: f64 = report.states[..cut].iter().map(|s| s.linear_slope).sum();
        let trace: f64 = (0..cut).map(|k| mm.entries[(k, k)].re).sum();
        prop_assert!((lhs + trace).abs() <= 1e-12);
    }
}

#[test]
fn positronium_transform_is_unitary() {
    let sys = SpinSystem::positronium();
    let basis = couple(&sys, &CouplingTree::sequential(2).unwrap()).unwrap();
    let t = basis.transform();
    assert!(max_abs(&(&t.matrix * t.matrix.adjoint() - CMatrix::identity(4, 4))) <= 1e-12);
}
