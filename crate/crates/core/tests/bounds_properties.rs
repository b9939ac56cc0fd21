mod common;

use proptest::prelude::*;
use rand::Rng;
use single_ur_core::bounds::{
    classical_variance, coherence_report, comm_norm_sq, expectation, optimal_coefficient, pinch,
    quantum_term, single_bound_report, tight_witness, variance, Coefficient, SLACK_TOL,
};
use single_ur_core::linalg::{commutator, hs_norm_sq, ComplexMatrix};
use single_ur_core::states::{make_density, maximally_mixed, Observable};

const S_VALUES: [f64; 5] = [0.5, 0.75, 1.0, 1.5, 2.0];

fn rel_close(got: f64, want: f64, rel: f64) -> bool {
    (got - want).abs() <= rel * want.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn slack_is_nonnegative_and_matches_oracles() {
    let mut rng = common::rng(11);
    for d in 2..=8 {
        for k in 0..150 {
            let rank = match k % 3 {
                0 => d,
                1 => (d - 1).max(1),
                _ => rng.random_range(1..=d),
            };
            let inst = common::instance(d, rank, k % 5 == 0, &mut rng);
            let a = common::random_observable(d, &mut rng);
            let v = common::variance_oracle(&inst, a.matrix());
            let vcl = common::classical_variance_oracle(&inst, a.matrix());
            for s in S_VALUES {
                let rep = single_bound_report(&inst.rho, &a, s).unwrap();
                assert!(
                    rep.slack >= -SLACK_TOL,
                    "d={d} rank={rank} s={s} slack={}",
                    rep.slack
                );
                let oracle = common::comm_norm_oracle(&inst, a.matrix(), s);
                assert!(
                    rel_close(rep.comm_norm_sq, oracle, 1e-10),
                    "comm_norm_sq {} vs oracle {oracle}",
                    rep.comm_norm_sq
                );
                assert!((rep.variance - v).abs() <= 1e-12 * (1.0 + v));
                assert!((rep.classical_variance - vcl).abs() <= 1e-11 * (1.0 + vcl));
            }
        }
    }
}

#[test]
fn quantum_term_is_coefficient_times_commutator_norm() {
    let mut rng = common::rng(12);
    for d in 2..=6 {
        for _ in 0..100 {
            let inst = common::instance(d, d, false, &mut rng);
            let a = common::random_observable(d, &mut rng);
            for s in S_VALUES {
                let direct = common::coefficient_oracle(&inst.spectrum, s)
                    * common::comm_norm_oracle(&inst, a.matrix(), s);
                let got = quantum_term(&inst.rho, &a, s).unwrap();
                assert!(rel_close(got, direct, 1e-9), "{got} vs {direct}");
            }
        }
    }
}

#[test]
fn bound_ordering_at_half() {
    let mut rng = common::rng(13);
    for d in 2..=6 {
        for _ in 0..200 {
            let inst = common::instance(d, rng.random_range(1..=d), false, &mut rng);
            let a = common::random_observable(d, &mut rng);
            let rep = single_bound_report(&inst.rho, &a, 0.5).unwrap();
            assert!(rep.luo_valid);
            assert!(rep.luo_bound <= rep.optimal_bound + 1e-12);
            assert!(rep.optimal_bound <= rep.sharp_bound + 1e-12);
            assert!(rep.sharp_bound <= rep.variance + SLACK_TOL);
        }
    }
}

#[test]
fn coefficient_matches_closed_form_and_ignores_interior_levels() {
    let mut rng = common::rng(14);
    let mut checked = 0;
    for d in 3..=7 {
        for _ in 0..50 {
            let inst = common::instance(d, d, false, &mut rng);
            let mut sorted = inst.spectrum.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            // redistribute the interior weight, keeping extremes and the trace
            let interior: f64 = sorted[1..d - 1].iter().sum();
            let (lo, hi) = (sorted[0], sorted[d - 1]);
            let mut moved: Vec<f64> = (1..d - 1).map(|_| rng.random_range(0.0..1.0)).collect();
            let total: f64 = moved.iter().sum();
            moved
                .iter_mut()
                .for_each(|x| *x = lo + (hi - lo) * 0.999 * *x / total.max(1.0));
            let spread: f64 = moved.iter().sum();
            let shift = (interior - spread) / moved.len() as f64;
            let perturbed: Vec<f64> = moved.iter().map(|x| x + shift).collect();
            if perturbed.iter().any(|&x| x <= lo || x >= hi) {
                continue;
            }
            let mut spectrum = vec![lo];
            spectrum.extend(&perturbed);
            spectrum.push(hi);
            let rho2 = make_density(common::from_basis(&inst.basis, &spectrum)).unwrap();
            for s in S_VALUES {
                let c1 = optimal_coefficient(&inst.rho, s).unwrap().value().unwrap();
                let c2 = optimal_coefficient(&rho2, s).unwrap().value().unwrap();
                assert!(rel_close(
                    c1,
                    common::coefficient_oracle(&inst.spectrum, s),
                    1e-9
                ));
                assert!((c1 - c2).abs() <= 1e-12 * c1, "c changed: {c1} vs {c2}");
            }
            checked += 1;
        }
    }
    assert!(
        checked >= 100,
        "only {checked} perturbations were admissible"
    );
}

#[test]
fn coefficient_is_half_exactly_when_rank_deficient() {
    let mut rng = common::rng(15);
    for d in 2..=6 {
        for _ in 0..50 {
            let deficient = common::instance(d, d - 1, false, &mut rng);
            let c = optimal_coefficient(&deficient.rho, 0.5)
                .unwrap()
                .value()
                .unwrap();
            assert!((c - 0.5).abs() <= 1e-12, "c = {c}");

            let faithful = common::instance(d, d, false, &mut rng);
            if faithful.rho.lambda_min() > 1e-3 {
                let c = optimal_coefficient(&faithful.rho, 0.5)
                    .unwrap()
                    .value()
                    .unwrap();
                assert!(c > 0.5);
            }
        }
    }
}

#[test]
fn pinching_properties() {
    let mut rng = common::rng(16);
    for d in 2..=7 {
        for k in 0..60 {
            let inst = common::instance(d, d, k % 2 == 0, &mut rng);
            let a = common::random_observable(d, &mut rng);
            let pa = pinch(&inst.rho, &a).unwrap();
            let ppa = pinch(&inst.rho, &pa).unwrap();
            assert!(
                hs_norm_sq(&(pa.matrix() - ppa.matrix())).sqrt() <= 1e-12 * a.matrix().hs_norm()
            );
            let c = commutator(pa.matrix(), inst.rho.matrix()).unwrap();
            assert!(c.hs_norm() <= 1e-9 * a.matrix().hs_norm());
            let mean = expectation(&inst.rho, &a).unwrap();
            assert!(
                (expectation(&inst.rho, &pa).unwrap() - mean).abs() <= 1e-12 * (1.0 + mean.abs())
            );
            let vcl = classical_variance(&inst.rho, &a).unwrap();
            assert!(vcl <= variance(&inst.rho, &a).unwrap() + 1e-12);
            assert!(vcl >= 0.0);
        }
    }
}

#[test]
fn witness_saturates_and_inflated_coefficient_fails() {
    let mut rng = common::rng(17);
    for k in 0..100 {
        let d = 2 + k % 5;
        let inst = common::instance(d, rng.random_range(1..=d).max(2), false, &mut rng);
        let w = tight_witness(&inst.rho).unwrap();
        for s in [0.5, 1.0, 2.0] {
            let rep = single_bound_report(&inst.rho, &w, s).unwrap();
            assert!(rep.slack.abs() <= SLACK_TOL, "slack {}", rep.slack);
            let inflated = rep.variance - rep.classical_variance - (1.0 + 1e-6) * rep.optimal_bound;
            assert!(inflated < 0.0);
        }
    }
}

#[test]
fn maximally_mixed_state_saturates_with_zero_quantum_term() {
    let mut rng = common::rng(18);
    for d in 2..=6 {
        let rho = maximally_mixed(d);
        let a = common::random_observable(d, &mut rng);
        for s in S_VALUES {
            let rep = single_bound_report(&rho, &a, s).unwrap();
            assert_eq!(rep.coefficient, Coefficient::MaximallyMixed);
            assert_eq!(rep.optimal_bound, 0.0);
            assert!(rep.slack.abs() <= 1e-12);
        }
        assert!(tight_witness(&rho).is_err());
    }
}

#[test]
fn coherence_chain() {
    let mut rng = common::rng(19);
    for d in 2..=6 {
        for _ in 0..100 {
            let inst = common::instance(d, d, false, &mut rng);
            let a = common::random_observable(d, &mut rng);
            let rep = coherence_report(&inst.rho, &a).unwrap();
            assert!(rep.decoherence_bound <= rep.s1_bound + 1e-10);
            assert!(rep.s1_bound <= rep.variance + 1e-10);
            if d == 2 {
                assert!((rep.decoherence_bound - rep.s1_bound).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn comm_norm_is_basis_independent() {
    let mut rng = common::rng(20);
    for d in 2..=5 {
        let inst = common::instance(d, d, false, &mut rng);
        let a = common::random_observable(d, &mut rng);
        let u = common::random_unitary(d, &mut rng);
        let um = ComplexMatrix::from_fn(d, |i, j| u[j][i]);
        let rho2 = make_density(inst.rho.matrix().conjugate_by(&um.adjoint())).unwrap();
        let a2 = Observable::new(a.matrix().conjugate_by(&um.adjoint())).unwrap();
        for s in S_VALUES {
            let x = comm_norm_sq(&inst.rho, &a, s).unwrap();
            let y = comm_norm_sq(&rho2, &a2, s).unwrap();
            assert!(rel_close(y, x, 1e-10));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn theorem_holds_for_arbitrary_exponent(seed in any::<u64>(), d in 2usize..=6, s in 0.5f64..4.0, deficient in any::<bool>()) {
        let mut rng = common::rng(seed);
        let rank = if deficient { d - 1 } else { d };
        let inst = common::instance(d, rank.max(1), false, &mut rng);
        let a = common::random_observable(d, &mut rng);
        let rep = single_bound_report(&inst.rho, &a, s).unwrap();
        prop_assert!(rep.slack >= -SLACK_TOL);
        prop_assert!(rep.optimal_bound >= 0.0);
        prop_assert!(rep.classical_variance >= -1e-15);
    }
}
