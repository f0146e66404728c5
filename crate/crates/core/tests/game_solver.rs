mod common;

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use qrg_core::catalog;
use qrg_core::circuit::{swap_roles, Circuit, Gate, Referee};
use qrg_core::exact::{DyadicGaussian, ExactMatrix};
use qrg_core::game::*;
use qrg_core::linalg::{max_eigen, min_eigen, trace_product};
use qrg_core::natural::{adjoint_apply, circuit_rep, heisenberg, simulate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-4;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn accept_prob(out: &ExactMatrix) -> DyadicGaussian {
    out.get(1, 1).clone()
}

#[test]
fn bits_equal_effects_match_classical_enumeration() {
    let r = catalog::bits_equal().unwrap();
    let s = effect_operators(&r).unwrap();
    assert_eq!(s.exact(0), &ExactMatrix::unit(2, 0, 0).unwrap());
    assert_eq!(s.exact(1), &ExactMatrix::unit(2, 1, 1).unwrap());
    let whole = r.compose().unwrap();
    for y in 0..2 {
        for b in 0..2 {
            let rho = ExactMatrix::unit(4, 2 * y + b, 2 * y + b).unwrap();
            let p = accept_prob(&simulate(&whole, &rho).unwrap());
            let expected = if y == b { DyadicGaussian::one() } else { DyadicGaussian::zero() };
            assert_eq!(p, expected);
            assert_eq!(s.exact(y).get(b, b), &expected);
        }
    }
}

#[test]
fn constant_and_alice_blind_effects() {
    let s = effect_operators(&catalog::always_accept(2, 1).unwrap()).unwrap();
    for y in 0..4 {
        assert_eq!(s.exact(y), &ExactMatrix::identity(2).unwrap());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let bob_part = random_decision(&mut rng, 2, 6, 4);
        let mut gates = vec![Gate::Erasure(0)];
        gates.extend_from_slice(bob_part.gates());
        let r = Referee::cqrg(1, 2, Circuit::new(3, gates)).unwrap();
        let s = effect_operators(&r).unwrap();
        assert_eq!(s.exact(0), s.exact(1));
    }
}

#[test]
fn effect_operators_reproduce_acceptance_probabilities() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for i in 0..20 {
        let (n, m) = (1 + i % 2, 1 + (i / 2) % 2);
        let r = if i % 2 == 0 { mixing_cqrg(&mut rng, n, m, 15) } else { random_cqrg(&mut rng, n, m, 8) };
        let s = effect_operators(&r).unwrap();
        assert!(s.bound_violation().unwrap() <= 1e-9);
        let whole = r.compose().unwrap();
        for _ in 0..3 {
            let y = rng.gen_range(0..1usize << n);
            let sigma = random_trace_one_hermitian(&mut rng, m);
            let yy = ExactMatrix::unit(1 << n, y, y).unwrap();
            let out = simulate(&whole, &yy.kron(&sigma).unwrap()).unwrap();
            let lhs = s.exact(y).mul(&sigma).unwrap().trace().unwrap();
            assert_eq!(lhs, accept_prob(&out));
        }
        if whole.validate().unwrap().max_live <= 6 {
            let one = ExactMatrix::unit(2, 1, 1).unwrap();
            let via_rep = adjoint_apply(&circuit_rep(&whole).unwrap(), &one).unwrap();
            assert_eq!(via_rep, heisenberg(&whole, &one).unwrap());
        }
    }
}

#[test]
fn qrg_has_no_effect_operators() {
    let r = catalog::matching_pennies().unwrap();
    assert!(effect_operators(&r).is_err());
}

#[test]
fn min_eigen_matches_bisection() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let m = random_hermitian_f64(&mut rng, 8);
        let fast = min_eigen(&m).unwrap();
        assert!((fast.value - bisection_min_eig(&m)).abs() < 1e-8);
        let v = &fast.vector;
        assert!((&m * v - v * c(fast.value)).norm() <= 1e-9);
        let neg = m.map(|z| -z);
        assert!((max_eigen(&neg).unwrap().value + fast.value).abs() < 1e-12);
    }
    let half = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.5), c(0.5)]));
    assert!((min_eigen(&half).unwrap().value - 0.5).abs() < 1e-15);
}

#[test]
fn cqrg_always_accept_and_bits_equal() {
    let a = cqrg_value(&catalog::always_accept(1, 1).unwrap(), TOL).unwrap();
    assert!(a.converged);
    assert!((a.value - 1.0).abs() < 1e-12 && a.duality_gap < 1e-12);

    let b = cqrg_value(&catalog::bits_equal().unwrap(), TOL).unwrap();
    assert!(b.converged && b.duality_gap <= TOL);
    assert!((b.value - 0.5).abs() <= TOL);
    let Strategy::Distribution(p) = &b.alice_strategy else { panic!() };
    for y in ["0", "1"] {
        assert!((p.prob(&y.parse().unwrap()) - 0.5).abs() < 1e-2);
    }
}

/// Accept operator of `alice` (one output) on its inputs.
fn alice_accept(alice: &Circuit) -> DMatrix<Complex64> {
    heisenberg(alice, &ExactMatrix::unit(2, 1, 1).unwrap()).unwrap().to_dmatrix()
}

#[test]
fn referees_ignoring_bob_have_max_eigen_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for i in 0..6 {
        let n = 1 + i % 2;
        let alice = random_mixing_decision(&mut rng, n, 3 - n, 20);
        let q = ignoring_bob(n, 1, &alice);
        let a = alice_accept(&alice);

        let qrg = qrg_value(&Referee::qrg(n, 1, q.clone()).unwrap(), TOL).unwrap();
        let lam = max_eigen(&a).unwrap().value;
        assert!((qrg.value - lam).abs() <= 1e-3, "{} vs {lam}", qrg.value);

        let cq = cqrg_value(&Referee::cqrg(n, 1, q).unwrap(), TOL).unwrap();
        let best_diag = (0..a.nrows()).map(|k| a[(k, k)].re).fold(f64::MIN, f64::max);
        assert!((cq.value - best_diag).abs() <= 1e-3);
    }
}

#[test]
fn mqrg_with_identity_measurement_matches_cqrg() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..6 {
        let c = mixing_cqrg(&mut rng, 1, 1, 25);
        let m = Referee::mqrg(1, 1, 1, Circuit::identity(1), c.q_circuit().clone()).unwrap();
        let a = cqrg_value(&c, TOL).unwrap();
        let b = mqrg_value(&m, TOL).unwrap();
        assert!((a.value - b.value).abs() <= 2.0 * TOL);
    }
    let rej = Referee::mqrg(1, 1, 1, Circuit::identity(1), catalog::constant_decision(2, false))
        .unwrap();
    assert!(mqrg_value(&rej, TOL).unwrap().value.abs() < 1e-12);
}

#[test]
fn mqrg_hadamard_measurement_bits_equal_by_grid_search() {
    let q = catalog::bits_equal().unwrap().q_circuit().clone();
    let r = Referee::mqrg(1, 1, 1, Circuit::new(1, vec![Gate::Hadamard(0)]), q).unwrap();
    let rep = mqrg_value(&r, TOL).unwrap();
    let s = effect_operators(&r).unwrap();
    let povm: Vec<_> = measurement_operators(r.p_circuit().unwrap())
        .unwrap()
        .iter()
        .map(|m| m.to_dmatrix())
        .collect();
    let mut best = f64::MIN;
    let steps = 200;
    for i in 0..=steps {
        let theta = std::f64::consts::PI * i as f64 / steps as f64;
        for j in 0..=steps {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / steps as f64;
            let v = nalgebra::DVector::from_vec(vec![
                c((theta / 2.0).cos()),
                Complex64::from_polar((theta / 2.0).sin(), phi),
            ]);
            let rho = &v * v.adjoint();
            let w: Vec<f64> = povm.iter().map(|m| trace_product(m, &rho)).collect();
            best = best.max(min_eigen(&s.weighted(&w)).unwrap().value);
        }
    }
    assert!((best - 0.5).abs() < 1e-3);
    assert!((rep.value - best).abs() <= 1e-3);
}

#[test]
fn qrg_always_accept_and_matching_pennies() {
    let acc = Referee::qrg(1, 1, catalog::constant_decision(2, true)).unwrap();
    assert!((qrg_value(&acc, TOL).unwrap().value - 1.0).abs() < 1e-12);
    let mp = qrg_value(&catalog::matching_pennies().unwrap(), TOL).unwrap();
    assert!(mp.converged && (mp.value - 0.5).abs() <= TOL);
    let sw = qrg_value(&swap_roles(&catalog::matching_pennies().unwrap()).unwrap(), TOL).unwrap();
    assert!((sw.value - 0.5).abs() <= TOL);
}

#[test]
fn swap_roles_complements_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for i in 0..20 {
        let (n, m) = (1 + i % 2, 1 + (i / 2) % 2);
        let r = mixing_qrg(&mut rng, n, m, 25);
        let a = qrg_value(&r, TOL).unwrap();
        let b = qrg_value(&swap_roles(&r).unwrap(), TOL).unwrap();
        assert!(a.converged && b.converged);
        assert!((a.value + b.value - 1.0).abs() <= 2.0 * TOL, "{} {}", a.value, b.value);
    }
}

#[test]
fn max_min_equals_min_max() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let opts = SolverOptions { tol: TOL, ..Default::default() };
    for i in 0..20 {
        let (n, m) = (1 + i % 2, 1 + (i / 3) % 2);
        let cq = mixing_cqrg(&mut rng, n, m, 25);
        let s = effect_operators(&cq).unwrap();
        let g = ClassicalGame { effects: &s };
        let max_min = solve(&g, &opts).unwrap();
        let min_max = solve(&Exchanged(&g), &opts).unwrap();
        assert!((max_min.value() - (1.0 - min_max.value())).abs() <= 2.0 * TOL);

        let q = quantum_game(&mixing_qrg(&mut rng, n, m, 25)).unwrap();
        let max_min = solve(&q, &opts).unwrap();
        let min_max = solve(&Exchanged(&q), &opts).unwrap();
        assert!((max_min.value() - (1.0 - min_max.value())).abs() <= 2.0 * TOL);
    }
}

#[test]
fn certificates_sandwich_value_and_best_response() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for i in 0..10 {
        let r = mixing_cqrg(&mut rng, 1 + i % 2, 1, 25);
        let rep = cqrg_value(&r, TOL).unwrap();
        assert!(rep.lower <= rep.value + 1e-15 && rep.value <= rep.upper + 1e-15);
        assert!((0.0..=1.0).contains(&rep.value));
        assert!(rep.duality_gap <= TOL);

        let s = effect_operators(&r).unwrap();
        let Strategy::Distribution(p) = &rep.alice_strategy else { panic!() };
        let bob_op = s.weighted(&p.dense(r.alice()).unwrap());
        let sigma = rep.bob_strategy.matrix();
        let proj = min_eigen(&bob_op).unwrap();
        let with_proj = proj.value;
        assert!(with_proj <= trace_product(&bob_op, sigma) + TOL);
        assert!((with_proj - rep.lower).abs() < 1e-9);
        let dual = s.floats().iter().map(|sy| trace_product(sy, sigma)).fold(f64::MIN, f64::max);
        assert!((dual - rep.upper).abs() < 1e-9);
    }
}

#[test]
fn extra_message_never_lowers_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let opts = SolverOptions { tol: TOL, ..Default::default() };
    for _ in 0..8 {
        let r = mixing_cqrg(&mut rng, 1, 1, 25);
        let s = effect_operators(&r).unwrap();
        let only_zero = EffectOperators::from_exact(1, 1, vec![s.exact(0).clone(); 2]).unwrap();
        let full = solve(&ClassicalGame { effects: &s }, &opts).unwrap();
        let restricted = solve(&ClassicalGame { effects: &only_zero }, &opts).unwrap();
        assert!(full.value() >= restricted.value() - TOL);
    }
}

#[test]
fn width_caps_are_enforced() {
    let big = Referee::qrg(5, 4, catalog::constant_decision(9, true)).unwrap();
    assert!(matches!(
        qrg_value(&big, TOL),
        Err(qrg_core::Error::CapExceeded { required: 9, cap: 8, .. })
    ));
}
