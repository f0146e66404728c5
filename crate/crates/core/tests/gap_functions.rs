mod common;

use std::collections::HashMap;

use common::*;
use proptest::prelude::*;
use qrg_core::circuit::Circuit;
use qrg_core::exact::{DyadicGaussian, ExactMatrix};
use qrg_core::gap::*;
use qrg_core::natural::circuit_rep;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn b(s: &str) -> BitString {
    s.parse().unwrap()
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn key(seed: u64, x: &BitString, w: &BitString) -> u64 {
    mix(seed ^ mix(x.to_u64() ^ ((x.len() as u64) << 56)) ^ mix(w.to_u64().wrapping_mul(31) ^ ((w.len() as u64) << 48)))
}

/// Pseudo-random predicate pair; the two sets may overlap.
fn random_gap(seed: u64, len: usize) -> GapFunction {
    GapFunction::new(
        format!("random-{seed}"),
        move |_| len,
        move |x, w| key(seed, x, w) % 3 == 0,
        move |x, w| key(seed ^ 0xabcdef, x, w) % 4 == 0,
    )
}

#[test]
fn pairing_length_depends_only_on_lengths() {
    let strings: Vec<BitString> = (0..=8).flat_map(BitString::all).collect();
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    for x in &strings {
        for y in &strings {
            let l = pair_encode(x, y).len();
            let e = *seen.entry((x.len(), y.len())).or_insert(l);
            assert_eq!(e, l);
            assert_eq!(l, pair_len(x.len(), y.len()));
        }
    }
    assert_eq!(seen.len(), 81);
}

proptest! {
    #[test]
    fn pairing_round_trip(x in proptest::collection::vec(any::<bool>(), 0..12),
                          y in proptest::collection::vec(any::<bool>(), 0..12),
                          z in proptest::collection::vec(any::<bool>(), 0..12)) {
        let (x, y, z) = (BitString::new(x), BitString::new(y), BitString::new(z));
        prop_assert_eq!(pair_decode(&pair_encode(&x, &y)).unwrap(), (x.clone(), y.clone()));
        let t = tuple_encode(&[&x, &y, &z]);
        prop_assert_eq!(tuple_decode(&t, 3).unwrap(), vec![x, y, z]);
    }

    #[test]
    fn eval_is_deterministic(seed in any::<u64>(), x in proptest::collection::vec(any::<bool>(), 0..6)) {
        let f = random_gap(seed, 6);
        let x = BitString::new(x);
        prop_assert_eq!(f.eval(&x).unwrap(), f.eval(&x).unwrap());
    }
}

#[test]
fn sum_matches_direct_double_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for i in 0..100 {
        let f = random_gap(rng.gen(), 1 + i % 5);
        let p = i % 4;
        let x = BitString::from_u64(rng.gen(), i % 3);
        let direct: i64 = BitString::all(p).map(|y| f.eval(&pair_encode(&x, &y)).unwrap()).sum();
        assert_eq!(gap_sum(&f, p).eval(&x).unwrap(), direct);
    }
}

#[test]
fn product_matches_direct_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for i in 0..100 {
        let len = 1 + i % 4;
        let p = i % 5;
        if p * len > 16 {
            continue;
        }
        let f = random_gap(rng.gen(), len);
        let x = BitString::from_u64(rng.gen(), i % 3);
        let direct: i64 = BitString::one_hot(p)
            .iter()
            .map(|y| f.eval(&pair_encode(&x, y)).unwrap())
            .product();
        assert_eq!(gap_product(&f, p).eval(&x).unwrap(), direct, "case {i}");
    }
}

type Entry = (i64, i64);

fn matrix_spec(mats: Vec<Vec<Vec<Entry>>>, p: usize) -> GapMatrixSpec {
    let q = mats.len();
    let mats = std::sync::Arc::new(mats);
    let part = |imag: bool| {
        let mats = mats.clone();
        GapFunction::from_values("entry", 2, move |s| {
            let parts = tuple_decode(s, 4).unwrap();
            let k = parts[1].one_hot_rank().unwrap();
            let (z, w) = (parts[2].to_u64() as usize, parts[3].to_u64() as usize);
            let e = mats[k - 1][z][w];
            if imag { e.1 } else { e.0 }
        })
    };
    GapMatrixSpec { real: part(false), imag: part(true), side_log: p, factors: q }
}

#[test]
fn matrix_product_matches_exact_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for case in 0..100 {
        let (p, q) = if case % 4 == 3 { (2, 2) } else { (1, 1 + case % 3) };
        let d = 1usize << p;
        let mats: Vec<Vec<Vec<Entry>>> = (0..q)
            .map(|_| (0..d).map(|_| (0..d).map(|_| (rng.gen_range(-3..=3), rng.gen_range(-3..=3))).collect()).collect())
            .collect();
        let mut product = ExactMatrix::identity(d).unwrap();
        for m in &mats {
            let e = ExactMatrix::from_fn(d, d, |r, c| DyadicGaussian::new(m[r][c].0, m[r][c].1, 0)).unwrap();
            product = product.mul(&e).unwrap();
        }
        let (g0, g1) = gap_matrix_product(&matrix_spec(mats, p)).unwrap();
        let x = BitString::from_u64(case as u64, case % 2);
        let (z, w) = (rng.gen_range(0..d), rng.gen_range(0..d));
        let inp = tuple_encode(&[&x, &BitString::from_u64(z as u64, p), &BitString::from_u64(w as u64, p)]);
        let expected = product.get(z, w);
        assert_eq!(DyadicGaussian::new(g0.eval(&inp).unwrap(), g1.eval(&inp).unwrap(), 0), *expected, "case {case}");
    }
}

fn entry_bits(i: usize, q: usize) -> BitString {
    BitString::from_u64(i as u64, q)
}

#[test]
fn circuit_gap_matches_natural_rep_on_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let mut checked = 0;
    for i in 0..40 {
        let inputs = 1 + i % 2;
        let c = random_circuit(&mut rng, inputs, 2 + i % 3, 3, false);
        let k = c.outputs();
        if c.size() + c.gates().len() > 16 {
            continue;
        }
        let rep = circuit_rep(&c).unwrap();
        let (d_in, d_out) = (1usize << inputs, 1usize << k);
        for row in 0..d_out * d_out {
            for col in 0..d_in * d_in {
                let g = circuit_amplitude_gap(
                    &c,
                    &entry_bits(col / d_in, inputs),
                    &entry_bits(col % d_in, inputs),
                    &entry_bits(row / d_out, k),
                    &entry_bits(row % d_out, k),
                )
                .unwrap();
                assert_eq!(DyadicGaussian::new(g.f0, g.f1, g.r), *rep.matrix().get(row, col), "{c:?}");
            }
        }
        checked += 1;
    }
    assert!(checked >= 30, "only {checked} circuits within cap");
}

#[test]
fn two_qubit_four_gate_circuits_all_entries() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..3 {
        let c = random_circuit(&mut rng, 2, 4, 2, true);
        let rep = circuit_rep(&c).unwrap();
        for row in 0..16 {
            for col in 0..16 {
                let g = circuit_amplitude_gap(&c, &entry_bits(col / 4, 2), &entry_bits(col % 4, 2), &entry_bits(row / 4, 2), &entry_bits(row % 4, 2)).unwrap();
                assert_eq!(DyadicGaussian::new(g.f0, g.f1, g.r), *rep.matrix().get(row, col));
            }
        }
    }
}

#[test]
fn circuit_gap_cap_reports_required_length() {
    let c = Circuit::new(3, vec![qrg_core::circuit::Gate::Hadamard(0); 8]);
    let z = b("000");
    match circuit_amplitude_gap(&c, &z, &z, &z, &z) {
        Err(qrg_core::Error::CapExceeded { required, cap: 20, .. }) => assert_eq!(required, 2 * 8 + 6),
        other => panic!("unexpected {other:?}"),
    }
}

/// Toy promise problem: yes instances have more ones than zeros, no instances
/// fewer. The gap function counts (ones − zeros); its sign decides exactly
/// the promise side, matching the existence criterion on every instance.
#[test]
fn sign_decision_bridge() {
    let g = GapFunction::from_values("ones-minus-zeros", 4, |x| {
        x.count_ones() as i64 - (x.len() - x.count_ones()) as i64
    });
    for len in 0..=7 {
        for x in BitString::all(len) {
            let diff = 2 * x.count_ones() as i64 - len as i64;
            if diff == 0 {
                continue; // outside the promise
            }
            assert_eq!(gap_positive(&g, &x).unwrap(), diff > 0, "{x}");
        }
    }
}
