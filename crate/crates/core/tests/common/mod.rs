#![allow(dead_code)]

use num_complex::Complex64;
use qrg_core::catalog;
use qrg_core::circuit::{not_gates, Circuit, Gate, Referee};
use qrg_core::exact::{DyadicGaussian, ExactMatrix};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn dg(re: i64, im: i64, r: u32) -> DyadicGaussian {
    DyadicGaussian::new(re, im, r)
}

/// Random gate list on `inputs` qubits never exceeding `max_live` live qubits.
pub fn random_circuit<R: Rng>(
    rng: &mut R,
    inputs: usize,
    gates: usize,
    max_live: usize,
    unitary_only: bool,
) -> Circuit {
    let mut live = inputs;
    let mut out = Vec::with_capacity(gates);
    while out.len() < gates {
        let g = match rng.gen_range(0..5) {
            0 if live >= 1 => Gate::Hadamard(rng.gen_range(0..live)),
            1 if live >= 1 => Gate::Phase(rng.gen_range(0..live)),
            2 if live >= 3 => {
                let mut w: Vec<usize> = (0..live).collect();
                w.shuffle(rng);
                Gate::Toffoli(w[0], w[1], w[2])
            }
            3 if !unitary_only && live < max_live => Gate::Ancilla,
            4 if !unitary_only && live >= 1 => Gate::Erasure(rng.gen_range(0..live)),
            _ => continue,
        };
        live = (live as isize + g.live_delta()) as usize;
        out.push(g);
    }
    Circuit::new(inputs, out)
}

/// Random decision circuit on `inputs` qubits with exactly one output.
pub fn random_decision<R: Rng>(rng: &mut R, inputs: usize, gates: usize, max_live: usize) -> Circuit {
    let c = random_circuit(rng, inputs, gates, max_live, false);
    let mut gs = c.gates().to_vec();
    let mut live = c.outputs();
    if live == 0 {
        gs.push(Gate::Ancilla);
        gs.push(Gate::Hadamard(0));
        live = 1;
    }
    while live > 1 {
        gs.push(Gate::Erasure(rng.gen_range(0..live)));
        live -= 1;
    }
    Circuit::new(inputs, gs)
}

pub fn random_qrg<R: Rng>(rng: &mut R, n: usize, m: usize, gates: usize) -> Referee {
    let q = random_decision(rng, n + m, gates, (n + m + 2).min(6));
    Referee::qrg(n, m, q).unwrap()
}

/// Random Hermitian matrix with small dyadic entries and trace exactly one.
pub fn random_trace_one_hermitian<R: Rng>(rng: &mut R, q: usize) -> ExactMatrix {
    let d = 1usize << q;
    let mut m = ExactMatrix::zeros(d, d).unwrap();
    let mut diag_sum = DyadicGaussian::zero();
    for i in 0..d {
        for j in i..d {
            if i == j {
                if i + 1 < d {
                    let v = dg(rng.gen_range(0..8), 0, 3);
                    diag_sum += &v;
                    m.set(i, i, v);
                }
            } else {
                let v = dg(rng.gen_range(-4..=4), rng.gen_range(-4..=4), 4);
                m.set(j, i, v.conj());
                m.set(i, j, v);
            }
        }
    }
    m.set(d - 1, d - 1, &DyadicGaussian::one() - &diag_sum);
    m
}

/// Random positive semidefinite dyadic matrix `A A†` (not normalized).
pub fn random_psd<R: Rng>(rng: &mut R, q: usize) -> ExactMatrix {
    let d = 1usize << q;
    let a = ExactMatrix::from_fn(d, d, |_, _| dg(rng.gen_range(-3..=3), rng.gen_range(-3..=3), 2)).unwrap();
    a.mul(&a.adjoint()).unwrap()
}

/// Random complex Hermitian matrix in floating point.
pub fn random_hermitian_f64<R: Rng>(rng: &mut R, d: usize) -> nalgebra::DMatrix<Complex64> {
    let a = nalgebra::DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Random density matrix `A A† / Tr(A A†)`.
pub fn random_density_f64<R: Rng>(rng: &mut R, d: usize) -> nalgebra::DMatrix<Complex64> {
    let a = nalgebra::DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let p = &a * a.adjoint();
    let t = p.trace();
    p / t
}

pub fn random_cqrg<R: Rng>(rng: &mut R, n: usize, m: usize, gates: usize) -> Referee {
    let q = random_decision(rng, n + m, gates, (n + m + 2).min(6));
    Referee::cqrg(n, m, q).unwrap()
}

/// Decision circuit on `n + m` inputs that discards the last `m` wires and
/// runs `alice` (one output) on the first `n`.
pub fn ignoring_bob(n: usize, m: usize, alice: &Circuit) -> Circuit {
    let mut gates: Vec<Gate> = (0..m).map(|_| Gate::Erasure(n)).collect();
    gates.extend_from_slice(alice.gates());
    Circuit::new(n + m, gates)
}

/// Number of eigenvalues of Hermitian `m` below `x`, by counting negative
/// pivots of an LDL† factorization of `m − xI` (Sylvester's law of inertia).
pub fn count_below(m: &nalgebra::DMatrix<Complex64>, x: f64) -> usize {
    let n = m.nrows();
    let mut a = m.clone();
    for i in 0..n {
        a[(i, i)] -= Complex64::new(x, 0.0);
    }
    let mut negatives = 0;
    for k in 0..n {
        let mut pivot = a[(k, k)].re;
        if pivot == 0.0 {
            pivot = -1e-300;
        }
        if pivot < 0.0 {
            negatives += 1;
        }
        for i in k + 1..n {
            let l = a[(i, k)] / pivot;
            for j in k + 1..n {
                let v = l * a[(k, j)];
                a[(i, j)] -= v;
            }
        }
    }
    negatives
}

/// Smallest eigenvalue by bisection on [`count_below`].
pub fn bisection_min_eig(m: &nalgebra::DMatrix<Complex64>) -> f64 {
    let bound = m.iter().map(|z| z.norm()).sum::<f64>() + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(m, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Decision circuit with `ancillas` fresh wires, a run of `gates` random
/// unitary gates over all wires, then erasure of every wire but one.
pub fn random_mixing_decision<R: Rng>(rng: &mut R, inputs: usize, ancillas: usize, gates: usize) -> Circuit {
    let live = inputs + ancillas;
    let mut gs: Vec<Gate> = (0..ancillas).map(|_| Gate::Ancilla).collect();
    let body = random_circuit(rng, live, gates, live, true);
    gs.extend_from_slice(body.gates());
    let keep = rng.gen_range(0..live);
    for w in (0..live).rev() {
        if w != keep {
            gs.push(Gate::Erasure(w));
        }
    }
    Circuit::new(inputs, gs)
}

pub fn mixing_qrg<R: Rng>(rng: &mut R, n: usize, m: usize, gates: usize) -> Referee {
    let a = if n + m < 3 { 3 - n - m } else { 0 };
    Referee::qrg(n, m, random_mixing_decision(rng, n + m, a, gates)).unwrap()
}

pub fn mixing_cqrg<R: Rng>(rng: &mut R, n: usize, m: usize, gates: usize) -> Referee {
    let a = if n + m < 3 { 3 - n - m } else { 0 };
    Referee::cqrg(n, m, random_mixing_decision(rng, n + m, a, gates)).unwrap()
}

/// Appends a fair coin to a one-output decision and outputs their OR, so
/// every effect operator `S` becomes `(I + S)/2`.
pub fn or_coin(c: &Circuit) -> Circuit {
    // OR as NOT(AND(NOT a, NOT b)) into a fresh wire 2.
    let mut or = vec![Gate::Ancilla, Gate::Hadamard(1), Gate::Ancilla];
    or.extend(not_gates(0));
    or.extend(not_gates(1));
    or.push(Gate::Toffoli(0, 1, 2));
    or.extend(not_gates(2));
    or.push(Gate::Erasure(1));
    or.push(Gate::Erasure(0));
    c.then(&Circuit::new(1, or)).unwrap()
}

/// Alice and Bob each send one bit; Alice wins if they are equal, otherwise
/// with probability 1/2. `S_0 = diag(1, 1/2)`, `S_1 = diag(1/2, 1)`, value 3/4.
pub fn equal_or_coin() -> Referee {
    let r = catalog::bits_equal().unwrap();
    Referee::cqrg(1, 1, or_coin(r.q_circuit())).unwrap()
}
