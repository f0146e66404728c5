//! Self-check suite: every combinator against direct semantic evaluation on
//! seeded random instances, and circuit path sums against the natural
//! representation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::*;
use crate::circuit::{Circuit, Gate};
use crate::exact::{DyadicGaussian, ExactMatrix};
use crate::natural::circuit_rep;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteCheck {
    pub name: &'static str,
    pub instances: usize,
    pub mismatches: usize,
    /// Number of witnesses enumerated by the combinator side.
    pub witnesses: u64,
    /// First mismatch, if any.
    pub detail: Option<String>,
}

impl SuiteCheck {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub checks: Vec<SuiteCheck>,
    pub passed: bool,
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn key(seed: u64, x: &BitString, w: &BitString) -> u64 {
    let xk = mix(x.to_u64() ^ ((x.len() as u64) << 56));
    let wk = mix(w.to_u64().wrapping_mul(31) ^ ((w.len() as u64) << 48));
    mix(seed ^ xk ^ wk)
}

/// Pseudo-random pair of witness predicates with fixed witness length; the
/// two sets may overlap.
pub fn random_gap(seed: u64, len: usize) -> GapFunction {
    GapFunction::new(
        format!("random-{seed:x}"),
        move |_| len,
        move |x, w| key(seed, x, w) % 3 == 0,
        move |x, w| key(seed ^ 0xabcdef, x, w) % 4 == 0,
    )
}

/// Random gate list on `inputs` qubits with at most `max_live` live qubits.
pub fn random_circuit<R: Rng>(rng: &mut R, inputs: usize, gates: usize, max_live: usize) -> Circuit {
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
            3 if live < max_live => Gate::Ancilla,
            4 if live >= 1 => Gate::Erasure(rng.gen_range(0..live)),
            _ => continue,
        };
        live = (live as isize + g.live_delta()) as usize;
        out.push(g);
    }
    Circuit::new(inputs, out)
}

struct Tally {
    check: SuiteCheck,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            check: SuiteCheck {
                name,
                instances: 0,
                mismatches: 0,
                witnesses: 0,
                detail: None,
            },
        }
    }

    fn record(&mut self, ok: bool, witnesses: u64, detail: impl FnOnce() -> String) {
        self.check.instances += 1;
        self.check.witnesses += witnesses;
        if !ok {
            self.check.mismatches += 1;
            self.check.detail.get_or_insert_with(detail);
        }
    }
}

fn pairing_check() -> SuiteCheck {
    let mut t = Tally::new("pairing");
    for (x, y, want) in [("", "", "1"), ("1", "0", "0110"), ("10", "1", "010011")] {
        let (x, y): (BitString, BitString) = (x.parse().unwrap(), y.parse().unwrap());
        let got = pair_encode(&x, &y);
        t.record(got.to_string() == want, 0, || format!("⟨{x},{y}⟩ = {got}, want {want}"));
    }
    for lx in 0..=4 {
        for ly in 0..=4 {
            for x in BitString::all(lx) {
                for y in BitString::all(ly) {
                    let e = pair_encode(&x, &y);
                    let ok = e.len() == pair_len(lx, ly)
                        && pair_decode(&e).is_ok_and(|(a, b)| a == x && b == y);
                    t.record(ok, 0, || format!("pairing round trip failed on ({x}, {y})"));
                }
            }
        }
    }
    t.check
}

fn sum_check(rng: &mut ChaCha8Rng, n: usize) -> Result<SuiteCheck> {
    let mut t = Tally::new("exponential-sum");
    for i in 0..n {
        let f = random_gap(rng.gen(), 1 + i % 5);
        let p = i % 4;
        let x = BitString::from_u64(rng.gen(), i % 3);
        let mut direct = 0;
        for y in BitString::all(p) {
            direct += f.eval(&pair_encode(&x, &y))?;
        }
        let g = gap_sum(&f, p);
        let got = g.eval(&x)?;
        t.record(got == direct, g.enumeration_size(&x)?, || {
            format!("case {i}: combinator {got}, direct {direct}")
        });
    }
    Ok(t.check)
}

fn product_check(rng: &mut ChaCha8Rng, n: usize) -> Result<SuiteCheck> {
    let mut t = Tally::new("polynomial-product");
    let mut i = 0;
    while t.check.instances < n {
        let len = 1 + i % 4;
        let p = i % 5;
        i += 1;
        if p * len > 16 {
            continue;
        }
        let f = random_gap(rng.gen(), len);
        let x = BitString::from_u64(rng.gen(), i % 3);
        let mut direct = 1;
        for y in BitString::one_hot(p) {
            direct *= f.eval(&pair_encode(&x, &y))?;
        }
        let g = gap_product(&f, p);
        let got = g.eval(&x)?;
        t.record(got == direct, g.enumeration_size(&x)?, || {
            format!("case {i}: combinator {got}, direct {direct}")
        });
    }
    Ok(t.check)
}

type Entry = (i64, i64);

fn matrix_spec(mats: Vec<Vec<Vec<Entry>>>, p: usize) -> GapMatrixSpec {
    let q = mats.len();
    let mats = Arc::new(mats);
    let part = |imag: bool| {
        let mats = mats.clone();
        GapFunction::from_values("entry", 2, move |s| {
            let Ok(parts) = tuple_decode(s, 4) else { return 0 };
            let Some(k) = parts[1].one_hot_rank() else { return 0 };
            let (z, w) = (parts[2].to_u64() as usize, parts[3].to_u64() as usize);
            let e = mats[k - 1][z][w];
            if imag {
                e.1
            } else {
                e.0
            }
        })
    };
    GapMatrixSpec {
        real: part(false),
        imag: part(true),
        side_log: p,
        factors: q,
    }
}

fn matrix_check(rng: &mut ChaCha8Rng, n: usize) -> Result<SuiteCheck> {
    let mut t = Tally::new("matrix-product");
    for case in 0..n {
        let (p, q) = if case % 4 == 3 { (2, 2) } else { (1, 1 + case % 3) };
        let d = 1usize << p;
        let mats: Vec<Vec<Vec<Entry>>> = (0..q)
            .map(|_| {
                (0..d)
                    .map(|_| (0..d).map(|_| (rng.gen_range(-3..=3), rng.gen_range(-3..=3))).collect())
                    .collect()
            })
            .collect();
        let mut product = ExactMatrix::identity(d)?;
        for m in &mats {
            let e = ExactMatrix::from_fn(d, d, |r, c| DyadicGaussian::new(m[r][c].0, m[r][c].1, 0))?;
            product = product.mul(&e)?;
        }
        let (g0, g1) = gap_matrix_product(&matrix_spec(mats, p))?;
        let x = BitString::from_u64(case as u64, case % 2);
        let (z, w) = (rng.gen_range(0..d), rng.gen_range(0..d));
        let inp = tuple_encode(&[&x, &BitString::from_u64(z as u64, p), &BitString::from_u64(w as u64, p)]);
        let got = DyadicGaussian::new(g0.eval(&inp)?, g1.eval(&inp)?, 0);
        let want = product.get(z, w).clone();
        let size = g0.enumeration_size(&inp)? + g1.enumeration_size(&inp)?;
        t.record(got == want, size, || format!("case {case}: combinator {got}, exact {want}"));
    }
    Ok(t.check)
}

fn index(i: usize, q: usize) -> BitString {
    BitString::from_u64(i as u64, q)
}

fn circuit_check(rng: &mut ChaCha8Rng, n: usize) -> Result<SuiteCheck> {
    let mut t = Tally::new("circuit-amplitude");
    let mut circuits = 0;
    for i in 0.. {
        if circuits == n {
            break;
        }
        let inputs = 1 + i % 2;
        let c = random_circuit(rng, inputs, 2 + i % 3, 3);
        let k = c.outputs();
        if 2 * c.gates().len() + c.inputs() + k > DEFAULT_CAP {
            continue;
        }
        circuits += 1;
        let rep = circuit_rep(&c)?;
        let (d_in, d_out) = (1usize << inputs, 1usize << k);
        for row in 0..d_out * d_out {
            for col in 0..d_in * d_in {
                let g = circuit_amplitude_gap(
                    &c,
                    &index(col / d_in, inputs),
                    &index(col % d_in, inputs),
                    &index(row / d_out, k),
                    &index(row % d_out, k),
                )?;
                let got = DyadicGaussian::new(g.f0, g.f1, g.r);
                let want = rep.matrix().get(row, col);
                let size = 1u64 << (2 * c.gates().len() + c.inputs() + k);
                t.record(got == *want, size, || {
                    format!("circuit {i}, entry ({row}, {col}): path sum {got}, natural rep {want}")
                });
            }
        }
    }
    Ok(t.check)
}

/// Runs every check with `per_check` random instances each.
pub fn run_suite(seed: u64, per_check: usize) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = vec![
        pairing_check(),
        sum_check(&mut rng, per_check)?,
        product_check(&mut rng, per_check)?,
        matrix_check(&mut rng, per_check)?,
        circuit_check(&mut rng, per_check.min(30))?,
    ];
    let passed = checks.iter().all(SuiteCheck::passed);
    Ok(SuiteReport { seed, checks, passed })
}
