use std::sync::Arc;

use serde::Serialize;

use super::{tuple_decode, tuple_encode, BitString, GapFunction};
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

/// `⟨uv| K(c) |zw⟩ = (f0 + i·f1) / 2^r` with `r` the circuit size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CircuitGap {
    pub f0: i64,
    pub f1: i64,
    pub r: u32,
}

/// Follows one path through the natural representation. Each gate consumes
/// two witness bits: a Hadamard uses them to choose its new row and column
/// bits; every other gate is deterministic, ignores the first bit and
/// requires the second to be 0. Returns the path's phase as a power of `i`.
fn path_phase(c: &Circuit, zwuv: &[BitString], wit: &BitString) -> Option<u8> {
    let (z, w, u, v) = (&zwuv[0], &zwuv[1], &zwuv[2], &zwuv[3]);
    if z.len() != c.inputs() || w.len() != c.inputs() || u.len() != c.outputs() || v.len() != c.outputs() {
        return None;
    }
    let mut row = z.bits().to_vec();
    let mut col = w.bits().to_vec();
    let mut phase = 0u8;
    for (k, g) in c.gates().iter().enumerate() {
        let (b1, b2) = (wit.get(2 * k), wit.get(2 * k + 1));
        if let Gate::Hadamard(q) = *g {
            let (r, s) = (row[q], col[q]);
            if (r & b1) ^ (s & b2) {
                phase += 2;
            }
            row[q] = b1;
            col[q] = b2;
            continue;
        }
        if b2 {
            return None;
        }
        match *g {
            Gate::Phase(q) => match (row[q], col[q]) {
                (false, true) => phase += 3,
                (true, false) => phase += 1,
                _ => {}
            },
            Gate::Toffoli(a, b, t) => {
                if row[a] && row[b] {
                    row[t] = !row[t];
                }
                if col[a] && col[b] {
                    col[t] = !col[t];
                }
            }
            Gate::Ancilla => {
                row.push(false);
                col.push(false);
            }
            Gate::Erasure(q) => {
                if row[q] != col[q] {
                    return None;
                }
                row.remove(q);
                col.remove(q);
            }
            Gate::Hadamard(_) => unreachable!(),
        }
    }
    (row == u.bits() && col == v.bits()).then_some(phase % 4)
}

/// Gap functions `(f0, f1)` on inputs `⟨z, w, u, v⟩` with
/// `Re⟨uv|K(c)|zw⟩ = f0 / 2^r` and `Im⟨uv|K(c)|zw⟩ = f1 / 2^r`, `r` the
/// circuit size. Witnesses have `2·#gates + inputs + outputs` bits; the last
/// `inputs + outputs` are free and scale every path to the common `2^r`.
pub fn circuit_gap_functions(c: &Circuit) -> Result<(GapFunction, GapFunction, u32)> {
    c.validate()?;
    let r = c.size() as u32;
    let len = 2 * c.gates().len() + c.inputs() + c.outputs();
    let c = Arc::new(c.clone());
    let part = |label: &str, plus: u8| {
        let (c1, c2) = (c.clone(), c.clone());
        let phase = move |c: &Circuit, x: &BitString, w: &BitString| {
            tuple_decode(x, 4).ok().and_then(|p| path_phase(c, &p, w))
        };
        GapFunction::new(
            label,
            move |_| len,
            move |x, w| phase(&c1, x, w) == Some(plus),
            move |x, w| phase(&c2, x, w) == Some(plus + 2),
        )
    };
    Ok((part("circuit-real", 0), part("circuit-imag", 1), r))
}

/// Evaluates both circuit gap functions at one matrix entry in a single
/// enumeration of the witnesses.
pub fn circuit_amplitude_gap(
    c: &Circuit,
    z: &BitString,
    w: &BitString,
    u: &BitString,
    v: &BitString,
) -> Result<CircuitGap> {
    let (f0, _, r) = circuit_gap_functions(c)?;
    if z.len() != c.inputs() || w.len() != c.inputs() {
        return Err(Error::dims("input index strings must have one bit per input qubit"));
    }
    if u.len() != c.outputs() || v.len() != c.outputs() {
        return Err(Error::dims("output index strings must have one bit per output qubit"));
    }
    let x = tuple_encode(&[z, w, u, v]);
    let len = f0.witness_len(x.len());
    f0.enumeration_size(&x)?;
    let parts = [z.clone(), w.clone(), u.clone(), v.clone()];
    let mut counts = [0i64; 4];
    for wit in BitString::all(len) {
        if let Some(ph) = path_phase(c, &parts, &wit) {
            counts[ph as usize] += 1;
        }
    }
    Ok(CircuitGap {
        f0: counts[0] - counts[2],
        f1: counts[1] - counts[3],
        r,
    })
}
