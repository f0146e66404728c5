//! Natural (Liouville) representation of circuits.
//!
//! `vec` maps a `2^q × 2^q` matrix `M` to the column vector whose entry at the
//! index string `yz` (row string then column string) is `⟨y|M|z⟩`. With
//! row-major storage this is the identity on the underlying data, so a
//! matrix and its vec share one layout. A channel `Φ` on `q` qubits into `q'`
//! qubits has the `4^{q'} × 4^{q}` matrix `K(Φ)` with `K(Φ) vec(ρ) = vec(Φ(ρ))`.

mod local;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::exact::{DyadicGaussian, ExactMatrix, MAX_SIDE};

use local::LocalOp;

/// Largest number of live qubits a gate-by-gate pass may reach; a pass
/// stores one `2^q × 2^q` operator.
pub const MAX_PASS_QUBITS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaturalRep {
    matrix: ExactMatrix,
    in_qubits: usize,
    out_qubits: usize,
}

impl NaturalRep {
    pub fn new(matrix: ExactMatrix, in_qubits: usize, out_qubits: usize) -> Result<Self> {
        if matrix.rows() != 1 << (2 * out_qubits) || matrix.cols() != 1 << (2 * in_qubits) {
            return Err(Error::dims(format!(
                "{}x{} matrix is not a map from {in_qubits} to {out_qubits} qubits",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(NaturalRep {
            matrix,
            in_qubits,
            out_qubits,
        })
    }

    pub fn identity(q: usize) -> Result<Self> {
        NaturalRep::new(ExactMatrix::identity(1 << (2 * q))?, q, q)
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.matrix
    }

    pub fn in_qubits(&self) -> usize {
        self.in_qubits
    }

    pub fn out_qubits(&self) -> usize {
        self.out_qubits
    }

    /// `self` after `first`: the representation of `self ∘ first`.
    pub fn after(&self, first: &NaturalRep) -> Result<NaturalRep> {
        if first.out_qubits != self.in_qubits {
            return Err(Error::dims("composed channels disagree on width"));
        }
        NaturalRep::new(
            self.matrix.mul(&first.matrix)?,
            first.in_qubits,
            self.out_qubits,
        )
    }

    /// Checks `vec(I_out)† K = vec(I_in)†` exactly.
    pub fn is_trace_preserving(&self) -> bool {
        let dout = 1usize << self.out_qubits;
        let din = 1usize << self.in_qubits;
        (0..self.matrix.cols()).all(|col| {
            let mut acc = DyadicGaussian::zero();
            for y in 0..dout {
                acc += self.matrix.get(y * dout + y, col);
            }
            let expected = if col / din == col % din { 1 } else { 0 };
            acc == DyadicGaussian::from_int(expected)
        })
    }

    /// Choi matrix `Σ_{ij} Φ(|i⟩⟨j|) ⊗ |i⟩⟨j|`, output register first.
    pub fn choi(&self) -> Result<ExactMatrix> {
        let dout = 1usize << self.out_qubits;
        let din = 1usize << self.in_qubits;
        ExactMatrix::from_fn(dout * din, dout * din, |r, c| {
            let (y, i) = (r / din, r % din);
            let (z, j) = (c / din, c % din);
            self.matrix.get(y * dout + z, i * din + j).clone()
        })
    }
}

fn side_qubits(m: &ExactMatrix) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::dims(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(m.rows().trailing_zeros() as usize)
}

/// Column vector of `M`'s entries indexed by (row string, column string).
pub fn vec(m: &ExactMatrix) -> Result<ExactMatrix> {
    side_qubits(m)?;
    let n = m.rows() * m.cols();
    if n > MAX_SIDE {
        return Err(Error::DimensionCap { dim: n, max: MAX_SIDE });
    }
    Ok(ExactMatrix::from_raw(n, 1, m.entries().to_vec()))
}

/// Inverse of [`vec`]: reshapes a `4^q × 1` column into a `2^q × 2^q` matrix.
pub fn unvec(v: &ExactMatrix) -> Result<ExactMatrix> {
    if v.cols() != 1 || v.rows().trailing_zeros() % 2 != 0 {
        return Err(Error::dims(format!(
            "{}x{} is not the vec of a square matrix",
            v.rows(),
            v.cols()
        )));
    }
    let side = 1usize << (v.rows().trailing_zeros() / 2);
    Ok(ExactMatrix::from_raw(side, side, v.entries().to_vec()))
}

fn dg(re: i64, im: i64, r: u32) -> DyadicGaussian {
    DyadicGaussian::new(re, im, r)
}

/// Exact natural representation of one gate on its own wires.
pub fn gate_rep(kind: GateKind) -> NaturalRep {
    let (m, q_in, q_out) = match kind {
        GateKind::Hadamard => (
            ExactMatrix::from_ints(
                &[
                    &[1, 1, 1, 1],
                    &[1, -1, 1, -1],
                    &[1, 1, -1, -1],
                    &[1, -1, -1, 1],
                ],
                1,
            ),
            1,
            1,
        ),
        GateKind::Phase => (
            ExactMatrix::diagonal(vec![dg(1, 0, 0), dg(0, -1, 0), dg(0, 1, 0), dg(1, 0, 0)]),
            1,
            1,
        ),
        GateKind::Toffoli => {
            // Permutation exchanging |110⟩ and |111⟩ (target is the last wire).
            let perm = |s: usize| if s >= 6 { s ^ 1 } else { s };
            let m = ExactMatrix::from_fn(64, 64, |r, c| {
                let (ri, rj, ci, cj) = (r / 8, r % 8, c / 8, c % 8);
                if perm(ci) == ri && perm(cj) == rj {
                    DyadicGaussian::one()
                } else {
                    DyadicGaussian::zero()
                }
            });
            (m, 3, 3)
        }
        GateKind::Ancilla => (ExactMatrix::from_ints(&[&[1], &[0], &[0], &[0]], 0), 0, 1),
        GateKind::Erasure => (ExactMatrix::from_ints(&[&[1, 0, 0, 1]], 0), 1, 0),
    };
    NaturalRep::new(m.expect("gate matrices are well formed"), q_in, q_out)
        .expect("gate matrices have the right shape")
}

/// Input and output positions of a gate's local wires with `live` qubits
/// before it.
fn gate_wires(g: &Gate, live: usize) -> (Vec<usize>, Vec<usize>) {
    match *g {
        Gate::Ancilla => (vec![], vec![live]),
        Gate::Erasure(w) => (vec![w], vec![]),
        _ => (g.wires(), g.wires()),
    }
}

fn check_wires(wires: &[usize], live: usize) -> Result<()> {
    for (i, &w) in wires.iter().enumerate() {
        if w >= live {
            return Err(Error::dims(format!("wire {w} out of range for {live} qubits")));
        }
        if wires[..i].contains(&w) {
            return Err(Error::dims(format!("duplicate wire {w}")));
        }
    }
    Ok(())
}

/// Extends a local representation to the full register. The local input
/// wires sit at `wires_in` (of `live_in` qubits), the local outputs at
/// `wires_out`; all other qubits pass through in order.
pub fn lift(
    rep: &NaturalRep,
    wires_in: &[usize],
    wires_out: &[usize],
    live_in: usize,
) -> Result<NaturalRep> {
    if wires_in.len() != rep.in_qubits || wires_out.len() != rep.out_qubits {
        return Err(Error::dims("wire lists do not match the representation"));
    }
    if rep.in_qubits > live_in {
        return Err(Error::dims("gate acts on more qubits than are live"));
    }
    let live_out = live_in - rep.in_qubits + rep.out_qubits;
    check_wires(wires_in, live_in)?;
    check_wires(wires_out, live_out)?;
    let (rows, cols) = (1usize << (2 * live_out), 1usize << (2 * live_in));
    for d in [rows, cols] {
        if d > MAX_SIDE {
            return Err(Error::DimensionCap { dim: d, max: MAX_SIDE });
        }
    }
    let op = LocalOp::from_rep(&rep.matrix, rep.in_qubits, rep.out_qubits);
    let mut data = vec![DyadicGaussian::zero(); rows * cols];
    let mut unit = vec![DyadicGaussian::zero(); cols];
    for c in 0..cols {
        unit[c] = DyadicGaussian::one();
        let col = op.apply(wires_in, wires_out, live_in, &unit);
        unit[c] = DyadicGaussian::zero();
        for (r, v) in col.into_iter().enumerate() {
            data[r * cols + c] = v;
        }
    }
    NaturalRep::new(ExactMatrix::from_raw(rows, cols, data), live_in, live_out)
}

/// Lifts a single gate at a position with `live` qubits.
pub fn lift_gate(g: &Gate, live: usize) -> Result<NaturalRep> {
    let (wi, wo) = gate_wires(g, live);
    lift(&gate_rep(g.kind()), &wi, &wo, live)
}

fn check_pass(c: &Circuit, limit: usize) -> Result<()> {
    let report = c.validate()?;
    if report.max_live > limit {
        return Err(Error::CapExceeded {
            what: "live qubits in circuit",
            required: report.max_live as u64,
            cap: limit as u64,
        });
    }
    Ok(())
}

/// Exact natural representation of a circuit, `K(Q_r)···K(Q_1)`.
///
/// Every column `K vec(|i⟩⟨j|)` is pushed through the gates one at a time,
/// so no lifted gate matrix is ever materialized.
pub fn circuit_rep(c: &Circuit) -> Result<NaturalRep> {
    check_pass(c, MAX_SIDE.trailing_zeros() as usize / 2)?;
    let (q_in, q_out) = (c.inputs(), c.outputs());
    let (rows, cols) = (1usize << (2 * q_out), 1usize << (2 * q_in));
    let ops = StepOps::new();
    let mut data = vec![DyadicGaussian::zero(); rows * cols];
    for col in 0..cols {
        let mut v = vec![DyadicGaussian::zero(); cols];
        v[col] = DyadicGaussian::one();
        let out = ops.forward(c, v);
        for (r, x) in out.into_iter().enumerate() {
            data[r * cols + col] = x;
        }
    }
    NaturalRep::new(ExactMatrix::from_raw(rows, cols, data), q_in, q_out)
}

/// `unvec(K vec(ρ))`.
pub fn apply_channel(rep: &NaturalRep, rho: &ExactMatrix) -> Result<ExactMatrix> {
    if side_qubits(rho)? != rep.in_qubits {
        return Err(Error::dims(format!(
            "state on {} qubits, channel expects {}",
            side_qubits(rho)?,
            rep.in_qubits
        )));
    }
    unvec(&rep.matrix.mul(&vec(rho)?)?)
}

/// `Φ*(P) = unvec(K† vec(P†))†`, so that `Tr(P Φ(ρ)) = Tr(Φ*(P) ρ)`.
pub fn adjoint_apply(rep: &NaturalRep, effect: &ExactMatrix) -> Result<ExactMatrix> {
    if side_qubits(effect)? != rep.out_qubits {
        return Err(Error::dims(format!(
            "effect on {} qubits, channel outputs {}",
            side_qubits(effect)?,
            rep.out_qubits
        )));
    }
    let v = rep.matrix.adjoint().mul(&vec(&effect.adjoint())?)?;
    Ok(unvec(&v)?.adjoint())
}

/// Lifted gate steps of a circuit, shared by the forward and adjoint passes.
struct StepOps {
    forward: [LocalOp; 5],
    backward: [LocalOp; 5],
}

fn kind_index(k: GateKind) -> usize {
    match k {
        GateKind::Hadamard => 0,
        GateKind::Phase => 1,
        GateKind::Toffoli => 2,
        GateKind::Ancilla => 3,
        GateKind::Erasure => 4,
    }
}

const KINDS: [GateKind; 5] = [
    GateKind::Hadamard,
    GateKind::Phase,
    GateKind::Toffoli,
    GateKind::Ancilla,
    GateKind::Erasure,
];

impl StepOps {
    fn new() -> Self {
        let build = |adj: bool| {
            KINDS.map(|k| {
                let rep = gate_rep(k);
                let op = LocalOp::from_rep(&rep.matrix, rep.in_qubits, rep.out_qubits);
                if adj {
                    op.adjoint()
                } else {
                    op
                }
            })
        };
        StepOps {
            forward: build(false),
            backward: build(true),
        }
    }

    /// Schrödinger pass: `Φ(ρ)` on the row-major data of `ρ`.
    fn forward(&self, c: &Circuit, mut data: Vec<DyadicGaussian>) -> Vec<DyadicGaussian> {
        let mut live = c.inputs();
        for g in c.gates() {
            let (wi, wo) = gate_wires(g, live);
            data = self.forward[kind_index(g.kind())].apply(&wi, &wo, live, &data);
            live = (live as isize + g.live_delta()) as usize;
        }
        data
    }

    /// Heisenberg pass: `Φ*(P)` on the row-major data of `P`.
    fn backward(&self, c: &Circuit, mut data: Vec<DyadicGaussian>) -> Vec<DyadicGaussian> {
        let mut lives = Vec::with_capacity(c.gates().len());
        let mut live = c.inputs();
        for g in c.gates() {
            lives.push(live);
            live = (live as isize + g.live_delta()) as usize;
        }
        for (g, &live_in) in c.gates().iter().zip(&lives).rev() {
            let (wi, wo) = gate_wires(g, live_in);
            let live_out = (live_in as isize + g.live_delta()) as usize;
            data = self.backward[kind_index(g.kind())].apply(&wo, &wi, live_out, &data);
        }
        data
    }
}

/// `Φ(ρ)` for the channel of `c`, applied gate by gate.
pub fn simulate(c: &Circuit, rho: &ExactMatrix) -> Result<ExactMatrix> {
    check_pass(c, MAX_PASS_QUBITS)?;
    if side_qubits(rho)? != c.inputs() {
        return Err(Error::dims("state width does not match circuit inputs"));
    }
    let out = StepOps::new().forward(c, rho.entries().to_vec());
    let side = 1usize << c.outputs();
    Ok(ExactMatrix::from_raw(side, side, out))
}

/// `Φ*(P)` for the channel of `c`, applied gate by gate in reverse.
pub fn heisenberg(c: &Circuit, effect: &ExactMatrix) -> Result<ExactMatrix> {
    check_pass(c, MAX_PASS_QUBITS)?;
    if side_qubits(effect)? != c.outputs() {
        return Err(Error::dims("effect width does not match circuit outputs"));
    }
    let out = StepOps::new().backward(c, effect.entries().to_vec());
    let side = 1usize << c.inputs();
    Ok(ExactMatrix::from_raw(side, side, out))
}

/// Checks that `rho` is a density operator in the exact sense: square,
/// Hermitian and of trace exactly one.
pub fn check_density(rho: &ExactMatrix) -> Result<()> {
    side_qubits(rho)?;
    if !rho.is_hermitian() {
        return Err(Error::input("state is not Hermitian"));
    }
    if rho.trace()? != DyadicGaussian::one() {
        return Err(Error::input(format!("state has trace {}", rho.trace()?)));
    }
    Ok(())
}
