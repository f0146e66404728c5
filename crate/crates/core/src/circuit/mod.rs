//! Circuit intermediate representation over the gate set
//! {Hadamard, phase, Toffoli, ancilla, erasure}.
//!
//! Live qubits are numbered `0..ℓ`. An ancilla gate appends a fresh `|0⟩`
//! qubit at index `ℓ`; an erasure traces out its wire and shifts every higher
//! index down by one. Qubit 0 is the most significant bit of basis strings.

mod compose;
mod referee;
pub mod text;

use std::fmt;

use thiserror::Error;

pub(crate) use compose::Composer;
pub use referee::{compose_referee, swap_roles, Mode, PromiseSide, PromiseThresholds, Referee};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Hadamard,
    Phase,
    Toffoli,
    Ancilla,
    Erasure,
}

/// A gate together with the live-wire indices it acts on at its position.
/// Toffoli wires are `(control, control, target)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    Hadamard(usize),
    Phase(usize),
    Toffoli(usize, usize, usize),
    Ancilla,
    Erasure(usize),
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::Hadamard(_) => GateKind::Hadamard,
            Gate::Phase(_) => GateKind::Phase,
            Gate::Toffoli(..) => GateKind::Toffoli,
            Gate::Ancilla => GateKind::Ancilla,
            Gate::Erasure(_) => GateKind::Erasure,
        }
    }

    pub fn wires(&self) -> Vec<usize> {
        match *self {
            Gate::Hadamard(w) | Gate::Phase(w) | Gate::Erasure(w) => vec![w],
            Gate::Toffoli(a, b, c) => vec![a, b, c],
            Gate::Ancilla => vec![],
        }
    }

    /// Change in the live-qubit count caused by this gate.
    pub fn live_delta(&self) -> isize {
        match self {
            Gate::Ancilla => 1,
            Gate::Erasure(_) => -1,
            _ => 0,
        }
    }

    pub(crate) fn map_wires(&self, f: impl Fn(usize) -> usize) -> Gate {
        match *self {
            Gate::Hadamard(w) => Gate::Hadamard(f(w)),
            Gate::Phase(w) => Gate::Phase(f(w)),
            Gate::Toffoli(a, b, c) => Gate::Toffoli(f(a), f(b), f(c)),
            Gate::Ancilla => Gate::Ancilla,
            Gate::Erasure(w) => Gate::Erasure(f(w)),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Hadamard(w) => write!(f, "H {w}"),
            Gate::Phase(w) => write!(f, "P {w}"),
            Gate::Toffoli(a, b, c) => write!(f, "T {a} {b} {c}"),
            Gate::Ancilla => write!(f, "ANC"),
            Gate::Erasure(w) => write!(f, "TR {w}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("erasure with no live qubits (live count would go negative)")]
    NegativeLiveCount,
    #[error("wire {wire} out of range for {live} live qubits")]
    WireOutOfRange { wire: usize, live: usize },
    #[error("duplicate wires {wires:?}")]
    DuplicateWires { wires: Vec<usize> },
    #[error("expected {expected} output qubits, circuit has {actual}")]
    OutputMismatch { expected: usize, actual: usize },
}

/// First violation found while replaying a gate list.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}{violation}", position.map(|p| format!("gate {p}: ")).unwrap_or_default())]
pub struct ValidationError {
    /// Index of the offending gate; `None` for whole-circuit violations.
    pub position: Option<usize>,
    pub violation: Violation,
}

/// Summary of a successfully validated circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidationReport {
    pub outputs: usize,
    /// Largest number of simultaneously live qubits.
    pub max_live: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    inputs: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    /// An unvalidated circuit; call [`Circuit::validate`] before use.
    pub fn new(inputs: usize, gates: Vec<Gate>) -> Self {
        Circuit { inputs, gates }
    }

    pub fn identity(n: usize) -> Self {
        Circuit::new(n, Vec::new())
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// `inputs + #ancilla − #erasure`; negative for invalid gate lists.
    pub fn output_delta(&self) -> isize {
        self.inputs as isize + self.gates.iter().map(Gate::live_delta).sum::<isize>()
    }

    /// Output count of a valid circuit.
    ///
    /// # Panics
    /// If the gate list erases more qubits than exist.
    pub fn outputs(&self) -> usize {
        usize::try_from(self.output_delta()).expect("circuit has negative output count")
    }

    pub fn validate(&self) -> Result<ValidationReport, ValidationError> {
        let mut live = self.inputs;
        let mut max_live = live;
        for (pos, gate) in self.gates.iter().enumerate() {
            let fail = |violation| ValidationError {
                position: Some(pos),
                violation,
            };
            if let Gate::Erasure(_) = gate {
                if live == 0 {
                    return Err(fail(Violation::NegativeLiveCount));
                }
            }
            let wires = gate.wires();
            if let Some(&wire) = wires.iter().find(|&&w| w >= live) {
                return Err(fail(Violation::WireOutOfRange { wire, live }));
            }
            for (i, a) in wires.iter().enumerate() {
                if wires[i + 1..].contains(a) {
                    return Err(fail(Violation::DuplicateWires { wires }));
                }
            }
            live = (live as isize + gate.live_delta()) as usize;
            max_live = max_live.max(live);
        }
        Ok(ValidationReport {
            outputs: live,
            max_live,
        })
    }

    /// Validates and additionally requires exactly `expected` outputs.
    pub fn validate_outputs(&self, expected: usize) -> Result<ValidationReport, ValidationError> {
        let report = self.validate()?;
        if report.outputs != expected {
            return Err(ValidationError {
                position: None,
                violation: Violation::OutputMismatch {
                    expected,
                    actual: report.outputs,
                },
            });
        }
        Ok(report)
    }

    /// Number of gates plus input and output qubits.
    pub fn size(&self) -> usize {
        self.gates.len() + self.inputs + self.outputs()
    }

    /// `self` followed by `next`. Requires `self.outputs() == next.inputs()`.
    pub fn then(&self, next: &Circuit) -> Result<Circuit, ValidationError> {
        let report = self.validate()?;
        if report.outputs != next.inputs {
            return Err(ValidationError {
                position: None,
                violation: Violation::OutputMismatch {
                    expected: next.inputs,
                    actual: report.outputs,
                },
            });
        }
        let mut gates = self.gates.clone();
        gates.extend_from_slice(&next.gates);
        Ok(Circuit::new(self.inputs, gates))
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn is_unitary(&self) -> bool {
        self.gates
            .iter()
            .all(|g| !matches!(g, Gate::Ancilla | Gate::Erasure(_)))
    }
}

/// The NOT gate expanded as `X = H P P H` on wire `w`.
pub fn not_gates(w: usize) -> [Gate; 4] {
    [Gate::Hadamard(w), Gate::Phase(w), Gate::Phase(w), Gate::Hadamard(w)]
}

/// Completely dephasing channel on each of `n` qubits.
///
/// Each qubit `j` is copied onto a fresh ancilla by a Toffoli gate whose other
/// control is an ancilla prepared in `|1⟩` (ancilla then `HPPH`); both ancillas
/// are then erased.
pub fn build_dephasing(n: usize) -> Circuit {
    let mut gates = Vec::with_capacity(9 * n);
    for j in 0..n {
        gates.push(Gate::Ancilla);
        gates.extend(not_gates(n));
        gates.push(Gate::Ancilla);
        gates.push(Gate::Toffoli(j, n, n + 1));
        gates.push(Gate::Erasure(n + 1));
        gates.push(Gate::Erasure(n));
    }
    Circuit::new(n, gates)
}
