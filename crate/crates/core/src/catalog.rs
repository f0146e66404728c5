//! Small named referees used by tests, examples and the command line.

use crate::circuit::{not_gates, Circuit, Gate, Referee};
use crate::error::Result;

/// Discards all `inputs` qubits and outputs a fresh `|b⟩`.
pub fn constant_decision(inputs: usize, b: bool) -> Circuit {
    let mut gates = vec![Gate::Erasure(0); inputs];
    gates.push(Gate::Ancilla);
    if b {
        gates.extend(not_gates(0));
    }
    Circuit::new(inputs, gates)
}

/// Flips wire `target` when wire `control` is 1, using a `|1⟩` ancilla as
/// the second Toffoli control. `live` is the number of live wires.
pub fn cnot_gates(control: usize, target: usize, live: usize) -> Vec<Gate> {
    let mut gates = vec![Gate::Ancilla];
    gates.extend(not_gates(live));
    gates.push(Gate::Toffoli(live, control, target));
    gates.extend(not_gates(live));
    gates.push(Gate::Erasure(live));
    gates
}

/// Two inputs; outputs 1 iff they are equal in the computational basis.
pub fn equality_decision() -> Circuit {
    let mut gates = cnot_gates(0, 1, 2);
    gates.extend(not_gates(1));
    gates.push(Gate::Erasure(0));
    Circuit::new(2, gates)
}

pub fn always_accept(alice: usize, bob: usize) -> Result<Referee> {
    Referee::cqrg(alice, bob, constant_decision(alice + bob, true))
}

pub fn always_reject(alice: usize, bob: usize) -> Result<Referee> {
    Referee::cqrg(alice, bob, constant_decision(alice + bob, false))
}

/// CQRG with one bit each: Alice wins iff Bob's qubit, measured, equals her
/// bit. Value 1/2.
pub fn bits_equal() -> Result<Referee> {
    let mut gates = vec![Gate::Ancilla];
    gates.extend(not_gates(2));
    gates.push(Gate::Ancilla);
    gates.push(Gate::Toffoli(1, 2, 3));
    gates.push(Gate::Erasure(3));
    gates.push(Gate::Erasure(2));
    let dephase_bob = Circuit::new(2, gates);
    Referee::cqrg(1, 1, dephase_bob.then(&equality_decision())?)
}

/// QRG matching pennies: both players send one qubit, both are measured,
/// and Alice wins iff the bits are equal. Value 1/2.
pub fn matching_pennies() -> Result<Referee> {
    Referee::qrg(1, 1, equality_decision())
}
