use super::{Circuit, Gate, ValidationError, Violation};

/// Stable identifier of a qubit while circuits are spliced together.
pub(crate) type WireId = usize;

/// Builds a circuit by applying sub-circuits to named qubits.
///
/// `live` lists the identifiers of the live qubits in index order. Applying a
/// sub-circuit translates its local wire indices to global positions; fresh
/// ancillas always land at the end of the global list, matching the gate
/// semantics.
pub(crate) struct Composer {
    inputs: usize,
    live: Vec<WireId>,
    next_id: WireId,
    gates: Vec<Gate>,
}

impl Composer {
    /// A composer with `inputs` qubits, identified as `0..inputs`.
    pub(crate) fn new(inputs: usize) -> Self {
        Composer {
            inputs,
            live: (0..inputs).collect(),
            next_id: inputs,
            gates: Vec::new(),
        }
    }

    fn position(&self, id: WireId) -> usize {
        self.live
            .iter()
            .position(|&w| w == id)
            .expect("wire id is not live")
    }

    /// Applies `sub` with its inputs bound to `args`; returns the identifiers
    /// of its outputs in order.
    pub(crate) fn apply(
        &mut self,
        sub: &Circuit,
        args: &[WireId],
    ) -> Result<Vec<WireId>, ValidationError> {
        sub.validate()?;
        if args.len() != sub.inputs() {
            return Err(ValidationError {
                position: None,
                violation: Violation::OutputMismatch {
                    expected: sub.inputs(),
                    actual: args.len(),
                },
            });
        }
        let mut local: Vec<WireId> = args.to_vec();
        for gate in sub.gates() {
            match *gate {
                Gate::Ancilla => {
                    let id = self.next_id;
                    self.next_id += 1;
                    self.live.push(id);
                    local.push(id);
                    self.gates.push(Gate::Ancilla);
                }
                Gate::Erasure(w) => {
                    let id = local.remove(w);
                    let pos = self.position(id);
                    self.live.remove(pos);
                    self.gates.push(Gate::Erasure(pos));
                }
                g => {
                    let mapped = g.map_wires(|w| self.position(local[w]));
                    self.gates.push(mapped);
                }
            }
        }
        Ok(local)
    }

    #[cfg(test)]
    pub(crate) fn live(&self) -> &[WireId] {
        &self.live
    }

    /// Finishes the circuit. The live qubits must already be exactly
    /// `outputs`, in that order.
    pub(crate) fn finish(self, outputs: &[WireId]) -> Result<Circuit, ValidationError> {
        if self.live != outputs {
            return Err(ValidationError {
                position: None,
                violation: Violation::OutputMismatch {
                    expected: outputs.len(),
                    actual: self.live.len(),
                },
            });
        }
        let c = Circuit::new(self.inputs, self.gates);
        c.validate()?;
        Ok(c)
    }
}
