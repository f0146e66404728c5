use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{build_dephasing, not_gates, Circuit, Composer};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Both messages quantum.
    Qrg,
    /// Alice's register is dephased before the decision circuit.
    Cqrg,
    /// Alice's register goes through a circuit whose outputs are measured.
    Mqrg,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Qrg => "qrg",
            Mode::Cqrg => "cqrg",
            Mode::Mqrg => "mqrg",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qrg" => Ok(Mode::Qrg),
            "cqrg" => Ok(Mode::Cqrg),
            "mqrg" => Ok(Mode::Mqrg),
            other => Err(Error::input(format!("unknown mode `{other}`"))),
        }
    }
}

/// A one-turn referee: Alice sends `n` qubits (register A), Bob sends `m`
/// qubits (register B), and the single output qubit is 1 when Alice wins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Referee {
    mode: Mode,
    alice: usize,
    bob: usize,
    outcome: usize,
    p_circuit: Option<Circuit>,
    q_circuit: Circuit,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidReferee(msg.into())
}

fn check_decision(q: &Circuit, inputs: usize) -> Result<()> {
    if q.inputs() != inputs {
        return Err(bad(format!(
            "decision circuit has {} inputs, expected {inputs}",
            q.inputs()
        )));
    }
    q.validate_outputs(1)?;
    Ok(())
}

impl Referee {
    pub fn qrg(alice: usize, bob: usize, q_circuit: Circuit) -> Result<Self> {
        check_decision(&q_circuit, alice + bob)?;
        Ok(Referee {
            mode: Mode::Qrg,
            alice,
            bob,
            outcome: 0,
            p_circuit: None,
            q_circuit,
        })
    }

    pub fn cqrg(alice: usize, bob: usize, q_circuit: Circuit) -> Result<Self> {
        check_decision(&q_circuit, alice + bob)?;
        Ok(Referee {
            mode: Mode::Cqrg,
            alice,
            bob,
            outcome: 0,
            p_circuit: None,
            q_circuit,
        })
    }

    /// `p_circuit` maps Alice's `alice` qubits to `outcome` qubits that are
    /// measured; `q_circuit` reads those `outcome` bits and Bob's register.
    pub fn mqrg(
        alice: usize,
        bob: usize,
        outcome: usize,
        p_circuit: Circuit,
        q_circuit: Circuit,
    ) -> Result<Self> {
        if p_circuit.inputs() != alice {
            return Err(bad(format!(
                "measurement circuit has {} inputs, expected {alice}",
                p_circuit.inputs()
            )));
        }
        let report = p_circuit.validate()?;
        if report.outputs != outcome {
            return Err(bad(format!(
                "measurement circuit has {} outputs but the decision circuit reads {outcome}",
                report.outputs
            )));
        }
        check_decision(&q_circuit, outcome + bob)?;
        Ok(Referee {
            mode: Mode::Mqrg,
            alice,
            bob,
            outcome,
            p_circuit: Some(p_circuit),
            q_circuit,
        })
    }

    /// Builds a referee of the given mode; `outcome` and `p_circuit` are
    /// required for MQRG and must be absent otherwise.
    pub fn from_parts(
        mode: Mode,
        alice: usize,
        bob: usize,
        outcome: Option<usize>,
        p_circuit: Option<Circuit>,
        q_circuit: Circuit,
    ) -> Result<Self> {
        match mode {
            Mode::Mqrg => {
                let p = p_circuit.ok_or_else(|| bad("mqrg referee needs a `p` circuit"))?;
                let k = outcome.unwrap_or_else(|| p.output_delta().max(0) as usize);
                Referee::mqrg(alice, bob, k, p, q_circuit)
            }
            _ if p_circuit.is_some() => Err(bad(format!("{mode} referee takes no `p` circuit"))),
            _ if outcome.is_some_and(|k| k != 0) => {
                Err(bad(format!("{mode} referee takes no outcome register")))
            }
            Mode::Qrg => Referee::qrg(alice, bob, q_circuit),
            Mode::Cqrg => Referee::cqrg(alice, bob, q_circuit),
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Width of Alice's register A.
    pub fn alice(&self) -> usize {
        self.alice
    }

    /// Width of Bob's register B.
    pub fn bob(&self) -> usize {
        self.bob
    }

    /// Width of the measured outcome register (MQRG only, otherwise 0).
    pub fn outcome(&self) -> usize {
        self.outcome
    }

    /// Width of the classical register the decision circuit conditions on:
    /// `n` for CQRG, `k` for MQRG; `None` for QRG.
    pub fn classical_width(&self) -> Option<usize> {
        match self.mode {
            Mode::Qrg => None,
            Mode::Cqrg => Some(self.alice),
            Mode::Mqrg => Some(self.outcome),
        }
    }

    pub fn p_circuit(&self) -> Option<&Circuit> {
        self.p_circuit.as_ref()
    }

    pub fn q_circuit(&self) -> &Circuit {
        &self.q_circuit
    }

    /// The whole referee as one circuit on `n + m` inputs with one output,
    /// Alice's wires first.
    pub fn compose(&self) -> Result<Circuit> {
        let (n, m) = (self.alice, self.bob);
        let mut b = Composer::new(n + m);
        let alice: Vec<usize> = (0..n).collect();
        let bob: Vec<usize> = (n..n + m).collect();
        let out = match self.mode {
            Mode::Qrg => return Ok(self.q_circuit.clone()),
            Mode::Cqrg => {
                let a = b.apply(&build_dephasing(n), &alice)?;
                b.apply(&self.q_circuit, &[a, bob].concat())?
            }
            Mode::Mqrg => {
                let p = self.p_circuit.as_ref().expect("mqrg referee has p circuit");
                let u = b.apply(p, &alice)?;
                if u.len() != self.q_circuit.inputs() - m {
                    return Err(bad("measurement outputs do not match the decision circuit"));
                }
                let u = b.apply(&build_dephasing(u.len()), &u)?;
                b.apply(&self.q_circuit, &[u, bob].concat())?
            }
        };
        let c = b.finish(&out)?;
        c.validate_outputs(1)?;
        Ok(c)
    }
}

/// Composes a referee into a single circuit (see [`Referee::compose`]).
pub fn compose_referee(r: &Referee) -> Result<Circuit> {
    r.compose()
}

/// Exchanges Alice and Bob in a QRG referee: the inputs are relabelled so
/// the new first register is the old B, and the output bit is negated.
pub fn swap_roles(r: &Referee) -> Result<Referee> {
    if r.mode != Mode::Qrg {
        return Err(Error::UnsupportedMode(r.mode.as_str()));
    }
    let (n, m) = (r.alice, r.bob);
    let mut b = Composer::new(m + n);
    // New wires 0..m carry old B, m..m+n carry old A.
    let old_order: Vec<usize> = (m..m + n).chain(0..m).collect();
    let out = b.apply(&r.q_circuit, &old_order)?;
    let not = Circuit::new(1, not_gates(0).to_vec());
    let out = b.apply(&not, &out)?;
    let q = b.finish(&out)?;
    Referee::qrg(m, n, q)
}

/// Completeness and soundness thresholds `alpha > beta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PromiseThresholds {
    alpha: Ratio<u64>,
    beta: Ratio<u64>,
}

/// Where a game value falls relative to a promise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PromiseSide {
    Yes,
    No,
    Outside,
}

impl PromiseThresholds {
    pub fn new(alpha: Ratio<u64>, beta: Ratio<u64>) -> Result<Self> {
        let one = Ratio::from_integer(1);
        if alpha > one || beta > one {
            return Err(Error::input("thresholds must lie in [0, 1]"));
        }
        if alpha <= beta {
            return Err(Error::input("completeness threshold must exceed soundness"));
        }
        Ok(PromiseThresholds { alpha, beta })
    }

    /// 2/3 and 1/3.
    pub fn standard() -> Self {
        PromiseThresholds {
            alpha: Ratio::new(2, 3),
            beta: Ratio::new(1, 3),
        }
    }

    /// 3/4 and 1/4.
    pub fn amplified() -> Self {
        PromiseThresholds {
            alpha: Ratio::new(3, 4),
            beta: Ratio::new(1, 4),
        }
    }

    pub fn alpha(&self) -> Ratio<u64> {
        self.alpha
    }

    pub fn beta(&self) -> Ratio<u64> {
        self.beta
    }

    pub fn alpha_f64(&self) -> f64 {
        *self.alpha.numer() as f64 / *self.alpha.denom() as f64
    }

    pub fn beta_f64(&self) -> f64 {
        *self.beta.numer() as f64 / *self.beta.denom() as f64
    }

    /// Classifies a value known to within `tol`; values whose interval
    /// straddles a threshold are `Outside`.
    pub fn classify(&self, value: f64, tol: f64) -> PromiseSide {
        if value - tol >= self.alpha_f64() {
            PromiseSide::Yes
        } else if value + tol <= self.beta_f64() {
            PromiseSide::No
        } else {
            PromiseSide::Outside
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Gate, Violation};

    fn output_wire(inputs: usize, keep: usize) -> Circuit {
        // Erase everything except `keep`.
        let mut gates = Vec::new();
        let mut live: Vec<usize> = (0..inputs).collect();
        while live.len() > 1 {
            let pos = live.iter().position(|&w| w != keep).unwrap();
            live.remove(pos);
            gates.push(Gate::Erasure(pos));
        }
        Circuit::new(inputs, gates)
    }

    #[test]
    fn qrg_compose_is_unchanged() {
        let q = output_wire(2, 0);
        let r = Referee::qrg(1, 1, q.clone()).unwrap();
        assert_eq!(r.compose().unwrap(), q);
    }

    #[test]
    fn cqrg_compose_prefixes_dephasing() {
        let q = output_wire(2, 0);
        let r = Referee::cqrg(1, 1, q.clone()).unwrap();
        let c = r.compose().unwrap();
        // Dephasing ancillas land after Bob's wire.
        let d: Vec<Gate> = build_dephasing(1)
            .gates()
            .iter()
            .map(|g| g.map_wires(|w| if w == 0 { 0 } else { w + 1 }))
            .collect();
        assert_eq!(&c.gates()[..d.len()], &d[..]);
        assert_eq!(&c.gates()[d.len()..], q.gates());
        assert_eq!(c.inputs(), 2);
        assert_eq!(c.outputs(), 1);
    }

    #[test]
    fn mqrg_width_mismatch_rejected() {
        let p = Circuit::new(1, vec![Gate::Ancilla]);
        let q = output_wire(2, 0);
        assert!(matches!(
            Referee::mqrg(1, 1, 1, p, q),
            Err(Error::InvalidReferee(_))
        ));
    }

    #[test]
    fn decision_circuit_needs_one_output() {
        let err = Referee::qrg(1, 1, Circuit::identity(2)).unwrap_err();
        match err {
            Error::InvalidCircuit(e) => assert!(matches!(
                e.violation,
                Violation::OutputMismatch { expected: 1, actual: 2 }
            )),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn swap_is_rejected_outside_qrg() {
        let r = Referee::cqrg(1, 1, output_wire(2, 0)).unwrap();
        assert!(matches!(swap_roles(&r), Err(Error::UnsupportedMode("cqrg"))));
    }

    #[test]
    fn swap_relabels_and_negates() {
        // Output Alice's wire; after the swap, Alice is old Bob, and the
        // circuit should output old Alice (now wire 1) negated.
        let r = Referee::qrg(1, 2, output_wire(3, 0)).unwrap();
        let s = swap_roles(&r).unwrap();
        assert_eq!((s.alice(), s.bob()), (2, 1));
        let g = s.q_circuit().gates();
        assert_eq!(g.len(), 2 + 4);
        assert_eq!(s.q_circuit().outputs(), 1);
        // Old wire 0 lives at new index 2; both erasures hit the others.
        assert_eq!(&g[..2], &[Gate::Erasure(0), Gate::Erasure(0)]);
        assert_eq!(&g[2..], &not_gates(0));
    }

    #[test]
    fn thresholds() {
        assert!(PromiseThresholds::new(Ratio::new(1, 3), Ratio::new(2, 3)).is_err());
        let t = PromiseThresholds::standard();
        assert_eq!(t.classify(0.9, 1e-3), PromiseSide::Yes);
        assert_eq!(t.classify(0.1, 1e-3), PromiseSide::No);
        assert_eq!(t.classify(0.5, 1e-3), PromiseSide::Outside);
        assert_eq!(t.classify(2.0 / 3.0, 1e-3), PromiseSide::Outside);
    }
}
