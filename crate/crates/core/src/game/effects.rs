use crate::circuit::{Circuit, Mode, Referee};
use crate::error::{Error, Result};
use crate::exact::ExactMatrix;
use crate::gap::BitString;
use crate::linalg::{eigh, hermitian_deviation, CMatrix};
use crate::natural::heisenberg;

/// Bob-side operators `S_y` for each classical message `y`, with
/// `Tr(S_y σ)` the probability that Alice wins when she sends `y` and Bob
/// sends `σ`.
#[derive(Debug, Clone)]
pub struct EffectOperators {
    width: usize,
    bob: usize,
    exact: Vec<ExactMatrix>,
    float: Vec<CMatrix>,
}

impl EffectOperators {
    /// `ops[y]` is `S_y` for `y` read as a `width`-bit number.
    pub fn from_exact(width: usize, bob: usize, ops: Vec<ExactMatrix>) -> Result<Self> {
        if ops.len() != 1usize << width {
            return Err(Error::dims(format!(
                "{} operators for {width}-bit messages",
                ops.len()
            )));
        }
        let side = 1usize << bob;
        for s in &ops {
            if s.rows() != side || s.cols() != side {
                return Err(Error::dims("effect operator does not act on Bob's register"));
            }
            if !s.is_hermitian() {
                return Err(Error::NotHermitian(hermitian_deviation(&s.to_dmatrix())));
            }
        }
        let float = ops.iter().map(|s| s.to_dmatrix()).collect();
        Ok(EffectOperators { width, bob, exact: ops, float })
    }

    /// Width of the classical message `y`.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Width of Bob's register.
    pub fn bob(&self) -> usize {
        self.bob
    }

    pub fn len(&self) -> usize {
        self.exact.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exact.is_empty()
    }

    pub fn exact(&self, y: usize) -> &ExactMatrix {
        &self.exact[y]
    }

    pub fn float(&self, y: usize) -> &CMatrix {
        &self.float[y]
    }

    pub fn floats(&self) -> &[CMatrix] {
        &self.float
    }

    pub fn index_of(&self, y: &BitString) -> Result<usize> {
        if y.len() != self.width {
            return Err(Error::input(format!(
                "message `{y}` has {} bits, expected {}",
                y.len(),
                self.width
            )));
        }
        Ok(y.to_u64() as usize)
    }

    pub fn get(&self, y: &BitString) -> Result<&CMatrix> {
        Ok(&self.float[self.index_of(y)?])
    }

    /// `T_y = I − S_y`, the operator for Alice losing.
    pub fn complement(&self, y: usize) -> ExactMatrix {
        let id = ExactMatrix::identity(1 << self.bob).expect("bob width within caps");
        id.sub(&self.exact[y]).expect("same shape")
    }

    /// `Σ_y w_y S_y`.
    pub fn weighted(&self, weights: &[f64]) -> CMatrix {
        let side = 1usize << self.bob;
        let mut out = CMatrix::zeros(side, side);
        for (w, s) in weights.iter().zip(&self.float) {
            if *w != 0.0 {
                out += s * num_complex::Complex64::new(*w, 0.0);
            }
        }
        out
    }

    /// Largest violation of `0 ≤ S_y ≤ I` over all `y`.
    pub fn bound_violation(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for s in &self.float {
            let (vals, _) = eigh(s)?;
            worst = worst.max(-vals[0]).max(vals[vals.len() - 1] - 1.0);
        }
        Ok(worst)
    }
}

/// `|1⟩⟨1|` on one qubit.
fn accept_projector() -> ExactMatrix {
    ExactMatrix::unit(2, 1, 1).expect("2x2")
}

/// `R*(|1⟩⟨1|)` for the composed referee, on Alice's and Bob's registers
/// (Alice's qubits first).
pub fn accept_operator(r: &Referee) -> Result<ExactMatrix> {
    heisenberg(&r.compose()?, &accept_projector())
}

/// `S_y = (⟨y| ⊗ I) Q*(|1⟩⟨1|) (|y⟩ ⊗ I)`, where `Q` dephases the classical
/// register and runs the decision circuit. For MQRG `y` ranges over the
/// measured outcomes.
pub fn effect_operators(r: &Referee) -> Result<EffectOperators> {
    let classical = match r.mode() {
        Mode::Qrg => return Err(Error::UnsupportedMode("qrg")),
        Mode::Cqrg => r.clone(),
        Mode::Mqrg => Referee::cqrg(r.outcome(), r.bob(), r.q_circuit().clone())?,
    };
    let (n, m) = (classical.alice(), classical.bob());
    let e = accept_operator(&classical)?;
    let side = 1usize << m;
    let ops = (0..1usize << n)
        .map(|y| e.block(y * side, y * side, side, side))
        .collect::<Result<Vec<_>>>()?;
    EffectOperators::from_exact(n, m, ops)
}

/// `M_u = P*(|u⟩⟨u|)` for each outcome `u` of a measurement circuit.
pub fn measurement_operators(p: &Circuit) -> Result<Vec<ExactMatrix>> {
    let k = p.validate()?.outputs;
    let side = 1usize << k;
    (0..side)
        .map(|u| heisenberg(p, &ExactMatrix::unit(side, u, u)?))
        .collect()
}
