//! Game values of one-turn refereed games with certified duality gaps.

mod effects;
mod solver;
mod strategy;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

pub use effects::{accept_operator, effect_operators, measurement_operators, EffectOperators};
pub use solver::{
    alice_best_response, bob_best_response, payoff, solve, BilinearGame, Exchanged, Mixed,
    Solution, SolverOptions, Space,
};
pub use strategy::{DensityMatrix, Distribution, Strategy, MASS_TOL};

use crate::circuit::{Mode, Referee};
use crate::error::{Error, Result};
use crate::linalg::{trace_product, CMatrix};

/// Largest classical message width for CQRG/MQRG solving.
pub const MAX_CLASSICAL_WIDTH: usize = 10;
/// Largest Bob register width.
pub const MAX_BOB_WIDTH: usize = 6;
/// Largest `n + m` for QRG solving.
pub const MAX_QUANTUM_WIDTH: usize = 8;

/// CQRG: Alice picks `y` from a distribution `p`, Bob a state `σ`; the
/// payoff is `Σ_y p(y) Tr(S_y σ)`.
pub struct ClassicalGame<'a> {
    pub effects: &'a EffectOperators,
}

impl BilinearGame for ClassicalGame<'_> {
    fn alice_space(&self) -> Space {
        Space::Simplex(self.effects.len())
    }
    fn bob_space(&self) -> Space {
        Space::Density(1 << self.effects.bob())
    }
    fn alice_gradient(&self, bob: &Mixed) -> Mixed {
        let Mixed::Density(sigma) = bob else { panic!("bob plays a state") };
        let g = self.effects.floats().iter().map(|s| trace_product(s, sigma));
        Mixed::Simplex(DVector::from_iterator(self.effects.len(), g))
    }
    fn bob_gradient(&self, alice: &Mixed) -> Mixed {
        let Mixed::Simplex(p) = alice else { panic!("alice plays a distribution") };
        Mixed::Density(self.effects.weighted(p.as_slice()))
    }
}

/// MQRG: Alice sends `ρ`, which is measured with the POVM `{M_u}`; the
/// payoff is `Σ_u Tr(M_u ρ) Tr(S_u σ)`.
pub struct MeasuredGame<'a> {
    pub povm: Vec<CMatrix>,
    pub effects: &'a EffectOperators,
}

impl BilinearGame for MeasuredGame<'_> {
    fn alice_space(&self) -> Space {
        Space::Density(self.povm[0].nrows())
    }
    fn bob_space(&self) -> Space {
        Space::Density(1 << self.effects.bob())
    }
    fn alice_gradient(&self, bob: &Mixed) -> Mixed {
        let Mixed::Density(sigma) = bob else { panic!("bob plays a state") };
        let d = self.povm[0].nrows();
        let mut g = CMatrix::zeros(d, d);
        for (m, s) in self.povm.iter().zip(self.effects.floats()) {
            g += m * Complex64::new(trace_product(s, sigma), 0.0);
        }
        Mixed::Density(g)
    }
    fn bob_gradient(&self, alice: &Mixed) -> Mixed {
        let Mixed::Density(rho) = alice else { panic!("alice plays a state") };
        let w: Vec<f64> = self.povm.iter().map(|m| trace_product(m, rho)).collect();
        Mixed::Density(self.effects.weighted(&w))
    }
}

/// QRG: payoff `Tr(E (ρ ⊗ σ))` for the accept operator `E` on `A ⊗ B`.
pub struct QuantumGame {
    pub accept: CMatrix,
    pub alice_dim: usize,
    pub bob_dim: usize,
}

impl QuantumGame {
    fn entry(&self, a: usize, k: usize, b: usize, l: usize) -> Complex64 {
        self.accept[(a * self.bob_dim + k, b * self.bob_dim + l)]
    }
}

impl BilinearGame for QuantumGame {
    fn alice_space(&self) -> Space {
        Space::Density(self.alice_dim)
    }
    fn bob_space(&self) -> Space {
        Space::Density(self.bob_dim)
    }
    /// `Tr_B(E (I ⊗ σ))`.
    fn alice_gradient(&self, bob: &Mixed) -> Mixed {
        let Mixed::Density(sigma) = bob else { panic!("bob plays a state") };
        let (da, db) = (self.alice_dim, self.bob_dim);
        Mixed::Density(CMatrix::from_fn(da, da, |a, b| {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..db {
                for l in 0..db {
                    s += self.entry(a, k, b, l) * sigma[(l, k)];
                }
            }
            s
        }))
    }
    /// `Tr_A(E (ρ ⊗ I))`.
    fn bob_gradient(&self, alice: &Mixed) -> Mixed {
        let Mixed::Density(rho) = alice else { panic!("alice plays a state") };
        let (da, db) = (self.alice_dim, self.bob_dim);
        Mixed::Density(CMatrix::from_fn(db, db, |k, l| {
            let mut s = Complex64::new(0.0, 0.0);
            for a in 0..da {
                for b in 0..da {
                    s += self.entry(a, k, b, l) * rho[(b, a)];
                }
            }
            s
        }))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GameValueReport {
    pub mode: Mode,
    /// Midpoint of the certified interval `[lower, upper]`.
    pub value: f64,
    /// Alice's guaranteed winning probability with `alice_strategy`.
    pub lower: f64,
    /// Bob's guaranteed bound with `bob_strategy`.
    pub upper: f64,
    pub duality_gap: f64,
    pub tolerance: f64,
    pub iterations: usize,
    pub converged: bool,
    pub alice_strategy: Strategy,
    pub bob_strategy: DensityMatrix,
}

fn density(m: Mixed) -> DensityMatrix {
    match m {
        Mixed::Density(d) => DensityMatrix(d),
        Mixed::Simplex(_) => panic!("expected a density operator"),
    }
}

fn report(mode: Mode, s: Solution, tol: f64, alice: Strategy) -> GameValueReport {
    GameValueReport {
        mode,
        value: s.value(),
        lower: s.lower,
        upper: s.upper,
        duality_gap: s.gap(),
        tolerance: tol,
        iterations: s.iterations,
        converged: s.converged,
        alice_strategy: alice,
        bob_strategy: density(s.bob),
    }
}

fn check_width(what: &'static str, width: usize, cap: usize) -> Result<()> {
    if width > cap {
        return Err(Error::CapExceeded {
            what,
            required: width as u64,
            cap: cap as u64,
        });
    }
    Ok(())
}

fn require(r: &Referee, mode: Mode) -> Result<()> {
    if r.mode() != mode {
        return Err(Error::InvalidReferee(format!(
            "expected a {mode} referee, got {}",
            r.mode()
        )));
    }
    Ok(())
}

fn options(tol: f64) -> SolverOptions {
    SolverOptions {
        tol,
        ..SolverOptions::default()
    }
}

/// `max_p λ_min(Σ_y p(y) S_y)` for a CQRG referee.
pub fn cqrg_value(r: &Referee, tol: f64) -> Result<GameValueReport> {
    cqrg_value_with(r, &options(tol))
}

pub fn cqrg_value_with(r: &Referee, opts: &SolverOptions) -> Result<GameValueReport> {
    require(r, Mode::Cqrg)?;
    check_width("classical message width", r.alice(), MAX_CLASSICAL_WIDTH)?;
    check_width("bob register width", r.bob(), MAX_BOB_WIDTH)?;
    let effects = effect_operators(r)?;
    let s = solve(&ClassicalGame { effects: &effects }, opts)?;
    let Mixed::Simplex(p) = &s.alice else { unreachable!() };
    let p = Distribution::from_weights(r.alice(), p.as_slice())?;
    Ok(report(Mode::Cqrg, s, opts.tol, Strategy::Distribution(p)))
}

/// `max_ρ λ_min(Σ_u Tr(M_u ρ) S_u)` for an MQRG referee.
pub fn mqrg_value(r: &Referee, tol: f64) -> Result<GameValueReport> {
    mqrg_value_with(r, &options(tol))
}

pub fn mqrg_value_with(r: &Referee, opts: &SolverOptions) -> Result<GameValueReport> {
    require(r, Mode::Mqrg)?;
    check_width("alice register width", r.alice(), MAX_CLASSICAL_WIDTH)?;
    check_width("measured outcome width", r.outcome(), MAX_CLASSICAL_WIDTH)?;
    check_width("bob register width", r.bob(), MAX_BOB_WIDTH)?;
    let effects = effect_operators(r)?;
    let p = r.p_circuit().expect("mqrg referee has a measurement circuit");
    let povm = measurement_operators(p)?.iter().map(|m| m.to_dmatrix()).collect();
    let s = solve(&MeasuredGame { povm, effects: &effects }, opts)?;
    let alice = Strategy::Density(density(s.alice.clone()));
    Ok(report(Mode::Mqrg, s, opts.tol, alice))
}

/// `max_ρ min_σ ⟨1|R(ρ ⊗ σ)|1⟩` for a QRG referee.
pub fn qrg_value(r: &Referee, tol: f64) -> Result<GameValueReport> {
    qrg_value_with(r, &options(tol))
}

pub fn qrg_value_with(r: &Referee, opts: &SolverOptions) -> Result<GameValueReport> {
    let game = quantum_game(r)?;
    let s = solve(&game, opts)?;
    let alice = Strategy::Density(density(s.alice.clone()));
    Ok(report(Mode::Qrg, s, opts.tol, alice))
}

/// The bilinear game of a QRG referee.
pub fn quantum_game(r: &Referee) -> Result<QuantumGame> {
    require(r, Mode::Qrg)?;
    check_width("alice plus bob register width", r.alice() + r.bob(), MAX_QUANTUM_WIDTH)?;
    Ok(QuantumGame {
        accept: accept_operator(r)?.to_dmatrix(),
        alice_dim: 1 << r.alice(),
        bob_dim: 1 << r.bob(),
    })
}

/// Dispatches on the referee's mode.
pub fn game_value(r: &Referee, tol: f64) -> Result<GameValueReport> {
    match r.mode() {
        Mode::Qrg => qrg_value(r, tol),
        Mode::Cqrg => cqrg_value(r, tol),
        Mode::Mqrg => mqrg_value(r, tol),
    }
}
