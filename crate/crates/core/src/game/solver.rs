//! Mirror-prox (extragradient with entropic prox steps) for zero-sum games
//! whose strategy sets are probability simplices or sets of density
//! operators and whose payoff is bilinear.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigh, gibbs, trace_product, CMatrix};

/// A player's strategy set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Simplex(usize),
    Density(usize),
}

/// A point of a [`Space`], or a payoff gradient / log-weight living in the
/// same vector space (vectors for simplices, Hermitian matrices otherwise).
#[derive(Debug, Clone, PartialEq)]
pub enum Mixed {
    Simplex(DVector<f64>),
    Density(CMatrix),
}

impl Space {
    pub fn dim(&self) -> usize {
        match *self {
            Space::Simplex(d) | Space::Density(d) => d,
        }
    }

    pub fn zero(&self) -> Mixed {
        match *self {
            Space::Simplex(d) => Mixed::Simplex(DVector::zeros(d)),
            Space::Density(d) => Mixed::Density(CMatrix::zeros(d, d)),
        }
    }

    pub fn identity(&self) -> Mixed {
        match *self {
            Space::Simplex(d) => Mixed::Simplex(DVector::from_element(d, 1.0)),
            Space::Density(d) => Mixed::Density(CMatrix::identity(d, d)),
        }
    }
}

impl Mixed {
    /// `⟨self, other⟩`: dot product or `Re Tr(self · other)`.
    pub fn pair(&self, other: &Mixed) -> f64 {
        match (self, other) {
            (Mixed::Simplex(a), Mixed::Simplex(b)) => a.dot(b),
            (Mixed::Density(a), Mixed::Density(b)) => trace_product(a, b),
            _ => panic!("pairing across different spaces"),
        }
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &Mixed) -> Mixed {
        match (self, other) {
            (Mixed::Simplex(a), Mixed::Simplex(b)) => Mixed::Simplex(a + b * s),
            (Mixed::Density(a), Mixed::Density(b)) => {
                Mixed::Density(a + b * Complex64::new(s, 0.0))
            }
            _ => panic!("adding across different spaces"),
        }
    }

    pub fn scaled(&self, s: f64) -> Mixed {
        match self {
            Mixed::Simplex(a) => Mixed::Simplex(a * s),
            Mixed::Density(a) => Mixed::Density(a * Complex64::new(s, 0.0)),
        }
    }

    /// The normalized exponential `e^Y / Tr e^Y` of a log-weight.
    fn softmax(&self) -> Result<Mixed> {
        Ok(match self {
            Mixed::Simplex(y) => {
                let top = y.max();
                let w = y.map(|v| (v - top).exp());
                let z = w.sum();
                Mixed::Simplex(w / z)
            }
            Mixed::Density(y) => Mixed::Density(gibbs(y)?),
        })
    }

    /// Shifts a log-weight by a multiple of the identity so its mean
    /// eigenvalue is 0; the softmax is unchanged.
    fn centered(self) -> Mixed {
        match self {
            Mixed::Simplex(y) => {
                let mean = y.mean();
                Mixed::Simplex(y.map(|v| v - mean))
            }
            Mixed::Density(y) => {
                let n = y.nrows();
                let mean = y.trace().re / n as f64;
                Mixed::Density(y - CMatrix::identity(n, n) * Complex64::new(mean, 0.0))
            }
        }
    }

    /// Best response to a payoff gradient: `(value, pure strategy)` with
    /// the largest (`top`) or smallest pairing.
    fn best_response(&self, top: bool) -> Result<(f64, Mixed)> {
        match self {
            Mixed::Simplex(g) => {
                let (i, v) = if top { g.argmax() } else { g.argmin() };
                let mut e = DVector::zeros(g.len());
                e[i] = 1.0;
                Ok((v, Mixed::Simplex(e)))
            }
            Mixed::Density(g) => {
                let (vals, vecs) = eigh(g)?;
                let k = if top { vals.len() - 1 } else { 0 };
                let v = vecs.column(k);
                Ok((vals[k], Mixed::Density(v * v.adjoint())))
            }
        }
    }
}

/// A two-player zero-sum game with payoff `f(a, b)` bilinear in Alice's
/// strategy `a` (maximizing) and Bob's strategy `b` (minimizing).
pub trait BilinearGame {
    fn alice_space(&self) -> Space;
    fn bob_space(&self) -> Space;
    /// `G_A(b)` with `f(a, b) = ⟨G_A(b), a⟩`.
    fn alice_gradient(&self, bob: &Mixed) -> Mixed;
    /// `G_B(a)` with `f(a, b) = ⟨G_B(a), b⟩`.
    fn bob_gradient(&self, alice: &Mixed) -> Mixed;
}

/// The game with the roles exchanged and payoff `1 − f`: the old Bob now
/// maximizes the probability that the old Alice loses.
pub struct Exchanged<'a, G: BilinearGame>(pub &'a G);

impl<G: BilinearGame> BilinearGame for Exchanged<'_, G> {
    fn alice_space(&self) -> Space {
        self.0.bob_space()
    }
    fn bob_space(&self) -> Space {
        self.0.alice_space()
    }
    fn alice_gradient(&self, bob: &Mixed) -> Mixed {
        self.0.bob_space().identity().axpy(-1.0, &self.0.bob_gradient(bob))
    }
    fn bob_gradient(&self, alice: &Mixed) -> Mixed {
        self.0.alice_space().identity().axpy(-1.0, &self.0.alice_gradient(alice))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Target duality gap.
    pub tol: f64,
    pub max_iterations: usize,
    /// Prox step size.
    pub step: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-4,
            max_iterations: 200_000,
            step: 1.0,
        }
    }
}

/// Certified result: Alice's strategy guarantees at least `lower` against
/// every Bob strategy, and Bob's strategy holds Alice to at most `upper`.
#[derive(Debug, Clone)]
pub struct Solution {
    pub lower: f64,
    pub upper: f64,
    pub alice: Mixed,
    pub bob: Mixed,
    pub iterations: usize,
    pub converged: bool,
}

impl Solution {
    pub fn gap(&self) -> f64 {
        (self.upper - self.lower).max(0.0)
    }

    pub fn value(&self) -> f64 {
        (0.5 * (self.lower + self.upper)).clamp(0.0, 1.0)
    }
}

struct Best {
    lower: f64,
    upper: f64,
    alice: Mixed,
    bob: Mixed,
}

impl Best {
    fn offer_alice(&mut self, value: f64, a: &Mixed) {
        if value > self.lower {
            self.lower = value;
            self.alice = a.clone();
        }
    }

    fn offer_bob(&mut self, value: f64, b: &Mixed) {
        if value < self.upper {
            self.upper = value;
            self.bob = b.clone();
        }
    }
}

/// Mirror-prox play with entropic (matrix) multiplicative-weights steps.
///
/// Every iteration takes an extrapolation step from the current log-weights,
/// then updates them with the gradients at the extrapolated point. The
/// extrapolated strategies and their running averages are all certified by
/// exact best responses; the best certified pair is kept, and play stops once
/// its gap is at most `tol`.
pub fn solve<G: BilinearGame>(game: &G, opts: &SolverOptions) -> Result<Solution> {
    if !(opts.tol > 0.0) || !(opts.step > 0.0) || opts.max_iterations == 0 {
        return Err(Error::input("solver needs positive tol, step and iteration count"));
    }
    let (sa, sb) = (game.alice_space(), game.bob_space());
    let eta = opts.step;
    let mut ya = sa.zero();
    let mut yb = sb.zero();
    let mut sum_a = sa.zero();
    let mut sum_b = sb.zero();
    let mut best = Best {
        lower: f64::NEG_INFINITY,
        upper: f64::INFINITY,
        alice: ya.softmax()?,
        bob: yb.softmax()?,
    };
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        iterations += 1;
        let xa = ya.softmax()?;
        let xb = yb.softmax()?;
        let ha = ya.axpy(eta, &game.alice_gradient(&xb)).softmax()?;
        let hb = yb.axpy(-eta, &game.bob_gradient(&xa)).softmax()?;
        let ga = game.alice_gradient(&hb);
        let gb = game.bob_gradient(&ha);
        ya = ya.axpy(eta, &ga).centered();
        yb = yb.axpy(-eta, &gb).centered();

        best.offer_alice(gb.best_response(false)?.0, &ha);
        best.offer_bob(ga.best_response(true)?.0, &hb);
        sum_a = sum_a.axpy(1.0, &ha);
        sum_b = sum_b.axpy(1.0, &hb);
        if best.upper - best.lower > opts.tol {
            let avg_a = sum_a.scaled(1.0 / iterations as f64);
            let avg_b = sum_b.scaled(1.0 / iterations as f64);
            best.offer_alice(game.bob_gradient(&avg_a).best_response(false)?.0, &avg_a);
            best.offer_bob(game.alice_gradient(&avg_b).best_response(true)?.0, &avg_b);
        }
        if best.upper - best.lower <= opts.tol {
            break;
        }
    }
    let converged = best.upper - best.lower <= opts.tol;
    Ok(Solution {
        lower: best.lower,
        upper: best.upper,
        alice: best.alice,
        bob: best.bob,
        iterations,
        converged,
    })
}

/// Bob's best response to Alice's strategy `a`: the value and the
/// minimizing pure strategy.
pub fn bob_best_response<G: BilinearGame>(game: &G, a: &Mixed) -> Result<(f64, Mixed)> {
    game.bob_gradient(a).best_response(false)
}

/// Alice's best response to Bob's strategy `b`.
pub fn alice_best_response<G: BilinearGame>(game: &G, b: &Mixed) -> Result<(f64, Mixed)> {
    game.alice_gradient(b).best_response(true)
}

/// `f(a, b)`.
pub fn payoff<G: BilinearGame>(game: &G, a: &Mixed, b: &Mixed) -> f64 {
    game.bob_gradient(a).pair(b)
}
