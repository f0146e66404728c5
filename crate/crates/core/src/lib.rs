//! Exact simulation, game values and counting-style decision procedures for
//! one-turn quantum refereed games.

pub mod catalog;
pub mod circuit;
pub mod error;
pub mod exact;
pub mod game;
pub mod gap;
pub mod linalg;
pub mod natural;
pub mod predicates;
pub mod sparsify;

pub use error::{Error, Result};
