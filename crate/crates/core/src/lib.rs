//! Finite-population evolutionary games as Markov chains.
//!
//! A symmetric two-player game with `M` pure strategies is played by `N`
//! players. Every generation each player meets every other player once, one
//! player is picked uniformly at random and revises its strategy according to
//! a rate matrix `R(s)`. The count vector `s = (s_1, ..., s_M)` is a Markov
//! chain over the compositions of `N` into `M` parts.
//!
//! The crate is `no_std` (it needs `alloc`) and covers the whole numerical
//! pipeline:
//!
//! - [`game`]: base games, memory-one strategies and the iterated meta-game `B`
//! - [`presets`]: the Prisoner's Dilemma, Stag Hunt and Rock-Paper-Scissors games
//! - [`population`]: state space enumeration and per-state payoffs
//! - [`revision`]: the BR, PPC, PC, CAP and Logit rate matrices
//! - [`chain`]: the sparse transition matrix and recurrent class decomposition
//! - [`solver`]: absorption probabilities and the RGB state coloring
//! - [`simulator`]: seeded trajectories and Monte-Carlo absorption estimates
//! - [`checker`]: mechanical checks of the best-strategy and absorption
//!   conjectures for the iterated Prisoner's Dilemma under best response
//!
//! ```
//! use egt_core::{chain, game, population, revision::Protocol, solver};
//!
//! let pd = game::BaseGame::new(2, vec![3.0, 1.0, 4.0, 2.0]).unwrap();
//! let strategies = [
//!     game::StrategyAutomaton::all_c(),
//!     game::StrategyAutomaton::all_d(),
//!     game::StrategyAutomaton::tit_for_tat(),
//! ];
//! let meta = game::build_meta_game(&pd, &strategies, 1000).unwrap();
//! let space = population::enumerate_states(3, 3).unwrap();
//! let p = chain::build_transition_matrix(&space, &meta, &Protocol::BestResponse).unwrap();
//! let classes = chain::classify_states(&p);
//! assert_eq!(classes.absorbing_states().len(), 3);
//! let absorption = solver::absorption_probabilities(&p, &classes).unwrap();
//! assert!(absorption.max_row_sum_error() < 1e-9);
//! ```
#![no_std]
#![deny(missing_docs)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod chain;
pub mod checker;
mod error;
pub mod game;
pub mod population;
pub mod presets;
pub mod revision;
pub mod simulator;
pub mod solver;

pub use error::{Error, Result};
