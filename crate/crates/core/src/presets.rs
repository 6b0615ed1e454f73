//! The built-in games: iterated Prisoner's Dilemma, iterated Stag Hunt and
//! Rock-Paper-Scissors.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::game::{build_meta_game, direct_meta_game, BaseGame, MetaGame, StrategyAutomaton};
use crate::Result;

/// Rounds per match used by the iterated presets.
pub const DEFAULT_ROUNDS: u64 = 1000;

/// Prisoner's Dilemma `[[a, 1], [4, 2]]`; the standard game has `a = 3`.
pub fn prisoners_dilemma(a: f64) -> Result<BaseGame> {
    BaseGame::new(2, vec![a, 1.0, 4.0, 2.0])
}

/// Stag Hunt `[[a, 1], [8, 5]]`; the standard game has `a = 10`.
pub fn stag_hunt(a: f64) -> Result<BaseGame> {
    BaseGame::new(2, vec![a, 1.0, 8.0, 5.0])
}

/// Rock-Paper-Scissors payoffs, row-major.
pub fn rock_paper_scissors_payoff() -> Vec<f64> {
    vec![0.0, -1.0, 1.0, 1.0, 0.0, -1.0, -1.0, 1.0, 0.0]
}

/// AllC, AllD and TitForTat, in that order.
pub fn standard_strategies() -> Vec<StrategyAutomaton> {
    vec![
        StrategyAutomaton::all_c(),
        StrategyAutomaton::all_d(),
        StrategyAutomaton::tit_for_tat(),
    ]
}

/// Iterated Prisoner's Dilemma meta-game over the standard strategies.
pub fn ipd(a: f64, rounds: u64) -> Result<MetaGame> {
    build_meta_game(&prisoners_dilemma(a)?, &standard_strategies(), rounds)
}

/// Iterated Stag Hunt meta-game over the standard strategies.
pub fn iterated_stag_hunt(a: f64, rounds: u64) -> Result<MetaGame> {
    build_meta_game(&stag_hunt(a)?, &standard_strategies(), rounds)
}

/// One-shot Rock-Paper-Scissors used directly as the meta-game.
pub fn rps() -> Result<MetaGame> {
    direct_meta_game(
        rock_paper_scissors_payoff(),
        vec![
            String::from("Rock"),
            String::from("Paper"),
            String::from("Scissors"),
        ],
    )
}
