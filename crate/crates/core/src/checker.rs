//! Mechanical checks of two conjectures about the iterated Prisoner's Dilemma
//! with strategies (AllC, AllD, TitForTat) under best response.
//!
//! Best-strategy conjecture (for `T > 2N`): at a state with `s_2 > 0` the
//! best strategy is AllD when `N - 1 <= 2 s_1 + s_2` and TitForTat otherwise;
//! with `s_2 = 0` the best strategies lie in {AllC, TitForTat}.
//!
//! Absorption conjecture: the pure states are the only absorbing states, and
//! from every state in `S1 = {s_2 = 0}` or `S2 = {2 s_1 + s_2 < N + 1}` the
//! chain is absorbed into the AllC or the TitForTat pure state with
//! probability one.
//!
//! Strategies are 0-based here (0 = AllC, 1 = AllD, 2 = TitForTat); the
//! textual report prints them 1-based.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::chain::{build_transition_matrix, classify_states};
use crate::game::MetaGame;
use crate::population::{enumerate_states, payoff_profile, StateVector};
use crate::revision::{best_strategies, best_strategies_by_total, Protocol};
use crate::solver::absorption_probabilities;
use crate::{Error, Result};

const ALL_C: usize = 0;
const ALL_D: usize = 1;
const TFT: usize = 2;

/// Absorption into the AllD pure state at or above this counts as a violation.
pub const GREEN_TOLERANCE: f64 = 1e-10;

/// Which payoff defines "the best strategy at a state".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BestStrategyCriterion {
    /// Argmax of the per-player payoff `q`, the ranking best response uses.
    #[default]
    PlayerPayoff,
    /// Argmax of the strategy total `Q_m = s_m q_m`.
    StrategyTotal,
}

impl fmt::Display for BestStrategyCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BestStrategyCriterion::PlayerPayoff => "argmax-q",
            BestStrategyCriterion::StrategyTotal => "argmax-Q",
        })
    }
}

/// Which conjecture a report covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Proposition {
    /// Best strategy by state.
    BestStrategy,
    /// Absorbing states and absorption away from AllD.
    Absorption,
}

impl Proposition {
    /// 1 or 2.
    pub fn number(&self) -> u8 {
        match self {
            Proposition::BestStrategy => 1,
            Proposition::Absorption => 2,
        }
    }
}

/// One failed check.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// The observed best-strategy set does not match the conjecture.
    BestStrategy {
        /// State checked.
        state: StateVector,
        /// Strategies the conjecture allows.
        expected: Vec<usize>,
        /// Observed argmax set.
        observed: Vec<usize>,
    },
    /// A state's absorbing status disagrees with "only pure states absorb".
    AbsorbingSet {
        /// State checked.
        state: StateVector,
        /// Whether the state is absorbing.
        absorbing: bool,
    },
    /// A state of `S1 ∪ S2` reaches the AllD pure state.
    GreenAbsorption {
        /// State checked.
        state: StateVector,
        /// Probability of absorption into `(0, N, 0)`.
        probability: f64,
    },
}

impl Violation {
    /// The state the violation refers to.
    pub fn state(&self) -> &StateVector {
        match self {
            Violation::BestStrategy { state, .. }
            | Violation::AbsorbingSet { state, .. }
            | Violation::GreenAbsorption { state, .. } => state,
        }
    }
}

/// Green-absorption probability recorded for one state of `S1 ∪ S2`.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenFinding {
    /// The state.
    pub state: StateVector,
    /// Whether the state is in `S1`.
    pub in_s1: bool,
    /// Whether the state is in `S2`.
    pub in_s2: bool,
    /// Probability of absorption into `(0, N, 0)`.
    pub probability: f64,
}

/// Result of checking one conjecture for one `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropositionReport {
    /// Conjecture checked.
    pub proposition: Proposition,
    /// Number of players.
    pub players: usize,
    /// Rounds per match, when known.
    pub rounds: Option<u64>,
    /// Best-strategy notion used.
    pub criterion: BestStrategyCriterion,
    /// Whether `T > 2N` holds; `None` when `T` is unknown.
    pub hypothesis_holds: Option<bool>,
    /// Number of states examined.
    pub states_checked: usize,
    /// Failed checks, in canonical state order.
    pub violations: Vec<Violation>,
    /// Per-state absorption findings (absorption conjecture only).
    pub findings: Vec<GreenFinding>,
    /// True iff there are no violations.
    pub passed: bool,
}

fn require_three(meta: &MetaGame) -> Result<()> {
    if meta.strategies() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: meta.strategies(),
        });
    }
    Ok(())
}

/// Checks the best-strategy conjecture at every state.
///
/// Runs even when `rounds <= 2N`; the report then has
/// `hypothesis_holds == Some(false)`.
pub fn check_prop1(
    players: usize,
    rounds: u64,
    meta: &MetaGame,
    criterion: BestStrategyCriterion,
) -> Result<PropositionReport> {
    require_three(meta)?;
    let space = enumerate_states(players, 3)?;
    let mut violations = Vec::new();
    for s in space.states() {
        let profile = payoff_profile(s, meta)?;
        let observed = match criterion {
            BestStrategyCriterion::PlayerPayoff => best_strategies(s, &profile),
            BestStrategyCriterion::StrategyTotal => best_strategies_by_total(s, &profile),
        };
        let (expected, holds) = if s.count(ALL_D) > 0 {
            let implied = if players - 1 <= 2 * s.count(ALL_C) + s.count(ALL_D) {
                ALL_D
            } else {
                TFT
            };
            (vec![implied], observed.contains(&implied))
        } else {
            (
                vec![ALL_C, TFT],
                observed.iter().all(|&m| m == ALL_C || m == TFT),
            )
        };
        if !holds {
            violations.push(Violation::BestStrategy {
                state: s.clone(),
                expected,
                observed,
            });
        }
    }
    Ok(PropositionReport {
        proposition: Proposition::BestStrategy,
        players,
        rounds: Some(rounds),
        criterion,
        hypothesis_holds: Some(rounds > 2 * players as u64),
        states_checked: space.len(),
        passed: violations.is_empty(),
        violations,
        findings: Vec::new(),
    })
}

/// Checks the absorption conjecture under best response.
pub fn check_prop2(players: usize, meta: &MetaGame) -> Result<PropositionReport> {
    require_three(meta)?;
    let space = enumerate_states(players, 3)?;
    let p = build_transition_matrix(&space, meta, &Protocol::BestResponse)?;
    let cls = classify_states(&p);
    let absorption = absorption_probabilities(&p, &cls)?;
    let mut violations = Vec::new();
    let mut findings = Vec::new();
    for (i, s) in space.states().iter().enumerate() {
        if cls.is_absorbing(i) != s.is_pure() {
            violations.push(Violation::AbsorbingSet {
                state: s.clone(),
                absorbing: cls.is_absorbing(i),
            });
        }
        let in_s1 = s.count(ALL_D) == 0;
        let in_s2 = 2 * s.count(ALL_C) + s.count(ALL_D) < players + 1;
        if in_s1 || in_s2 {
            let probability = absorption.pure()[i][ALL_D];
            if probability >= GREEN_TOLERANCE {
                violations.push(Violation::GreenAbsorption {
                    state: s.clone(),
                    probability,
                });
            }
            findings.push(GreenFinding {
                state: s.clone(),
                in_s1,
                in_s2,
                probability,
            });
        }
    }
    let rounds = match meta.provenance() {
        crate::game::Provenance::Iterated { rounds, .. } => Some(*rounds),
        crate::game::Provenance::Direct => None,
    };
    Ok(PropositionReport {
        proposition: Proposition::Absorption,
        players,
        rounds,
        criterion: BestStrategyCriterion::PlayerPayoff,
        hypothesis_holds: rounds.map(|t| t > 2 * players as u64),
        states_checked: space.len(),
        passed: violations.is_empty(),
        violations,
        findings,
    })
}

struct OneBased<'a>(&'a [usize]);

impl fmt::Display for OneBased<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", m + 1)?;
        }
        f.write_str("}")
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BestStrategy {
                state,
                expected,
                observed,
            } => write!(
                f,
                "state {state}: expected best in {}, observed {}",
                OneBased(expected),
                OneBased(observed)
            ),
            Violation::AbsorbingSet { state, absorbing } => {
                if *absorbing {
                    write!(f, "state {state}: absorbing but not pure")
                } else {
                    write!(f, "state {state}: pure but not absorbing")
                }
            }
            Violation::GreenAbsorption { state, probability } => {
                write!(
                    f,
                    "state {state}: absorbed by AllD with probability {probability:.17e}"
                )
            }
        }
    }
}

impl fmt::Display for PropositionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "proposition: {}", self.proposition.number())?;
        writeln!(f, "players: {}", self.players)?;
        match self.rounds {
            Some(t) => writeln!(f, "rounds: {t}")?,
            None => writeln!(f, "rounds: n/a")?,
        }
        writeln!(f, "criterion: {}", self.criterion)?;
        match self.hypothesis_holds {
            Some(true) => writeln!(f, "hypothesis T > 2N: holds")?,
            Some(false) => writeln!(f, "hypothesis T > 2N: VIOLATED (results are informational)")?,
            None => writeln!(f, "hypothesis T > 2N: unknown")?,
        }
        writeln!(f, "states checked: {}", self.states_checked)?;
        writeln!(f, "violations: {}", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        writeln!(f, "result: {}", if self.passed { "PASS" } else { "FAIL" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{build_meta_game, BaseGame, StrategyAutomaton};

    fn ipd(rounds: u64) -> MetaGame {
        let pd = BaseGame::new(2, vec![3.0, 1.0, 4.0, 2.0]).unwrap();
        let s = [
            StrategyAutomaton::all_c(),
            StrategyAutomaton::all_d(),
            StrategyAutomaton::tit_for_tat(),
        ];
        build_meta_game(&pd, &s, rounds).unwrap()
    }

    #[test]
    fn best_strategy_holds_for_three_players() {
        let report = check_prop1(3, 1000, &ipd(1000), BestStrategyCriterion::PlayerPayoff).unwrap();
        assert!(report.passed, "{report}");
        assert_eq!(report.states_checked, 10);
        assert_eq!(report.hypothesis_holds, Some(true));
    }

    #[test]
    fn short_matches_flag_hypothesis() {
        let report = check_prop1(3, 4, &ipd(4), BestStrategyCriterion::PlayerPayoff).unwrap();
        assert_eq!(report.hypothesis_holds, Some(false));
    }

    #[test]
    fn passed_iff_no_violations() {
        let report = check_prop2(3, &ipd(1000)).unwrap();
        assert_eq!(report.passed, report.violations.is_empty());
        // (1,1,1) lies in S2 yet every path leads to AllD
        let witness: StateVector = [1, 1, 1].into();
        let finding = report.findings.iter().find(|f| f.state == witness).unwrap();
        assert!(finding.in_s2 && !finding.in_s1);
        assert!((finding.probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_three_strategy_games() {
        let pd = BaseGame::new(2, vec![3.0, 1.0, 4.0, 2.0]).unwrap();
        let meta = build_meta_game(&pd, &[StrategyAutomaton::all_c()], 10).unwrap();
        assert!(check_prop1(3, 10, &meta, BestStrategyCriterion::PlayerPayoff).is_err());
        assert!(check_prop2(3, &meta).is_err());
    }
}
