//! Base games, memory-one strategies and the meta-game matrix `B`.
//!
//! `B[i][j]` is the total payoff the row player collects over `T` rounds of
//! the base game when playing strategy `i` against strategy `j`. One-shot
//! games (Rock-Paper-Scissors) use the payoff matrix directly as `B`.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Index of the cooperative action in two-action games.
pub const COOPERATE: usize = 0;
/// Index of the defecting action in two-action games.
pub const DEFECT: usize = 1;

fn check_square(dim: usize, entries: &[f64]) -> Result<()> {
    if dim == 0 || entries.len() != dim * dim {
        return Err(Error::BadMatrixShape {
            dim,
            entries: entries.len(),
        });
    }
    if let Some(k) = entries.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinitePayoff {
            row: k / dim,
            col: k % dim,
        });
    }
    Ok(())
}

/// A symmetric two-player game `(A, A^T)` in normal form.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseGame {
    actions: usize,
    payoff: Vec<f64>,
}

impl BaseGame {
    /// Builds a game from the row player's payoffs, row-major.
    pub fn new(actions: usize, payoff: Vec<f64>) -> Result<Self> {
        check_square(actions, &payoff)?;
        Ok(Self { actions, payoff })
    }

    /// Builds a game from nested rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let actions = rows.len();
        let payoff: Vec<f64> = rows.iter().flatten().copied().collect();
        if rows.iter().any(|r| r.len() != actions) {
            return Err(Error::BadMatrixShape {
                dim: actions,
                entries: payoff.len(),
            });
        }
        Self::new(actions, payoff)
    }

    /// Number of pure actions.
    pub fn actions(&self) -> usize {
        self.actions
    }

    /// Row player's payoff when playing `row` against `col`.
    pub fn payoff(&self, row: usize, col: usize) -> f64 {
        self.payoff[row * self.actions + col]
    }

    /// Row-major payoff entries.
    pub fn entries(&self) -> &[f64] {
        &self.payoff
    }
}

/// A deterministic memory-one strategy for iterated play.
///
/// The first move is `initial_action`; afterwards the strategy plays
/// `response[opponent's previous action]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyAutomaton {
    name: String,
    initial_action: usize,
    response: Vec<usize>,
}

impl StrategyAutomaton {
    /// Creates an automaton. Validity against a game is checked when it is
    /// used with one.
    pub fn new(name: impl Into<String>, initial_action: usize, response: Vec<usize>) -> Self {
        Self {
            name: name.into(),
            initial_action,
            response,
        }
    }

    /// Always cooperate.
    pub fn all_c() -> Self {
        Self::new("AllC", COOPERATE, vec![COOPERATE, COOPERATE])
    }

    /// Always defect.
    pub fn all_d() -> Self {
        Self::new("AllD", DEFECT, vec![DEFECT, DEFECT])
    }

    /// Cooperate first, then copy the opponent's previous move.
    pub fn tit_for_tat() -> Self {
        Self::new("TitForTat", COOPERATE, vec![COOPERATE, DEFECT])
    }

    /// Strategy label.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Action played in the first round.
    pub fn initial_action(&self) -> usize {
        self.initial_action
    }

    /// Action played after the opponent played `opponent_last`.
    pub fn respond(&self, opponent_last: usize) -> usize {
        self.response[opponent_last]
    }

    /// Checks that the automaton is total over a game with `actions` actions.
    pub fn validate(&self, actions: usize) -> Result<()> {
        if self.response.len() != actions {
            return Err(Error::IncompleteResponse {
                strategy: self.name.clone(),
                covered: self.response.len(),
                actions,
            });
        }
        let bad = core::iter::once(&self.initial_action)
            .chain(self.response.iter())
            .find(|&&a| a >= actions);
        match bad {
            Some(&action) => Err(Error::ActionOutOfRange {
                strategy: self.name.clone(),
                action,
                actions,
            }),
            None => Ok(()),
        }
    }
}

/// How a match between two automata is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchEvaluation {
    /// Step through every round.
    #[default]
    Naive,
    /// Detect the periodic tail of the joint action sequence (period at
    /// most `m^2`) and count whole cycles at once.
    CycleDetection,
}

/// How many times each joint action `(row, col)` occurs in `rounds` rounds,
/// row-major over `actions x actions`.
pub fn joint_action_counts(
    row: &StrategyAutomaton,
    col: &StrategyAutomaton,
    actions: usize,
    rounds: u64,
    evaluation: MatchEvaluation,
) -> Vec<u64> {
    let mut counts = vec![0u64; actions * actions];
    let step = |(a, b): (usize, usize)| (row.respond(b), col.respond(a));
    let mut current = (row.initial_action(), col.initial_action());
    match evaluation {
        MatchEvaluation::Naive => {
            for _ in 0..rounds {
                counts[current.0 * actions + current.1] += 1;
                current = step(current);
            }
        }
        MatchEvaluation::CycleDetection => {
            // first round at which each joint action was seen
            let mut seen = vec![u64::MAX; actions * actions];
            let mut order = Vec::new();
            let mut round = 0u64;
            while round < rounds {
                let key = current.0 * actions + current.1;
                if seen[key] != u64::MAX {
                    let start = seen[key];
                    let cycle = &order[start as usize..];
                    let period = round - start;
                    let remaining = rounds - round;
                    let whole = remaining / period;
                    for &k in cycle {
                        counts[k] += whole;
                    }
                    for &k in &cycle[..(remaining % period) as usize] {
                        counts[k] += 1;
                    }
                    return counts;
                }
                seen[key] = round;
                order.push(key);
                counts[key] += 1;
                current = step(current);
                round += 1;
            }
        }
    }
    counts
}

/// Plays `rounds` rounds and returns `(row_total, col_total)`.
pub fn play_match(
    row: &StrategyAutomaton,
    col: &StrategyAutomaton,
    game: &BaseGame,
    rounds: u64,
) -> Result<(f64, f64)> {
    play_match_with(row, col, game, rounds, MatchEvaluation::Naive)
}

/// [`play_match`] with an explicit evaluation method. Both methods produce
/// bit-identical totals: payoffs are accumulated from joint action counts
/// in the same fixed order.
pub fn play_match_with(
    row: &StrategyAutomaton,
    col: &StrategyAutomaton,
    game: &BaseGame,
    rounds: u64,
    evaluation: MatchEvaluation,
) -> Result<(f64, f64)> {
    if rounds == 0 {
        return Err(Error::ZeroRounds);
    }
    let m = game.actions();
    row.validate(m)?;
    col.validate(m)?;
    let counts = joint_action_counts(row, col, m, rounds, evaluation);
    let mut row_total = 0.0;
    let mut col_total = 0.0;
    for a in 0..m {
        for b in 0..m {
            let c = counts[a * m + b];
            if c > 0 {
                row_total += c as f64 * game.payoff(a, b);
                col_total += c as f64 * game.payoff(b, a);
            }
        }
    }
    Ok((row_total, col_total))
}

/// Where a meta-game's payoffs came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    /// Round-robin iterated play of a base game.
    Iterated {
        /// The one-shot game.
        game: BaseGame,
        /// Strategies in row order.
        strategies: Vec<StrategyAutomaton>,
        /// Rounds per match.
        rounds: u64,
    },
    /// Payoffs supplied directly (one-shot play).
    Direct,
}

/// The `M x M` payoff matrix `B` between strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaGame {
    names: Vec<String>,
    b: Vec<f64>,
    provenance: Provenance,
}

impl MetaGame {
    /// Number of strategies `M`.
    pub fn strategies(&self) -> usize {
        self.names.len()
    }

    /// Strategy labels.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// `B[row][col]`.
    pub fn payoff(&self, row: usize, col: usize) -> f64 {
        self.b[row * self.names.len() + col]
    }

    /// Row-major entries of `B`.
    pub fn entries(&self) -> &[f64] {
        &self.b
    }

    /// `B` as nested rows.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.b
            .chunks(self.names.len())
            .map(|r| r.to_vec())
            .collect()
    }

    /// How the matrix was obtained.
    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Copy of this game with every payoff multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            names: self.names.clone(),
            b: self.b.iter().map(|v| v * factor).collect(),
            provenance: Provenance::Direct,
        }
    }
}

/// Builds `B` by playing every ordered pair of strategies for `rounds` rounds.
pub fn build_meta_game(
    game: &BaseGame,
    strategies: &[StrategyAutomaton],
    rounds: u64,
) -> Result<MetaGame> {
    build_meta_game_with(game, strategies, rounds, MatchEvaluation::Naive)
}

/// [`build_meta_game`] with an explicit match evaluation method.
pub fn build_meta_game_with(
    game: &BaseGame,
    strategies: &[StrategyAutomaton],
    rounds: u64,
    evaluation: MatchEvaluation,
) -> Result<MetaGame> {
    if strategies.is_empty() {
        return Err(Error::NoStrategies);
    }
    if rounds == 0 {
        return Err(Error::ZeroRounds);
    }
    let mut b = Vec::with_capacity(strategies.len() * strategies.len());
    for row in strategies {
        for col in strategies {
            b.push(play_match_with(row, col, game, rounds, evaluation)?.0);
        }
    }
    Ok(MetaGame {
        names: strategies.iter().map(|s| s.name().to_string()).collect(),
        b,
        provenance: Provenance::Iterated {
            game: game.clone(),
            strategies: strategies.to_vec(),
            rounds,
        },
    })
}

/// Uses a one-shot payoff matrix (row-major, `names.len()` squared entries)
/// as `B`.
pub fn direct_meta_game(payoff: Vec<f64>, names: Vec<String>) -> Result<MetaGame> {
    let dim = names.len();
    if dim == 0 {
        return Err(Error::NoStrategies);
    }
    if payoff.len() != dim * dim {
        let side = libm::sqrt(payoff.len() as f64) as usize;
        if side * side == payoff.len() && side > 0 {
            return Err(Error::NameCount {
                names: dim,
                dim: side,
            });
        }
        return Err(Error::BadMatrixShape {
            dim,
            entries: payoff.len(),
        });
    }
    check_square(dim, &payoff)?;
    Ok(MetaGame {
        names,
        b: payoff,
        provenance: Provenance::Direct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pd() -> BaseGame {
        BaseGame::new(2, vec![3.0, 1.0, 4.0, 2.0]).unwrap()
    }

    #[test]
    fn all_c_mutual_cooperation() {
        let c = StrategyAutomaton::all_c();
        assert_eq!(play_match(&c, &c, &pd(), 1000).unwrap(), (3000.0, 3000.0));
    }

    #[test]
    fn all_d_against_tit_for_tat() {
        let (d, t) = (StrategyAutomaton::all_d(), StrategyAutomaton::tit_for_tat());
        assert_eq!(play_match(&d, &t, &pd(), 1000).unwrap(), (2002.0, 1999.0));
    }

    #[test]
    fn single_round_sucker_payoff() {
        let (c, d) = (StrategyAutomaton::all_c(), StrategyAutomaton::all_d());
        assert_eq!(play_match(&c, &d, &pd(), 1).unwrap(), (1.0, 4.0));
    }

    #[test]
    fn zero_rounds_rejected() {
        let c = StrategyAutomaton::all_c();
        assert_eq!(play_match(&c, &c, &pd(), 0), Err(Error::ZeroRounds));
    }

    #[test]
    fn automaton_outside_game_rejected() {
        let rps = BaseGame::new(3, vec![0.0; 9]).unwrap();
        let c = StrategyAutomaton::all_c();
        assert!(matches!(
            play_match(&c, &c, &rps, 1),
            Err(Error::IncompleteResponse { .. })
        ));
        let bad = StrategyAutomaton::new("bad", 2, vec![0, 1]);
        assert!(matches!(
            bad.validate(2),
            Err(Error::ActionOutOfRange { action: 2, .. })
        ));
    }

    #[test]
    fn single_strategy_single_round() {
        let meta = build_meta_game(&pd(), &[StrategyAutomaton::all_d()], 1).unwrap();
        assert_eq!(meta.entries(), &[2.0]);
    }

    #[test]
    fn direct_game_is_read_back_unchanged() {
        let rps = vec![0.0, -1.0, 1.0, 1.0, 0.0, -1.0, -1.0, 1.0, 0.0];
        let names = vec!["Rock".into(), "Paper".into(), "Scissors".into()];
        let meta = direct_meta_game(rps.clone(), names).unwrap();
        assert_eq!(meta.entries(), rps.as_slice());
        assert_eq!(meta.provenance(), &Provenance::Direct);
        let zero = direct_meta_game(vec![0.0; 4], vec!["a".into(), "b".into()]).unwrap();
        assert_eq!(zero.strategies(), 2);
    }

    #[test]
    fn direct_game_shape_errors() {
        assert!(matches!(
            direct_meta_game(vec![0.0; 9], vec!["a".into(), "b".into()]),
            Err(Error::NameCount { names: 2, dim: 3 })
        ));
        assert!(matches!(
            direct_meta_game(vec![0.0; 5], vec!["a".into(), "b".into()]),
            Err(Error::BadMatrixShape { .. })
        ));
        assert!(matches!(
            BaseGame::new(2, vec![0.0, f64::NAN, 0.0, 0.0]),
            Err(Error::NonFinitePayoff { row: 0, col: 1 })
        ));
    }

    #[test]
    fn cycle_detection_handles_short_matches() {
        let t = StrategyAutomaton::tit_for_tat();
        let d = StrategyAutomaton::all_d();
        for rounds in 1..6 {
            assert_eq!(
                joint_action_counts(&t, &d, 2, rounds, MatchEvaluation::Naive),
                joint_action_counts(&t, &d, 2, rounds, MatchEvaluation::CycleDetection)
            );
        }
    }
}
