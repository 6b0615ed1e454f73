//! State space enumeration and per-state payoffs.
//!
//! The chain lives on count vectors `s`, not on player-level populations:
//! every revision protocol depends on the population only through `s`, and
//! all users of one strategy receive the same payoff.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::game::MetaGame;
use crate::{Error, Result};

/// Number of players using each strategy.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateVector(Vec<usize>);

impl StateVector {
    /// Wraps a count vector.
    pub fn new(counts: Vec<usize>) -> Self {
        Self(counts)
    }

    /// Counts per strategy.
    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    /// Players using strategy `m`.
    pub fn count(&self, m: usize) -> usize {
        self.0[m]
    }

    /// Total number of players.
    pub fn players(&self) -> usize {
        self.0.iter().sum()
    }

    /// Number of strategies.
    pub fn strategies(&self) -> usize {
        self.0.len()
    }

    /// Whether strategy `m` has at least one user.
    pub fn is_present(&self, m: usize) -> bool {
        self.0[m] > 0
    }

    /// Whether all players use a single strategy.
    pub fn is_pure(&self) -> bool {
        self.0.iter().filter(|&&c| c > 0).count() == 1
    }

    /// The state after one `from`-user switches to `to`.
    pub fn moved(&self, from: usize, to: usize) -> Self {
        let mut next = self.0.clone();
        next[from] -= 1;
        next[to] += 1;
        Self(next)
    }

    /// Cyclic relabeling `(s_1, ..., s_M) -> (s_M, s_1, ..., s_{M-1})`.
    pub fn rotated(&self) -> Self {
        let mut next = self.0.clone();
        next.rotate_right(1);
        Self(next)
    }
}

impl From<Vec<usize>> for StateVector {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

impl<const K: usize> From<[usize; K]> for StateVector {
    fn from(v: [usize; K]) -> Self {
        Self(v.to_vec())
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// All compositions of `N` players over `M` strategies in canonical order:
/// ascending lexicographic in `(s_1, ..., s_{M-1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    players: usize,
    strategies: usize,
    states: Vec<StateVector>,
    index: BTreeMap<StateVector, usize>,
}

impl StateSpace {
    /// Number of players `N`.
    pub fn players(&self) -> usize {
        self.players
    }

    /// Number of strategies `M`.
    pub fn strategies(&self) -> usize {
        self.strategies
    }

    /// Number of states.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    /// Always false; a state space has at least one state.
    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// States in canonical order.
    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    /// The state at canonical index `i`.
    pub fn state(&self, i: usize) -> &StateVector {
        &self.states[i]
    }

    /// Canonical index of `s`, if it belongs to the space.
    pub fn index_of(&self, s: &StateVector) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Index of the pure state in which everybody uses strategy `m`.
    pub fn pure_state(&self, m: usize) -> usize {
        let mut counts = vec![0; self.strategies];
        counts[m] = self.players;
        self.index[&StateVector(counts)]
    }
}

fn compositions(
    remaining: usize,
    parts: usize,
    prefix: &mut Vec<usize>,
    out: &mut Vec<StateVector>,
) {
    if parts == 1 {
        prefix.push(remaining);
        out.push(StateVector(prefix.clone()));
        prefix.pop();
        return;
    }
    for first in 0..=remaining {
        prefix.push(first);
        compositions(remaining - first, parts - 1, prefix, out);
        prefix.pop();
    }
}

/// Enumerates the `C(N+M-1, M-1)` states of `N` players over `M` strategies.
pub fn enumerate_states(players: usize, strategies: usize) -> Result<StateSpace> {
    if players == 0 || strategies == 0 {
        return Err(Error::EmptySpace {
            players,
            strategies,
        });
    }
    let mut states = Vec::new();
    compositions(
        players,
        strategies,
        &mut Vec::with_capacity(strategies),
        &mut states,
    );
    let index = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    Ok(StateSpace {
        players,
        strategies,
        states,
        index,
    })
}

/// Payoff of a single `m`-user at state `s`: one match against every other
/// player, `q(m; s) = sum_k s_k B[m][k] - B[m][m]`.
///
/// The formula value is returned for extinct strategies as well; callers
/// mask those out.
pub fn player_payoff(state: &StateVector, meta: &MetaGame, m: usize) -> f64 {
    state
        .counts()
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let opponents = c as f64 - if k == m { 1.0 } else { 0.0 };
            opponents * meta.payoff(m, k)
        })
        .sum()
}

/// Payoff summary of one state.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffProfile {
    /// Per-player payoff `q[m]` of an `m`-user.
    pub player: Vec<f64>,
    /// Strategy totals `Q[m] = s_m q[m]`.
    pub total: Vec<f64>,
    /// Frequencies `x[m] = s_m / N`.
    pub frequency: Vec<f64>,
    /// Average strategy payoff `sum_m x_m Q_m`.
    pub average: f64,
    /// Largest strategy total `max_m Q_m`.
    pub max_total: f64,
}

/// Computes `q`, `Q`, `x`, the average and maximum strategy payoff at `state`.
pub fn payoff_profile(state: &StateVector, meta: &MetaGame) -> Result<PayoffProfile> {
    let m = meta.strategies();
    if state.strategies() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: state.strategies(),
        });
    }
    let n = state.players();
    if n == 0 {
        return Err(Error::StateNotInSpace);
    }
    let player: Vec<f64> = (0..m).map(|k| player_payoff(state, meta, k)).collect();
    let total: Vec<f64> = (0..m)
        .map(|k| {
            if state.is_present(k) {
                state.count(k) as f64 * player[k]
            } else {
                0.0
            }
        })
        .collect();
    let frequency: Vec<f64> = state
        .counts()
        .iter()
        .map(|&c| c as f64 / n as f64)
        .collect();
    let weighted: f64 = state
        .counts()
        .iter()
        .zip(&total)
        .map(|(&c, q)| c as f64 * q)
        .sum();
    let max_total = total.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(PayoffProfile {
        player,
        total,
        frequency,
        average: weighted / n as f64,
        max_total,
    })
}
