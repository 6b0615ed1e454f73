//! Revision protocols and their rate matrices.
//!
//! A revising `m1`-user adopts `m2` with probability `R[m1][m2](s)`. All
//! protocols only ever propose strategies that are present in `s`; when no
//! candidate has a positive surplus the reviser keeps its strategy.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::population::{PayoffProfile, StateVector};
use crate::{Error, Result};

/// Relative tolerance below which payoff differences count as ties.
///
/// Scaled by the largest absolute payoff among present strategies, so the
/// decision is invariant under positive rescaling of `B`.
pub const TIE_RTOL: f64 = 1e-12;

/// Logit noise parameter, strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Eta(f64);

impl Eta {
    /// Rejects non-positive or non-finite values.
    pub fn new(eta: f64) -> Result<Self> {
        if eta.is_finite() && eta > 0.0 {
            Ok(Self(eta))
        } else {
            Err(Error::InvalidEta(eta))
        }
    }

    /// The raw value.
    pub fn get(self) -> f64 {
        self.0
    }
}

/// The five revision protocols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Protocol {
    /// Switch uniformly to one of the strategies of the best-paid players.
    BestResponse,
    /// Switch in proportion to `x_m2 [Q_m2 - Q_m1]+`.
    PairwiseProportionalComparison,
    /// Switch in proportion to `[Q_m2 - Q_m1]+`.
    PairwiseComparison,
    /// Switch in proportion to `[Q_m2 - mean Q]+`.
    ComparisonToAverage,
    /// Switch in proportion to `exp(Q_m2 / eta)`.
    Logit(Eta),
}

impl Protocol {
    /// Short lowercase name: `br`, `ppc`, `pc`, `cap` or `logit`.
    pub fn short_name(&self) -> &'static str {
        match self {
            Protocol::BestResponse => "br",
            Protocol::PairwiseProportionalComparison => "ppc",
            Protocol::PairwiseComparison => "pc",
            Protocol::ComparisonToAverage => "cap",
            Protocol::Logit(_) => "logit",
        }
    }

    /// Logit noise, if any.
    pub fn eta(&self) -> Option<f64> {
        match self {
            Protocol::Logit(eta) => Some(eta.get()),
            _ => None,
        }
    }

    /// Parses a protocol name, attaching `eta` for logit.
    ///
    /// `cav` is accepted as an alias of `cap`. Logit without `eta` is an error.
    pub fn parse(name: &str, eta: Option<f64>) -> core::result::Result<Self, ParseProtocolError> {
        let lower = name.trim().to_ascii_lowercase();
        Ok(match lower.as_str() {
            "br" => Protocol::BestResponse,
            "ppc" => Protocol::PairwiseProportionalComparison,
            "pc" => Protocol::PairwiseComparison,
            "cap" | "cav" => Protocol::ComparisonToAverage,
            "logit" => {
                let eta = eta.ok_or(ParseProtocolError::MissingEta)?;
                Protocol::Logit(Eta::new(eta).map_err(|_| ParseProtocolError::InvalidEta(eta))?)
            }
            _ => return Err(ParseProtocolError::Unknown),
        })
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Protocol::Logit(eta) => write!(f, "logit(eta={})", eta.get()),
            other => f.write_str(other.short_name()),
        }
    }
}

/// Failure to parse a protocol name.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseProtocolError {
    /// Not one of br, ppc, pc, cap, cav, logit.
    #[error("unknown protocol (expected br, ppc, pc, cap or logit)")]
    Unknown,
    /// Logit needs a noise parameter.
    #[error("logit protocol requires eta")]
    MissingEta,
    /// Logit noise must be positive.
    #[error("logit noise eta must be positive and finite, got {0}")]
    InvalidEta(f64),
}

impl FromStr for Protocol {
    type Err = ParseProtocolError;

    /// Parses `br`, `ppc`, `pc`, `cap`, `cav`, or `logit:<eta>`.
    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s.split_once(':') {
            Some((name, eta)) => {
                let eta = eta
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| ParseProtocolError::MissingEta)?;
                Protocol::parse(name, Some(eta))
            }
            None => Protocol::parse(s, None),
        }
    }
}

/// Row-stochastic `M x M` switching matrix at one state.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    m: usize,
    r: Vec<f64>,
    support: Vec<bool>,
}

impl RateMatrix {
    /// Number of strategies.
    pub fn strategies(&self) -> usize {
        self.m
    }

    /// Probability that a revising `from`-user adopts `to`.
    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.r[from * self.m + to]
    }

    /// Row `from`.
    pub fn row(&self, from: usize) -> &[f64] {
        &self.r[from * self.m..(from + 1) * self.m]
    }

    /// Which strategies were present when the matrix was computed.
    pub fn support(&self) -> &[bool] {
        &self.support
    }
}

/// Largest absolute value among present strategies, times [`TIE_RTOL`].
fn tie_tolerance(values: &[f64], support: &[bool]) -> f64 {
    let scale = values
        .iter()
        .zip(support)
        .filter(|(_, &p)| p)
        .fold(0.0f64, |acc, (v, _)| acc.max(libm::fabs(*v)));
    scale * TIE_RTOL
}

/// Strategies whose per-player payoff is maximal among present strategies.
///
/// This is the set of strategies used by the best-paid players; near-ties
/// within [`TIE_RTOL`] are treated as ties.
pub fn best_strategies(state: &StateVector, profile: &PayoffProfile) -> Vec<usize> {
    argmax_present(&profile.player, state)
}

/// Strategies whose total payoff is maximal among present strategies.
pub fn best_strategies_by_total(state: &StateVector, profile: &PayoffProfile) -> Vec<usize> {
    argmax_present(&profile.total, state)
}

fn argmax_present(values: &[f64], state: &StateVector) -> Vec<usize> {
    let support: Vec<bool> = (0..state.strategies())
        .map(|m| state.is_present(m))
        .collect();
    let best = values
        .iter()
        .zip(&support)
        .filter(|(_, &p)| p)
        .fold(f64::NEG_INFINITY, |acc, (v, _)| acc.max(*v));
    let tol = tie_tolerance(values, &support);
    (0..values.len())
        .filter(|&m| support[m] && values[m] >= best - tol)
        .collect()
}

/// Normalizes `weights` into `row`; all-zero weights mean stay put.
fn fill_row(row: &mut [f64], weights: &[f64], own: usize) {
    let total: f64 = weights.iter().sum();
    if total > 0.0 {
        for (r, w) in row.iter_mut().zip(weights) {
            *r = w / total;
        }
    } else {
        row.iter_mut().for_each(|r| *r = 0.0);
        row[own] = 1.0;
    }
}

/// Computes the rate matrix of `protocol` at `state`.
///
/// Rows of extinct strategies are identity rows; they carry zero selection
/// weight in the chain.
pub fn rate_matrix(
    protocol: &Protocol,
    state: &StateVector,
    profile: &PayoffProfile,
) -> Result<RateMatrix> {
    let m = state.strategies();
    if profile.player.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: profile.player.len(),
        });
    }
    if state.players() == 0 {
        return Err(Error::StateNotInSpace);
    }
    let support: Vec<bool> = (0..m).map(|k| state.is_present(k)).collect();
    let mut r = vec![0.0; m * m];
    let q = &profile.total;
    let tol = tie_tolerance(q, &support);
    let mut weights = vec![0.0; m];

    // rows that do not depend on the reviser's own strategy
    let shared: Option<Vec<f64>> = match protocol {
        Protocol::BestResponse => {
            let best = best_strategies(state, profile);
            let mut w = vec![0.0; m];
            for &k in &best {
                w[k] = 1.0;
            }
            Some(w)
        }
        Protocol::ComparisonToAverage => Some(
            (0..m)
                .map(|k| {
                    let surplus = q[k] - profile.average;
                    if support[k] && surplus > tol {
                        surplus
                    } else {
                        0.0
                    }
                })
                .collect(),
        ),
        Protocol::Logit(eta) => {
            let top = q
                .iter()
                .zip(&support)
                .filter(|(_, &p)| p)
                .fold(f64::NEG_INFINITY, |acc, (v, _)| acc.max(*v));
            Some(
                (0..m)
                    .map(|k| {
                        if support[k] {
                            libm::exp((q[k] - top) / eta.get())
                        } else {
                            0.0
                        }
                    })
                    .collect(),
            )
        }
        Protocol::PairwiseProportionalComparison | Protocol::PairwiseComparison => None,
    };

    for from in 0..m {
        let row = &mut r[from * m..(from + 1) * m];
        if !support[from] {
            row[from] = 1.0;
            continue;
        }
        match &shared {
            Some(w) => fill_row(row, w, from),
            None => {
                for to in 0..m {
                    let surplus = q[to] - q[from];
                    weights[to] = if support[to] && surplus > tol {
                        match protocol {
                            Protocol::PairwiseProportionalComparison => {
                                profile.frequency[to] * surplus
                            }
                            _ => surplus,
                        }
                    } else {
                        0.0
                    };
                }
                fill_row(row, &weights, from);
            }
        }
    }
    Ok(RateMatrix { m, r, support })
}
