//! Exact-arithmetic reference for the transition matrix.
//!
//! Materializes an explicit population for every state, computes every
//! player's payoff by summing over all opponents, and enumerates each
//! (selected player, adopted strategy) outcome with rational probabilities.
//! Logit weights are the only inexact input: `exp` is evaluated in `f64` and
//! then converted exactly.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Protocols known to the oracle.
#[derive(Debug, Clone, Copy)]
pub enum OracleProtocol {
    Br,
    Ppc,
    Pc,
    Cap,
    Logit(f64),
}

fn rat(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite payoff")
}

fn int(v: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn positive(v: BigRational) -> BigRational {
    if v.is_positive() {
        v
    } else {
        BigRational::zero()
    }
}

/// Stay-put when all weights vanish.
fn normalize(weights: Vec<BigRational>, own: usize) -> Vec<BigRational> {
    let total: BigRational = weights.iter().cloned().sum();
    if total.is_zero() {
        let mut row = vec![BigRational::zero(); weights.len()];
        row[own] = BigRational::one();
        row
    } else {
        weights.into_iter().map(|w| w / &total).collect()
    }
}

/// All compositions of `n` over 3 strategies, built with nested loops.
pub fn states3(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..=n {
        for b in 0..=n - a {
            out.push([a, b, n - a - b]);
        }
    }
    out
}

/// Exact transition probabilities out of `s` for a 3-strategy game `b`
/// (row-major), keyed by successor state.
pub fn transition_row(
    b: &[f64],
    s: [usize; 3],
    protocol: OracleProtocol,
) -> BTreeMap<[usize; 3], BigRational> {
    let n: usize = s.iter().sum();
    let z: Vec<usize> = (0..3).flat_map(|m| std::iter::repeat_n(m, s[m])).collect();
    let bq: Vec<BigRational> = b.iter().map(|&v| rat(v)).collect();
    let q: Vec<BigRational> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| bq[z[i] * 3 + z[j]].clone())
                .sum()
        })
        .collect();
    let mut total = vec![BigRational::zero(); 3];
    for i in 0..n {
        total[z[i]] += &q[i];
    }
    let x: Vec<BigRational> = (0..3).map(|m| int(s[m]) / int(n)).collect();
    let average: BigRational = (0..3).map(|m| &x[m] * &total[m]).sum();
    let present: Vec<bool> = (0..3).map(|m| s[m] > 0).collect();

    let rate_row = |own: usize| -> Vec<BigRational> {
        let weights: Vec<BigRational> = (0..3)
            .map(|to| {
                if !present[to] {
                    return BigRational::zero();
                }
                match protocol {
                    OracleProtocol::Br => {
                        let best = q.iter().max().unwrap();
                        let best_strategies: std::collections::BTreeSet<usize> =
                            (0..n).filter(|&i| &q[i] == best).map(|i| z[i]).collect();
                        if best_strategies.contains(&to) {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    }
                    OracleProtocol::Ppc => &x[to] * positive(&total[to] - &total[own]),
                    OracleProtocol::Pc => positive(&total[to] - &total[own]),
                    OracleProtocol::Cap => positive(&total[to] - &average),
                    OracleProtocol::Logit(eta) => {
                        let top = (0..3)
                            .filter(|&m| present[m])
                            .map(|m| total[m].clone())
                            .max()
                            .unwrap();
                        let shift = (&total[to] - top).to_f64().unwrap();
                        rat((shift / eta).exp())
                    }
                }
            })
            .collect();
        normalize(weights, own)
    };

    let mut out: BTreeMap<[usize; 3], BigRational> = BTreeMap::new();
    let pick = BigRational::one() / int(n);
    for &own in &z {
        let row = rate_row(own);
        for to in 0..3 {
            if row[to].is_zero() {
                continue;
            }
            let mut next = s;
            next[own] -= 1;
            next[to] += 1;
            *out.entry(next).or_insert_with(BigRational::zero) += &pick * &row[to];
        }
    }
    out
}
