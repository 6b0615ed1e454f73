//! Absorption probabilities via the fundamental-matrix system.
//!
//! With `Q` the transient-to-transient block of `P` and `R[t][k]` the
//! one-step probability of entering recurrent class `k` from transient state
//! `t`, the absorption probabilities solve `(I - Q) X = R`. The system is
//! solved by dense LU without pivoting, `O(|T|^3)` in the number of
//! transient states, with pivots formed from exit and off-diagonal mass so
//! that no cancellation occurs. Elimination skips zero multipliers and stops
//! each row update at the last nonzero column, which keeps banded chains
//! cheap.

use alloc::vec;
use alloc::vec::Vec;

use crate::chain::{ChainClassification, TransitionMatrix};
use crate::{Error, Result};

/// Pivots below this magnitude mean a closed class was labeled transient.
pub const PIVOT_TOLERANCE: f64 = 1e-13;
/// Maximum accepted `||(I - Q) X - R||_inf`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Dense LU factorization `P A = L U` of a square matrix, row-major.
#[derive(Debug, Clone)]
pub struct LuFactorization {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl LuFactorization {
    /// Factorizes `a` (row-major, `n x n`) with partial pivoting.
    pub fn new(n: usize, mut a: Vec<f64>) -> Result<Self> {
        assert_eq!(a.len(), n * n, "matrix must be n x n");
        let mut perm: Vec<usize> = (0..n).collect();
        // one past the last nonzero column of each row
        let mut row_end: Vec<usize> = (0..n)
            .map(|i| {
                a[i * n..(i + 1) * n]
                    .iter()
                    .rposition(|&v| v != 0.0)
                    .map_or(0, |j| j + 1)
            })
            .collect();

        for k in 0..n {
            let (pivot_row, pivot_abs) =
                (k..n)
                    .map(|i| (i, libm::fabs(a[i * n + k])))
                    .fold(
                        (k, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pivot_abs < PIVOT_TOLERANCE {
                return Err(Error::Singular {
                    pivot: pivot_abs,
                    column: k,
                });
            }
            if pivot_row != k {
                for j in 0..n {
                    a.swap(k * n + j, pivot_row * n + j);
                }
                perm.swap(k, pivot_row);
                row_end.swap(k, pivot_row);
            }
            let pivot = a[k * n + k];
            let end = row_end[k];
            let (upper, lower) = a.split_at_mut((k + 1) * n);
            let pivot_tail = &upper[k * n + k + 1..k * n + end.max(k + 1)];
            for i in 0..n - k - 1 {
                let row = &mut lower[i * n..(i + 1) * n];
                if row[k] == 0.0 {
                    continue;
                }
                let factor = row[k] / pivot;
                row[k] = factor;
                for (dst, &src) in row[k + 1..].iter_mut().zip(pivot_tail) {
                    *dst -= factor * src;
                }
                let r = k + 1 + i;
                row_end[r] = row_end[r].max(end);
            }
        }
        Ok(Self { n, lu: a, perm })
    }

    /// Factorizes `A = I - Q` for a substochastic `Q` without pivoting.
    ///
    /// `exit[i]` is the mass row `i` of the chain sends outside `Q`. Each
    /// pivot is recomputed as exit mass plus the magnitude of the remaining
    /// off-diagonal entries of its row, so elimination never subtracts
    /// (Grassmann-Taksar-Heyman). The diagonal of `a` is ignored; off-diagonal
    /// entries must be non-positive.
    pub fn new_m_matrix(n: usize, mut a: Vec<f64>, mut exit: Vec<f64>) -> Result<Self> {
        assert_eq!(a.len(), n * n, "matrix must be n x n");
        assert_eq!(exit.len(), n, "one exit mass per row");
        let mut row_end: Vec<usize> = (0..n)
            .map(|i| {
                a[i * n..(i + 1) * n]
                    .iter()
                    .rposition(|&v| v != 0.0)
                    .map_or(0, |j| j + 1)
            })
            .collect();

        for k in 0..n {
            let end = row_end[k].max(k + 1);
            let off: f64 = a[k * n + k + 1..k * n + end].iter().map(|v| -v).sum();
            let pivot = exit[k] + off;
            if pivot.is_nan() || pivot < PIVOT_TOLERANCE {
                return Err(Error::Singular { pivot, column: k });
            }
            a[k * n + k] = pivot;
            let exit_k = exit[k];
            let (upper, lower) = a.split_at_mut((k + 1) * n);
            let pivot_tail = &upper[k * n + k + 1..k * n + end];
            for i in 0..n - k - 1 {
                let row = &mut lower[i * n..(i + 1) * n];
                if row[k] == 0.0 {
                    continue;
                }
                let factor = row[k] / pivot;
                row[k] = factor;
                for (dst, &src) in row[k + 1..].iter_mut().zip(pivot_tail) {
                    *dst -= factor * src;
                }
                let r = k + 1 + i;
                exit[r] -= factor * exit_k;
                row_end[r] = row_end[r].max(end);
            }
        }
        Ok(Self {
            n,
            lu: a,
            perm: (0..n).collect(),
        })
    }

    /// Solves `A x = b` for one right-hand side.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n..(i + 1) * n];
            let s: f64 = row[i + 1..]
                .iter()
                .zip(&x[i + 1..])
                .map(|(u, v)| u * v)
                .sum();
            x[i] = (x[i] - s) / row[i];
        }
        x
    }
}

/// Absorption probabilities of every state into every recurrent class.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionResult {
    classes: Vec<Vec<usize>>,
    probs: Vec<Vec<f64>>,
    pure: Vec<Vec<f64>>,
    class_of: Vec<Option<usize>>,
    pure_class: Vec<Option<usize>>,
    residual: f64,
}

impl AbsorptionResult {
    /// Recurrent classes, in the classification's order.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Per-state probabilities over classes; unit vectors for recurrent states.
    pub fn probs(&self) -> &[Vec<f64>] {
        &self.probs
    }

    /// Probability that state `i` ends in class `k`.
    pub fn prob(&self, i: usize, k: usize) -> f64 {
        self.probs[i][k]
    }

    /// Per-state probabilities of absorption into each pure state
    /// `(0, .., N, .., 0)`, one entry per strategy (zero when that pure state
    /// is not a singleton class).
    pub fn pure(&self) -> &[Vec<f64>] {
        &self.pure
    }

    /// Recurrent class of state `i`, `None` when transient.
    pub fn class_of(&self, i: usize) -> Option<usize> {
        self.class_of[i]
    }

    /// For each strategy, the class index of its pure state when that state
    /// is absorbing.
    pub fn pure_classes(&self) -> &[Option<usize>] {
        &self.pure_class
    }

    /// `||(I - Q) X - R||_inf` of the solve.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Largest deviation of a state's class vector from summing to one.
    pub fn max_row_sum_error(&self) -> f64 {
        self.probs
            .iter()
            .map(|row| libm::fabs(row.iter().sum::<f64>() - 1.0))
            .fold(0.0, f64::max)
    }
}

/// Solves for the absorption probabilities of `p` given its classification.
pub fn absorption_probabilities(
    p: &TransitionMatrix,
    cls: &ChainClassification,
) -> Result<AbsorptionResult> {
    let n = p.len();
    let classes = cls.recurrent_classes().to_vec();
    let k = classes.len();
    let transient = cls.transient();
    let t = transient.len();
    let mut position = vec![usize::MAX; n];
    for (pos, &s) in transient.iter().enumerate() {
        position[s] = pos;
    }

    let mut a = vec![0.0; t * t];
    // right-hand sides, one column per class
    let mut rhs = vec![vec![0.0; t]; k];
    for (row, &s) in transient.iter().enumerate() {
        a[row * t + row] = 1.0;
        for &(target, prob) in p.row(s) {
            match cls.class_of(target) {
                Some(c) => rhs[c][row] += prob,
                None => a[row * t + position[target]] -= prob,
            }
        }
    }

    let mut probs = vec![vec![0.0; k]; n];
    for (c, members) in classes.iter().enumerate() {
        for &s in members {
            probs[s][c] = 1.0;
        }
    }
    let mut residual = 0.0f64;
    if t > 0 {
        let exit: Vec<f64> = (0..t).map(|row| rhs.iter().map(|b| b[row]).sum()).collect();
        let lu = LuFactorization::new_m_matrix(t, a, exit)?;
        let solutions: Vec<Vec<f64>> = rhs.iter().map(|b| lu.solve(b)).collect();
        for (c, x) in solutions.iter().enumerate() {
            for (row, &s) in transient.iter().enumerate() {
                probs[s][c] = x[row];
            }
        }
        // residual against the sparse rows of P
        for (row, &s) in transient.iter().enumerate() {
            for c in 0..k {
                let mut r = probs[s][c] - rhs[c][row];
                for &(target, prob) in p.row(s) {
                    if cls.class_of(target).is_none() {
                        r -= prob * probs[target][c];
                    }
                }
                residual = residual.max(libm::fabs(r));
            }
        }
        if residual.is_nan() || residual > RESIDUAL_TOLERANCE {
            return Err(Error::Residual(residual));
        }
    }

    let space = p.space();
    let m = space.strategies();
    let pure_class: Vec<Option<usize>> = (0..m)
        .map(|strategy| {
            let s = space.pure_state(strategy);
            cls.class_of(s).filter(|&c| classes[c].len() == 1)
        })
        .collect();
    let pure = probs
        .iter()
        .map(|row| {
            pure_class
                .iter()
                .map(|c| c.map_or(0.0, |c| row[c]))
                .collect()
        })
        .collect();
    Ok(AbsorptionResult {
        classes,
        probs,
        pure,
        class_of: (0..n).map(|s| cls.class_of(s)).collect(),
        pure_class,
        residual,
    })
}

/// 8-bit RGB color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb {
    /// Red channel.
    pub r: u8,
    /// Green channel.
    pub g: u8,
    /// Blue channel.
    pub b: u8,
}

impl Rgb {
    /// Black, used for states that are never absorbed by a pure state.
    pub const BLACK: Rgb = Rgb { r: 0, g: 0, b: 0 };

    /// `#RRGGBB`.
    pub fn hex(&self) -> alloc::string::String {
        alloc::format!("#{:02X}{:02X}{:02X}", self.r, self.g, self.b)
    }
}

fn channel(p: f64) -> u8 {
    libm::round(255.0 * p.clamp(0.0, 1.0)) as u8
}

/// Colors each state by its absorption probabilities into the pure states of
/// strategies 1, 2 and 3 (red, green, blue).
///
/// Non-pure absorbing states and all members of larger recurrent classes are
/// black.
pub fn rgb_colors(res: &AbsorptionResult) -> Vec<Rgb> {
    res.pure
        .iter()
        .zip(&res.class_of)
        .map(|(pure, class)| match class {
            Some(c) if !res.pure_class.contains(&Some(*c)) => Rgb::BLACK,
            _ => {
                let channel_of = |m: usize| pure.get(m).copied().unwrap_or(0.0);
                Rgb {
                    r: channel(channel_of(0)),
                    g: channel(channel_of(1)),
                    b: channel(channel_of(2)),
                }
            }
        })
        .collect()
}
