//! Transition matrix of the state process and its class decomposition.

use alloc::vec;
use alloc::vec::Vec;

use crate::game::MetaGame;
use crate::population::{payoff_profile, StateSpace};
use crate::revision::{rate_matrix, Protocol};
use crate::{Error, Result};

/// Sparse row-stochastic matrix over a [`StateSpace`].
///
/// Row `i` lists `(target, probability)` pairs with strictly positive
/// probability, sorted by target index. For `M` strategies a row has at most
/// `M(M-1)` single-player moves plus a self-loop.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    space: StateSpace,
    rows: Vec<Vec<(usize, f64)>>,
}

impl TransitionMatrix {
    /// Assembles a matrix from explicit rows. Entries are sorted and zero
    /// entries dropped; rows are not checked for stochasticity.
    pub fn from_rows(space: StateSpace, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let rows = rows
            .into_iter()
            .map(|mut row| {
                row.retain(|&(_, p)| p != 0.0);
                row.sort_by_key(|&(j, _)| j);
                row
            })
            .collect();
        Self { space, rows }
    }

    /// The underlying state space.
    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    /// Number of states.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// True for an empty matrix (never produced by the builders).
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Nonzero entries of row `i`.
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    /// All rows.
    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    /// `P[from][to]`.
    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.rows[from]
            .binary_search_by_key(&to, |&(j, _)| j)
            .map(|k| self.rows[from][k].1)
            .unwrap_or(0.0)
    }

    /// Largest `|sum_j P[i][j] - 1|` over all rows.
    pub fn max_row_sum_error(&self) -> f64 {
        self.rows
            .iter()
            .map(|row| libm::fabs(row.iter().map(|&(_, p)| p).sum::<f64>() - 1.0))
            .fold(0.0, f64::max)
    }

    /// Number of stored nonzero entries.
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

/// Builds `P` from the rate matrices of `protocol`.
///
/// For `m1 != m2`, `P[s][s - e_m1 + e_m2] = (s_m1 / N) R[m1][m2](s)`, and the
/// self-loop collects `sum_m (s_m / N) R[m][m](s)`. Boundary states need no
/// special handling: extinct strategies have zero selection weight and zero
/// adoption probability.
pub fn build_transition_matrix(
    space: &StateSpace,
    meta: &MetaGame,
    protocol: &Protocol,
) -> Result<TransitionMatrix> {
    if space.strategies() != meta.strategies() {
        return Err(Error::DimensionMismatch {
            expected: meta.strategies(),
            found: space.strategies(),
        });
    }
    let m = space.strategies();
    let n = space.players() as f64;
    let mut rows = Vec::with_capacity(space.len());
    for (i, s) in space.states().iter().enumerate() {
        let profile = payoff_profile(s, meta)?;
        let rates = rate_matrix(protocol, s, &profile)?;
        let mut row = Vec::with_capacity(m * (m - 1) + 1);
        let mut stay = 0.0;
        for from in (0..m).filter(|&k| s.is_present(k)) {
            let weight = s.count(from) as f64 / n;
            for to in 0..m {
                let p = weight * rates.get(from, to);
                if to == from {
                    stay += p;
                } else if p > 0.0 {
                    let target = space
                        .index_of(&s.moved(from, to))
                        .ok_or(Error::StateNotInSpace)?;
                    row.push((target, p));
                }
            }
        }
        if stay > 0.0 {
            row.push((i, stay));
        }
        row.sort_by_key(|&(j, _)| j);
        rows.push(row);
    }
    Ok(TransitionMatrix {
        space: space.clone(),
        rows,
    })
}

/// Recurrent classes and transient states of a chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainClassification {
    recurrent_classes: Vec<Vec<usize>>,
    class_of: Vec<Option<usize>>,
    transient: Vec<usize>,
}

impl ChainClassification {
    /// Closed communicating classes, each sorted, ordered by smallest member.
    pub fn recurrent_classes(&self) -> &[Vec<usize>] {
        &self.recurrent_classes
    }

    /// Transient states in canonical order.
    pub fn transient(&self) -> &[usize] {
        &self.transient
    }

    /// Recurrent class index of state `i`, `None` when transient.
    pub fn class_of(&self, i: usize) -> Option<usize> {
        self.class_of[i]
    }

    /// States forming singleton recurrent classes, in canonical order.
    pub fn absorbing_states(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .recurrent_classes
            .iter()
            .filter(|c| c.len() == 1)
            .map(|c| c[0])
            .collect();
        out.sort_unstable();
        out
    }

    /// Whether state `i` is absorbing.
    pub fn is_absorbing(&self, i: usize) -> bool {
        self.class_of[i].is_some_and(|k| self.recurrent_classes[k].len() == 1)
    }
}

/// Strongly connected components of the off-diagonal support graph
/// (iterative Tarjan).
pub fn strongly_connected_components(p: &TransitionMatrix) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = p.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut next_index = 0;
    // (node, position in its row)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&(v, pos)) = call.last() {
            let row = p.row(v);
            if pos < row.len() {
                let w = row[pos].0;
                if let Some(top) = call.last_mut() {
                    top.1 += 1;
                }
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                component.sort_unstable();
                components.push(component);
            }
        }
    }
    components
}

/// Splits the states into closed communicating classes and transient states.
///
/// A strongly connected component is recurrent iff no stored transition
/// leaves it; zero/nonzero is decided exactly on the stored probabilities.
pub fn classify_states(p: &TransitionMatrix) -> ChainClassification {
    let n = p.len();
    let components = strongly_connected_components(p);
    let mut component_of = vec![0usize; n];
    for (c, members) in components.iter().enumerate() {
        for &v in members {
            component_of[v] = c;
        }
    }
    let mut recurrent_classes: Vec<Vec<usize>> = components
        .iter()
        .enumerate()
        .filter(|(c, members)| {
            members
                .iter()
                .all(|&v| p.row(v).iter().all(|&(w, _)| component_of[w] == *c))
        })
        .map(|(_, members)| members.clone())
        .collect();
    recurrent_classes.sort_by_key(|c| c[0]);
    let mut class_of = vec![None; n];
    for (k, members) in recurrent_classes.iter().enumerate() {
        for &v in members {
            class_of[v] = Some(k);
        }
    }
    let transient = (0..n).filter(|&v| class_of[v].is_none()).collect();
    ChainClassification {
        recurrent_classes,
        class_of,
        transient,
    }
}
