//! Min-plus automata and the decomposition `f(w) = |w| γ + c0 + f_N(w)`.
//!
//! The value of a word is the cheapest accepting path reading it. `γ` is
//! the minimum mean weight of a cycle, `c0` the cheapest word after every
//! transition has been shifted by `-γ`, and the residual `f_N` is
//! the shifted automaton with `c0` taken off its initial costs.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use crate::error::{Error, Result};
use crate::graph::{reachable_from, reverse, strongly_connected_components};
use crate::numerics::{format_rational, Matrix, Rational, Scalar};

/// An element of `Q ∪ {∞}`; `∞` marks a missing transition.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TropicalWeight {
    Finite(Rational),
    Infinite,
}

use TropicalWeight::{Finite, Infinite};

impl TropicalWeight {
    pub fn finite(v: Rational) -> Self {
        Finite(v)
    }

    pub fn zero() -> Self {
        Finite(Rational::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Finite(_))
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            Finite(v) => Some(v),
            Infinite => None,
        }
    }

    pub fn min(self, other: Self) -> Self {
        std::cmp::min(self, other)
    }

    /// Shift a finite weight by `delta`; `∞` stays `∞`.
    pub fn shift(&self, delta: &Rational) -> Self {
        match self {
            Finite(v) => Finite(v.clone() + delta),
            Infinite => Infinite,
        }
    }
}

impl Add for &TropicalWeight {
    type Output = TropicalWeight;

    fn add(self, other: &TropicalWeight) -> TropicalWeight {
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a.clone() + b),
            _ => Infinite,
        }
    }
}

impl fmt::Display for TropicalWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finite(v) => f.write_str(&format_rational(v)),
            Infinite => f.write_str("inf"),
        }
    }
}

impl From<Rational> for TropicalWeight {
    fn from(v: Rational) -> Self {
        Finite(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TropicalAutomaton {
    alphabet: Vec<String>,
    initial: Vec<TropicalWeight>,
    transitions: Vec<Matrix<TropicalWeight>>,
    final_weights: Vec<TropicalWeight>,
}

impl TropicalAutomaton {
    pub fn new(
        alphabet: Vec<String>,
        initial: Vec<TropicalWeight>,
        transitions: Vec<Matrix<TropicalWeight>>,
        final_weights: Vec<TropicalWeight>,
    ) -> Result<Self> {
        let n = initial.len();
        if final_weights.len() != n || transitions.len() != alphabet.len() {
            return Err(Error::DimensionMismatch("tropical automaton shape".into()));
        }
        if transitions.iter().any(|m| m.rows() != n || m.cols() != n) {
            return Err(Error::DimensionMismatch(format!("transition matrices must be {n}x{n}")));
        }
        for (i, a) in alphabet.iter().enumerate() {
            if alphabet[..i].contains(a) {
                return Err(Error::DuplicateSymbol(a.clone()));
            }
        }
        Ok(TropicalAutomaton {
            alphabet,
            initial,
            transitions,
            final_weights,
        })
    }

    /// `states` states, no transitions, all initial and final costs `∞`.
    pub fn builder<I, T>(states: usize, alphabet: I) -> TropicalBuilder
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let alphabet: Vec<String> = alphabet.into_iter().map(Into::into).collect();
        TropicalBuilder {
            initial: vec![Infinite; states],
            final_weights: vec![Infinite; states],
            transitions: alphabet.iter().map(|_| Matrix::filled(states, states, Infinite)).collect(),
            alphabet,
        }
    }

    pub fn state_count(&self) -> usize {
        self.initial.len()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn initial(&self) -> &[TropicalWeight] {
        &self.initial
    }

    pub fn final_weights(&self) -> &[TropicalWeight] {
        &self.final_weights
    }

    pub fn transitions(&self) -> &[Matrix<TropicalWeight>] {
        &self.transitions
    }

    pub fn transition(&self, k: usize) -> &Matrix<TropicalWeight> {
        &self.transitions[k]
    }

    pub fn word_indices<T: AsRef<str>>(&self, word: &[T]) -> Result<Vec<usize>> {
        word.iter()
            .map(|s| {
                self.alphabet
                    .iter()
                    .position(|a| a == s.as_ref())
                    .ok_or_else(|| Error::UnknownSymbol(s.as_ref().to_string()))
            })
            .collect()
    }

    /// Cheapest accepting path reading `word`; `∞` if there is none.
    pub fn evaluate<T: AsRef<str>>(&self, word: &[T]) -> Result<TropicalWeight> {
        Ok(self.evaluate_indices(&self.word_indices(word)?))
    }

    pub fn evaluate_indices(&self, word: &[usize]) -> TropicalWeight {
        let n = self.state_count();
        let mut v = self.initial.clone();
        for &a in word {
            let m = &self.transitions[a];
            v = (0..n)
                .map(|j| (0..n).map(|i| &v[i] + m.get(i, j)).min().unwrap_or(Infinite))
                .collect();
        }
        (0..n)
            .map(|q| &v[q] + &self.final_weights[q])
            .min()
            .unwrap_or(Infinite)
    }

    /// Entrywise minimum over symbols.
    pub fn joint_matrix(&self) -> Matrix<TropicalWeight> {
        let n = self.state_count();
        let mut out = Matrix::filled(n, n, Infinite);
        for m in &self.transitions {
            for i in 0..n {
                for j in 0..n {
                    if m.get(i, j) < out.get(i, j) {
                        out.set(i, j, m.get(i, j).clone());
                    }
                }
            }
        }
        out
    }

    fn successors(&self) -> Vec<Vec<usize>> {
        let joint = self.joint_matrix();
        let n = self.state_count();
        (0..n)
            .map(|i| (0..n).filter(|&j| joint.get(i, j).is_finite()).collect())
            .collect()
    }

    /// States on some accepting path, in their original order.
    pub fn useful_states(&self) -> Vec<usize> {
        let succ = self.successors();
        let finite = |v: &[TropicalWeight]| -> Vec<usize> {
            (0..v.len()).filter(|&q| v[q].is_finite()).collect()
        };
        let fwd = reachable_from(&succ, finite(&self.initial));
        let bwd = reachable_from(&reverse(&succ), finite(&self.final_weights));
        (0..self.state_count()).filter(|&q| fwd[q] && bwd[q]).collect()
    }

    pub fn restrict(&self, order: &[usize]) -> TropicalAutomaton {
        TropicalAutomaton {
            alphabet: self.alphabet.clone(),
            initial: order.iter().map(|&q| self.initial[q].clone()).collect(),
            transitions: self.transitions.iter().map(|m| m.submatrix(order, order)).collect(),
            final_weights: order.iter().map(|&q| self.final_weights[q].clone()).collect(),
        }
    }

    /// Subtract `delta` from every finite transition weight.
    pub fn shift_transitions(&self, delta: &Rational) -> TropicalAutomaton {
        let minus = -delta.clone();
        TropicalAutomaton {
            transitions: self.transitions.iter().map(|m| m.map(|w| w.shift(&minus))).collect(),
            ..self.clone()
        }
    }

    /// Subtract `delta` from every finite initial weight.
    pub fn shift_initial(&self, delta: &Rational) -> TropicalAutomaton {
        let minus = -delta.clone();
        TropicalAutomaton {
            initial: self.initial.iter().map(|w| w.shift(&minus)).collect(),
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug)]
pub struct TropicalBuilder {
    alphabet: Vec<String>,
    initial: Vec<TropicalWeight>,
    transitions: Vec<Matrix<TropicalWeight>>,
    final_weights: Vec<TropicalWeight>,
}

impl TropicalBuilder {
    pub fn initial(mut self, state: usize, cost: Rational) -> Self {
        self.initial[state] = Finite(cost);
        self
    }

    pub fn final_weight(mut self, state: usize, cost: Rational) -> Self {
        self.final_weights[state] = Finite(cost);
        self
    }

    /// Set `from --symbol--> to` to the cheaper of its current cost and `cost`.
    pub fn transition(mut self, from: usize, symbol: &str, to: usize, cost: Rational) -> Self {
        let k = self
            .alphabet
            .iter()
            .position(|a| a == symbol)
            .unwrap_or_else(|| panic!("symbol {symbol:?} not in alphabet"));
        let cell = self.transitions[k].get_mut(from, to);
        *cell = cell.clone().min(Finite(cost));
        self
    }

    pub fn build(self) -> Result<TropicalAutomaton> {
        TropicalAutomaton::new(self.alphabet, self.initial, self.transitions, self.final_weights)
    }
}

/// Minimum mean weight over all cycles of `m`, by Karp's algorithm on each
/// strongly connected component; `None` if `m` has no cycle.
pub fn min_cycle_mean(m: &Matrix<TropicalWeight>) -> Option<Rational> {
    let n = m.rows();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| m.get(i, j).is_finite()).collect())
        .collect();
    strongly_connected_components(&succ)
        .into_iter()
        .filter(|c| c.len() > 1 || m.get(c[0], c[0]).is_finite())
        .filter_map(|c| karp(&m.submatrix(&c, &c)))
        .min()
}

/// Karp's characterisation on a strongly connected block: with `D_k(v)` the
/// cheapest `k`-edge walk from a fixed source,
/// `γ = min_v max_{k<n} (D_n(v) - D_k(v)) / (n - k)`.
fn karp(m: &Matrix<TropicalWeight>) -> Option<Rational> {
    let n = m.rows();
    let mut d: Vec<Vec<TropicalWeight>> = vec![vec![Infinite; n]; n + 1];
    d[0][0] = TropicalWeight::zero();
    for k in 1..=n {
        for v in 0..n {
            d[k][v] = (0..n).map(|u| &d[k - 1][u] + m.get(u, v)).min().unwrap_or(Infinite);
        }
    }
    (0..n)
        .filter_map(|v| {
            let dn = d[n][v].value()?;
            (0..n)
                .filter_map(|k| {
                    let dk = d[k][v].value()?;
                    Some((dn.clone() - dk) / Rational::from_i64((n - k) as i64))
                })
                .max()
        })
        .min()
}

/// Minimum cycle mean over the states on some accepting path.
pub fn cycle_mean(t: &TropicalAutomaton) -> Result<Rational> {
    let useful = t.useful_states();
    min_cycle_mean(&t.joint_matrix().submatrix(&useful, &useful)).ok_or(Error::NoCycle)
}

/// Minimum cycle mean over every cycle of the automaton.
pub fn cycle_mean_all(t: &TropicalAutomaton) -> Result<Rational> {
    min_cycle_mean(&t.joint_matrix()).ok_or(Error::NoCycle)
}

/// Subtract the cycle mean from every transition.
pub fn trop_normalize(t: &TropicalAutomaton) -> Result<TropicalAutomaton> {
    Ok(t.shift_transitions(&cycle_mean(t)?))
}

/// Cheapest word: `min_w f(w)`, by Bellman-Ford from the initial costs.
///
/// Only states on accepting paths take part; among them every cycle must
/// have nonnegative weight, so no cheapest path needs more than `n - 1`
/// transitions.
pub fn min_cost(t: &TropicalAutomaton) -> Result<Rational> {
    let useful = t.useful_states();
    if useful.is_empty() {
        return Err(Error::EmptyLanguage);
    }
    let sub = t.restrict(&useful);
    let joint = sub.joint_matrix();
    let n = sub.state_count();
    let mut dist = sub.initial.clone();
    for round in 0..=n {
        let mut changed = false;
        for i in 0..n {
            if !dist[i].is_finite() {
                continue;
            }
            for j in 0..n {
                let via = &dist[i] + joint.get(i, j);
                if via < dist[j] {
                    dist[j] = via;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
        if round == n {
            return Err(Error::NoConvergence {
                iterations: n + 1,
                estimate: f64::NEG_INFINITY,
            });
        }
    }
    (0..n)
        .map(|q| &dist[q] + &sub.final_weights[q])
        .min()
        .and_then(|w| w.value().cloned())
        .ok_or(Error::EmptyLanguage)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TropicalDecomposition {
    /// Minimum cycle mean over accepting paths (0 if they are acyclic).
    pub gamma: Rational,
    /// Minimum cycle mean over all cycles, when it differs from `gamma`.
    pub gamma_all_cycles: Option<Rational>,
    pub acyclic: bool,
    pub c0: Rational,
    /// Normal form over the useful states: cycle mean 0, cheapest word 0.
    pub residual: TropicalAutomaton,
    /// Original index of each residual state.
    pub kept: Vec<usize>,
}

impl TropicalDecomposition {
    /// `|w| γ + c0 + f_N(w)`.
    pub fn reconstruct<T: AsRef<str>>(&self, word: &[T]) -> Result<TropicalWeight> {
        let offset = Rational::from_i64(word.len() as i64) * &self.gamma + &self.c0;
        Ok(self.residual.evaluate(word)?.shift(&offset))
    }
}

pub fn trop_decompose(t: &TropicalAutomaton) -> Result<TropicalDecomposition> {
    let kept = t.useful_states();
    if kept.is_empty() {
        return Err(Error::EmptyLanguage);
    }
    let useful = t.restrict(&kept);
    let (gamma, acyclic) = match cycle_mean(&useful) {
        Ok(g) => (g, false),
        Err(Error::NoCycle) => (Rational::zero(), true),
        Err(e) => return Err(e),
    };
    let gamma_all_cycles = cycle_mean_all(t).ok().filter(|g| acyclic || *g != gamma);
    let shifted = useful.shift_transitions(&gamma);
    let c0 = min_cost(&shifted)?;
    Ok(TropicalDecomposition {
        gamma,
        gamma_all_cycles,
        acyclic,
        residual: shifted.shift_initial(&c0),
        c0,
        kept,
    })
}

impl PartialOrd<Rational> for TropicalWeight {
    fn partial_cmp(&self, other: &Rational) -> Option<Ordering> {
        Some(match self {
            Finite(v) => v.cmp(other),
            Infinite => Ordering::Greater,
        })
    }
}

impl PartialEq<Rational> for TropicalWeight {
    fn eq(&self, other: &Rational) -> bool {
        matches!(self, Finite(v) if v == other)
    }
}
