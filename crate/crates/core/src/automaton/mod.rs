//! Weighted finite automata over the nonnegative reals.
//!
//! A [`WeightedAutomaton`] assigns each word `w = w1 ... wn` the weight
//! `λ^T M_{w1} ... M_{wn} μ`. States are plain indices; names only exist in
//! the file format.

mod condensation;
mod stochastic;
mod trim;

use std::collections::HashMap;

pub use condensation::Condensation;
pub use stochastic::{RowResidual, StochasticityReport};
pub use trim::Trimmed;

use crate::error::{Error, Result};
use crate::numerics::{self, dot, Backend, Matrix, Rational, Scalar, Vector};

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedAutomaton<S> {
    alphabet: Vec<String>,
    initial: Vector<S>,
    transitions: Vec<Matrix<S>>,
    final_weights: Vector<S>,
}

impl<S: Scalar> WeightedAutomaton<S> {
    /// Build an automaton from its matrix presentation. `transitions[k]` is
    /// the matrix of `alphabet[k]`.
    pub fn new(
        alphabet: Vec<String>,
        initial: Vector<S>,
        transitions: Vec<Matrix<S>>,
        final_weights: Vector<S>,
    ) -> Result<Self> {
        let n = initial.len();
        if final_weights.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{n} initial weights but {} final weights",
                final_weights.len()
            )));
        }
        if transitions.len() != alphabet.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} symbols but {} transition matrices",
                alphabet.len(),
                transitions.len()
            )));
        }
        let mut seen = HashMap::new();
        for (k, a) in alphabet.iter().enumerate() {
            if seen.insert(a.as_str(), k).is_some() {
                return Err(Error::DuplicateSymbol(a.clone()));
            }
        }
        for (k, m) in transitions.iter().enumerate() {
            if m.rows() != n || m.cols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "matrix for {:?} is {}x{}, expected {n}x{n}",
                    alphabet[k],
                    m.rows(),
                    m.cols()
                )));
            }
            m.check_nonnegative().map_err(|e| relabel(e, &format!("symbol {:?}", alphabet[k])))?;
        }
        for (q, v) in initial.iter().enumerate() {
            if v.is_negative() {
                return Err(Error::NegativeWeight {
                    value: v.to_string(),
                    location: format!("initial weight of state {q}"),
                });
            }
        }
        for (q, v) in final_weights.iter().enumerate() {
            if v.is_negative() {
                return Err(Error::NegativeWeight {
                    value: v.to_string(),
                    location: format!("final weight of state {q}"),
                });
            }
        }
        Ok(WeightedAutomaton {
            alphabet,
            initial,
            transitions,
            final_weights,
        })
    }

    /// Start an automaton with `states` states and the given alphabet; all
    /// weights zero.
    pub fn builder<I, T>(states: usize, alphabet: I) -> Builder<S>
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let alphabet: Vec<String> = alphabet.into_iter().map(Into::into).collect();
        Builder {
            initial: vec![S::zero(); states],
            final_weights: vec![S::zero(); states],
            transitions: alphabet.iter().map(|_| Matrix::zeros(states, states)).collect(),
            alphabet,
        }
    }

    pub fn backend(&self) -> Backend {
        S::BACKEND
    }

    pub fn state_count(&self) -> usize {
        self.initial.len()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn symbol_index(&self, symbol: &str) -> Option<usize> {
        self.alphabet.iter().position(|a| a == symbol)
    }

    pub fn initial(&self) -> &[S] {
        &self.initial
    }

    pub fn final_weights(&self) -> &[S] {
        &self.final_weights
    }

    pub fn transitions(&self) -> &[Matrix<S>] {
        &self.transitions
    }

    /// Transition matrix of the `k`-th symbol.
    pub fn transition(&self, k: usize) -> &Matrix<S> {
        &self.transitions[k]
    }

    /// Map symbols to alphabet indices.
    pub fn word_indices<T: AsRef<str>>(&self, word: &[T]) -> Result<Vec<usize>> {
        word.iter()
            .map(|s| {
                let s = s.as_ref();
                self.symbol_index(s)
                    .ok_or_else(|| Error::UnknownSymbol(s.to_string()))
            })
            .collect()
    }

    /// `λ^T M_{w1} ... M_{wn} μ`; the empty word gets `λ^T μ`.
    pub fn evaluate<T: AsRef<str>>(&self, word: &[T]) -> Result<S> {
        Ok(self.evaluate_indices(&self.word_indices(word)?))
    }

    pub fn evaluate_indices(&self, word: &[usize]) -> S {
        let forward = self.forward(word);
        dot(&forward, &self.final_weights)
    }

    /// Row vector `λ^T M_{w1} ... M_{wn}`.
    pub fn forward(&self, word: &[usize]) -> Vector<S> {
        word.iter()
            .fold(self.initial.clone(), |v, &a| self.transitions[a].vec_mul(&v))
    }

    /// `M = Σ_a M_a`.
    pub fn joint_matrix(&self) -> Matrix<S> {
        let n = self.state_count();
        self.transitions
            .iter()
            .fold(Matrix::zeros(n, n), |acc, m| acc.add(m))
    }

    /// Successor lists of the support graph: `q -> q'` whenever the summed
    /// symbol weight is strictly positive.
    pub fn support_graph(&self) -> Vec<Vec<usize>> {
        let joint = self.joint_matrix();
        let n = self.state_count();
        (0..n)
            .map(|i| (0..n).filter(|&j| joint.get(i, j).is_positive()).collect())
            .collect()
    }

    /// `Σ_w f(w) = λ^T (I - M)^{-1} μ`, computed on the trimmed automaton so
    /// that states off every accepting path cannot make it diverge.
    pub fn total_mass(&self) -> Result<S> {
        let trimmed = match self.trim() {
            Ok(t) => t,
            Err(Error::EmptyAutomaton) => return Ok(S::zero()),
            Err(e) => return Err(e),
        };
        let d = crate::normalize::future_mass(&trimmed.automaton)?;
        Ok(dot(trimmed.automaton.initial(), &d))
    }

    /// Exact verdict on `ρ(M) < 1` for the full joint matrix.
    pub fn has_finite_spectral_radius_below_one(&self) -> bool {
        numerics::has_finite_mass(&self.joint_matrix())
    }

    /// Estimate of `ρ(M)`.
    pub fn spectral_radius(&self, tol: f64) -> Result<f64> {
        numerics::spectral_radius(&self.joint_matrix(), tol)
    }

    /// Apply `f` to every weight.
    pub fn map_weights<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> WeightedAutomaton<T> {
        WeightedAutomaton {
            alphabet: self.alphabet.clone(),
            initial: self.initial.iter().map(&mut f).collect(),
            transitions: self.transitions.iter().map(|m| m.map(&mut f)).collect(),
            final_weights: self.final_weights.iter().map(&mut f).collect(),
        }
    }

    pub fn to_f64(&self) -> WeightedAutomaton<f64> {
        self.map_weights(Scalar::to_f64)
    }

    /// Scale every transition matrix by `k`, leaving `λ` and `μ` alone.
    pub fn scale_transitions(&self, k: &S) -> WeightedAutomaton<S> {
        WeightedAutomaton {
            alphabet: self.alphabet.clone(),
            initial: self.initial.clone(),
            transitions: self.transitions.iter().map(|m| m.scale(k)).collect(),
            final_weights: self.final_weights.clone(),
        }
    }

    /// Scale the initial vector by `k`.
    pub fn scale_initial(&self, k: &S) -> WeightedAutomaton<S> {
        WeightedAutomaton {
            initial: self.initial.iter().map(|v| v.clone() * k).collect(),
            ..self.clone()
        }
    }

    /// Renumber states: new state `i` is old state `order[i]`. `order` may
    /// drop states, in which case transitions into them are dropped as well.
    pub fn restrict(&self, order: &[usize]) -> WeightedAutomaton<S> {
        WeightedAutomaton {
            alphabet: self.alphabet.clone(),
            initial: order.iter().map(|&q| self.initial[q].clone()).collect(),
            transitions: self
                .transitions
                .iter()
                .map(|m| m.submatrix(order, order))
                .collect(),
            final_weights: order.iter().map(|&q| self.final_weights[q].clone()).collect(),
        }
    }

    /// The same automaton over a larger alphabet (missing symbols get zero
    /// matrices). Symbols of `alphabet` must include all of ours.
    pub fn with_alphabet(&self, alphabet: &[String]) -> Result<WeightedAutomaton<S>> {
        let n = self.state_count();
        for a in &self.alphabet {
            if !alphabet.contains(a) {
                return Err(Error::UnknownSymbol(a.clone()));
            }
        }
        let transitions = alphabet
            .iter()
            .map(|a| match self.symbol_index(a) {
                Some(k) => self.transitions[k].clone(),
                None => Matrix::zeros(n, n),
            })
            .collect();
        WeightedAutomaton::new(
            alphabet.to_vec(),
            self.initial.clone(),
            transitions,
            self.final_weights.clone(),
        )
    }
}

impl WeightedAutomaton<f64> {
    /// Exact rational image of a float automaton (every finite float is a
    /// dyadic rational).
    pub fn to_rational(&self) -> WeightedAutomaton<Rational> {
        self.map_weights(|v| v.to_rational().expect("automaton weights are finite"))
    }
}

fn relabel(e: Error, location: &str) -> Error {
    match e {
        Error::NegativeWeight { value, location: inner } => Error::NegativeWeight {
            value,
            location: format!("{location} {inner}"),
        },
        other => other,
    }
}

/// Incremental construction; see [`WeightedAutomaton::builder`].
#[derive(Clone, Debug)]
pub struct Builder<S> {
    alphabet: Vec<String>,
    initial: Vec<S>,
    transitions: Vec<Matrix<S>>,
    final_weights: Vec<S>,
}

impl<S: Scalar> Builder<S> {
    pub fn initial(mut self, state: usize, weight: S) -> Self {
        self.initial[state] = weight;
        self
    }

    pub fn final_weight(mut self, state: usize, weight: S) -> Self {
        self.final_weights[state] = weight;
        self
    }

    /// Add `weight` to the transition `from --symbol--> to`.
    ///
    /// Panics if `symbol` is not in the alphabet.
    pub fn transition(mut self, from: usize, symbol: &str, to: usize, weight: S) -> Self {
        let k = self
            .alphabet
            .iter()
            .position(|a| a == symbol)
            .unwrap_or_else(|| panic!("symbol {symbol:?} not in alphabet"));
        let cell = self.transitions[k].get_mut(from, to);
        *cell = cell.clone() + &weight;
        self
    }

    pub fn build(self) -> Result<WeightedAutomaton<S>> {
        WeightedAutomaton::new(self.alphabet, self.initial, self.transitions, self.final_weights)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::numerics::Rational;

    pub(crate) fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    pub(crate) use crate::fixtures::running_example;

    /// Sum over all accepting paths of the path weight, by explicit path
    /// enumeration (independent of the vector-matrix product).
    fn path_sum(a: &WeightedAutomaton<Rational>, word: &[usize]) -> Rational {
        fn go(a: &WeightedAutomaton<Rational>, state: usize, word: &[usize], acc: Rational) -> Rational {
            match word.split_first() {
                None => acc * &a.final_weights()[state],
                Some((&sym, rest)) => (0..a.state_count())
                    .map(|r| {
                        let w = a.transition(sym).get(state, r);
                        if w.is_zero() {
                            q(0, 1)
                        } else {
                            go(a, r, rest, acc.clone() * w)
                        }
                    })
                    .fold(q(0, 1), |x, y| x + y),
            }
        }
        (0..a.state_count())
            .map(|s| go(a, s, word, a.initial()[s].clone()))
            .fold(q(0, 1), |x, y| x + y)
    }

    #[test]
    fn evaluates_running_example() {
        let a = running_example();
        assert_eq!(a.evaluate(&["a", "b"]).unwrap(), q(6, 1));
        assert_eq!(a.evaluate(&["a", "a"]).unwrap(), q(2, 1));
        assert_eq!(a.evaluate(&["a", "a", "b"]).unwrap(), q(18, 5));
        assert_eq!(a.evaluate::<&str>(&[]).unwrap(), q(0, 1));
        for w in [vec![0, 1], vec![0, 0], vec![0, 1, 0, 0, 1], vec![0, 0, 0, 1]] {
            assert_eq!(a.evaluate_indices(&w), path_sum(&a, &w));
        }
    }

    #[test]
    fn unknown_symbol() {
        let a = running_example();
        assert_eq!(a.evaluate(&["c"]), Err(Error::UnknownSymbol("c".into())));
    }

    #[test]
    fn zero_final_vector_gives_zero() {
        let a = WeightedAutomaton::builder(2, ["a"])
            .initial(0, q(1, 1))
            .transition(0, "a", 1, q(3, 1))
            .build()
            .unwrap();
        for w in [vec![], vec!["a"], vec!["a", "a"]] {
            assert_eq!(a.evaluate(&w).unwrap(), q(0, 1));
        }
    }

    #[test]
    fn joint_matrix_entries() {
        let a = running_example();
        let m = a.joint_matrix();
        assert_eq!(m.get(2, 2), &q(3, 5));
        assert_eq!(m.get(0, 5), &q(1, 1));
        let single = WeightedAutomaton::builder(1, ["x"])
            .transition(0, "x", 0, q(1, 7))
            .build()
            .unwrap();
        assert_eq!(single.joint_matrix(), single.transition(0).clone());
    }

    #[test]
    fn total_mass_values() {
        assert_eq!(running_example().total_mass().unwrap(), q(28, 1));
        let no_transitions = WeightedAutomaton::builder(2, ["a"])
            .initial(0, q(1, 2))
            .initial(1, q(1, 2))
            .final_weight(0, q(1, 1))
            .final_weight(1, q(1, 1))
            .build()
            .unwrap();
        assert_eq!(no_transitions.total_mass().unwrap(), q(1, 1));
        let looping = WeightedAutomaton::builder(1, ["a"])
            .initial(0, q(1, 1))
            .final_weight(0, q(1, 1))
            .transition(0, "a", 0, q(1, 1))
            .build()
            .unwrap();
        assert_eq!(looping.total_mass(), Err(Error::MassDiverges));
    }

    #[test]
    fn constructor_validation() {
        let err = WeightedAutomaton::<Rational>::new(
            vec!["a".into(), "a".into()],
            vec![q(1, 1)],
            vec![Matrix::zeros(1, 1), Matrix::zeros(1, 1)],
            vec![q(1, 1)],
        )
        .unwrap_err();
        assert_eq!(err, Error::DuplicateSymbol("a".into()));
        let err = WeightedAutomaton::<Rational>::new(vec![], vec![q(-1, 1)], vec![], vec![q(1, 1)]).unwrap_err();
        assert_eq!(err.kind(), "NegativeWeight");
        let err = WeightedAutomaton::<Rational>::new(vec![], vec![q(1, 1)], vec![], vec![]).unwrap_err();
        assert_eq!(err.kind(), "DimensionMismatch");
    }

    #[test]
    fn alphabet_extension_preserves_semantics() {
        let a = running_example();
        let wider = a
            .with_alphabet(&["c".to_string(), "b".to_string(), "a".to_string()])
            .unwrap();
        assert_eq!(wider.evaluate(&["a", "b"]).unwrap(), q(6, 1));
        assert_eq!(wider.evaluate(&["c"]).unwrap(), q(0, 1));
    }
}
