use crate::error::{Error, Result};
use crate::graph::{reachable_from, reverse};
use crate::numerics::Scalar;

use super::WeightedAutomaton;

/// A trimmed automaton together with the original index of each kept state.
#[derive(Clone, Debug, PartialEq)]
pub struct Trimmed<S> {
    pub automaton: WeightedAutomaton<S>,
    pub kept: Vec<usize>,
}

impl<S: Scalar> WeightedAutomaton<S> {
    /// Keep the states that are both reachable from a positive initial weight
    /// and able to reach a positive final weight. Kept states stay in their
    /// original relative order.
    pub fn trim(&self) -> Result<Trimmed<S>> {
        let succ = self.support_graph();
        let starts: Vec<usize> = positive(&self.initial);
        let ends: Vec<usize> = positive(&self.final_weights);
        let forward = reachable_from(&succ, starts);
        let backward = reachable_from(&reverse(&succ), ends);
        let kept: Vec<usize> = (0..self.state_count())
            .filter(|&q| forward[q] && backward[q])
            .collect();
        if kept.is_empty() {
            return Err(Error::EmptyAutomaton);
        }
        Ok(Trimmed {
            automaton: self.restrict(&kept),
            kept,
        })
    }

    pub fn is_trim(&self) -> bool {
        matches!(self.trim(), Ok(t) if t.kept.len() == self.state_count())
    }
}

fn positive<S: Scalar>(v: &[S]) -> Vec<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, w)| w.is_positive())
        .map(|(q, _)| q)
        .collect()
}
