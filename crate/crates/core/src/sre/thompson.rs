use std::collections::HashMap;

use crate::automaton::WeightedAutomaton;
use crate::error::{Error, Result};
use crate::numerics::{Matrix, Scalar};

use super::{Sre, SreNode};

/// Automaton with ε-moves, built one fragment per subexpression.
struct Nfa<S> {
    eps: Vec<Vec<(usize, S)>>,
    letters: Vec<Vec<(usize, usize, S)>>,
}

impl<S: Scalar> Nfa<S> {
    fn state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.letters.push(Vec::new());
        self.eps.len() - 1
    }

    /// Returns the entry and exit state of the fragment for `r`.
    fn build(&mut self, r: &Sre<S>, symbols: &HashMap<String, usize>) -> (usize, usize) {
        match r.node() {
            SreNode::Empty => {
                let s = self.state();
                (s, s)
            }
            SreNode::Dirac(a) => {
                let (s, e) = (self.state(), self.state());
                self.letters[s].push((symbols[a], e, S::one()));
                (s, e)
            }
            SreNode::Choice { alpha, left, right } => {
                let s = self.state();
                let (ls, le) = self.build(left, symbols);
                let (rs, re) = self.build(right, symbols);
                let e = self.state();
                self.eps[s].push((ls, alpha.clone()));
                self.eps[s].push((rs, S::one() - alpha));
                self.eps[le].push((e, S::one()));
                self.eps[re].push((e, S::one()));
                (s, e)
            }
            SreNode::Concat(left, right) => {
                let (ls, le) = self.build(left, symbols);
                let (rs, re) = self.build(right, symbols);
                self.eps[le].push((rs, S::one()));
                (ls, re)
            }
            SreNode::Star { body, alpha } => {
                // decision state: another round with probability α, else stop
                let d = self.state();
                let (bs, be) = self.build(body, symbols);
                let e = self.state();
                self.eps[d].push((bs, alpha.clone()));
                self.eps[d].push((e, S::one() - alpha));
                self.eps[be].push((d, S::one()));
                (d, e)
            }
        }
    }

    /// Total ε-path weight from `p` to every state. The ε-graph of a
    /// well-formed expression is acyclic, so this is a memoised DFS.
    fn closure(
        &self,
        p: usize,
        memo: &mut HashMap<usize, HashMap<usize, S>>,
        active: &mut Vec<bool>,
    ) -> Result<HashMap<usize, S>> {
        if let Some(c) = memo.get(&p) {
            return Ok(c.clone());
        }
        if active[p] {
            return Err(Error::IllFormedSre("cycle of empty moves".into()));
        }
        active[p] = true;
        let mut out = HashMap::from([(p, S::one())]);
        for (q, w) in &self.eps[p] {
            for (x, v) in self.closure(*q, memo, active)? {
                let add = w.clone() * &v;
                out.entry(x)
                    .and_modify(|acc: &mut S| *acc = acc.clone() + &add)
                    .or_insert(add);
            }
        }
        active[p] = false;
        memo.insert(p, out.clone());
        Ok(out)
    }
}

/// A probabilistic automaton with the same distribution as `r`.
///
/// The fragments use `O(|r|)` states and ε-moves; eliminating the ε-moves
/// keeps the entry state and the target of every letter move, so the result
/// has one state per letter occurrence plus one.
pub fn thompson<S: Scalar>(r: &Sre<S>) -> Result<WeightedAutomaton<S>> {
    r.validate()?;
    let alphabet = r.symbols();
    let symbols: HashMap<String, usize> = alphabet.iter().cloned().zip(0..).collect();
    let mut nfa = Nfa {
        eps: Vec::new(),
        letters: Vec::new(),
    };
    let (start, end) = nfa.build(r, &symbols);

    let mut kept = vec![start];
    for moves in &nfa.letters {
        kept.extend(moves.iter().map(|&(_, to, _)| to));
    }
    let index: HashMap<usize, usize> = kept.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let n = kept.len();
    let mut transitions = vec![Matrix::zeros(n, n); alphabet.len()];
    let mut final_weights = vec![S::zero(); n];
    let mut memo = HashMap::new();
    let mut active = vec![false; nfa.eps.len()];
    for (i, &p) in kept.iter().enumerate() {
        for (x, w) in nfa.closure(p, &mut memo, &mut active)? {
            if x == end {
                final_weights[i] = final_weights[i].clone() + &w;
            }
            for (a, to, lw) in &nfa.letters[x] {
                let cell: &mut S = transitions[*a].get_mut(i, index[to]);
                *cell = cell.clone() + &(w.clone() * lw);
            }
        }
    }
    let mut initial = vec![S::zero(); n];
    initial[0] = S::one();
    WeightedAutomaton::new(alphabet, initial, transitions, final_weights)
}
