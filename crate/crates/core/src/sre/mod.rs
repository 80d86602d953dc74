//! Stochastic regular expressions.
//!
//! An [`Sre`] denotes a probability distribution over words:
//!
//! * `()` puts all mass on the empty word,
//! * a letter `a` puts all mass on the one-letter word `a`,
//! * `α:r + (1-α):s` mixes two distributions,
//! * `rs` concatenates independent draws,
//! * `(r)*[α]` concatenates `k ≥ 0` independent draws of `r`, where `k` is
//!   geometric: `P(k) = (1 - α) α^k`.
//!
//! Subexpressions are reference counted, so expressions built by state
//! elimination share structure instead of copying it.

mod eliminate;
mod eval;
mod text;
mod thompson;

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

pub use eliminate::{state_eliminate, state_eliminate_with_order};
pub use eval::{eval, length_distribution, partial_mass};
pub use text::{parse_sre, print_sre};
pub use thompson::thompson;

use crate::error::{Error, Result};
use crate::numerics::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub enum SreNode<S> {
    Empty,
    Dirac(String),
    Choice { alpha: S, left: Sre<S>, right: Sre<S> },
    Concat(Sre<S>, Sre<S>),
    Star { body: Sre<S>, alpha: S },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sre<S>(Arc<SreNode<S>>);

impl<S: Scalar> Sre<S> {
    pub fn empty() -> Self {
        Sre(Arc::new(SreNode::Empty))
    }

    pub fn dirac(symbol: impl Into<String>) -> Self {
        Sre(Arc::new(SreNode::Dirac(symbol.into())))
    }

    /// `alpha` of `left`, `1 - alpha` of `right`.
    pub fn choice(alpha: S, left: Sre<S>, right: Sre<S>) -> Self {
        Sre(Arc::new(SreNode::Choice { alpha, left, right }))
    }

    pub fn concat(left: Sre<S>, right: Sre<S>) -> Self {
        Sre(Arc::new(SreNode::Concat(left, right)))
    }

    /// Geometric repetition with continuation probability `alpha`.
    pub fn star(body: Sre<S>, alpha: S) -> Self {
        Sre(Arc::new(SreNode::Star { body, alpha }))
    }

    /// Concatenation of `parts`, nested to the right; `()` when empty.
    pub fn concat_all(parts: Vec<Sre<S>>) -> Self {
        let mut parts: Vec<Sre<S>> = parts.into_iter().filter(|p| !p.is_empty_word()).collect();
        let Some(mut acc) = parts.pop() else {
            return Sre::empty();
        };
        while let Some(p) = parts.pop() {
            acc = Sre::concat(p, acc);
        }
        acc
    }

    /// Weighted sum of `terms`; weights must be positive and sum to 1.
    pub fn sum(terms: Vec<(S, Sre<S>)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::IllFormedSre("empty sum".into()));
        }
        let mut rest = S::zero();
        for (w, _) in &terms {
            if !w.is_positive() {
                return Err(Error::IllFormedSre(format!("nonpositive weight {w}")));
            }
            rest = rest + w;
        }
        if !rest.approx_eq(&S::one()) {
            return Err(Error::IllFormedSre(format!("weights sum to {rest}")));
        }
        let mut terms = terms;
        let (mut tail_weight, mut acc) = terms.pop().expect("nonempty");
        while let Some((w, r)) = terms.pop() {
            let total = w.clone() + &tail_weight;
            acc = Sre::choice(w / &total, r, acc);
            tail_weight = total;
        }
        Ok(acc)
    }

    pub fn node(&self) -> &SreNode<S> {
        &self.0
    }

    pub fn is_empty_word(&self) -> bool {
        matches!(*self.0, SreNode::Empty)
    }

    /// Identity of the shared node, used as a memo key.
    pub(crate) fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    /// Number of nodes counted with multiplicity.
    pub fn size(&self) -> usize {
        let mut memo = HashMap::new();
        self.size_memo(&mut memo)
    }

    fn size_memo(&self, memo: &mut HashMap<usize, usize>) -> usize {
        if let Some(&s) = memo.get(&self.id()) {
            return s;
        }
        let s = 1 + match self.node() {
            SreNode::Empty | SreNode::Dirac(_) => 0,
            SreNode::Choice { left, right, .. } | SreNode::Concat(left, right) => {
                left.size_memo(memo).saturating_add(right.size_memo(memo))
            }
            SreNode::Star { body, .. } => body.size_memo(memo),
        };
        memo.insert(self.id(), s);
        s
    }

    /// Symbols occurring in the expression, sorted.
    pub fn symbols(&self) -> Vec<String> {
        let mut out = BTreeSet::new();
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(r) = stack.pop() {
            if !seen.insert(r.id()) {
                continue;
            }
            match r.node() {
                SreNode::Empty => {}
                SreNode::Dirac(s) => {
                    out.insert(s.clone());
                }
                SreNode::Choice { left, right, .. } | SreNode::Concat(left, right) => {
                    stack.push(left.clone());
                    stack.push(right.clone());
                }
                SreNode::Star { body, .. } => stack.push(body.clone()),
            }
        }
        out.into_iter().collect()
    }

    /// Probability of the empty word.
    pub fn empty_word_mass(&self) -> S {
        let mut memo = HashMap::new();
        self.empty_mass_memo(&mut memo)
    }

    fn empty_mass_memo(&self, memo: &mut HashMap<usize, S>) -> S {
        if let Some(v) = memo.get(&self.id()) {
            return v.clone();
        }
        let v = match self.node() {
            SreNode::Empty => S::one(),
            SreNode::Dirac(_) => S::zero(),
            SreNode::Choice { alpha, left, right } => {
                alpha.clone() * &left.empty_mass_memo(memo)
                    + &((S::one() - alpha) * &right.empty_mass_memo(memo))
            }
            SreNode::Concat(l, r) => l.empty_mass_memo(memo) * &r.empty_mass_memo(memo),
            SreNode::Star { alpha, .. } => S::one() - alpha,
        };
        memo.insert(self.id(), v.clone());
        v
    }

    /// Check parameters lie strictly between 0 and 1, symbols are nonempty,
    /// and every star body gives the empty word probability 0.
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        let mut eps = HashMap::new();
        let mut stack = vec![self.clone()];
        while let Some(r) = stack.pop() {
            if !seen.insert(r.id()) {
                continue;
            }
            match r.node() {
                SreNode::Empty => {}
                SreNode::Dirac(s) => {
                    if s.is_empty() {
                        return Err(Error::IllFormedSre("empty symbol".into()));
                    }
                }
                SreNode::Choice { alpha, left, right } => {
                    check_parameter(alpha, "choice")?;
                    stack.push(left.clone());
                    stack.push(right.clone());
                }
                SreNode::Concat(l, r) => {
                    stack.push(l.clone());
                    stack.push(r.clone());
                }
                SreNode::Star { body, alpha } => {
                    check_parameter(alpha, "star")?;
                    if !body.empty_mass_memo(&mut eps).is_zero() {
                        return Err(Error::IllFormedSre(
                            "star body gives the empty word positive probability".into(),
                        ));
                    }
                    stack.push(body.clone());
                }
            }
        }
        Ok(())
    }

    /// Apply `f` to every parameter, preserving sharing.
    pub fn map_params<T: Scalar>(&self, f: &impl Fn(&S) -> T) -> Sre<T> {
        let mut memo = HashMap::new();
        self.map_memo(f, &mut memo)
    }

    fn map_memo<T: Scalar>(&self, f: &impl Fn(&S) -> T, memo: &mut HashMap<usize, Sre<T>>) -> Sre<T> {
        if let Some(r) = memo.get(&self.id()) {
            return r.clone();
        }
        let out = match self.node() {
            SreNode::Empty => Sre::empty(),
            SreNode::Dirac(s) => Sre::dirac(s.clone()),
            SreNode::Choice { alpha, left, right } => {
                Sre::choice(f(alpha), left.map_memo(f, memo), right.map_memo(f, memo))
            }
            SreNode::Concat(l, r) => Sre::concat(l.map_memo(f, memo), r.map_memo(f, memo)),
            SreNode::Star { body, alpha } => Sre::star(body.map_memo(f, memo), f(alpha)),
        };
        memo.insert(self.id(), out.clone());
        out
    }

    pub fn to_f64(&self) -> Sre<f64> {
        self.map_params(&Scalar::to_f64)
    }
}

impl Sre<f64> {
    pub fn to_rational(&self) -> Sre<Rational> {
        self.map_params(&|v: &f64| v.to_rational().expect("finite parameter"))
    }
}

fn check_parameter<S: Scalar>(alpha: &S, what: &str) -> Result<()> {
    if alpha.is_positive() && *alpha < S::one() {
        Ok(())
    } else {
        Err(Error::IllFormedSre(format!("{what} parameter {alpha} outside (0, 1)")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn validation() {
        let a = Sre::<Rational>::dirac("a");
        assert!(a.validate().is_ok());
        assert!(Sre::star(a.clone(), q(1, 3)).validate().is_ok());
        assert_eq!(Sre::choice(q(1, 1), a.clone(), a.clone()).validate().unwrap_err().kind(), "IllFormedSre");
        assert!(Sre::star(a.clone(), q(0, 1)).validate().is_err());
        let nested = Sre::star(Sre::star(a.clone(), q(1, 2)), q(1, 2));
        assert!(nested.validate().is_err());
        assert!(Sre::star(Sre::empty(), q(1, 2)).validate().is_err());
        let mixed = Sre::star(Sre::choice(q(1, 2), a.clone(), Sre::empty()), q(1, 2));
        assert!(mixed.validate().is_err());
    }

    #[test]
    fn sums_nest_to_the_right() {
        let (a, b, c) = (Sre::dirac("a"), Sre::dirac("b"), Sre::dirac("c"));
        let s = Sre::sum(vec![(q(1, 2), a.clone()), (q(1, 4), b.clone()), (q(1, 4), c.clone())]).unwrap();
        let expected = Sre::choice(q(1, 2), a.clone(), Sre::choice(q(1, 2), b, c));
        assert_eq!(s, expected);
        assert_eq!(Sre::sum(vec![(q(1, 1), a.clone())]).unwrap(), a);
        assert!(Sre::sum(vec![(q(1, 2), a.clone())]).is_err());
    }

    #[test]
    fn sizes_and_symbols() {
        let a = Sre::<Rational>::dirac("a");
        let ab = Sre::concat(a.clone(), Sre::dirac("b"));
        let shared = Sre::concat(ab.clone(), ab.clone());
        assert_eq!(shared.size(), 7);
        assert_eq!(shared.symbols(), vec!["a".to_string(), "b".to_string()]);
        assert_eq!(Sre::concat_all(vec![Sre::empty(), a.clone(), Sre::empty()]), a);
    }
}
