//! Brute-force and exact equivalence checks used to verify every
//! transformation in the crate.

use indexmap::IndexMap;

use crate::automaton::WeightedAutomaton;
use crate::error::{Error, Result};
use crate::numerics::{dot, Rational, Scalar};

/// Upper bound on `|Σ|^L` for enumeration.
pub const WORD_BUDGET: f64 = 1e6;

/// All words over `0..k` of length exactly `len`, in lexicographic order.
pub fn words_of_length(k: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k).map(move |a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    out
}

/// All words over `0..k` of length at most `max_len`, shortest first.
pub fn words(k: usize, max_len: usize) -> Vec<Vec<usize>> {
    (0..=max_len).flat_map(|l| words_of_length(k, l)).collect()
}

fn check_budget(symbols: usize, max_len: usize) -> Result<()> {
    let words = (symbols as f64).powi(max_len as i32);
    if words > WORD_BUDGET {
        return Err(Error::BudgetExceeded {
            words,
            budget: WORD_BUDGET,
        });
    }
    Ok(())
}

/// Depth-first walk over all words up to `max_len`, carrying the forward
/// vector so each word costs one vector-matrix product.
fn walk<S: Scalar>(
    a: &WeightedAutomaton<S>,
    max_len: usize,
    visit: &mut impl FnMut(&[usize], &[S]),
) {
    fn go<S: Scalar>(
        a: &WeightedAutomaton<S>,
        word: &mut Vec<usize>,
        forward: &[S],
        max_len: usize,
        visit: &mut impl FnMut(&[usize], &[S]),
    ) {
        visit(word, forward);
        if word.len() == max_len || forward.iter().all(Scalar::is_zero) {
            return;
        }
        for k in 0..a.alphabet().len() {
            let next = a.transition(k).vec_mul(forward);
            word.push(k);
            go(a, word, &next, max_len, visit);
            word.pop();
        }
    }
    go(a, &mut Vec::new(), a.initial(), max_len, visit);
}

fn shortlex(a: &[usize], b: &[usize]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Nonzero weights of all words of length at most `max_len`, shortest first
/// and lexicographic (by alphabet position) within a length.
pub fn enumerate_weights<S: Scalar>(
    a: &WeightedAutomaton<S>,
    max_len: usize,
) -> Result<IndexMap<Vec<String>, S>> {
    check_budget(a.alphabet().len(), max_len)?;
    let mut found: Vec<(Vec<usize>, S)> = Vec::new();
    walk(a, max_len, &mut |w, forward| {
        let v = dot(forward, a.final_weights());
        if !v.is_zero() {
            found.push((w.to_vec(), v));
        }
    });
    found.sort_by(|x, y| shortlex(&x.0, &y.0));
    Ok(found
        .into_iter()
        .map(|(w, v)| (w.iter().map(|&k| a.alphabet()[k].clone()).collect(), v))
        .collect())
}

/// A word on which two automata disagree.
#[derive(Clone, Debug, PartialEq)]
pub struct Divergence<S> {
    pub word: Vec<String>,
    pub left: S,
    pub right: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport<S> {
    pub equivalent: bool,
    /// The shortest divergent word found, if any.
    pub divergence: Option<Divergence<S>>,
}

/// Alphabet containing the symbols of `a` followed by any extra symbols of `b`.
fn union_alphabet<S: Scalar>(a: &WeightedAutomaton<S>, b: &WeightedAutomaton<S>) -> Vec<String> {
    let mut out = a.alphabet().to_vec();
    for s in b.alphabet() {
        if !out.contains(s) {
            out.push(s.clone());
        }
    }
    out
}

/// Compare the weights of all words up to `max_len` (exactly for rationals,
/// within the float tolerance otherwise).
pub fn bounded_equiv<S: Scalar>(
    a: &WeightedAutomaton<S>,
    b: &WeightedAutomaton<S>,
    max_len: usize,
) -> Result<EquivalenceReport<S>> {
    let sigma = union_alphabet(a, b);
    check_budget(sigma.len(), max_len)?;
    let a = a.with_alphabet(&sigma)?;
    let b = b.with_alphabet(&sigma)?;
    let left = weights_by_index(&a, max_len);
    let right = weights_by_index(&b, max_len);
    let zero = S::zero();
    let mut bad: Option<(Vec<usize>, S, S)> = None;
    for (w, l) in left.iter() {
        let r = right.get(w).unwrap_or(&zero);
        if !l.approx_eq(r) {
            consider(&mut bad, w, l, r);
        }
    }
    for (w, r) in right.iter() {
        if !left.contains_key(w) && !r.approx_eq(&zero) {
            consider(&mut bad, w, &zero, r);
        }
    }
    Ok(EquivalenceReport {
        equivalent: bad.is_none(),
        divergence: bad.map(|(w, left, right)| Divergence {
            word: w.iter().map(|&k| sigma[k].clone()).collect(),
            left,
            right,
        }),
    })
}

fn weights_by_index<S: Scalar>(a: &WeightedAutomaton<S>, max_len: usize) -> IndexMap<Vec<usize>, S> {
    let mut out = IndexMap::new();
    walk(a, max_len, &mut |w, forward| {
        let v = dot(forward, a.final_weights());
        if !v.is_zero() {
            out.insert(w.to_vec(), v);
        }
    });
    out
}

fn consider<S: Scalar>(best: &mut Option<(Vec<usize>, S, S)>, w: &[usize], l: &S, r: &S) {
    let better = match best {
        None => true,
        Some((b, _, _)) => shortlex(w, b).is_lt(),
    };
    if better {
        *best = Some((w.to_vec(), l.clone(), r.clone()));
    }
}

/// Decide `f_A = f_B` exactly.
///
/// Explores the forward vectors `(λ_A^T M_w, λ_B^T M_w)` breadth first, keeping
/// only words whose vector is linearly independent of those already kept.
/// Every forward vector lies in the span of the kept ones, so the two
/// automata agree everywhere iff they agree on the kept words. At most
/// `n_A + n_B` words are kept.
pub fn exact_equiv<S: Scalar>(
    a: &WeightedAutomaton<S>,
    b: &WeightedAutomaton<S>,
) -> Result<EquivalenceReport<S>> {
    if !S::is_exact() {
        return Err(Error::FloatBackendUnsupported);
    }
    let sigma = union_alphabet(a, b);
    let a = a.with_alphabet(&sigma)?;
    let b = b.with_alphabet(&sigma)?;
    let mut basis = Echelon::default();
    let mut queue: std::collections::VecDeque<(Vec<usize>, Vec<S>, Vec<S>)> =
        std::collections::VecDeque::new();
    queue.push_back((Vec::new(), a.initial().to_vec(), b.initial().to_vec()));
    while let Some((word, fa, fb)) = queue.pop_front() {
        let joined: Vec<Rational> = fa
            .iter()
            .chain(&fb)
            .map(|v| v.to_rational().expect("exact backend"))
            .collect();
        if !basis.insert(joined) {
            continue;
        }
        let left = dot(&fa, a.final_weights());
        let right = dot(&fb, b.final_weights());
        if left != right {
            return Ok(EquivalenceReport {
                equivalent: false,
                divergence: Some(Divergence {
                    word: word.iter().map(|&k| sigma[k].clone()).collect(),
                    left,
                    right,
                }),
            });
        }
        for k in 0..sigma.len() {
            let mut next = word.clone();
            next.push(k);
            queue.push_back((next, a.transition(k).vec_mul(&fa), b.transition(k).vec_mul(&fb)));
        }
    }
    Ok(EquivalenceReport {
        equivalent: true,
        divergence: None,
    })
}

/// Reduced row-echelon basis of concatenated forward vectors. Only the
/// reduction uses subtraction; the stored automata and the final comparison
/// `λ_A M_w μ_A = λ_B M_w μ_B` stay nonnegative.
#[derive(Default)]
struct Echelon {
    rows: Vec<(usize, Vec<Rational>)>,
}

impl Echelon {
    /// Insert `v` if it is independent of the current rows.
    fn insert(&mut self, mut v: Vec<Rational>) -> bool {
        for (pivot, row) in &self.rows {
            let c = v[*pivot].clone();
            if num_traits::Zero::is_zero(&c) {
                continue;
            }
            for (x, r) in v.iter_mut().zip(row) {
                if !num_traits::Zero::is_zero(r) {
                    *x = x.clone() - &(c.clone() * r);
                }
            }
        }
        let Some(pivot) = v.iter().position(|x| !num_traits::Zero::is_zero(x)) else {
            return false;
        };
        let p = v[pivot].clone();
        for x in v.iter_mut() {
            *x = x.clone() / &p;
        }
        for (_, row) in self.rows.iter_mut() {
            let c = row[pivot].clone();
            if num_traits::Zero::is_zero(&c) {
                continue;
            }
            for (x, r) in row.iter_mut().zip(&v) {
                *x = x.clone() - &(c.clone() * r);
            }
        }
        self.rows.push((pivot, v));
        true
    }
}
