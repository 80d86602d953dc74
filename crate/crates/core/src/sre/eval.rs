use std::collections::HashMap;
use std::rc::Rc;

use crate::error::Result;
use crate::numerics::Scalar;

use super::{Sre, SreNode};

/// Probability of `word` under `r`.
///
/// Every subexpression gets a table of probabilities for all substrings
/// `word[i..j]`, filled bottom up; shared subexpressions are computed once.
pub fn eval<S: Scalar, T: AsRef<str>>(r: &Sre<S>, word: &[T]) -> Result<S> {
    r.validate()?;
    let word: Vec<&str> = word.iter().map(AsRef::as_ref).collect();
    let mut memo = HashMap::new();
    let table = spans(r, &word, &mut memo);
    Ok(table.get(0, word.len()).clone())
}

struct Spans<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> Spans<S> {
    fn zeros(n: usize) -> Self {
        Spans {
            n,
            data: vec![S::zero(); (n + 1) * (n + 1)],
        }
    }

    fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * (self.n + 1) + j]
    }

    fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * (self.n + 1) + j] = v;
    }
}

fn spans<S: Scalar>(r: &Sre<S>, word: &[&str], memo: &mut HashMap<usize, Rc<Spans<S>>>) -> Rc<Spans<S>> {
    if let Some(t) = memo.get(&r.id()) {
        return t.clone();
    }
    let n = word.len();
    let mut t = Spans::zeros(n);
    match r.node() {
        SreNode::Empty => {
            for i in 0..=n {
                t.set(i, i, S::one());
            }
        }
        SreNode::Dirac(s) => {
            for i in 0..n {
                if word[i] == s {
                    t.set(i, i + 1, S::one());
                }
            }
        }
        SreNode::Choice { alpha, left, right } => {
            let (l, rr) = (spans(left, word, memo), spans(right, word, memo));
            let beta = S::one() - alpha;
            for i in 0..=n {
                for j in i..=n {
                    let v = alpha.clone() * l.get(i, j) + &(beta.clone() * rr.get(i, j));
                    t.set(i, j, v);
                }
            }
        }
        SreNode::Concat(left, right) => {
            let (l, rr) = (spans(left, word, memo), spans(right, word, memo));
            for i in 0..=n {
                for j in i..=n {
                    let mut v = S::zero();
                    for k in i..=j {
                        let (a, b) = (l.get(i, k), rr.get(k, j));
                        if !a.is_zero() && !b.is_zero() {
                            v = v + &(a.clone() * b);
                        }
                    }
                    t.set(i, j, v);
                }
            }
        }
        SreNode::Star { body, alpha } => {
            // S(i, i) = 1 - α and S(i, j) = α Σ_{i<k<=j} B(i, k) S(k, j):
            // the first iteration consumes a nonempty prefix.
            let b = spans(body, word, memo);
            let stop = S::one() - alpha;
            for j in 0..=n {
                t.set(j, j, stop.clone());
                for i in (0..j).rev() {
                    let mut v = S::zero();
                    for k in i + 1..=j {
                        let (x, y) = (b.get(i, k), t.get(k, j));
                        if !x.is_zero() && !y.is_zero() {
                            v = v + &(x.clone() * y);
                        }
                    }
                    t.set(i, j, alpha.clone() * &v);
                }
            }
        }
    }
    let t = Rc::new(t);
    memo.insert(r.id(), t.clone());
    t
}

/// Total probability of each word length `0..=max_len`.
pub fn length_distribution<S: Scalar>(r: &Sre<S>, max_len: usize) -> Result<Vec<S>> {
    r.validate()?;
    let mut memo = HashMap::new();
    Ok(lengths(r, max_len, &mut memo).as_ref().clone())
}

fn lengths<S: Scalar>(r: &Sre<S>, max_len: usize, memo: &mut HashMap<usize, Rc<Vec<S>>>) -> Rc<Vec<S>> {
    if let Some(v) = memo.get(&r.id()) {
        return v.clone();
    }
    let mut out = vec![S::zero(); max_len + 1];
    match r.node() {
        SreNode::Empty => out[0] = S::one(),
        SreNode::Dirac(_) => {
            if max_len >= 1 {
                out[1] = S::one();
            }
        }
        SreNode::Choice { alpha, left, right } => {
            let (l, rr) = (lengths(left, max_len, memo), lengths(right, max_len, memo));
            let beta = S::one() - alpha;
            for k in 0..=max_len {
                out[k] = alpha.clone() * &l[k] + &(beta.clone() * &rr[k]);
            }
        }
        SreNode::Concat(left, right) => {
            let (l, rr) = (lengths(left, max_len, memo), lengths(right, max_len, memo));
            for i in 0..=max_len {
                if l[i].is_zero() {
                    continue;
                }
                for j in 0..=max_len - i {
                    if !rr[j].is_zero() {
                        out[i + j] = out[i + j].clone() + &(l[i].clone() * &rr[j]);
                    }
                }
            }
        }
        SreNode::Star { body, alpha } => {
            let b = lengths(body, max_len, memo);
            out[0] = S::one() - alpha;
            for k in 1..=max_len {
                let mut v = S::zero();
                for i in 1..=k {
                    if !b[i].is_zero() && !out[k - i].is_zero() {
                        v = v + &(b[i].clone() * &out[k - i]);
                    }
                }
                out[k] = alpha.clone() * &v;
            }
        }
    }
    let out = Rc::new(out);
    memo.insert(r.id(), out.clone());
    out
}

/// `Σ_{|w| <= max_len} P(w)`, nondecreasing in `max_len` with limit 1.
pub fn partial_mass<S: Scalar>(r: &Sre<S>, max_len: usize) -> Result<S> {
    Ok(length_distribution(r, max_len)?
        .into_iter()
        .fold(S::zero(), |acc, v| acc + &v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Rational;
    use crate::oracle::words_of_length;
    use crate::random;
    use crate::sre::parse_sre;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn chars(s: &str) -> Vec<String> {
        s.chars().map(String::from).collect()
    }

    /// Direct summation over the defining formulas: splits for
    /// concatenation and an explicit sum over iteration counts for the star,
    /// memoised on (subexpression, substring).
    struct Direct<'a> {
        w: &'a [String],
        memo: HashMap<(usize, usize, usize), Rational>,
        folds: HashMap<(usize, usize, usize, usize), Rational>,
    }

    impl Direct<'_> {
        fn prob(&mut self, r: &Sre<Rational>, i: usize, j: usize) -> Rational {
            if let Some(v) = self.memo.get(&(r.id(), i, j)) {
                return v.clone();
            }
            let v = match r.node() {
                SreNode::Empty => if i == j { q(1, 1) } else { q(0, 1) },
                SreNode::Dirac(s) => if j == i + 1 && &self.w[i] == s { q(1, 1) } else { q(0, 1) },
                SreNode::Choice { alpha, left, right } => {
                    alpha * self.prob(left, i, j) + (q(1, 1) - alpha) * self.prob(right, i, j)
                }
                SreNode::Concat(l, rr) => (i..=j)
                    .map(|k| self.prob(l, i, k) * self.prob(rr, k, j))
                    .fold(q(0, 1), |a, b| a + b),
                SreNode::Star { body, alpha } => {
                    // each iteration consumes at least one letter, so k <= j - i
                    (0..=j - i)
                        .map(|k| (q(1, 1) - alpha) * alpha.power(k) * self.k_fold(body, k, i, j))
                        .fold(q(0, 1), |a, b| a + b)
                }
            };
            self.memo.insert((r.id(), i, j), v.clone());
            v
        }

        /// Probability that `k` independent draws of `body` concatenate to
        /// `w[i..j]`.
        fn k_fold(&mut self, body: &Sre<Rational>, k: usize, i: usize, j: usize) -> Rational {
            if k == 0 {
                return if i == j { q(1, 1) } else { q(0, 1) };
            }
            if let Some(v) = self.folds.get(&(body.id(), k, i, j)) {
                return v.clone();
            }
            let v = (i + 1..=j)
                .map(|m| self.prob(body, i, m) * self.k_fold(body, k - 1, m, j))
                .fold(q(0, 1), |a, b| a + b);
            self.folds.insert((body.id(), k, i, j), v.clone());
            v
        }
    }

    fn direct(r: &Sre<Rational>, w: &[String]) -> Rational {
        let mut d = Direct { w, memo: HashMap::new(), folds: HashMap::new() };
        d.prob(r, 0, w.len())
    }

    #[test]
    fn letters() {
        let a = Sre::<Rational>::dirac("a");
        assert_eq!(eval(&a, &["a"]).unwrap(), q(1, 1));
        assert_eq!(eval(&a, &["b"]).unwrap(), q(0, 1));
        assert_eq!(eval(&a, &[] as &[&str]).unwrap(), q(0, 1));
    }

    #[test]
    fn geometric_star() {
        let s = Sre::star(Sre::dirac("b"), q(1, 3));
        assert_eq!(eval(&s, &[] as &[&str]).unwrap(), q(2, 3));
        assert_eq!(eval(&s, &["b", "b"]).unwrap(), q(2, 3) * q(1, 9));
        assert_eq!(eval(&s, &["b", "a"]).unwrap(), q(0, 1));
    }

    #[test]
    fn running_example_expression() {
        let r: Sre<Rational> = parse_sre(crate::fixtures::RUNNING_EXAMPLE_SRE).unwrap();
        assert_eq!(eval(&r, &chars("ab")).unwrap(), q(6, 28));
        let fixture = crate::fixtures::running_example();
        for w in ["aa", "aab", "aaab", "abab", "abaab", "aba", "abba"] {
            let w = chars(w);
            assert_eq!(eval(&r, &w).unwrap() * q(28, 1), fixture.evaluate(&w).unwrap(), "{w:?}");
        }
    }

    #[test]
    fn partial_masses() {
        assert_eq!(partial_mass(&Sre::<Rational>::dirac("a"), 1).unwrap(), q(1, 1));
        assert_eq!(partial_mass(&Sre::<Rational>::dirac("a"), 0).unwrap(), q(0, 1));
        let s = Sre::star(Sre::dirac("b"), q(1, 3));
        assert_eq!(partial_mass(&s, 3).unwrap(), q(80, 81));
        let r: Sre<Rational> = parse_sre(crate::fixtures::RUNNING_EXAMPLE_SRE).unwrap();
        let m = partial_mass(&r.to_f64(), 60).unwrap();
        assert!(m > 0.99 && m <= 1.0 + 1e-12);
    }

    #[test]
    fn ill_formed_rejected() {
        let bad = Sre::star(Sre::star(Sre::dirac("a"), q(1, 2)), q(1, 2));
        assert_eq!(eval(&bad, &["a"]).unwrap_err().kind(), "IllFormedSre");
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        #[test]
        fn matches_direct_summation(seed in 0u64..u64::MAX) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = random::sre(&mut rng, 4, 2);
            for len in 0..=6 {
                for w in words_of_length(2, len) {
                    let w: Vec<String> = w.iter().map(|&k| ["a", "b"][k].to_string()).collect();
                    proptest::prop_assert_eq!(eval(&r, &w).unwrap(), direct(&r, &w));
                }
            }
        }

        #[test]
        fn length_distribution_sums_word_probabilities(seed in 0u64..u64::MAX) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = random::sre(&mut rng, 4, 2);
            let dist = length_distribution(&r, 5).unwrap();
            let mut previous = q(0, 1);
            for (len, p) in dist.iter().enumerate() {
                let by_words = words_of_length(2, len)
                    .into_iter()
                    .map(|w| {
                        let w: Vec<&str> = w.iter().map(|&k| ["a", "b"][k]).collect();
                        eval(&r, &w).unwrap()
                    })
                    .fold(q(0, 1), |a, b| a + b);
                proptest::prop_assert_eq!(p, &by_words);
                let m = partial_mass(&r, len).unwrap();
                proptest::prop_assert!(m >= previous && m <= q(1, 1));
                previous = m;
            }
        }
    }
}
