//! Seeded random words from probabilistic automata and SREs, and
//! goodness-of-fit checks against exact probabilities.
//!
//! Every random decision draws one `u64` `k` and picks the first outcome
//! whose cumulative probability `c` satisfies `k < ceil(c * 2^64)`, so
//! rational distributions are sampled without rounding.

use std::collections::HashMap;

use indexmap::IndexMap;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::automaton::WeightedAutomaton;
use crate::error::{Error, Result};
use crate::normalize::future_mass;
use crate::numerics::{dot, Scalar};
use crate::sre::{Sre, SreNode};

/// Identifier of the generator behind [`sample_pa`] and [`sample_sre`]:
/// `rand_chacha::ChaCha8Rng` seeded with `seed_from_u64`.
pub const GENERATOR: &str = "chacha8";

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleBatch {
    /// Distinct words in shortlex order, with multiplicities.
    pub counts: IndexMap<Vec<String>, u64>,
    pub seed: u64,
    pub generator: String,
    pub draws: u64,
}

impl SampleBatch {
    fn collect(words: impl Iterator<Item = Vec<String>>, seed: u64, draws: u64) -> SampleBatch {
        let mut counts: IndexMap<Vec<String>, u64> = IndexMap::new();
        for w in words {
            *counts.entry(w).or_default() += 1;
        }
        counts.sort_by(|a, _, b, _| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        SampleBatch {
            counts,
            seed,
            generator: GENERATOR.to_string(),
            draws,
        }
    }

    pub fn count<T: AsRef<str>>(&self, word: &[T]) -> u64 {
        let key: Vec<String> = word.iter().map(|s| s.as_ref().to_string()).collect();
        self.counts.get(&key).copied().unwrap_or(0)
    }

    pub fn frequency<T: AsRef<str>>(&self, word: &[T]) -> f64 {
        self.count(word) as f64 / self.draws as f64
    }

    /// Sample mean and sample variance of the word length.
    pub fn length_moments(&self) -> (f64, f64) {
        let n = self.draws as f64;
        let mean = self.counts.iter().map(|(w, &c)| w.len() as f64 * c as f64).sum::<f64>() / n;
        let var = self
            .counts
            .iter()
            .map(|(w, &c)| (w.len() as f64 - mean).powi(2) * c as f64)
            .sum::<f64>()
            / (n - 1.0).max(1.0);
        (mean, var)
    }
}

fn pick(k: u64, thresholds: &[u128]) -> usize {
    let k = k as u128;
    thresholds
        .iter()
        .position(|&t| k < t)
        .unwrap_or(thresholds.len() - 1)
}

/// One state's outcomes: stop, or read a letter and move.
#[derive(Clone, Debug)]
struct Row {
    moves: Vec<Option<(usize, usize)>>,
    thresholds: Vec<u128>,
}

/// Walks a probabilistic automaton. Build once, draw many times.
#[derive(Clone, Debug)]
pub struct PaSampler {
    alphabet: Vec<String>,
    start: Vec<usize>,
    start_thresholds: Vec<u128>,
    rows: Vec<Row>,
}

impl PaSampler {
    /// Fails unless the automaton is locally stochastic and no probability
    /// leaks into walks that never stop.
    pub fn new<S: Scalar>(pa: &WeightedAutomaton<S>) -> Result<PaSampler> {
        let report = pa.check_local_stochasticity();
        if !report.passed() {
            let mut states = report.failing_states().iter().map(|q| format!("q{q}")).collect::<Vec<_>>();
            if !report.initial_ok {
                states.insert(0, "initial".into());
            }
            return Err(Error::NotStochastic(states.join(", ")));
        }
        let mass = pa.total_mass()?;
        if !mass.approx_eq(&S::one()) {
            return Err(Error::NotStochastic(format!("total mass {mass}, some walks never stop")));
        }
        let n = pa.state_count();
        let cumulative = |weights: &[S]| -> Vec<u128> {
            let mut acc = S::zero();
            weights
                .iter()
                .map(|w| {
                    acc = acc.clone() + w;
                    acc.unit_threshold()
                })
                .collect()
        };
        let (start, initial): (Vec<usize>, Vec<S>) = (0..n)
            .filter(|&q| pa.initial()[q].is_positive())
            .map(|q| (q, pa.initial()[q].clone()))
            .unzip();
        let rows = (0..n)
            .map(|q| {
                let mut moves = vec![None];
                let mut weights = vec![pa.final_weights()[q].clone()];
                for (a, m) in pa.transitions().iter().enumerate() {
                    for r in 0..n {
                        if m.get(q, r).is_positive() {
                            moves.push(Some((a, r)));
                            weights.push(m.get(q, r).clone());
                        }
                    }
                }
                Row {
                    moves,
                    thresholds: cumulative(&weights),
                }
            })
            .collect();
        Ok(PaSampler {
            alphabet: pa.alphabet().to_vec(),
            start_thresholds: cumulative(&initial),
            start,
            rows,
        })
    }

    /// One word as symbol indices.
    pub fn draw_indices(&self, rng: &mut impl RngCore) -> Vec<usize> {
        let mut q = self.start[pick(rng.next_u64(), &self.start_thresholds)];
        let mut word = Vec::new();
        loop {
            let row = &self.rows[q];
            match row.moves[pick(rng.next_u64(), &row.thresholds)] {
                None => return word,
                Some((a, r)) => {
                    word.push(a);
                    q = r;
                }
            }
        }
    }

    pub fn draw(&self, rng: &mut impl RngCore) -> Vec<String> {
        self.draw_indices(rng)
            .into_iter()
            .map(|a| self.alphabet[a].clone())
            .collect()
    }
}

/// Ancestral sampler for an SRE.
#[derive(Clone, Debug)]
pub struct SreSampler<S> {
    sre: Sre<S>,
    thresholds: HashMap<usize, u128>,
}

impl<S: Scalar> SreSampler<S> {
    pub fn new(r: &Sre<S>) -> Result<SreSampler<S>> {
        r.validate()?;
        let mut thresholds = HashMap::new();
        fn walk<S: Scalar>(r: &Sre<S>, out: &mut HashMap<usize, u128>) {
            match r.node() {
                SreNode::Empty | SreNode::Dirac(_) => {}
                SreNode::Choice { alpha, left, right } => {
                    out.insert(r.id(), alpha.unit_threshold());
                    walk(left, out);
                    walk(right, out);
                }
                SreNode::Concat(left, right) => {
                    walk(left, out);
                    walk(right, out);
                }
                SreNode::Star { body, alpha } => {
                    out.insert(r.id(), alpha.unit_threshold());
                    walk(body, out);
                }
            }
        }
        walk(r, &mut thresholds);
        Ok(SreSampler {
            sre: r.clone(),
            thresholds,
        })
    }

    pub fn draw(&self, rng: &mut impl RngCore) -> Vec<String> {
        let mut word = Vec::new();
        self.emit(&self.sre, rng, &mut word);
        word
    }

    fn emit(&self, r: &Sre<S>, rng: &mut impl RngCore, word: &mut Vec<String>) {
        match r.node() {
            SreNode::Empty => {}
            SreNode::Dirac(a) => word.push(a.clone()),
            SreNode::Choice { left, right, .. } => {
                let branch = if (rng.next_u64() as u128) < self.thresholds[&r.id()] {
                    left
                } else {
                    right
                };
                self.emit(branch, rng, word);
            }
            SreNode::Concat(left, right) => {
                self.emit(left, rng, word);
                self.emit(right, rng, word);
            }
            SreNode::Star { body, .. } => {
                let t = self.thresholds[&r.id()];
                while (rng.next_u64() as u128) < t {
                    self.emit(body, rng, word);
                }
            }
        }
    }
}

/// `count` words from a probabilistic automaton.
pub fn sample_pa<S: Scalar>(pa: &WeightedAutomaton<S>, count: u64, seed: u64) -> Result<SampleBatch> {
    let sampler = PaSampler::new(pa)?;
    let mut rng = rng_from_seed(seed);
    Ok(SampleBatch::collect(
        (0..count).map(|_| sampler.draw(&mut rng)),
        seed,
        count,
    ))
}

/// `count` words from an SRE.
pub fn sample_sre<S: Scalar>(r: &Sre<S>, count: u64, seed: u64) -> Result<SampleBatch> {
    let sampler = SreSampler::new(r)?;
    let mut rng = rng_from_seed(seed);
    Ok(SampleBatch::collect(
        (0..count).map(|_| sampler.draw(&mut rng)),
        seed,
        count,
    ))
}

/// Every word of weight at least `threshold`, in shortlex order.
///
/// A prefix `u` is extended only while `λ^T M_u d`, the total weight of its
/// completions, is at least `threshold`; for a finite-mass automaton only
/// finitely many prefixes pass.
pub fn heavy_words<S: Scalar>(a: &WeightedAutomaton<S>, threshold: &S) -> Result<Vec<(Vec<usize>, S)>> {
    let d = future_mass(a)?;
    let mut out = Vec::new();
    let mut frontier = vec![(Vec::new(), a.initial().to_vec())];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (w, v) in frontier {
            if dot(&v, &d) < *threshold {
                continue;
            }
            let weight = dot(&v, a.final_weights());
            if weight >= *threshold {
                out.push((w.clone(), weight));
            }
            for (k, m) in a.transitions().iter().enumerate() {
                let mut u = w.clone();
                u.push(k);
                next.push((u, m.vec_mul(&v)));
            }
        }
        frontier = next;
    }
    Ok(out)
}

/// `P(|w| = k)` for `k = 0..=max_len`: `λ^T M^k μ` with `M` the joint matrix.
pub fn length_masses<S: Scalar>(a: &WeightedAutomaton<S>, max_len: usize) -> Vec<S> {
    let joint = a.joint_matrix();
    let mut v = a.initial().to_vec();
    let mut out = Vec::with_capacity(max_len + 1);
    for _ in 0..=max_len {
        out.push(dot(&v, a.final_weights()));
        v = joint.vec_mul(&v);
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    /// The 0.999 quantile of the chi-square law.
    pub critical: f64,
    pub passed: bool,
}

/// Pearson's test of `batch` against `events`, each a word with its exact
/// probability; the remaining probability forms one extra tail event.
pub fn chi_square(batch: &SampleBatch, events: &[(Vec<String>, f64)]) -> ChiSquareTest {
    let n = batch.draws as f64;
    let mut statistic = 0.0;
    let mut covered_p = 0.0;
    let mut covered_count = 0u64;
    for (w, p) in events {
        let observed = batch.count(w);
        let expected = n * p;
        statistic += (observed as f64 - expected).powi(2) / expected;
        covered_p += p;
        covered_count += observed;
    }
    let tail_p = 1.0 - covered_p;
    let mut cells = events.len();
    let tail_observed = (batch.draws - covered_count) as f64;
    if tail_p * n > 1e-9 {
        statistic += (tail_observed - tail_p * n).powi(2) / (tail_p * n);
        cells += 1;
    } else if tail_observed > 0.0 {
        statistic = f64::INFINITY;
    }
    let dof = cells.saturating_sub(1).max(1);
    let critical = ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.999);
    ChiSquareTest {
        statistic,
        degrees_of_freedom: dof,
        critical,
        passed: statistic < critical,
    }
}

/// Chi-square test of a batch drawn from `pa` against its exact word
/// probabilities, with one event per word of probability at least `1e-3`.
pub fn chi_square_pa<S: Scalar>(pa: &WeightedAutomaton<S>, batch: &SampleBatch) -> Result<ChiSquareTest> {
    let events = heavy_words(pa, &S::from_ratio(1, 1000))?
        .into_iter()
        .map(|(w, p)| (w.into_iter().map(|k| pa.alphabet()[k].clone()).collect(), p.to_f64()))
        .collect::<Vec<_>>();
    Ok(chi_square(batch, &events))
}
