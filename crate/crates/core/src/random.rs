//! Random instances for property tests and benchmarks.

use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::automaton::WeightedAutomaton;
use crate::numerics::{has_finite_mass, spectral_radius, Matrix, Rational, Scalar};
use crate::sre::Sre;
use crate::tropical::TropicalAutomaton;

/// `a, b, c, ...`
pub fn alphabet(k: usize) -> Vec<String> {
    (0..k).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

fn fraction<R: Rng>(rng: &mut R, max_num: i64, max_den: i64) -> Rational {
    Rational::from_ratio(rng.gen_range(1..=max_num), rng.gen_range(1..=max_den))
}

/// A sparse automaton with small rational weights: about two outgoing edges
/// per state, `q0` initial, at least one final state.
fn sparse<R: Rng>(
    rng: &mut R,
    states: RangeInclusive<usize>,
    symbols: RangeInclusive<usize>,
    max_num: i64,
) -> WeightedAutomaton<Rational> {
    let n = rng.gen_range(states);
    let k = rng.gen_range(symbols);
    let sigma = alphabet(k);
    let mut b = WeightedAutomaton::builder(n, sigma.clone()).initial(0, Rational::one());
    if n > 1 && rng.gen_bool(0.3) {
        b = b.initial(rng.gen_range(1..n), fraction(rng, max_num, 5));
    }
    let mut any_final = false;
    for q in 0..n {
        if rng.gen_bool(0.4) {
            b = b.final_weight(q, fraction(rng, max_num, 5));
            any_final = true;
        }
        for _ in 0..rng.gen_range(0..=2) {
            let a = &sigma[rng.gen_range(0..k)];
            b = b.transition(q, a, rng.gen_range(0..n), fraction(rng, max_num, 5));
        }
    }
    if !any_final {
        b = b.final_weight(n - 1, fraction(rng, max_num, 5));
    }
    b.build().expect("valid by construction")
}

/// Random automaton whose joint matrix has spectral radius below 1.
pub fn finite_mass_automaton<R: Rng>(
    rng: &mut R,
    states: RangeInclusive<usize>,
    symbols: RangeInclusive<usize>,
) -> WeightedAutomaton<Rational> {
    let mut a = sparse(rng, states, symbols, 4);
    let half = Rational::from_ratio(1, 2);
    while !has_finite_mass(&a.joint_matrix()) {
        a = a.scale_transitions(&half);
    }
    a
}

/// Random automaton whose joint matrix has spectral radius at least 1 and
/// whose trimmed part contains a cycle, so its mass diverges.
pub fn divergent_automaton<R: Rng>(
    rng: &mut R,
    states: RangeInclusive<usize>,
    symbols: RangeInclusive<usize>,
) -> WeightedAutomaton<Rational> {
    loop {
        let a = sparse(rng, states.clone(), symbols.clone(), 7);
        let Ok(t) = a.trim() else { continue };
        let rho = spectral_radius(&t.automaton.joint_matrix(), 1e-12).unwrap_or(0.0);
        if rho >= 1.0 {
            return a;
        }
    }
}

/// Random probabilistic automaton. Every state can reach acceptance, so no
/// probability is lost; rows are normalised exactly.
pub fn probabilistic_automaton<R: Rng>(
    rng: &mut R,
    states: RangeInclusive<usize>,
    symbols: RangeInclusive<usize>,
) -> WeightedAutomaton<Rational> {
    let n = rng.gen_range(states);
    let k = rng.gen_range(symbols);
    let sigma = alphabet(k);
    let mut rows: Vec<(Rational, Vec<(usize, usize, Rational)>)> = Vec::with_capacity(n);
    for q in 0..n {
        let accepting = q == n - 1 || rng.gen_bool(0.3);
        let stop = if accepting {
            Rational::from_i64(rng.gen_range(1..=3))
        } else {
            Rational::zero()
        };
        let mut moves = Vec::new();
        if !accepting {
            // a forward move keeps every state co-accessible
            moves.push((rng.gen_range(0..k), rng.gen_range(q + 1..n), Rational::from_i64(rng.gen_range(1..=3))));
        }
        for _ in 0..rng.gen_range(0..=1) {
            moves.push((rng.gen_range(0..k), rng.gen_range(0..n), Rational::from_i64(rng.gen_range(1..=3))));
        }
        rows.push((stop, moves));
    }
    let mut b = WeightedAutomaton::builder(n, sigma.clone());
    for (q, (stop, moves)) in rows.into_iter().enumerate() {
        let total = moves.iter().fold(stop.clone(), |acc, (_, _, w)| acc + w);
        b = b.final_weight(q, stop / &total);
        for (a, to, w) in moves {
            b = b.transition(q, &sigma[a], to, w / &total);
        }
    }
    if n > 1 && rng.gen_bool(0.3) {
        let other = rng.gen_range(1..n);
        let p = Rational::from_ratio(rng.gen_range(1..=3), 4);
        b = b.initial(0, Rational::one() - &p).initial(other, p);
    } else {
        b = b.initial(0, Rational::one());
    }
    b.build().expect("valid by construction")
}

/// An automaton with the same weights as `a` but a different presentation:
/// states permuted, conjugated by a random positive diagonal, plus a
/// state that is never reached.
pub fn equivalent_variant<R: Rng>(rng: &mut R, a: &WeightedAutomaton<Rational>) -> WeightedAutomaton<Rational> {
    let n = a.state_count();
    let d: Vec<Rational> = (0..n).map(|_| fraction(rng, 5, 5)).collect();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let m = n + 1;
    let initial: Vec<Rational> = (0..m)
        .map(|i| if i < n { a.initial()[perm[i]].clone() * &d[perm[i]] } else { Rational::zero() })
        .collect();
    let final_weights: Vec<Rational> = (0..m)
        .map(|i| if i < n { a.final_weights()[perm[i]].clone() / &d[perm[i]] } else { Rational::one() })
        .collect();
    let transitions = a
        .transitions()
        .iter()
        .map(|t| {
            let mut out = Matrix::zeros(m, m);
            for i in 0..n {
                for j in 0..n {
                    let (pi, pj) = (perm[i], perm[j]);
                    let v = t.get(pi, pj);
                    if !v.is_zero() {
                        out.set(i, j, v.clone() * &d[pj] / &d[pi]);
                    }
                }
                // the extra state is never entered
                out.set(n, i, Rational::from_ratio(1, 3));
            }
            out
        })
        .collect();
    WeightedAutomaton::new(a.alphabet().to_vec(), initial, transitions, final_weights).expect("valid")
}

/// `a` with one weight changed.
pub fn perturb<R: Rng>(rng: &mut R, a: &WeightedAutomaton<Rational>) -> WeightedAutomaton<Rational> {
    let n = a.state_count();
    let delta = fraction(rng, 1, 7);
    let mut initial = a.initial().to_vec();
    let mut final_weights = a.final_weights().to_vec();
    let mut transitions = a.transitions().to_vec();
    match rng.gen_range(0..3) {
        0 => {
            let q = rng.gen_range(0..n);
            initial[q] = initial[q].clone() + &delta;
        }
        1 => {
            let q = rng.gen_range(0..n);
            final_weights[q] = final_weights[q].clone() + &delta;
        }
        _ => {
            let k = rng.gen_range(0..transitions.len());
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let cell = transitions[k].get_mut(i, j);
            *cell = cell.clone() + &delta;
        }
    }
    WeightedAutomaton::new(a.alphabet().to_vec(), initial, transitions, final_weights).expect("valid")
}

fn parameter<R: Rng>(rng: &mut R) -> Rational {
    let den = rng.gen_range(2..=6);
    Rational::from_ratio(rng.gen_range(1..den), den)
}

/// A well-formed expression of depth at most `depth` over `symbols` letters.
pub fn sre<R: Rng>(rng: &mut R, depth: usize, symbols: usize) -> Sre<Rational> {
    let sigma = alphabet(symbols);
    sre_node(rng, depth, &sigma, false)
}

/// With `nonempty` set, the expression gives the empty word probability 0,
/// so it can serve as a star body.
fn sre_node<R: Rng>(rng: &mut R, depth: usize, sigma: &[String], nonempty: bool) -> Sre<Rational> {
    let letter = |rng: &mut R| Sre::dirac(sigma[rng.gen_range(0..sigma.len())].clone());
    if depth == 0 {
        return if !nonempty && rng.gen_bool(0.1) { Sre::empty() } else { letter(rng) };
    }
    match rng.gen_range(0..5) {
        0 => letter(rng),
        1 => Sre::choice(
            parameter(rng),
            sre_node(rng, depth - 1, sigma, nonempty),
            sre_node(rng, depth - 1, sigma, nonempty),
        ),
        2 | 3 => {
            let strict_left = nonempty && rng.gen_bool(0.5);
            Sre::concat(
                sre_node(rng, depth - 1, sigma, strict_left),
                sre_node(rng, depth - 1, sigma, nonempty && !strict_left),
            )
        }
        _ if nonempty => Sre::concat(letter(rng), Sre::star(sre_node(rng, depth - 1, sigma, true), parameter(rng))),
        _ => Sre::star(sre_node(rng, depth - 1, sigma, true), parameter(rng)),
    }
}

/// Random min-plus automaton: about a third of the `(p, a, q)` triples carry
/// a cost in `[-5, 5]` with denominator up to 3, `q0` has a finite initial
/// cost and some states accept.
pub fn tropical_automaton<R: Rng>(
    rng: &mut R,
    states: RangeInclusive<usize>,
    symbols: RangeInclusive<usize>,
) -> TropicalAutomaton {
    let n = rng.gen_range(states);
    let k = rng.gen_range(symbols);
    let sigma = alphabet(k);
    let cost = |rng: &mut R| Rational::from_ratio(rng.gen_range(-15..=15), rng.gen_range(1..=3));
    let mut b = TropicalAutomaton::builder(n, sigma.clone()).initial(0, cost(rng));
    for q in 0..n {
        if rng.gen_bool(0.4) {
            b = b.final_weight(q, cost(rng));
        }
        for a in &sigma {
            for r in 0..n {
                if rng.gen_bool(0.3) {
                    b = b.transition(q, a, r, cost(rng));
                }
            }
        }
    }
    b.build().expect("valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_meet_their_contracts() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            assert!(finite_mass_automaton(&mut rng, 1..=6, 1..=3).total_mass().is_ok());
            let pa = probabilistic_automaton(&mut rng, 1..=6, 1..=3);
            assert!(pa.check_local_stochasticity().passed());
            assert_eq!(pa.total_mass().unwrap(), Rational::one());
            sre(&mut rng, 5, 3).validate().unwrap();
        }
        for _ in 0..5 {
            let a = divergent_automaton(&mut rng, 1..=6, 1..=2);
            assert!(a.total_mass().is_err());
        }
    }
}
