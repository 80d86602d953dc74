use crate::automaton::WeightedAutomaton;
use crate::error::{Error, Result};
use crate::numerics::Scalar;

use super::Sre;

type Edge<S> = Option<(S, Sre<S>)>;

/// An expression for the distribution of a probabilistic automaton, by state
/// elimination.
///
/// Edges carry a probability and a normalised expression for the words read
/// along them. Removing state `k` with self-return probability `s` replaces
/// every path `i -> k -> j` by one edge of probability `p_ik p_kj / (1 - s)`
/// reading `r_ik (r_kk)*[s] r_kj`; parallel edges merge into a weighted
/// choice. States go in order of fewest (in-degree × out-degree).
pub fn state_eliminate<S: Scalar>(pa: &WeightedAutomaton<S>) -> Result<Sre<S>> {
    state_eliminate_with_order(pa, None)
}

/// As [`state_eliminate`], but removing the states of `pa` in the given
/// order. States dropped by trimming are skipped.
pub fn state_eliminate_with_order<S: Scalar>(
    pa: &WeightedAutomaton<S>,
    order: Option<&[usize]>,
) -> Result<Sre<S>> {
    ensure_stochastic(pa)?;
    let trimmed = pa.trim()?;
    let a = &trimmed.automaton;
    ensure_stochastic(a).map_err(|_| {
        Error::NotStochastic("probability leaks into states that never accept".into())
    })?;

    let n = a.state_count();
    let (source, sink) = (n, n + 1);
    let mut edges: Vec<Vec<Edge<S>>> = vec![vec![None; n + 2]; n + 2];
    for q in 0..n {
        if a.initial()[q].is_positive() {
            merge(&mut edges[source][q], a.initial()[q].clone(), Sre::empty());
        }
        if a.final_weights()[q].is_positive() {
            merge(&mut edges[q][sink], a.final_weights()[q].clone(), Sre::empty());
        }
    }
    for (k, symbol) in a.alphabet().iter().enumerate() {
        let letter = Sre::dirac(symbol.clone());
        let m = a.transition(k);
        for i in 0..n {
            for j in 0..n {
                let p = m.get(i, j);
                if p.is_positive() {
                    merge(&mut edges[i][j], p.clone(), letter.clone());
                }
            }
        }
    }

    let mut alive = vec![true; n];
    let explicit: Option<Vec<usize>> = order.map(|o| {
        o.iter()
            .filter_map(|&old| trimmed.kept.iter().position(|&k| k == old))
            .collect()
    });
    for step in 0..n {
        let k = match &explicit {
            Some(o) if step < o.len() => o[step],
            _ => cheapest(&edges, &alive),
        };
        if !alive[k] {
            continue;
        }
        eliminate(&mut edges, k);
        alive[k] = false;
    }
    for k in 0..n {
        if alive[k] {
            eliminate(&mut edges, k);
        }
    }

    match edges[source][sink].take() {
        Some((p, r)) if p.approx_eq(&S::one()) => Ok(r),
        Some((p, _)) => Err(Error::NotStochastic(format!("total probability {p}"))),
        None => Err(Error::EmptyAutomaton),
    }
}

fn ensure_stochastic<S: Scalar>(a: &WeightedAutomaton<S>) -> Result<()> {
    let report = a.check_local_stochasticity();
    if report.passed() {
        return Ok(());
    }
    let mut problems: Vec<String> = report.failing_states().iter().map(|q| format!("q{q}")).collect();
    if !report.initial_ok {
        problems.insert(0, "initial weights".into());
    }
    Err(Error::NotStochastic(format!("not locally stochastic at {}", problems.join(", "))))
}

fn merge<S: Scalar>(slot: &mut Edge<S>, p: S, r: Sre<S>) {
    *slot = Some(match slot.take() {
        None => (p, r),
        Some((p0, r0)) => {
            let total = p0.clone() + &p;
            (total.clone(), Sre::choice(p0 / &total, r0, r))
        }
    });
}

fn cheapest<S>(edges: &[Vec<Edge<S>>], alive: &[bool]) -> usize {
    let degree = |k: usize| {
        let ins = (0..edges.len()).filter(|&i| i != k && edges[i][k].is_some()).count();
        let outs = (0..edges.len()).filter(|&j| j != k && edges[k][j].is_some()).count();
        ins * outs
    };
    (0..alive.len())
        .filter(|&k| alive[k])
        .min_by_key(|&k| (degree(k), k))
        .expect("a live state")
}

fn eliminate<S: Scalar>(edges: &mut [Vec<Edge<S>>], k: usize) {
    let size = edges.len();
    let own = edges[k][k].take();
    let (stay, star) = match own {
        Some((s, body)) => (s.clone(), Some(Sre::star(body, s))),
        None => (S::zero(), None),
    };
    let leave = S::one() - &stay;
    let ins: Vec<(usize, S, Sre<S>)> = (0..size)
        .filter_map(|i| edges[i][k].take().map(|(p, r)| (i, p, r)))
        .collect();
    let outs: Vec<(usize, S, Sre<S>)> = (0..size)
        .filter_map(|j| edges[k][j].take().map(|(p, r)| (j, p, r)))
        .collect();
    for (i, pi, ri) in &ins {
        for (j, pj, rj) in &outs {
            let p = pi.clone() * pj / &leave;
            let mut parts = vec![ri.clone()];
            parts.extend(star.clone());
            parts.push(rj.clone());
            merge(&mut edges[*i][*j], p, Sre::concat_all(parts));
        }
    }
}
