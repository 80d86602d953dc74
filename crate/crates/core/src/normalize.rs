//! Finite-mass normal form.
//!
//! With `d = (I - M)^{-1} μ` the vector of future masses, conjugating every
//! transition matrix by `D = diag(d)` turns an automaton of finite mass `Z`
//! into a probabilistic automaton `P` with `f(w) = Z · P(w)`.

use crate::automaton::WeightedAutomaton;
use crate::error::{Error, Result};
use crate::numerics::{dot, neumann_inverse, Matrix, Scalar, Vector};

#[derive(Clone, Debug, PartialEq)]
pub struct NormalizationResult<S> {
    /// Total mass of the input.
    pub mass: S,
    /// Locally stochastic automaton over the trimmed state space.
    pub pa: WeightedAutomaton<S>,
    /// Future mass of each kept state.
    pub future_mass: Vector<S>,
    /// Original index of each state of `pa`.
    pub kept: Vec<usize>,
}

/// Solve `(I - M) d = μ` one strongly connected component at a time, sinks
/// first. Each diagonal block is inverted with the Neumann certificate, so a
/// block with spectral radius at least 1 reports [`Error::MassDiverges`].
pub fn future_mass<S: Scalar>(a: &WeightedAutomaton<S>) -> Result<Vector<S>> {
    let n = a.state_count();
    if n == 0 {
        return Err(Error::EmptyAutomaton);
    }
    let joint = a.joint_matrix();
    let condensation = a.condensation();
    let mut d: Vector<S> = vec![S::zero(); n];
    for block in condensation.components.iter().rev() {
        let rhs: Vector<S> = block
            .iter()
            .map(|&i| {
                (0..n)
                    .filter(|j| condensation.component_of[*j] != condensation.component_of[i])
                    .fold(a.final_weights()[i].clone(), |acc, j| {
                        let m = joint.get(i, j);
                        if m.is_zero() || d[j].is_zero() {
                            acc
                        } else {
                            acc + &(m.clone() * &d[j])
                        }
                    })
            })
            .collect();
        let inv = neumann_inverse(&joint.submatrix(block, block))?;
        for (&i, v) in block.iter().zip(inv.mul_vec(&rhs)) {
            d[i] = v;
        }
    }
    Ok(d)
}

/// Trim, compute future masses, and conjugate.
///
/// The result satisfies `mass · pa(w) = a(w)` for every word and every state
/// of `pa` has outgoing weight plus final weight exactly 1.
pub fn normalize<S: Scalar>(a: &WeightedAutomaton<S>) -> Result<NormalizationResult<S>> {
    let trimmed = match a.trim() {
        Ok(t) => t,
        Err(Error::EmptyAutomaton) => return Err(Error::ZeroMass),
        Err(e) => return Err(e),
    };
    let b = &trimmed.automaton;
    let d = future_mass(b)?;
    let mass = dot(b.initial(), &d);
    if !mass.is_positive() || d.iter().any(|v| !v.is_positive()) {
        return Err(Error::ZeroMass);
    }
    let n = b.state_count();
    let initial = (0..n)
        .map(|q| b.initial()[q].clone() * &d[q] / &mass)
        .collect();
    let final_weights = (0..n).map(|q| b.final_weights()[q].clone() / &d[q]).collect();
    let transitions = b
        .transitions()
        .iter()
        .map(|m| {
            let mut out = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let v = m.get(i, j);
                    if !v.is_zero() {
                        out.set(i, j, v.clone() * &d[j] / &d[i]);
                    }
                }
            }
            out
        })
        .collect();
    let pa = WeightedAutomaton::new(b.alphabet().to_vec(), initial, transitions, final_weights)?;
    Ok(NormalizationResult {
        mass,
        pa,
        future_mass: d,
        kept: trimmed.kept,
    })
}
