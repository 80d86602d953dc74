use crate::numerics::Scalar;

use super::WeightedAutomaton;

/// Outcome of the local-stochasticity check.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticityReport<S> {
    pub initial_sum: S,
    pub initial_ok: bool,
    pub rows: Vec<RowResidual<S>>,
}

/// Final weight plus outgoing weight of one state, and its distance from 1.
#[derive(Clone, Debug, PartialEq)]
pub struct RowResidual<S> {
    pub state: usize,
    pub total: S,
    pub residual: S,
    pub ok: bool,
}

impl<S> StochasticityReport<S> {
    pub fn passed(&self) -> bool {
        self.initial_ok && self.rows.iter().all(|r| r.ok)
    }

    pub fn failing_states(&self) -> Vec<usize> {
        self.rows.iter().filter(|r| !r.ok).map(|r| r.state).collect()
    }
}

impl<S: Scalar> WeightedAutomaton<S> {
    /// Check that `λ` sums to 1 and that `μ(q) + Σ_a Σ_q' M_a(q, q') = 1` for
    /// every state. Exact for rationals, within the float tolerance otherwise.
    pub fn check_local_stochasticity(&self) -> StochasticityReport<S> {
        let one = S::one();
        let initial_sum = self.initial.iter().fold(S::zero(), |acc, v| acc + v);
        let joint = self.joint_matrix();
        let rows = (0..self.state_count())
            .map(|q| {
                let total = joint.row_sum(q) + &self.final_weights[q];
                RowResidual {
                    state: q,
                    ok: total.approx_eq(&one),
                    residual: total.clone() - &one,
                    total,
                }
            })
            .collect();
        StochasticityReport {
            initial_ok: initial_sum.approx_eq(&one),
            initial_sum,
            rows,
        }
    }

    pub fn is_probabilistic(&self) -> bool {
        self.check_local_stochasticity().passed()
    }
}
