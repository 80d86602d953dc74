use crate::graph::strongly_connected_components;
use crate::numerics::Scalar;

use super::WeightedAutomaton;

/// Strongly connected components of the support graph, numbered so that every
/// edge between distinct components goes from a lower to a higher index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condensation {
    pub component_of: Vec<usize>,
    pub components: Vec<Vec<usize>>,
}

impl Condensation {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// States listed component by component; permuting by this order makes
    /// the joint matrix block upper-triangular.
    pub fn order(&self) -> Vec<usize> {
        self.components.iter().flatten().copied().collect()
    }
}

impl<S: Scalar> WeightedAutomaton<S> {
    pub fn condensation(&self) -> Condensation {
        let components = strongly_connected_components(&self.support_graph());
        let mut component_of = vec![0; self.state_count()];
        for (c, states) in components.iter().enumerate() {
            for &q in states {
                component_of[q] = c;
            }
        }
        Condensation {
            component_of,
            components,
        }
    }
}
