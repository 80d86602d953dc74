//! A six-state running example used throughout the tests and the guide.
//!
//! States `q0 .. q5`; `q0` is initial, `q4` final. Total mass 28; `q0` sends
//! out weight 4, so the automaton is not locally stochastic.

use crate::automaton::WeightedAutomaton;
use crate::numerics::Rational;
use crate::Scalar;

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

pub fn running_example() -> WeightedAutomaton<Rational> {
    WeightedAutomaton::builder(6, ["a", "b"])
        .initial(0, q(1, 1))
        .final_weight(4, q(1, 1))
        .transition(0, "a", 1, q(2, 5))
        .transition(0, "a", 2, q(3, 5))
        .transition(0, "a", 3, q(2, 1))
        .transition(0, "a", 5, q(1, 1))
        .transition(1, "b", 2, q(2, 5))
        .transition(2, "a", 1, q(2, 5))
        .transition(2, "a", 2, q(3, 5))
        .transition(2, "a", 3, q(2, 1))
        .transition(3, "b", 4, q(3, 1))
        .transition(5, "b", 5, q(1, 3))
        .transition(5, "a", 4, q(2, 1))
        .build()
        .expect("well-formed")
}

/// The probabilistic automaton obtained by normalising [`running_example`],
/// entered by hand.
pub fn running_example_normal_form() -> WeightedAutomaton<Rational> {
    WeightedAutomaton::builder(6, ["a", "b"])
        .initial(0, q(1, 1))
        .final_weight(4, q(1, 1))
        .transition(0, "a", 1, q(4, 28))
        .transition(0, "a", 2, q(15, 28))
        .transition(0, "a", 3, q(6, 28))
        .transition(0, "a", 5, q(3, 28))
        .transition(1, "b", 2, q(1, 1))
        .transition(2, "a", 1, q(4, 25))
        .transition(2, "a", 2, q(3, 5))
        .transition(2, "a", 3, q(6, 25))
        .transition(3, "b", 4, q(1, 1))
        .transition(5, "b", 5, q(1, 3))
        .transition(5, "a", 4, q(2, 3))
        .build()
        .expect("well-formed")
}

/// A stochastic regular expression for the same distribution as
/// [`running_example_normal_form`].
pub const RUNNING_EXAMPLE_SRE: &str =
    "19/28:((4/19:ab + 15/19:a)(4/19:ab + 15/19:a)*[19/25])ab + 6/28:ab + 3/28:a(b)*[1/3]a";
