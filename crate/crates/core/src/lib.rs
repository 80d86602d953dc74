pub mod automaton;
pub mod decompose;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod graph;
pub mod normalize;
pub mod numerics;
pub mod oracle;
pub mod random;
pub mod sampling;
pub mod sre;
pub mod tropical;

pub use automaton::WeightedAutomaton;
pub use error::{Error, Result};
pub use numerics::{Matrix, Rational, Scalar};
pub use sre::Sre;
