//! Every chapter of the guide in `book/src` is a module here, so
//! `cargo test --doc` runs its snippets against the current library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/automata.md")]
pub mod automata {}
#[doc = include_str!("../../../book/src/normalisation.md")]
pub mod normalisation {}
#[doc = include_str!("../../../book/src/expressions.md")]
pub mod expressions {}
#[doc = include_str!("../../../book/src/growth.md")]
pub mod growth {}
#[doc = include_str!("../../../book/src/tropical.md")]
pub mod tropical {}
#[doc = include_str!("../../../book/src/sampling.md")]
pub mod sampling {}
#[doc = include_str!("../../../book/src/equivalence.md")]
pub mod equivalence {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
