//! Quasi-static feedback linearization of configuration flat mechanical
//! systems with one input fewer than degrees of freedom.
//!
//! The guide in `book/` walks through each module; its snippets are compiled
//! as doctests of this crate.

pub mod feedback;
pub mod flatmodel;
pub mod linalg;
pub mod multijet;
pub mod simulate;
pub mod structure;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/jets.md")]
    mod jets {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/structure.md")]
    mod structure {}
    #[doc = include_str!("../../../book/src/feedback.md")]
    mod feedback {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
