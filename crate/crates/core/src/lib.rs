//! Neighbor-joining with certificates.
//!
//! The crate builds trees from dissimilarity maps with neighbor-joining
//! ([`nj::nj`]) or its quadratic-time variant ([`nj::fnj`]), and checks a map
//! against a reference tree for the conditions under which those algorithms
//! are known to recover the tree ([`diagnostics`]). [`simlab`] runs the
//! sequence-simulation sweep and [`counterexamples`] holds fixed inputs that
//! separate the conditions from one another.
//!
//! ```
//! use njcert::{counterexamples::example_eight_leaf, nj::neighbor_joining};
//!
//! let ex = example_eight_leaf();
//! let (_, trace) = neighbor_joining(&ex.distorted)?;
//! assert_eq!(trace.steps[0].pair, ("x".to_string(), "y".to_string()));
//! # Ok::<(), njcert::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod counterexamples;
pub mod diagnostics;
pub mod dissim;
mod error;
pub mod nj;
pub mod simlab;
pub mod tree;

/// Compiles the guide's snippets as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/trees-and-maps.md")]
    pub struct TreesAndMaps;
    #[doc = include_str!("../../../book/src/neighbor-joining.md")]
    pub struct NeighborJoining;
    #[doc = include_str!("../../../book/src/criteria.md")]
    pub struct Criteria;
    #[doc = include_str!("../../../book/src/conditions.md")]
    pub struct Conditions;
    #[doc = include_str!("../../../book/src/counterexamples.md")]
    pub struct Counterexamples;
    #[doc = include_str!("../../../book/src/simulation.md")]
    pub struct Simulation;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}

pub use dissim::DissimilarityMap;
pub use error::{Error, NewickError, PhylipError, Result};
pub use tree::PhyloTree;
