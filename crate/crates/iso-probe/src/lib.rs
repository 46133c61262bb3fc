//! Probabilistic graph isomorphism testing.
//!
//! The solver decides whether two graphs are isomorphic by sampling random
//! root-to-leaf walks of their individualization-refinement search trees and
//! watching for leaf collisions, instead of computing automorphism groups or
//! canonical labelings. Walks in the same tree that collide certify
//! automorphisms, walks across trees that collide certify isomorphisms, and
//! the ratio between the two drives a one-sided Monte-Carlo verdict: an
//! `Isomorphic` answer always carries a certified witness permutation, while
//! a non-isomorphic answer is either certified by a deterministic separator
//! or probabilistic with error below a configured bound.
//!
//! The crate ships:
//!
//! - [`graph`]: graphs, permutations and DIMACS I/O,
//! - [`coloring`]: the ordered-partition vertex coloring,
//! - [`refinement`]: color refinement with trace recording, early-out
//!   comparison and blueprint skipping,
//! - [`selector`]: isomorphism-invariant target cell selection,
//! - [`walk`]: random walks of the search tree and path replay,
//! - [`leafstore`]: invariant-keyed leaf storage with full/path-only tiers,
//! - [`solver`]: the bidirectional search with its deviation pre-phase,
//! - [`oracle`]: brute-force ground truth and full tree enumeration,
//! - [`toolkit`]: benchmark pair generators,
//! - [`cli`]: the `iso-probe` command line entry point.

pub mod cli;
pub mod coloring;
mod error;
pub mod graph;
pub mod leafstore;
pub mod oracle;
pub mod refinement;
pub mod selector;
pub mod solver;
pub mod toolkit;
pub mod walk;

pub use error::Error;
pub use graph::{Graph, Permutation};
pub use solver::{random_iso, SolverConfig, Verdict};
