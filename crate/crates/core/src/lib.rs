//! Generalized Ramsey numbers for small graphs.
//!
//! Colorings of `K_N` are scored by counting vertex subsets whose red graph
//! contains `G` plus subsets whose blue graph contains `H`. A zero score means
//! the coloring avoids both, so `r(G, H)` is the first order with a positive
//! minimum. The crate provides isomorph-free enumeration to find that minimum
//! exhaustively, a Tabu search for larger orders, closed-form oracles for known
//! tree values and a state-vector simulator of the adiabatic algorithm.

pub mod aqo;
pub mod canon;
pub mod catalog;
pub mod containment;
pub mod driver;
pub mod error;
pub mod exec;
pub mod graph;
pub mod isogen;
pub mod objective;
pub mod reference;
pub mod search;
pub mod tabu;
pub mod theorems;

pub use canon::{canonical_form, canonical_form_brute, is_isomorphic, CanonicalForm};
pub use error::{Error, Result};
pub use graph::{
    apply_permutation, complement_coloring, edge_index, edge_pair, num_pairs, subgraph_on, Color,
    Coloring, Permutation, SmallGraph, VertexSubset, MAX_ORDER,
};
