//! Switch Markov chains on d-regular bipartite graphs and multigraphs.
//!
//! The crate provides the graph representation, exact generators of the
//! simple-graph and multigraph switch chains, the configuration model,
//! s-neighbourhoods of multigraphs with few double edges, the perfect-pair
//! matching, connection paths between simple graphs, the randomized Gaussian
//! extension of functions from simple graphs to multigraphs, and an exact
//! spectral laboratory for small state spaces.

pub mod cli;
pub mod config;
pub mod connections;
pub mod enumerate;
pub mod error;
pub mod extension;
pub mod graph;
pub mod kernels;
pub mod matching;
pub mod neighborhoods;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use graph::{BipartiteMultigraph, Category, Params};
pub use kernels::{Chain, Rate, SwitchOp};
