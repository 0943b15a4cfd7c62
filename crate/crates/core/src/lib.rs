//! Independent-cascade influence simulation on undirected networks, seed
//! selection strategies, and the experiments that map where optimization
//! pays off as a function of the contagion probability.

pub mod cascade;
pub mod error;
pub mod experiments;
pub mod generators;
pub mod graph;
pub mod influence;
pub mod io;
pub mod optimizers;
pub mod percolation;
pub mod rng;

pub use cascade::{CascadeOutcome, CascadeParams, Picture};
pub use error::{Error, ErrorKind, Result};
pub use graph::{DisjointSet, Graph, Subgraph};
pub use influence::InfluenceEstimate;
