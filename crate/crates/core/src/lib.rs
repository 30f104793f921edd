//! Toolkit for restoring a social graph from a random-walk sample taken under
//! the restricted query model: crawler simulation, re-weighted estimators of
//! local structural properties, target construction and graph assembly around
//! the sampled subgraph, clustering-driven rewiring, a baseline that generates
//! from estimates alone, and a structural-property evaluation harness.

pub mod crawl;
pub mod error;
pub mod estimate;
pub mod gjoka;
pub mod graph;
pub mod metrics;
pub mod restore;

pub use error::{Error, Result};
pub use graph::Multigraph;
