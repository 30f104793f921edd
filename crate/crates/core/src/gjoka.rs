//! Reproducible 2.5K baseline: generate a graph from the walk's estimates
//! alone, ignoring the sampled subgraph's structure.
//!
//! This is the restoration pipeline with the subgraph-aware steps switched
//! off: no degree-vector or JDM modification, construction from an empty
//! graph, and every generated edge is a rewiring candidate. Sharing the
//! machinery keeps the comparison against the subgraph-preserving method an
//! exact ablation.

use crate::crawl::SamplingList;
use crate::error::Result;
use crate::restore::{restore_with_options, PipelineOptions, RestoreConfig, RestoreOutcome};

pub fn gjoka_generate(list: &SamplingList, cfg: &RestoreConfig) -> Result<RestoreOutcome> {
    restore_with_options(list, cfg, PipelineOptions::baseline_from_estimates_only())
}
