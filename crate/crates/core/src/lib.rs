//! Mapping-driven deduplication of ontology concepts and assembly of the
//! survivors into a single seed-anchored DAG.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`ingest`] parses `nodes.csv`, `mappings.csv`, `edges_hierarchy.csv` and
//!    a TOML configuration, then runs the validation catalogue.
//! 2. [`dedup`] renames obsolete concepts, aligns sources in priority order
//!    and collapses the resulting merges into a stable canonical set.
//! 3. [`connect`] grows the domain hierarchy from the seed ontology by
//!    attaching unmerged concepts through pruned shortest paths.
//! 4. [`report`] computes metrics and renders `index.html` and `metrics.json`.
//!
//! [`pipeline::run`] wires the stages together and writes all outputs
//! atomically.

pub mod connect;
pub mod dedup;
pub mod ingest;
pub mod model;
pub mod pipeline;
pub mod report;
pub mod synth;
pub mod table;
pub mod union_find;

pub use model::{
    AlignmentConfig, ConceptId, HierarchyEdge, Mapping, Merge, MergeSet, NodeRecord, NodeTable,
    SourceId,
};
