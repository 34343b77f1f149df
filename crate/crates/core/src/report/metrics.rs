use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::connect::ConnectivityResult;
use crate::dedup::DedupResult;
use crate::ingest::InputBundle;
use crate::model::{ConceptId, HierarchyEdge};
use crate::union_find::UnionFind;

/// One row of the input/output comparison. `input` is `None` where the
/// quantity has no input-side meaning (merges).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountPair {
    pub input: Option<usize>,
    pub output: usize,
}

/// A status count and its share of all input concepts, in percent.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StatusCount {
    pub count: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StatusBreakdown {
    pub input: StatusCount,
    pub seed: StatusCount,
    pub merged_to_seed: StatusCount,
    pub merged_to_other: StatusCount,
    pub unmapped: StatusCount,
    pub connected_seed_plus_merged: StatusCount,
    pub connected_other: StatusCount,
    pub disconnected: StatusCount,
}

/// Whole milliseconds per stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Durations {
    pub ingest: u64,
    pub dedup: u64,
    pub connect: u64,
    pub report: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PipelineMetrics {
    pub concept_sources: CountPair,
    pub concepts: CountPair,
    pub concept_merges: CountPair,
    pub mappings: CountPair,
    pub connected_subgraphs: CountPair,
    pub hierarchy_edges: CountPair,
    pub status: StatusBreakdown,
    pub durations_ms: Durations,
}

/// Percentage of `count` in `total`, rounded half-up to two decimals.
pub fn ratio(count: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let (c, t) = (count as u128, total as u128);
    let hundredths = (c * 20_000 + t) / (2 * t);
    hundredths as f64 / 100.0
}

/// Number of weakly connected components of a hierarchy edge set.
pub fn connected_subgraphs(edges: &[HierarchyEdge]) -> usize {
    let mut index: HashMap<&ConceptId, usize> = HashMap::new();
    for e in edges {
        for c in [&e.child, &e.parent] {
            let next = index.len();
            index.entry(c).or_insert(next);
        }
    }
    let mut uf = UnionFind::new(index.len());
    for e in edges {
        uf.union(index[&e.child], index[&e.parent]);
    }
    uf.components()
}

pub fn compute_metrics(
    bundle: &InputBundle,
    dedup: &DedupResult,
    conn: &ConnectivityResult,
) -> PipelineMetrics {
    let config = &bundle.config;
    let sources_in: BTreeSet<&str> = bundle.nodes.ids().map(|c| c.source()).collect();
    let sources_out: BTreeSet<&str> = dedup.domain_concepts.ids().map(|c| c.source()).collect();

    let total = bundle.nodes.len();
    let seed = dedup.unmerged.iter().filter(|c| config.is_seed(c)).count();
    let merged_to_seed = dedup
        .canonical_merges
        .iter()
        .filter(|m| config.is_seed(&m.target))
        .count();
    let merged_to_other = dedup.canonical_merges.len() - merged_to_seed;
    let unmapped = dedup.unmerged.len() - seed + dedup.unresolved_obsolete.len();
    let connected_other = dedup
        .unmerged
        .iter()
        .filter(|c| !config.is_seed(c) && conn.connected.contains(*c))
        .count();
    let status = |count| StatusCount {
        count,
        ratio: ratio(count, total),
    };

    PipelineMetrics {
        concept_sources: CountPair {
            input: Some(sources_in.len()),
            output: sources_out.len(),
        },
        concepts: CountPair {
            input: Some(total),
            output: dedup.domain_concepts.len(),
        },
        concept_merges: CountPair {
            input: None,
            output: dedup.canonical_merges.len(),
        },
        mappings: CountPair {
            input: Some(bundle.mappings.len()),
            output: dedup.domain_mappings.len(),
        },
        connected_subgraphs: CountPair {
            input: Some(connected_subgraphs(&bundle.hierarchy)),
            output: connected_subgraphs(&conn.domain_hierarchy),
        },
        hierarchy_edges: CountPair {
            input: Some(bundle.hierarchy.len()),
            output: conn.domain_hierarchy.len(),
        },
        status: StatusBreakdown {
            input: status(total),
            seed: status(seed),
            merged_to_seed: status(merged_to_seed),
            merged_to_other: status(merged_to_other),
            unmapped: status(unmapped),
            connected_seed_plus_merged: status(seed + merged_to_seed),
            connected_other: status(connected_other),
            disconnected: status(unmapped - connected_other),
        },
        durations_ms: Durations::default(),
    }
}
