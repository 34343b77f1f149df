use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::model::{AlignmentConfig, ConceptId, Mapping, Merge, MergeSet};

/// Counters for one (group, source) pass of the alignment loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentStep {
    pub step_index: usize,
    pub group_name: String,
    pub source: String,
    pub mappings_considered: usize,
    pub merges_produced: usize,
    pub dropped_multi_target: usize,
}

/// Aligns unmerged concepts onto higher-priority sources.
///
/// Outer loop over mapping-type groups, inner loop over sources in priority
/// order. In each pass, mappings of the group with exactly one endpoint in
/// the current source are oriented towards that endpoint; the other endpoint
/// must still be unmerged. Concepts pointing at a single distinct target are
/// merged and leave the pool; concepts pointing at several targets are held
/// back for later passes. Seed concepts never enter the pool.
///
/// Within-source mappings are ignored here. The returned set may contain
/// chains across passes; aggregation makes it stable.
pub fn compute_merges<'a, I>(
    current: I,
    mappings: &[Mapping],
    config: &AlignmentConfig,
) -> (MergeSet, Vec<AlignmentStep>)
where
    I: IntoIterator<Item = &'a ConceptId>,
{
    let mut pool: HashSet<ConceptId> = current
        .into_iter()
        .filter(|c| !config.is_seed(c))
        .cloned()
        .collect();

    let groups = config.groups().len();
    let sources = config.sources().len();
    // (other endpoint, endpoint in the pass's source), de-duplicated and sorted.
    let mut buckets: Vec<BTreeSet<(&ConceptId, &ConceptId)>> =
        vec![BTreeSet::new(); groups * sources];
    for m in mappings {
        if m.is_within_source() {
            continue;
        }
        let Some(g) = config.group_of(&m.relation) else {
            continue;
        };
        if let Some(s) = config.priority(m.target.source()) {
            buckets[g * sources + s].insert((&m.source, &m.target));
        }
        if let Some(s) = config.priority(m.source.source()) {
            buckets[g * sources + s].insert((&m.target, &m.source));
        }
    }

    let mut merges = MergeSet::default();
    let mut steps = Vec::with_capacity(groups * sources);
    for (g, group) in config.groups().iter().enumerate() {
        for (s, source) in config.sources().iter().enumerate() {
            let mut targets: BTreeMap<&ConceptId, BTreeSet<&ConceptId>> = BTreeMap::new();
            let mut considered = 0;
            for &(other, target) in &buckets[g * sources + s] {
                if pool.contains(other) {
                    considered += 1;
                    targets.entry(other).or_default().insert(target);
                }
            }
            let mut produced = 0;
            let mut dropped = 0;
            for (other, ts) in targets {
                if ts.len() == 1 {
                    let target = ts.into_iter().next().unwrap();
                    pool.remove(other);
                    merges.push(Merge::new(other.clone(), target.clone()));
                    produced += 1;
                } else {
                    dropped += 1;
                }
            }
            steps.push(AlignmentStep {
                step_index: steps.len(),
                group_name: group.name.clone(),
                source: source.to_string(),
                mappings_considered: considered,
                merges_produced: produced,
                dropped_multi_target: dropped,
            });
        }
    }
    (merges, steps)
}
