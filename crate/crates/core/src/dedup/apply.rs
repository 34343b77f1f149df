use std::collections::{BTreeSet, HashSet};

use crate::model::{HierarchyEdge, Mapping, MergeSet, NodeRecord, NodeTable};

/// Rewrites a table through a merge set: every merge source is replaced by
/// its target. The merge set is expected to be stable, so one substitution
/// step suffices.
pub trait ApplyMerges: Sized {
    fn apply_merges(&self, merges: &MergeSet) -> Self;
}

pub fn apply_merges<T: ApplyMerges>(table: &T, merges: &MergeSet) -> T {
    table.apply_merges(merges)
}

/// Endpoint rewrite for mappings; resulting self-mappings are dropped and
/// duplicate rows collapsed (first occurrence kept).
pub fn update_mappings(mappings: &[Mapping], merges: &MergeSet) -> Vec<Mapping> {
    mappings.to_vec().apply_merges(merges)
}

impl ApplyMerges for NodeTable {
    /// Merged ids are removed. A merge target missing from the table is
    /// appended as a current concept, in id order.
    fn apply_merges(&self, merges: &MergeSet) -> Self {
        if merges.is_empty() {
            return self.clone();
        }
        let sources: HashSet<_> = merges.iter().map(|m| &m.source).collect();
        let mut records: Vec<NodeRecord> = self
            .records()
            .iter()
            .filter(|r| !sources.contains(&r.id))
            .cloned()
            .collect();
        let present: HashSet<_> = records.iter().map(|r| r.id.clone()).collect();
        let missing: BTreeSet<_> = merges
            .iter()
            .map(|m| &m.target)
            .filter(|t| !present.contains(*t) && !sources.contains(t))
            .collect();
        records.extend(missing.into_iter().map(|id| NodeRecord {
            id: id.clone(),
            obsolete: false,
        }));
        NodeTable::new(records).expect("ids unique after substitution")
    }
}

impl ApplyMerges for Vec<Mapping> {
    fn apply_merges(&self, merges: &MergeSet) -> Self {
        let subst = merges.substitution();
        let mut seen = HashSet::with_capacity(self.len());
        let mut out = Vec::with_capacity(self.len());
        for m in self {
            let source = subst.get(&m.source).copied().unwrap_or(&m.source);
            let target = subst.get(&m.target).copied().unwrap_or(&m.target);
            if source == target {
                continue;
            }
            let rewritten = Mapping {
                source: source.clone(),
                target: target.clone(),
                relation: m.relation.clone(),
                provenance: m.provenance.clone(),
            };
            if seen.insert(rewritten.clone()) {
                out.push(rewritten);
            }
        }
        out
    }
}

impl ApplyMerges for Vec<HierarchyEdge> {
    fn apply_merges(&self, merges: &MergeSet) -> Self {
        let subst = merges.substitution();
        let mut seen = HashSet::with_capacity(self.len());
        let mut out = Vec::with_capacity(self.len());
        for e in self {
            let child = subst.get(&e.child).copied().unwrap_or(&e.child);
            let parent = subst.get(&e.parent).copied().unwrap_or(&e.parent);
            if child == parent {
                continue;
            }
            let rewritten = HierarchyEdge::new(child.clone(), parent.clone());
            if seen.insert(rewritten.clone()) {
                out.push(rewritten);
            }
        }
        out
    }
}
