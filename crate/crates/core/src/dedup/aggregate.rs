use std::collections::{BTreeSet, HashMap, HashSet};

use crate::model::{ConceptId, Merge, MergeSet, SourceId};
use crate::union_find::UnionFind;

/// A merge cluster holding more than one current seed concept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedConflict {
    pub members: Vec<ConceptId>,
    pub seed_members: Vec<ConceptId>,
    pub canonical: ConceptId,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Aggregated {
    pub merges: MergeSet,
    pub conflicts: Vec<SeedConflict>,
}

/// Collapses a merge set into its canonical, stable form.
///
/// Clusters are the weakly connected components of the merge graph. The
/// canonical member of a cluster is the one from the highest-priority
/// source; within that source, members that were renamed inside their own
/// ontology (sources of a same-namespace merge) lose to the others, and the
/// lexicographically smallest id breaks remaining ties. Every other member is
/// merged onto the canonical one.
///
/// A cluster with two or more current seed concepts is reported as a
/// [`SeedConflict`]: its non-seed members are merged onto the smallest
/// current seed member and the other seed members are left alone.
pub fn aggregate_merges(merges: &MergeSet, sources: &[SourceId]) -> Aggregated {
    let mut index: HashMap<&ConceptId, usize> = HashMap::new();
    let mut nodes: Vec<&ConceptId> = Vec::new();
    for m in merges {
        for c in [&m.source, &m.target] {
            if !index.contains_key(c) {
                index.insert(c, nodes.len());
                nodes.push(c);
            }
        }
    }
    let mut uf = UnionFind::new(nodes.len());
    for m in merges {
        uf.union(index[&m.source], index[&m.target]);
    }
    let renamed: HashSet<&ConceptId> = merges
        .iter()
        .filter(|m| m.source.source() == m.target.source())
        .map(|m| &m.source)
        .collect();
    let priority = |c: &ConceptId| {
        sources
            .iter()
            .position(|s| s.as_str() == c.source())
            .unwrap_or(usize::MAX)
    };
    let seed = sources.first();

    let mut out = Vec::new();
    let mut conflicts = Vec::new();
    for group in uf.groups() {
        let members: BTreeSet<&ConceptId> = group.iter().map(|&i| nodes[i]).collect();
        let current_seeds: Vec<&ConceptId> = members
            .iter()
            .copied()
            .filter(|c| seed.is_some_and(|s| c.belongs_to(s)) && !renamed.contains(c))
            .collect();
        if current_seeds.len() >= 2 {
            let canonical = current_seeds[0];
            out.extend(
                members
                    .iter()
                    .filter(|c| !current_seeds.contains(c))
                    .map(|&c| Merge::new(c.clone(), canonical.clone())),
            );
            conflicts.push(SeedConflict {
                members: members.iter().map(|&c| c.clone()).collect(),
                seed_members: current_seeds.iter().map(|&c| c.clone()).collect(),
                canonical: canonical.clone(),
            });
            continue;
        }
        let canonical = *members
            .iter()
            .min_by_key(|c| (priority(c), renamed.contains(*c), **c))
            .expect("clusters are non-empty");
        out.extend(
            members
                .iter()
                .filter(|&&c| c != canonical)
                .map(|&c| Merge::new(c.clone(), canonical.clone())),
        );
    }
    Aggregated {
        merges: MergeSet::new(out).canonicalized(),
        conflicts,
    }
}
