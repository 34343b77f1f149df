use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::ingest::{Finding, Severity};
use crate::model::{AlignmentConfig, ConceptId, Mapping, Merge, MergeSet};

pub const OBSOLETE_CYCLE: &str = "d1-obsolete-cycle";
pub const OBSOLETE_AMBIGUOUS: &str = "d2-obsolete-ambiguous-renaming";

/// Result of resolving obsolete concepts to their current names.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObsoleteResolution {
    /// Renaming merges; every target is current, so the set is stable.
    pub merges: MergeSet,
    /// Within-source mappings of the first (equivalence) group, in input order.
    pub internal: Vec<Mapping>,
    pub findings: Vec<Finding>,
}

/// Within-source equivalences are treated as undirected renaming links.
/// Obsolete concepts linked to each other form a cluster; a cluster linked
/// to exactly one current concept is renamed onto it. Clusters linked to
/// several current concepts are skipped as ambiguous, and clusters with no
/// current concept but a loop among their links are reported as cycles.
pub fn compute_obsolete_merges(
    mappings: &[Mapping],
    obsolete: &HashSet<ConceptId>,
    config: &AlignmentConfig,
) -> ObsoleteResolution {
    let equivalence = &config.groups()[0].relations;
    let internal: Vec<Mapping> = mappings
        .iter()
        .filter(|m| m.is_within_source() && equivalence.contains(&m.relation))
        .cloned()
        .collect();

    // Undirected links touching at least one obsolete concept.
    let mut obsolete_links: BTreeMap<&ConceptId, BTreeSet<&ConceptId>> = BTreeMap::new();
    let mut current_links: BTreeMap<&ConceptId, BTreeSet<&ConceptId>> = BTreeMap::new();
    for m in &internal {
        match (obsolete.contains(&m.source), obsolete.contains(&m.target)) {
            (true, true) => {
                obsolete_links
                    .entry(&m.source)
                    .or_default()
                    .insert(&m.target);
                obsolete_links
                    .entry(&m.target)
                    .or_default()
                    .insert(&m.source);
            }
            (true, false) => {
                current_links
                    .entry(&m.source)
                    .or_default()
                    .insert(&m.target);
            }
            (false, true) => {
                current_links
                    .entry(&m.target)
                    .or_default()
                    .insert(&m.source);
            }
            (false, false) => {}
        }
    }

    let involved: BTreeSet<&ConceptId> = obsolete_links
        .keys()
        .chain(current_links.keys())
        .copied()
        .collect();

    let mut visited: HashSet<&ConceptId> = HashSet::new();
    let mut merges = Vec::new();
    let mut cycles = Vec::new();
    let mut ambiguous = Vec::new();
    for &start in &involved {
        if visited.contains(start) {
            continue;
        }
        let mut cluster = BTreeSet::new();
        let mut stack = vec![start];
        visited.insert(start);
        while let Some(v) = stack.pop() {
            cluster.insert(v);
            for &n in obsolete_links.get(v).into_iter().flatten() {
                if visited.insert(n) {
                    stack.push(n);
                }
            }
        }
        let targets: BTreeSet<&ConceptId> = cluster
            .iter()
            .flat_map(|c| current_links.get(c).into_iter().flatten())
            .copied()
            .collect();
        let render = || {
            cluster
                .iter()
                .map(|c| c.as_str())
                .collect::<Vec<_>>()
                .join(" ")
        };
        match targets.len() {
            1 => {
                let target = targets.into_iter().next().unwrap();
                merges.extend(
                    cluster
                        .iter()
                        .map(|&c| Merge::new(c.clone(), target.clone())),
                );
            }
            0 => {
                // Each unordered link is stored twice in the adjacency map.
                let links: usize = cluster
                    .iter()
                    .map(|c| obsolete_links.get(c).map_or(0, BTreeSet::len))
                    .sum::<usize>()
                    / 2;
                if links >= cluster.len() {
                    cycles.push(render());
                }
            }
            _ => {
                let names: Vec<&str> = targets.iter().map(|c| c.as_str()).collect();
                ambiguous.push(format!("{} -> {}", render(), names.join(" | ")));
            }
        }
    }

    let findings = [
        Finding::from_rows(OBSOLETE_CYCLE, Severity::Warning, cycles),
        Finding::from_rows(OBSOLETE_AMBIGUOUS, Severity::Warning, ambiguous),
    ];
    ObsoleteResolution {
        merges: MergeSet::new(merges).canonicalized(),
        internal,
        findings: findings.into_iter().flatten().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_config;

    fn c(s: &str) -> ConceptId {
        ConceptId::parse(s).unwrap()
    }

    fn eq(a: &str, b: &str) -> Mapping {
        Mapping::new(c(a), c(b), "equivalent_to", "t")
    }

    fn config() -> AlignmentConfig {
        parse_config(
            r#"
seed = "S"
sources = ["S", "A", "B"]
[[mapping_type_groups]]
name = "eqv"
relations = ["equivalent_to"]
[[mapping_type_groups]]
name = "xref"
relations = ["xref"]
"#,
        )
        .unwrap()
    }

    fn obs(ids: &[&str]) -> HashSet<ConceptId> {
        ids.iter().map(|s| c(s)).collect()
    }

    fn pairs(x: &MergeSet) -> Vec<(String, String)> {
        x.iter()
            .map(|m| (m.source.to_string(), m.target.to_string()))
            .collect()
    }

    #[test]
    fn direct_renaming() {
        let r = compute_obsolete_merges(&[eq("A:old", "A:new")], &obs(&["A:old"]), &config());
        assert_eq!(pairs(&r.merges), [("A:old".into(), "A:new".into())]);
        assert!(r.merges.is_stable());
    }

    #[test]
    fn renaming_in_reverse_orientation() {
        let r = compute_obsolete_merges(&[eq("A:new", "A:old")], &obs(&["A:old"]), &config());
        assert_eq!(pairs(&r.merges), [("A:old".into(), "A:new".into())]);
    }

    #[test]
    fn chain_collapses_to_current_target() {
        let m = [eq("A:1", "A:2"), eq("A:2", "A:3")];
        // Oracle: transitive closure of the link relation, projected to
        // current concepts.
        let ob = obs(&["A:1", "A:2"]);
        let mut closure: BTreeSet<(String, String)> = BTreeSet::new();
        for x in &m {
            closure.insert((x.source.to_string(), x.target.to_string()));
            closure.insert((x.target.to_string(), x.source.to_string()));
        }
        loop {
            let extra: Vec<_> = closure
                .iter()
                .flat_map(|(a, b)| {
                    closure
                        .iter()
                        .filter(move |(b2, _)| b2 == b)
                        .map(move |(_, d)| (a.clone(), d.clone()))
                })
                .filter(|(a, d)| a != d && !closure.contains(&(a.clone(), d.clone())))
                .collect();
            if extra.is_empty() {
                break;
            }
            closure.extend(extra);
        }
        let expected: Vec<(String, String)> = closure
            .into_iter()
            .filter(|(a, d)| ob.contains(&c(a)) && !ob.contains(&c(d)))
            .collect();

        let r = compute_obsolete_merges(&m, &ob, &config());
        assert_eq!(pairs(&r.merges), expected);
        assert_eq!(expected.len(), 2);
    }

    #[test]
    fn no_obsolete_concepts() {
        let m = [
            eq("A:1", "A:2"),
            eq("A:1", "B:1"),
            Mapping::new(c("A:3"), c("A:4"), "xref", "t"),
        ];
        let r = compute_obsolete_merges(&m, &HashSet::new(), &config());
        assert!(r.merges.is_empty());
        assert_eq!(r.internal, vec![eq("A:1", "A:2")]);
    }

    #[test]
    fn obsolete_cycle_is_reported_and_skipped() {
        let m = [eq("A:1", "A:2"), eq("A:2", "A:3"), eq("A:3", "A:1")];
        let r = compute_obsolete_merges(&m, &obs(&["A:1", "A:2", "A:3"]), &config());
        assert!(r.merges.is_empty());
        assert_eq!(r.findings[0].check_id, OBSOLETE_CYCLE);
    }

    #[test]
    fn obsolete_chain_without_exit_is_silent() {
        let r = compute_obsolete_merges(&[eq("A:1", "A:2")], &obs(&["A:1", "A:2"]), &config());
        assert!(r.merges.is_empty());
        assert!(r.findings.is_empty());
    }

    #[test]
    fn ambiguous_renaming_is_skipped() {
        let m = [eq("A:old", "A:x"), eq("A:old", "A:y")];
        let r = compute_obsolete_merges(&m, &obs(&["A:old"]), &config());
        assert!(r.merges.is_empty());
        assert_eq!(r.findings[0].check_id, OBSOLETE_AMBIGUOUS);
    }
}
