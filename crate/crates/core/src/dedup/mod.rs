//! Concept deduplication: obsolete renaming, priority-ordered alignment and
//! canonical merge aggregation.

mod aggregate;
mod align;
mod apply;
mod obsolete;

use std::collections::{BTreeSet, HashSet};

use crate::ingest::{Finding, Severity, ValidatedBundle};
use crate::model::{sig, ConceptId, Mapping, MappingSet, MergeSet, NodeTable, Side};

pub use aggregate::{aggregate_merges, Aggregated, SeedConflict};
pub use align::{compute_merges, AlignmentStep};
pub use apply::{apply_merges, update_mappings, ApplyMerges};
pub use obsolete::{
    compute_obsolete_merges, ObsoleteResolution, OBSOLETE_AMBIGUOUS, OBSOLETE_CYCLE,
};

pub const MULTIPLE_SEED_CURRENTS: &str = "d3-multiple-seed-currents";
pub const UNRESOLVED_OBSOLETE_MAPPINGS: &str = "d4-unresolved-obsolete-mappings";
pub const INTERNAL_EQUIVALENCES: &str = "d5-internal-current-equivalences";
pub const WITHIN_SOURCE_IGNORED: &str = "d6-within-source-mappings-ignored";

#[derive(Debug, Clone, PartialEq)]
pub struct DedupResult {
    /// Current input concepts after canonical merges.
    pub domain_concepts: NodeTable,
    /// Input concepts that are neither obsolete nor merged away. Seed
    /// concepts are included.
    pub unmerged: BTreeSet<ConceptId>,
    pub canonical_merges: MergeSet,
    pub domain_mappings: MappingSet,
    pub steps: Vec<AlignmentStep>,
    pub obsolete_merges: MergeSet,
    /// Within-source equivalences removed from the alignment stream.
    pub internal_mappings: MappingSet,
    /// Obsolete concepts that no merge resolved.
    pub unresolved_obsolete: BTreeSet<ConceptId>,
    pub findings: Vec<Finding>,
}

fn mapping_row(m: &Mapping) -> String {
    format!("{},{},{},{}", m.source, m.target, m.relation, m.provenance)
}

/// Full deduplication stage over a validated bundle.
pub fn deduplicate(input: &ValidatedBundle) -> DedupResult {
    let config = &input.config;
    let obsolete: HashSet<ConceptId> = input.nodes.obsolete().cloned().collect();
    let mut findings = Vec::new();

    let resolution = compute_obsolete_merges(&input.mappings, &obsolete, config);
    findings.extend(resolution.findings.iter().cloned());
    findings.extend(Finding::from_rows(
        INTERNAL_EQUIVALENCES,
        Severity::Warning,
        resolution
            .internal
            .iter()
            .filter(|m| !obsolete.contains(&m.source) && !obsolete.contains(&m.target))
            .map(mapping_row),
    ));

    let internal: HashSet<&Mapping> = resolution.internal.iter().collect();
    let external: Vec<Mapping> = input
        .mappings
        .iter()
        .filter(|m| !internal.contains(m))
        .cloned()
        .collect();
    let renamed = update_mappings(&external, &resolution.merges);

    // Mappings still naming an obsolete concept have no current name to
    // align through.
    let (updated, stale): (Vec<Mapping>, Vec<Mapping>) = renamed
        .into_iter()
        .partition(|m| !obsolete.contains(&m.source) && !obsolete.contains(&m.target));
    findings.extend(Finding::from_rows(
        UNRESOLVED_OBSOLETE_MAPPINGS,
        Severity::Warning,
        stale.iter().map(mapping_row),
    ));
    findings.extend(Finding::from_rows(
        WITHIN_SOURCE_IGNORED,
        Severity::Warning,
        updated
            .iter()
            .filter(|m| m.is_within_source() && config.group_of(&m.relation).is_some())
            .map(mapping_row),
    ));

    let (aligned, steps) = compute_merges(input.nodes.current(), &updated, config);
    let mut all = resolution.merges.clone();
    all.extend(aligned.iter().cloned());
    let aggregated = aggregate_merges(&all, config.sources());
    findings.extend(Finding::from_rows(
        MULTIPLE_SEED_CURRENTS,
        Severity::Warning,
        aggregated.conflicts.iter().map(|c| {
            let seeds: Vec<&str> = c.seed_members.iter().map(|s| s.as_str()).collect();
            format!("{} <- {}", c.canonical, seeds.join(" "))
        }),
    ));
    let canonical = aggregated.merges;

    let current =
        NodeTable::from_current(input.nodes.current().cloned()).expect("node table ids are unique");
    let domain_concepts = apply_merges(&current, &canonical);
    let domain_mappings = apply_merges(&updated, &canonical);

    let merged_away = sig(&canonical, Side::Source);
    let unmerged = input
        .nodes
        .current()
        .filter(|c| !merged_away.contains(*c))
        .cloned()
        .collect();
    let unresolved_obsolete = obsolete
        .into_iter()
        .filter(|c| !merged_away.contains(c))
        .collect();

    DedupResult {
        domain_concepts,
        unmerged,
        canonical_merges: canonical,
        domain_mappings,
        steps,
        obsolete_merges: resolution.merges,
        internal_mappings: resolution.internal,
        unresolved_obsolete,
        findings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_config, InputBundle};
    use crate::model::{Merge, NodeRecord};

    fn c(s: &str) -> ConceptId {
        ConceptId::parse(s).unwrap()
    }

    fn eq(a: &str, b: &str) -> Mapping {
        Mapping::new(c(a), c(b), "equivalent_to", "t")
    }

    fn bundle(nodes: &[(&str, bool)], mappings: Vec<Mapping>, sources: &str) -> ValidatedBundle {
        InputBundle {
            nodes: NodeTable::new(
                nodes
                    .iter()
                    .map(|(id, o)| NodeRecord { id: c(id), obsolete: *o })
                    .collect(),
            )
            .unwrap(),
            mappings,
            hierarchy: vec![],
            config: parse_config(&format!(
                "{sources}\n[[mapping_type_groups]]\nname = \"eqv\"\nrelations = [\"equivalent_to\"]\n"
            ))
            .unwrap(),
        }
        .validate()
        .unwrap()
    }

    #[test]
    fn no_mappings() {
        let b = bundle(
            &[("S3:001", false), ("S1:001", false)],
            vec![],
            "seed = \"S3\"\nsources = [\"S3\", \"S1\"]",
        );
        let r = deduplicate(&b);
        assert!(r.canonical_merges.is_empty());
        assert_eq!(r.domain_concepts.len(), 2);
        assert_eq!(r.unmerged.len(), 2);
    }

    #[test]
    fn three_source_chain() {
        // Hand trace: sources (S3, S2, S1), one group.
        //   S3 pass: S2:001 => S3:001.
        //   S2 pass: S1:001 => S2:001 (S1:001 unmerged).
        //   S1 pass: S2:001 is merged already; nothing.
        // Aggregation: cluster {S1:001, S2:001, S3:001} -> S3:001.
        let b = bundle(
            &[
                ("S1:001", false),
                ("S1:002", false),
                ("S2:001", false),
                ("S3:001", false),
            ],
            vec![eq("S1:001", "S2:001"), eq("S2:001", "S3:001")],
            "seed = \"S3\"\nsources = [\"S3\", \"S2\", \"S1\"]",
        );
        let r = deduplicate(&b);
        let dom: BTreeSet<_> = r.domain_concepts.ids().cloned().collect();
        assert_eq!(dom, BTreeSet::from([c("S3:001"), c("S1:002")]));
        assert_eq!(r.canonical_merges.len(), 2);
        assert_eq!(
            r.canonical_merges,
            MergeSet::new(vec![
                Merge::new(c("S1:001"), c("S3:001")),
                Merge::new(c("S2:001"), c("S3:001"))
            ])
        );
        assert_eq!(r.unmerged, BTreeSet::from([c("S1:002"), c("S3:001")]));
        assert!(r.domain_mappings.is_empty());
    }

    #[test]
    fn obsolete_renaming_feeds_alignment() {
        let b = bundle(
            &[
                ("A:old", true),
                ("A:new", false),
                ("S:1", false),
                ("A:gone", true),
            ],
            vec![eq("A:old", "A:new"), eq("A:old", "S:1")],
            "seed = \"S\"\nsources = [\"S\", \"A\"]",
        );
        let r = deduplicate(&b);
        assert_eq!(
            r.obsolete_merges,
            MergeSet::new(vec![Merge::new(c("A:old"), c("A:new"))])
        );
        assert_eq!(
            r.canonical_merges,
            MergeSet::new(vec![
                Merge::new(c("A:new"), c("S:1")),
                Merge::new(c("A:old"), c("S:1"))
            ])
        );
        assert_eq!(r.unresolved_obsolete, BTreeSet::from([c("A:gone")]));
        assert_eq!(
            r.domain_concepts.ids().cloned().collect::<Vec<_>>(),
            vec![c("S:1")]
        );
        assert!(r.findings.is_empty());
    }

    #[test]
    fn internal_current_equivalence_is_reported_not_merged() {
        let b = bundle(
            &[("A:1", false), ("A:2", false), ("S:1", false)],
            vec![eq("A:1", "A:2")],
            "seed = \"S\"\nsources = [\"S\", \"A\"]",
        );
        let r = deduplicate(&b);
        assert!(r.canonical_merges.is_empty());
        assert_eq!(r.internal_mappings.len(), 1);
        assert_eq!(r.findings[0].check_id, INTERNAL_EQUIVALENCES);
    }

    #[test]
    fn count_conservation_on_fixtures() {
        let fixtures = [
            bundle(
                &[
                    ("S1:001", false),
                    ("S1:002", false),
                    ("S2:001", false),
                    ("S3:001", false),
                ],
                vec![eq("S1:001", "S2:001"), eq("S2:001", "S3:001")],
                "seed = \"S3\"\nsources = [\"S3\", \"S2\", \"S1\"]",
            ),
            bundle(
                &[
                    ("S1:a", false),
                    ("S2:x", false),
                    ("S2:y", false),
                    ("S0:k", false),
                ],
                vec![eq("S1:a", "S2:x"), eq("S1:a", "S2:y"), eq("S2:y", "S0:k")],
                "seed = \"S0\"\nsources = [\"S0\", \"S2\", \"S1\"]",
            ),
        ];
        for b in &fixtures {
            let r = deduplicate(b);
            assert!(r.canonical_merges.is_stable());
            assert_eq!(
                b.nodes.current().count(),
                r.domain_concepts.len() + r.canonical_merges.len()
            );
        }
    }
}
