use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::connect::verify_dag;
use crate::model::{ConceptId, HierarchyEdge};

use super::parse::render_mapping;
use super::{Finding, InputBundle, Severity, ValidationReport};

pub const DANGLING: &str = "v1-dangling-endpoints";
pub const UNKNOWN_SOURCE: &str = "v2-unknown-sources";
pub const UNUSABLE_RELATION: &str = "v3-unusable-relations";
pub const CYCLIC_HIERARCHY: &str = "v4-cyclic-source-hierarchy";
pub const ROOTLESS_HIERARCHY: &str = "v5-rootless-source-hierarchy";
pub const OBSOLETE_EDGE: &str = "v6-obsolete-hierarchy-edges";

fn edge_row(e: &HierarchyEdge) -> String {
    format!("{},{}", e.child, e.parent)
}

/// Runs the fixed check catalogue v1..v6. Content problems never fail the
/// call; they are reported as findings.
pub fn validate_inputs(bundle: &InputBundle) -> ValidationReport {
    let known = bundle.nodes.id_set();
    let obsolete: HashSet<&ConceptId> = bundle.nodes.obsolete().collect();
    let mut report = ValidationReport::default();

    // v1
    let dangling = bundle
        .mappings
        .iter()
        .filter(|m| !known.contains(&m.source) || !known.contains(&m.target))
        .map(render_mapping)
        .chain(
            bundle
                .hierarchy
                .iter()
                .filter(|e| !known.contains(&e.child) || !known.contains(&e.parent))
                .map(edge_row),
        );
    report.extend(Finding::from_rows(DANGLING, Severity::Warning, dangling));

    // v2
    let mut prefixes: BTreeSet<&str> = bundle.nodes.ids().map(|c| c.source()).collect();
    for m in &bundle.mappings {
        prefixes.insert(m.source.source());
        prefixes.insert(m.target.source());
    }
    for e in &bundle.hierarchy {
        prefixes.insert(e.child.source());
        prefixes.insert(e.parent.source());
    }
    let unknown = prefixes
        .into_iter()
        .filter(|p| bundle.config.priority(p).is_none())
        .map(str::to_owned);
    report.extend(Finding::from_rows(UNKNOWN_SOURCE, Severity::Error, unknown));

    // v3
    let unusable = bundle
        .mappings
        .iter()
        .filter(|m| bundle.config.group_of(&m.relation).is_none())
        .map(render_mapping);
    report.extend(Finding::from_rows(
        UNUSABLE_RELATION,
        Severity::Warning,
        unusable,
    ));

    // v4 / v5, on each source's subgraph (edges whose child is in the source)
    let mut per_source: BTreeMap<&str, Vec<HierarchyEdge>> = BTreeMap::new();
    for e in &bundle.hierarchy {
        per_source
            .entry(e.child.source())
            .or_default()
            .push(e.clone());
    }
    let mut cyclic = Vec::new();
    let mut rootless = Vec::new();
    for (source, edges) in &per_source {
        if let Err(cycle) = verify_dag(edges) {
            let witness: Vec<&str> = cycle.iter().map(|c| c.as_str()).collect();
            cyclic.push(format!("{source}: {}", witness.join(" -> ")));
        }
        let children: HashSet<&ConceptId> = edges.iter().map(|e| &e.child).collect();
        let has_root = edges.iter().any(|e| !children.contains(&e.parent));
        if !has_root {
            rootless.push(source.to_string());
        }
    }
    report.extend(Finding::from_rows(
        CYCLIC_HIERARCHY,
        Severity::Error,
        cyclic,
    ));
    report.extend(Finding::from_rows(
        ROOTLESS_HIERARCHY,
        Severity::Error,
        rootless,
    ));

    // v6
    let touching = bundle
        .hierarchy
        .iter()
        .filter(|e| obsolete.contains(&e.child) || obsolete.contains(&e.parent))
        .map(edge_row);
    report.extend(Finding::from_rows(
        OBSOLETE_EDGE,
        Severity::Warning,
        touching,
    ));

    report
}

/// Drops rows with endpoints missing from the node table and hierarchy
/// edges that touch obsolete concepts.
pub(super) fn sanitize(mut bundle: InputBundle) -> InputBundle {
    let (mappings, hierarchy) = {
        let known = bundle.nodes.id_set();
        let obsolete: HashSet<&ConceptId> = bundle.nodes.obsolete().collect();
        let mappings: Vec<_> = bundle
            .mappings
            .iter()
            .filter(|m| known.contains(&m.source) && known.contains(&m.target))
            .cloned()
            .collect();
        let hierarchy: Vec<_> = bundle
            .hierarchy
            .iter()
            .filter(|e| known.contains(&e.child) && known.contains(&e.parent))
            .filter(|e| !obsolete.contains(&e.child) && !obsolete.contains(&e.parent))
            .cloned()
            .collect();
        (mappings, hierarchy)
    };
    bundle.mappings = mappings;
    bundle.hierarchy = hierarchy;
    bundle
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::parse_config;
    use crate::model::{Mapping, NodeRecord, NodeTable};

    fn c(s: &str) -> ConceptId {
        ConceptId::parse(s).unwrap()
    }

    fn config() -> crate::model::AlignmentConfig {
        parse_config(
            r#"
seed = "A"
sources = ["A", "B"]
[[mapping_type_groups]]
name = "eqv"
relations = ["equivalent_to"]
"#,
        )
        .unwrap()
    }

    fn nodes(ids: &[(&str, bool)]) -> NodeTable {
        NodeTable::new(
            ids.iter()
                .map(|(id, obsolete)| NodeRecord {
                    id: c(id),
                    obsolete: *obsolete,
                })
                .collect(),
        )
        .unwrap()
    }

    fn clean() -> InputBundle {
        InputBundle {
            nodes: nodes(&[
                ("A:1", false),
                ("A:2", false),
                ("B:1", false),
                ("B:2", false),
            ]),
            mappings: vec![Mapping::new(c("B:1"), c("A:1"), "equivalent_to", "t")],
            hierarchy: vec![
                HierarchyEdge::new(c("A:2"), c("A:1")),
                HierarchyEdge::new(c("B:2"), c("B:1")),
            ],
            config: config(),
        }
    }

    #[test]
    fn clean_bundle_has_empty_report() {
        // Independent per-check scans over the same fixture.
        let b = clean();
        let ids: HashSet<_> = b.nodes.ids().cloned().collect();
        assert!(b
            .mappings
            .iter()
            .all(|m| ids.contains(&m.source) && ids.contains(&m.target)));
        assert!(b
            .hierarchy
            .iter()
            .all(|e| ids.contains(&e.child) && ids.contains(&e.parent)));
        assert!(ids.iter().all(|i| ["A", "B"].contains(&i.source())));
        assert!(b
            .mappings
            .iter()
            .all(|m| m.relation.as_str() == "equivalent_to"));

        assert!(validate_inputs(&b).is_empty());
    }

    #[test]
    fn dangling_endpoint_warns() {
        let mut b = clean();
        b.nodes = nodes(&[
            ("A:1", false),
            ("A:2", false),
            ("B:1", false),
            ("B:2", false),
            ("X:1", false),
        ]);
        b.config = parse_config(
            r#"
seed = "A"
sources = ["A", "B", "X"]
[[mapping_type_groups]]
name = "eqv"
relations = ["equivalent_to"]
"#,
        )
        .unwrap();
        b.mappings
            .push(Mapping::new(c("B:2"), c("X:9"), "equivalent_to", "t"));
        let r = validate_inputs(&b);
        let f = r.get(DANGLING).unwrap();
        assert_eq!((f.severity, f.count), (Severity::Warning, 1));
        assert!(!r.has_errors());

        let v = b.validate().unwrap();
        assert_eq!(v.mappings.len(), 1);
    }

    #[test]
    fn unknown_source_is_error() {
        let mut b = clean();
        b.nodes = nodes(&[
            ("A:1", false),
            ("A:2", false),
            ("B:1", false),
            ("B:2", false),
            ("Z:1", false),
        ]);
        let r = validate_inputs(&b);
        assert_eq!(
            r.get(UNKNOWN_SOURCE).unwrap().sample_rows,
            vec!["Z".to_string()]
        );
        assert!(b.validate().is_err());
    }

    #[test]
    fn unusable_relation_warns() {
        let mut b = clean();
        b.mappings
            .push(Mapping::new(c("B:2"), c("A:2"), "broader", "t"));
        assert_eq!(validate_inputs(&b).get(UNUSABLE_RELATION).unwrap().count, 1);
    }

    #[test]
    fn two_cycle_is_error() {
        let mut b = clean();
        b.hierarchy = vec![
            HierarchyEdge::new(c("A:1"), c("A:2")),
            HierarchyEdge::new(c("A:2"), c("A:1")),
        ];
        let r = validate_inputs(&b);
        assert_eq!(r.get(CYCLIC_HIERARCHY).unwrap().severity, Severity::Error);
        assert_eq!(
            r.get(ROOTLESS_HIERARCHY).unwrap().sample_rows,
            vec!["A".to_string()]
        );
    }

    #[test]
    fn cross_source_cycle_is_not_a_per_source_cycle() {
        let mut b = clean();
        b.hierarchy = vec![
            HierarchyEdge::new(c("A:1"), c("B:1")),
            HierarchyEdge::new(c("B:1"), c("A:1")),
        ];
        assert!(validate_inputs(&b).get(CYCLIC_HIERARCHY).is_none());
    }

    #[test]
    fn obsolete_edges_warn_and_are_dropped() {
        let mut b = clean();
        b.nodes = nodes(&[
            ("A:1", false),
            ("A:2", true),
            ("B:1", false),
            ("B:2", false),
        ]);
        let r = validate_inputs(&b);
        assert_eq!(r.get(OBSOLETE_EDGE).unwrap().count, 1);
        let v = b.validate().unwrap();
        assert_eq!(v.hierarchy, vec![HierarchyEdge::new(c("B:2"), c("B:1"))]);
    }
}
