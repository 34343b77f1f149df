use std::collections::HashSet;
use std::io::Read;

use crate::model::{
    ConceptId, HierarchyEdge, HierarchyEdgeSet, Mapping, MappingSet, NodeRecord, NodeTable,
};

use super::{Finding, IngestError, Severity, HIERARCHY_FILE, MAPPINGS_FILE, NODES_FILE};

/// A parsed table plus the non-fatal findings raised while reading it.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub value: T,
    pub findings: Vec<Finding>,
}

fn reader<R: Read>(input: R, delimiter: u8) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(input)
}

fn malformed(table: &'static str, err: csv::Error) -> IngestError {
    let line = err.position().map(|p| p.line()).unwrap_or(0);
    let reason = match err.kind() {
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => format!("expected {expected_len} columns, found {len}"),
        _ => err.to_string(),
    };
    IngestError::MalformedRow {
        table,
        line,
        reason,
    }
}

fn column<R: Read>(
    rdr: &mut csv::Reader<R>,
    table: &'static str,
    name: &'static str,
    required: bool,
) -> Result<Option<usize>, IngestError> {
    let headers = rdr.headers().map_err(|e| malformed(table, e))?;
    let pos = headers.iter().position(|h| h == name);
    if pos.is_none() && required {
        return Err(IngestError::MissingColumn {
            table,
            column: name,
        });
    }
    Ok(pos)
}

fn concept(table: &'static str, line: u64, raw: &str) -> Result<ConceptId, IngestError> {
    ConceptId::parse(raw).map_err(|source| IngestError::BadConceptId {
        table,
        line,
        source,
    })
}

fn parse_flag(raw: &str) -> Option<bool> {
    match raw.to_ascii_lowercase().as_str() {
        "true" | "1" => Some(true),
        "false" | "0" | "" => Some(false),
        _ => None,
    }
}

/// Reads a concept table with a `default_id` column and an optional
/// `obsolete` column (`true`/`false`/`1`/`0`).
pub fn parse_nodes<R: Read>(input: R, delimiter: u8) -> Result<NodeTable, IngestError> {
    let mut rdr = reader(input, delimiter);
    let id_col = column(&mut rdr, NODES_FILE, "default_id", true)?.unwrap();
    let obs_col = column(&mut rdr, NODES_FILE, "obsolete", false)?;

    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for row in rdr.records() {
        let row = row.map_err(|e| malformed(NODES_FILE, e))?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let id = concept(NODES_FILE, line, &row[id_col])?;
        let obsolete = match obs_col {
            None => false,
            Some(i) => parse_flag(&row[i]).ok_or_else(|| IngestError::MalformedRow {
                table: NODES_FILE,
                line,
                reason: format!("`obsolete` must be true/false/1/0, got `{}`", &row[i]),
            })?,
        };
        if !seen.insert(id.clone()) {
            return Err(IngestError::DuplicateId {
                table: NODES_FILE,
                line,
                id,
            });
        }
        records.push(NodeRecord { id, obsolete });
    }
    Ok(NodeTable::new(records)?)
}

/// Reads `source_id,target_id,relation[,provenance]`. Row order is kept;
/// exact duplicate rows and self-mappings are dropped with a warning.
pub fn parse_mappings<R: Read>(input: R, delimiter: u8) -> Result<Parsed<MappingSet>, IngestError> {
    let mut rdr = reader(input, delimiter);
    let src = column(&mut rdr, MAPPINGS_FILE, "source_id", true)?.unwrap();
    let tgt = column(&mut rdr, MAPPINGS_FILE, "target_id", true)?.unwrap();
    let rel = column(&mut rdr, MAPPINGS_FILE, "relation", true)?.unwrap();
    let prov = column(&mut rdr, MAPPINGS_FILE, "provenance", false)?;

    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut duplicates = Vec::new();
    let mut self_mappings = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| malformed(MAPPINGS_FILE, e))?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let source = concept(MAPPINGS_FILE, line, &row[src])?;
        let target = concept(MAPPINGS_FILE, line, &row[tgt])?;
        if row[rel].is_empty() {
            return Err(IngestError::MalformedRow {
                table: MAPPINGS_FILE,
                line,
                reason: "empty relation".into(),
            });
        }
        let provenance = prov.map(|i| &row[i]).unwrap_or("");
        let m = Mapping::new(source, target, &row[rel], provenance);
        if m.source == m.target {
            self_mappings.push(render_mapping(&m));
            continue;
        }
        if !seen.insert(m.clone()) {
            duplicates.push(render_mapping(&m));
            continue;
        }
        out.push(m);
    }
    let findings = [
        Finding::from_rows("p1-duplicate-mapping-rows", Severity::Warning, duplicates),
        Finding::from_rows("p2-self-mappings", Severity::Warning, self_mappings),
    ];
    Ok(Parsed {
        value: out,
        findings: findings.into_iter().flatten().collect(),
    })
}

/// Reads `source_id,target_id` where `source_id` is the child.
pub fn parse_hierarchy<R: Read>(
    input: R,
    delimiter: u8,
) -> Result<Parsed<HierarchyEdgeSet>, IngestError> {
    let mut rdr = reader(input, delimiter);
    let child_col = column(&mut rdr, HIERARCHY_FILE, "source_id", true)?.unwrap();
    let parent_col = column(&mut rdr, HIERARCHY_FILE, "target_id", true)?.unwrap();

    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut duplicates = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| malformed(HIERARCHY_FILE, e))?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let child = concept(HIERARCHY_FILE, line, &row[child_col])?;
        let parent = concept(HIERARCHY_FILE, line, &row[parent_col])?;
        if child == parent {
            return Err(IngestError::SelfEdge {
                table: HIERARCHY_FILE,
                line,
                id: child,
            });
        }
        let e = HierarchyEdge::new(child, parent);
        if !seen.insert(e.clone()) {
            duplicates.push(format!("{},{}", e.child, e.parent));
            continue;
        }
        out.push(e);
    }
    Ok(Parsed {
        value: out,
        findings: Finding::from_rows("p3-duplicate-hierarchy-rows", Severity::Warning, duplicates)
            .into_iter()
            .collect(),
    })
}

pub(crate) fn render_mapping(m: &Mapping) -> String {
    format!("{},{},{},{}", m.source, m.target, m.relation, m.provenance)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> ConceptId {
        ConceptId::parse(s).unwrap()
    }

    #[test]
    fn nodes_default_not_obsolete() {
        let t = parse_nodes("default_id\nMONDO:1\n".as_bytes(), b',').unwrap();
        assert_eq!(
            t.records(),
            &[NodeRecord {
                id: c("MONDO:1"),
                obsolete: false
            }]
        );
    }

    #[test]
    fn nodes_obsolete_flags() {
        let t = parse_nodes(
            "default_id,obsolete\nA:1,true\nA:2,0\nA:3,1\nA:4,FALSE\n".as_bytes(),
            b',',
        )
        .unwrap();
        let flags: Vec<bool> = t.records().iter().map(|r| r.obsolete).collect();
        assert_eq!(flags, [true, false, true, false]);
    }

    #[test]
    fn nodes_bad_id() {
        let err = parse_nodes("default_id\nasthma\n".as_bytes(), b',').unwrap_err();
        assert!(
            matches!(err, IngestError::BadConceptId { line: 2, .. }),
            "{err}"
        );
    }

    #[test]
    fn nodes_duplicate_id() {
        let input = "default_id,obsolete\nA:1,true\nA:1,false\n";
        // Oracle: scan with a hash set, first repeat wins.
        let mut seen = HashSet::new();
        let first_dup = input
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap())
            .find(|id| !seen.insert(*id));
        assert_eq!(first_dup, Some("A:1"));

        let err = parse_nodes(input.as_bytes(), b',').unwrap_err();
        assert!(matches!(err, IngestError::DuplicateId { ref id, line: 3, .. } if id == &c("A:1")));
    }

    #[test]
    fn nodes_wrong_column_count() {
        let err = parse_nodes("default_id,obsolete\nA:1\n".as_bytes(), b',').unwrap_err();
        assert!(matches!(err, IngestError::MalformedRow { .. }), "{err}");
    }

    #[test]
    fn nodes_missing_header_column() {
        let err = parse_nodes("id\nA:1\n".as_bytes(), b',').unwrap_err();
        assert!(matches!(
            err,
            IngestError::MissingColumn {
                column: "default_id",
                ..
            }
        ));
    }

    #[test]
    fn tab_delimited_and_quoted() {
        let t = parse_nodes("default_id\tobsolete\n\"X:a,b\"\tfalse\n".as_bytes(), b'\t').unwrap();
        assert_eq!(t.records()[0].id.as_str(), "X:a,b");
    }

    #[test]
    fn one_mapping_row() {
        let p = parse_mappings(
            "source_id,target_id,relation,provenance\nDOID:2841,MONDO:0004979,equivalent_to,mondo\n"
                .as_bytes(),
            b',',
        )
        .unwrap();
        assert_eq!(
            p.value,
            vec![Mapping::new(
                c("DOID:2841"),
                c("MONDO:0004979"),
                "equivalent_to",
                "mondo"
            )]
        );
        assert!(p.findings.is_empty());
    }

    #[test]
    fn empty_tables() {
        let m =
            parse_mappings("source_id,target_id,relation,provenance\n".as_bytes(), b',').unwrap();
        assert!(m.value.is_empty());
        let h = parse_hierarchy("source_id,target_id\n".as_bytes(), b',').unwrap();
        assert!(h.value.is_empty());
    }

    #[test]
    fn mapping_duplicates_and_self_rows_warn() {
        let p = parse_mappings(
            "source_id,target_id,relation,provenance\nA:1,B:1,XREF,p\nA:1,B:1,xref,p\nA:1,A:1,xref,p\n"
                .as_bytes(),
            b',',
        )
        .unwrap();
        assert_eq!(p.value.len(), 1);
        let ids: Vec<_> = p.findings.iter().map(|f| f.check_id.as_str()).collect();
        assert_eq!(ids, ["p1-duplicate-mapping-rows", "p2-self-mappings"]);
    }

    #[test]
    fn hierarchy_self_edge() {
        let err = parse_hierarchy("source_id,target_id\nA:1,A:1\n".as_bytes(), b',').unwrap_err();
        assert!(matches!(err, IngestError::SelfEdge { .. }));
    }

    #[test]
    fn hierarchy_keeps_row_order() {
        let p = parse_hierarchy(
            "source_id,target_id\nB:2,B:1\nA:2,A:1\nB:2,B:1\n".as_bytes(),
            b',',
        )
        .unwrap();
        assert_eq!(
            p.value,
            vec![
                HierarchyEdge::new(c("B:2"), c("B:1")),
                HierarchyEdge::new(c("A:2"), c("A:1"))
            ]
        );
        assert_eq!(p.findings[0].count, 1);
    }
}
