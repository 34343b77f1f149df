//! Input tables, configuration and the pre-flight validation catalogue.

mod config;
mod parse;
mod validate;

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    AlignmentConfig, ConceptId, ConfigError, DuplicateId, HierarchyEdgeSet, IdError, MappingSet,
    NodeTable,
};

pub use config::{parse_config, parse_settings, render_config, Settings};
pub use parse::{parse_hierarchy, parse_mappings, parse_nodes, Parsed};
pub use validate::{
    validate_inputs, CYCLIC_HIERARCHY, DANGLING, OBSOLETE_EDGE, ROOTLESS_HIERARCHY, UNKNOWN_SOURCE,
    UNUSABLE_RELATION,
};

pub const NODES_FILE: &str = "nodes.csv";
pub const MAPPINGS_FILE: &str = "mappings.csv";
pub const HIERARCHY_FILE: &str = "edges_hierarchy.csv";

/// Maximum number of offending rows kept per finding.
pub const MAX_SAMPLE_ROWS: usize = 10;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{table} line {line}: malformed row: {reason}")]
    MalformedRow {
        table: &'static str,
        line: u64,
        reason: String,
    },
    #[error("{table}: missing required column `{column}`")]
    MissingColumn {
        table: &'static str,
        column: &'static str,
    },
    #[error("{table} line {line}: {source}")]
    BadConceptId {
        table: &'static str,
        line: u64,
        source: IdError,
    },
    #[error("{table} line {line}: duplicate concept id `{id}`")]
    DuplicateId {
        table: &'static str,
        line: u64,
        id: ConceptId,
    },
    #[error("{table} line {line}: hierarchy edge from `{id}` to itself")]
    SelfEdge {
        table: &'static str,
        line: u64,
        id: ConceptId,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl From<DuplicateId> for IngestError {
    fn from(e: DuplicateId) -> Self {
        IngestError::DuplicateId {
            table: NODES_FILE,
            line: 0,
            id: e.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Severity {
    Error,
    Warning,
}

/// One failed check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub check_id: String,
    pub severity: Severity,
    pub count: usize,
    pub sample_rows: Vec<String>,
}

impl Finding {
    /// Builds a finding from every offending row. The [`MAX_SAMPLE_ROWS`]
    /// smallest rows are kept as samples, so samples do not depend on input
    /// row order.
    pub fn from_rows<I>(check_id: &str, severity: Severity, rows: I) -> Option<Self>
    where
        I: IntoIterator<Item = String>,
    {
        let mut rows: Vec<String> = rows.into_iter().collect();
        if rows.is_empty() {
            return None;
        }
        let count = rows.len();
        rows.sort_unstable();
        rows.dedup();
        rows.truncate(MAX_SAMPLE_ROWS);
        Some(Self {
            check_id: check_id.to_owned(),
            severity,
            count,
            sample_rows: rows,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn has_errors(&self) -> bool {
        self.findings.iter().any(|f| f.severity == Severity::Error)
    }

    pub fn has_warnings(&self) -> bool {
        self.findings
            .iter()
            .any(|f| f.severity == Severity::Warning)
    }

    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn get(&self, check_id: &str) -> Option<&Finding> {
        self.findings.iter().find(|f| f.check_id == check_id)
    }

    pub fn extend<I: IntoIterator<Item = Finding>>(&mut self, findings: I) {
        self.findings.extend(findings);
    }
}

/// Parsed inputs, not yet checked.
#[derive(Debug, Clone, PartialEq)]
pub struct InputBundle {
    pub nodes: NodeTable,
    pub mappings: MappingSet,
    pub hierarchy: HierarchyEdgeSet,
    pub config: AlignmentConfig,
}

/// A bundle that passed [`validate_inputs`] without errors. Rows with
/// dangling endpoints and hierarchy edges touching obsolete concepts have
/// been removed.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedBundle {
    bundle: InputBundle,
    report: ValidationReport,
}

impl ValidatedBundle {
    pub fn bundle(&self) -> &InputBundle {
        &self.bundle
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn into_parts(self) -> (InputBundle, ValidationReport) {
        (self.bundle, self.report)
    }
}

impl std::ops::Deref for ValidatedBundle {
    type Target = InputBundle;

    fn deref(&self) -> &InputBundle {
        &self.bundle
    }
}

impl InputBundle {
    /// Runs the check catalogue. On error-level findings the report is
    /// returned as `Err`; otherwise the sanitized bundle is returned.
    pub fn validate(self) -> Result<ValidatedBundle, ValidationReport> {
        let report = validate_inputs(&self);
        if report.has_errors() {
            return Err(report);
        }
        let bundle = validate::sanitize(self);
        Ok(ValidatedBundle { bundle, report })
    }
}

/// Reads `nodes.csv`, `mappings.csv` and `edges_hierarchy.csv` from
/// `input_dir` and the TOML configuration at `config_path`. The three
/// tables are parsed concurrently. Parse-level warnings (duplicate rows,
/// self-mappings) are returned alongside the bundle.
pub fn load_bundle(
    input_dir: &Path,
    config_path: &Path,
) -> Result<(InputBundle, Vec<Finding>), IngestError> {
    let config_text = std::fs::read_to_string(config_path).map_err(|source| IngestError::Io {
        path: config_path.to_owned(),
        source,
    })?;
    let settings = parse_settings(&config_text)?;
    let delim = settings.delimiter;

    let open = |name: &str| -> Result<BufReader<File>, IngestError> {
        let path = input_dir.join(name);
        File::open(&path)
            .map(BufReader::new)
            .map_err(|source| IngestError::Io { path, source })
    };
    let nodes_file = open(NODES_FILE)?;
    let mappings_file = open(MAPPINGS_FILE)?;
    let hierarchy_file = open(HIERARCHY_FILE)?;

    let (nodes, mappings, hierarchy) = std::thread::scope(|s| {
        let n = s.spawn(|| parse_nodes(nodes_file, delim));
        let m = s.spawn(|| parse_mappings(mappings_file, delim));
        let h = s.spawn(|| parse_hierarchy(hierarchy_file, delim));
        (
            n.join().expect("nodes parser panicked"),
            m.join().expect("mappings parser panicked"),
            h.join().expect("hierarchy parser panicked"),
        )
    });
    let nodes = nodes?;
    let mappings = mappings?;
    let hierarchy = hierarchy?;

    let mut findings = mappings.findings;
    findings.extend(hierarchy.findings);
    Ok((
        InputBundle {
            nodes,
            mappings: mappings.value,
            hierarchy: hierarchy.value,
            config: settings.config,
        },
        findings,
    ))
}
