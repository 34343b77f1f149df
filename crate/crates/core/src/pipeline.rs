//! End-to-end orchestration: ingest, deduplicate, connect, report, write.

use std::collections::HashSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::connect::{connect_concepts, verify_dag, ConnectivityResult};
use crate::dedup::{deduplicate, AlignmentStep, DedupResult};
use crate::ingest::{
    load_bundle, Finding, InputBundle, Severity, ValidationReport, HIERARCHY_FILE, MAPPINGS_FILE,
    NODES_FILE,
};
use crate::model::{HierarchyEdge, Mapping, MergeSet, NodeTable};
use crate::report::{
    compute_metrics, profile_tables, render_report, PipelineMetrics, HTML_FILE, JSON_FILE,
    REPORT_DIR,
};
use crate::table::Table;

pub const MERGES_FILE: &str = "merges.csv";
pub const OBSOLETE_MERGES_FILE: &str = "merges_obsolete.csv";
pub const DOMAIN_NODES_FILE: &str = "nodes_domain.csv";
pub const UNMAPPED_NODES_FILE: &str = "nodes_unmapped.csv";
pub const DOMAIN_MAPPINGS_FILE: &str = "mappings_domain.csv";
pub const STEPS_FILE: &str = "alignment_steps.csv";
pub const DOMAIN_HIERARCHY_FILE: &str = "edges_hierarchy_domain.csv";
pub const ATTACHMENTS_FILE: &str = "connectivity_attachments.csv";

pub const SEED_EDGES_DROPPED: &str = "c1-seed-edges-dropped";
pub const CYCLIC_AFTER_MERGING: &str = "c2-cyclic-source-after-merging";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOptions {
    pub input_dir: PathBuf,
    pub config_path: PathBuf,
    pub output_dir: PathBuf,
    pub fail_on_warning: bool,
    pub emit_report: bool,
    /// Only errors are printed.
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    InvalidInput,
    Warnings,
    InvariantViolated,
}

impl ExitStatus {
    pub fn code(self) -> u8 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::InvalidInput => 1,
            ExitStatus::Warnings => 2,
            ExitStatus::InvariantViolated => 3,
        }
    }
}

/// Everything a run computes, before anything is written.
#[derive(Debug, Clone)]
pub struct Integration {
    pub input: InputBundle,
    pub dedup: DedupResult,
    pub connectivity: ConnectivityResult,
    pub metrics: PipelineMetrics,
    pub findings: ValidationReport,
}

pub fn nodes_table(name: &str, nodes: &NodeTable) -> Table {
    let with_flag = nodes.records().iter().any(|r| r.obsolete);
    let mut t = if with_flag {
        Table::new(name, &["default_id", "obsolete"])
    } else {
        Table::new(name, &["default_id"])
    };
    for r in nodes.records() {
        if with_flag {
            t.push([r.id.to_string(), r.obsolete.to_string()]);
        } else {
            t.push([r.id.to_string()]);
        }
    }
    t.sorted()
}

pub fn mappings_table(name: &str, mappings: &[Mapping]) -> Table {
    let mut t = Table::new(name, &["source_id", "target_id", "relation", "provenance"]);
    for m in mappings {
        t.push([
            m.source.to_string(),
            m.target.to_string(),
            m.relation.to_string(),
            m.provenance.clone(),
        ]);
    }
    t.sorted()
}

/// Hierarchy edges as `source_id` (child), `target_id` (parent), the same
/// layout as the input table.
pub fn edges_table(name: &str, edges: &[HierarchyEdge]) -> Table {
    let mut t = Table::new(name, &["source_id", "target_id"]);
    for e in edges {
        t.push([e.child.to_string(), e.parent.to_string()]);
    }
    t.sorted()
}

pub fn merges_table(name: &str, merges: &MergeSet) -> Table {
    let mut t = Table::new(name, &["source_id", "target_id"]);
    for m in merges {
        t.push([m.source.to_string(), m.target.to_string()]);
    }
    t.sorted()
}

fn steps_table(steps: &[AlignmentStep]) -> Table {
    let mut t = Table::new(
        STEPS_FILE,
        &[
            "step_index",
            "group_name",
            "source",
            "mappings_considered",
            "merges_produced",
            "dropped_multi_target",
        ],
    );
    for s in steps {
        t.push([
            s.step_index.to_string(),
            s.group_name.clone(),
            s.source.clone(),
            s.mappings_considered.to_string(),
            s.merges_produced.to_string(),
            s.dropped_multi_target.to_string(),
        ]);
    }
    t
}

impl Integration {
    /// Output tables in canonical row order.
    pub fn tables(&self) -> Vec<Table> {
        let config = &self.input.config;
        let mut unmapped = Table::new(UNMAPPED_NODES_FILE, &["default_id", "connected"]);
        for c in self.dedup.unmerged.iter().filter(|c| !config.is_seed(c)) {
            unmapped.push([
                c.to_string(),
                self.connectivity.connected.contains(c).to_string(),
            ]);
        }
        let mut attachments = Table::new(
            ATTACHMENTS_FILE,
            &[
                "concept_id",
                "anchor_id",
                "original_path_length",
                "pruned_path_length",
            ],
        );
        for a in &self.connectivity.attachments {
            attachments.push([
                a.concept.to_string(),
                a.anchor.to_string(),
                a.original_path_length.to_string(),
                a.pruned_path_length.to_string(),
            ]);
        }
        vec![
            merges_table(MERGES_FILE, &self.dedup.canonical_merges),
            merges_table(OBSOLETE_MERGES_FILE, &self.dedup.obsolete_merges),
            nodes_table(DOMAIN_NODES_FILE, &self.dedup.domain_concepts),
            unmapped.sorted(),
            mappings_table(DOMAIN_MAPPINGS_FILE, &self.dedup.domain_mappings),
            steps_table(&self.dedup.steps),
            edges_table(DOMAIN_HIERARCHY_FILE, &self.connectivity.domain_hierarchy),
            attachments.sorted(),
        ]
    }

    /// Post-conditions that must hold for any run. Each entry describes one
    /// violation.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.dedup.canonical_merges.is_stable() {
            out.push("canonical merge set is not stable".to_owned());
        }
        if let Err(cycle) = verify_dag(&self.connectivity.domain_hierarchy) {
            let ids: Vec<&str> = cycle.iter().map(|c| c.as_str()).collect();
            out.push(format!(
                "domain hierarchy has a cycle: {}",
                ids.join(" -> ")
            ));
        }
        let named = self.input.nodes.len() - self.dedup.unresolved_obsolete.len();
        let accounted = self.dedup.domain_concepts.len() + self.dedup.canonical_merges.len();
        if named != accounted {
            out.push(format!(
                "concept count not conserved: {named} named input concepts, {accounted} domain concepts plus merges"
            ));
        }
        out
    }
}

/// Runs validation, deduplication and connection in memory. On
/// error-level findings the full report is returned as `Err`.
pub fn integrate(
    input: InputBundle,
    parse_findings: Vec<Finding>,
) -> Result<Integration, ValidationReport> {
    let started = Instant::now();
    let validated = input.validate().map_err(|mut report| {
        report.findings.splice(0..0, parse_findings.iter().cloned());
        report
    })?;
    let ingest_ms = started.elapsed().as_millis() as u64;

    let started = Instant::now();
    let dedup = deduplicate(&validated);
    let dedup_ms = started.elapsed().as_millis() as u64;

    let started = Instant::now();
    let connectivity = connect_concepts(
        &dedup.unmerged,
        &validated.hierarchy,
        &dedup.canonical_merges,
        &validated.config,
    );
    let connect_ms = started.elapsed().as_millis() as u64;

    let mut metrics = compute_metrics(&validated, &dedup, &connectivity);
    metrics.durations_ms.ingest = ingest_ms;
    metrics.durations_ms.dedup = dedup_ms;
    metrics.durations_ms.connect = connect_ms;

    let (input, validation) = validated.into_parts();
    let mut findings = ValidationReport {
        findings: parse_findings,
    };
    findings.extend(validation.findings);
    findings.extend(dedup.findings.iter().cloned());
    findings.extend(Finding::from_rows(
        SEED_EDGES_DROPPED,
        Severity::Warning,
        connectivity
            .dropped_seed_edges
            .iter()
            .map(|e| format!("{},{}", e.child, e.parent)),
    ));
    findings.extend(Finding::from_rows(
        CYCLIC_AFTER_MERGING,
        Severity::Warning,
        connectivity.cyclic_sources.iter().map(|c| c.to_string()),
    ));

    Ok(Integration {
        input,
        dedup,
        connectivity,
        metrics,
        findings,
    })
}

/// Writes `files` (paths relative to `output_dir`) through a staging
/// directory next to `output_dir`. A fresh output directory appears in one
/// rename; an existing one has each file replaced by rename.
pub fn write_atomically(output_dir: &Path, files: &[(PathBuf, Vec<u8>)]) -> io::Result<()> {
    let parent = match output_dir.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_owned(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&parent)?;
    let staging = tempfile::Builder::new()
        .prefix(".ontoweave-staging-")
        .tempdir_in(&parent)?;
    for (rel, bytes) in files {
        let path = staging.path().join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, bytes)?;
    }
    if !output_dir.exists() {
        fs::rename(staging.keep(), output_dir)?;
        return Ok(());
    }
    let mut made: HashSet<PathBuf> = HashSet::new();
    for (rel, _) in files {
        let dest = output_dir.join(rel);
        if let Some(dir) = dest.parent() {
            if made.insert(dir.to_owned()) {
                fs::create_dir_all(dir)?;
            }
        }
        fs::rename(staging.path().join(rel), dest)?;
    }
    Ok(())
}

fn print_findings(report: &ValidationReport) {
    for f in &report.findings {
        eprintln!("{:?} {}: {} row(s)", f.severity, f.check_id, f.count);
        for row in &f.sample_rows {
            eprintln!("    {row}");
        }
    }
}

/// Renders every output file of a finished integration.
pub fn render_outputs(
    result: &mut Integration,
    emit_report: bool,
) -> csv::Result<Vec<(PathBuf, Vec<u8>)>> {
    let tables = result.tables();
    let mut files = Vec::with_capacity(tables.len() + 2);
    for t in &tables {
        files.push((PathBuf::from(&t.name), t.to_csv()?));
    }
    if emit_report {
        let started = Instant::now();
        let inputs = [
            nodes_table(NODES_FILE, &result.input.nodes),
            mappings_table(MAPPINGS_FILE, &result.input.mappings),
            edges_table(HIERARCHY_FILE, &result.input.hierarchy),
        ];
        let profiles = profile_tables(inputs.iter().chain(&tables));
        result.metrics.durations_ms.report = started.elapsed().as_millis() as u64;
        let (html, json) = render_report(
            &result.metrics,
            &profiles,
            &result.findings,
            &result.dedup.steps,
        );
        let dir = PathBuf::from(REPORT_DIR);
        files.push((dir.join(HTML_FILE), html.into_bytes()));
        files.push((dir.join(JSON_FILE), json.into_bytes()));
    }
    Ok(files)
}

/// Runs the whole pipeline. Diagnostics go to standard error.
pub fn run(options: &RunOptions) -> ExitStatus {
    let started = Instant::now();
    let (bundle, parse_findings) = match load_bundle(&options.input_dir, &options.config_path) {
        Ok(loaded) => loaded,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitStatus::InvalidInput;
        }
    };
    let load_ms = started.elapsed().as_millis() as u64;

    let mut result = match integrate(bundle, parse_findings) {
        Ok(r) => r,
        Err(report) => {
            print_findings(&report);
            eprintln!("error: input validation failed; nothing written");
            return ExitStatus::InvalidInput;
        }
    };
    result.metrics.durations_ms.ingest += load_ms;
    if !options.quiet {
        print_findings(&result.findings);
    }

    let violations = result.invariant_violations();
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("internal error: {v}");
        }
        return ExitStatus::InvariantViolated;
    }
    if options.fail_on_warning && !result.findings.is_empty() {
        eprintln!("error: warnings present and --fail-on-warning set; nothing written");
        return ExitStatus::Warnings;
    }

    let files = match render_outputs(&mut result, options.emit_report) {
        Ok(f) => f,
        Err(err) => {
            eprintln!("error: rendering outputs: {err}");
            return ExitStatus::InvalidInput;
        }
    };
    if let Err(err) = write_atomically(&options.output_dir, &files) {
        eprintln!("error: writing {}: {err}", options.output_dir.display());
        return ExitStatus::InvalidInput;
    }
    if options.quiet {
        return ExitStatus::Success;
    }
    let m = &result.metrics;
    eprintln!(
        "integrated {} concepts into {} ({} merges, {} hierarchy edges, {} connected subgraph(s))",
        m.concepts.input.unwrap_or(0),
        m.concepts.output,
        m.concept_merges.output,
        m.hierarchy_edges.output,
        m.connected_subgraphs.output
    );
    ExitStatus::Success
}
