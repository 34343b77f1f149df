//! Run metrics, table profiles and the static report.

mod html;
mod metrics;
mod profile;

use serde::{Deserialize, Serialize};

use crate::dedup::AlignmentStep;
use crate::ingest::{Finding, ValidationReport};

pub use html::render_html;
pub use metrics::{
    compute_metrics, connected_subgraphs, ratio, CountPair, Durations, PipelineMetrics,
    StatusBreakdown, StatusCount,
};
pub use profile::{profile_table, profile_tables, ColumnProfile, TableProfile};

pub const REPORT_DIR: &str = "report";
pub const HTML_FILE: &str = "index.html";
pub const JSON_FILE: &str = "metrics.json";

/// Shape of `metrics.json`: the metric fields at top level, followed by the
/// supporting detail shown in the HTML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    #[serde(flatten)]
    pub metrics: PipelineMetrics,
    pub profiles: Vec<TableProfile>,
    pub validation: Vec<Finding>,
    pub alignment_steps: Vec<AlignmentStep>,
}

/// Renders the HTML report and its JSON twin.
pub fn render_report(
    metrics: &PipelineMetrics,
    profiles: &[TableProfile],
    validation: &ValidationReport,
    steps: &[AlignmentStep],
) -> (String, String) {
    let doc = ReportDocument {
        metrics: metrics.clone(),
        profiles: profiles.to_vec(),
        validation: validation.findings.clone(),
        alignment_steps: steps.to_vec(),
    };
    let mut json = serde_json::to_string_pretty(&doc).expect("report document serializes");
    json.push('\n');
    (render_html(&doc), json)
}
