use std::fmt::Write;

use super::{CountPair, ReportDocument, StatusCount};

const STYLE: &str =
    "body{font-family:Helvetica,Arial,sans-serif;margin:2rem auto;max-width:70rem;color:#222}\
table{border-collapse:collapse;margin:0.5rem 0 1.5rem}\
th,td{border:1px solid #ccc;padding:0.25rem 0.6rem;text-align:left}\
td.n{text-align:right;font-variant-numeric:tabular-nums}\
th{background:#f0f0f0}\
h2{border-bottom:1px solid #ddd;padding-bottom:0.2rem}\
.warning{color:#8a5a00}.error{color:#b00020}\
code{font-size:0.85rem}";

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

fn count_row(out: &mut String, label: &str, pair: &CountPair) {
    let input = pair
        .input
        .map_or_else(|| "n/a".to_owned(), |n| n.to_string());
    let _ = writeln!(
        out,
        "<tr><td>{label}</td><td class=\"n\">{input}</td><td class=\"n\">{}</td></tr>",
        pair.output
    );
}

fn status_row(out: &mut String, stage: &str, label: &str, s: &StatusCount) {
    let _ = writeln!(
        out,
        "<tr><td>{stage}</td><td>{label}</td><td class=\"n\">{}</td><td class=\"n\">{:.2}%</td></tr>",
        s.count, s.ratio
    );
}

pub fn render_html(doc: &ReportDocument) -> String {
    let m = &doc.metrics;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>Integration report</title>\n<style>{STYLE}</style>\n</head>\n<body>\n<h1>Integration report</h1>"
    );

    out.push_str("<section id=\"overview\">\n<h2>Overview</h2>\n<table>\n<tr><th>Metric</th><th>Input</th><th>Output</th></tr>\n");
    count_row(&mut out, "Concept sources", &m.concept_sources);
    count_row(&mut out, "Concepts", &m.concepts);
    count_row(&mut out, "Concept merges", &m.concept_merges);
    count_row(&mut out, "Mappings", &m.mappings);
    count_row(&mut out, "Connected subgraphs", &m.connected_subgraphs);
    count_row(&mut out, "Hierarchy edges", &m.hierarchy_edges);
    out.push_str("</table>\n<table>\n<tr><th>Stage</th><th>Duration (ms)</th></tr>\n");
    let d = &m.durations_ms;
    for (stage, ms) in [
        ("ingest", d.ingest),
        ("dedup", d.dedup),
        ("connect", d.connect),
        ("report", d.report),
    ] {
        let _ = writeln!(out, "<tr><td>{stage}</td><td class=\"n\">{ms}</td></tr>");
    }
    out.push_str("</table>\n</section>\n");

    out.push_str("<section id=\"profiles\">\n<h2>Input profiles</h2>\n");
    for p in &doc.profiles {
        let _ = writeln!(
            out,
            "<h3><code>{}</code>: {} rows</h3>",
            escape(&p.table),
            p.rows
        );
        out.push_str("<table>\n<tr><th>Column</th><th>Distinct</th><th>Empty</th></tr>\n");
        for c in &p.columns {
            let _ = writeln!(
                out,
                "<tr><td>{}</td><td class=\"n\">{}</td><td class=\"n\">{}</td></tr>",
                escape(&c.name),
                c.distinct,
                c.nulls
            );
        }
        out.push_str("</table>\n");
        if !p.source_prefixes.is_empty() {
            out.push_str("<table>\n<tr><th>Source prefix</th><th>Occurrences</th></tr>\n");
            for (prefix, n) in &p.source_prefixes {
                let _ = writeln!(
                    out,
                    "<tr><td>{}</td><td class=\"n\">{n}</td></tr>",
                    escape(prefix)
                );
            }
            out.push_str("</table>\n");
        }
    }
    out.push_str("</section>\n");

    out.push_str("<section id=\"alignment\">\n<h2>Alignment steps</h2>\n<table>\n<tr><th>#</th><th>Group</th><th>Source</th><th>Mappings considered</th><th>Merges</th><th>Dropped (multi-target)</th></tr>\n");
    for s in &doc.alignment_steps {
        let _ = writeln!(
            out,
            "<tr><td class=\"n\">{}</td><td>{}</td><td>{}</td><td class=\"n\">{}</td><td class=\"n\">{}</td><td class=\"n\">{}</td></tr>",
            s.step_index,
            escape(&s.group_name),
            escape(&s.source),
            s.mappings_considered,
            s.merges_produced,
            s.dropped_multi_target
        );
    }
    out.push_str("</table>\n</section>\n");

    let s = &m.status;
    out.push_str("<section id=\"connectivity\">\n<h2>Deduplication and connectivity</h2>\n<table>\n<tr><th>Stage</th><th>Concept set</th><th>Count</th><th>Ratio</th></tr>\n");
    status_row(&mut out, "", "Input", &s.input);
    status_row(&mut out, "Deduplication", "Seed", &s.seed);
    status_row(
        &mut out,
        "Deduplication",
        "Merged to seed",
        &s.merged_to_seed,
    );
    status_row(
        &mut out,
        "Deduplication",
        "Merged to other",
        &s.merged_to_other,
    );
    status_row(&mut out, "Deduplication", "Unmapped", &s.unmapped);
    status_row(
        &mut out,
        "Connectivity",
        "Seed + merged to seed",
        &s.connected_seed_plus_merged,
    );
    status_row(&mut out, "Connectivity", "Connected", &s.connected_other);
    status_row(&mut out, "Connectivity", "Disconnected", &s.disconnected);
    out.push_str("</table>\n</section>\n");

    out.push_str("<section id=\"validation\">\n<h2>Validation findings</h2>\n");
    if doc.validation.is_empty() {
        out.push_str("<p>No findings.</p>\n");
    } else {
        out.push_str(
            "<table>\n<tr><th>Check</th><th>Severity</th><th>Count</th><th>Sample rows</th></tr>\n",
        );
        for f in &doc.validation {
            let class = format!("{:?}", f.severity).to_lowercase();
            let samples: Vec<String> = f
                .sample_rows
                .iter()
                .map(|r| format!("<code>{}</code>", escape(r)))
                .collect();
            let _ = writeln!(
                out,
                "<tr class=\"{class}\"><td>{}</td><td>{:?}</td><td class=\"n\">{}</td><td>{}</td></tr>",
                escape(&f.check_id),
                f.severity,
                f.count,
                samples.join("<br>")
            );
        }
        out.push_str("</table>\n");
    }
    out.push_str("</section>\n</body>\n</html>\n");
    out
}
