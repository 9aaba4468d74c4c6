//! Human-readable renderings and the JSON shapes that are not plain serde.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anticopypaster_core::clone_detect::{CloneMatch, MatchKind};
use anticopypaster_core::decision::{AnalysisContext, DropReason, GateReport, Outcome};
use anticopypaster_core::metrics::{CategorySensitivity, SubmetricId};
use anticopypaster_core::workspace::ProjectSession;
use serde_json::{json, Value};

use crate::scenario::ProjectLog;

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Shortest exact rendering: `4`, `0.5`, `2.6666666666666665`.
fn num(v: f64) -> String {
    format!("{v}")
}

pub fn drop_reason_text(reason: DropReason) -> &'static str {
    match reason {
        DropReason::InvalidFragment => "invalid fragment",
        DropReason::NoEnclosingMethod => "no enclosing method",
        DropReason::Edited => "fragment edited before the delay elapsed",
        DropReason::FileMissing => "file missing",
    }
}

pub fn analysis_json(session: &ProjectSession) -> Value {
    let sensitivity = session.settings().sensitivity;
    let mut submetrics = BTreeMap::new();
    if let Some(dist) = session.distribution() {
        for id in SubmetricId::ALL {
            let summary = dist.summary(id);
            let threshold = dist.threshold(id, sensitivity.get(id.category())).ok();
            submetrics.insert(
                id.name(),
                json!({
                    "min": summary.map(|s| s.min),
                    "median": summary.map(|s| s.median),
                    "max": summary.map(|s| s.max),
                    "threshold": threshold,
                }),
            );
        }
    }
    json!({
        "files": session.file_paths().count(),
        "methods": session.method_count(),
        "sensitivity": sensitivity,
        "submetrics": submetrics,
        "warnings": session.warnings(),
    })
}

pub fn analysis_text(session: &ProjectSession) -> String {
    let mut out = String::new();
    let sensitivity = session.settings().sensitivity;
    let _ = writeln!(
        out,
        "{} files, {} methods",
        session.file_paths().count(),
        session.method_count()
    );
    for w in session.warnings() {
        let _ = writeln!(out, "warning: {w}");
    }
    let Some(dist) = session.distribution() else {
        let _ = writeln!(out, "no methods indexed, thresholds unavailable");
        return out;
    };
    let _ = writeln!(
        out,
        "\n{:<34} {:>10} {:>10} {:>10} {:>10}",
        "submetric", "min", "median", "max", "threshold"
    );
    for id in SubmetricId::ALL {
        let Some(s) = dist.summary(id) else { continue };
        let threshold = dist
            .threshold(id, sensitivity.get(id.category()))
            .map(num)
            .unwrap_or_else(|_| "-".to_string());
        let _ = writeln!(
            out,
            "{:<34} {:>10} {:>10} {:>10} {:>10}",
            id.name(),
            short(s.min),
            short(s.median),
            short(s.max),
            short_str(&threshold)
        );
    }
    let _ = writeln!(
        out,
        "\nsensitivity: keyword={} coupling={} complexity={} size={}",
        sensitivity.keyword, sensitivity.coupling, sensitivity.complexity, sensitivity.size
    );
    out
}

/// Compact number for tables: at most four decimals.
fn short(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').to_string()
    }
}

fn short_str(s: &str) -> String {
    s.parse::<f64>()
        .map(short)
        .unwrap_or_else(|_| s.to_string())
}

pub fn report_text(report: &GateReport, matches: &[CloneMatch]) -> String {
    let mut out = String::new();
    let exact = matches
        .iter()
        .filter(|m| m.kind == MatchKind::Exact)
        .count();
    let _ = writeln!(
        out,
        "duplicate methods: {} (exact {}, near {}), minimum {}",
        report.duplicate_method_count,
        exact,
        matches.len() - exact,
        report.min_duplicate_methods
    );
    if !report.submetrics.is_empty() {
        let _ = writeln!(
            out,
            "{:<34} {:>10} {:>10} {:>5} {:>9}",
            "submetric", "value", "threshold", "pass", "required"
        );
        for (id, r) in &report.submetrics {
            let _ = writeln!(
                out,
                "{:<34} {:>10} {:>10} {:>5} {:>9}",
                id.name(),
                short(r.value),
                short(r.threshold),
                yes_no(r.passed),
                yes_no(r.required)
            );
        }
    }
    let _ = writeln!(
        out,
        "required all passed: {}, some enabled passed: {}, metric rule: {}",
        yes_no(report.required_all_passed),
        yes_no(report.any_enabled_passed),
        if report.metrics_passed {
            "pass"
        } else {
            "fail"
        }
    );
    let verdict = if report.triggered {
        "TRIGGERED".to_string()
    } else {
        match &report.reason {
            Some(r) => format!("NOT TRIGGERED ({r})"),
            None => "NOT TRIGGERED".to_string(),
        }
    };
    let _ = writeln!(out, "verdict: {verdict}");
    if !matches.is_empty() {
        let _ = writeln!(out, "matches:");
        for m in matches {
            let kind = match m.kind {
                MatchKind::Exact => "exact",
                MatchKind::Near => "near",
            };
            let span = m
                .match_span
                .map(|s| format!(" lines {}-{}", s.start, s.end))
                .unwrap_or_default();
            let _ = writeln!(out, "  {kind:<5} {:.3} {}{span}", m.similarity, m.method_id);
        }
    }
    out
}

pub fn outcome_text(outcome: &Outcome) -> String {
    match outcome {
        Outcome::Recommended(r) => {
            let mut out = format!(
                "{}:{} extract method recommended\n",
                r.event.file, r.event.line
            );
            out.push_str(&report_text(&r.report, &r.matches));
            out
        }
        Outcome::NotTriggered {
            event,
            report,
            matches,
            ..
        } => {
            let mut out = format!("{}:{} no recommendation\n", event.file, event.line);
            out.push_str(&report_text(report, matches));
            out
        }
        Outcome::Dropped { event, reason, .. } => format!(
            "{}:{} dropped: {}\n",
            event.file,
            event.line,
            drop_reason_text(*reason)
        ),
    }
}

fn log_line(outcome: &Outcome) -> String {
    match outcome {
        Outcome::Recommended(r) => format!(
            "t={} recommended {}:{} (pasted t={}), {} duplicate method(s)",
            r.emitted_at, r.event.file, r.event.line, r.event.t, r.report.duplicate_method_count
        ),
        Outcome::NotTriggered {
            event, report, at, ..
        } => format!(
            "t={at} not triggered {}:{} (pasted t={}): {}",
            event.file,
            event.line,
            event.t,
            report
                .reason
                .as_deref()
                .unwrap_or("metric rule not satisfied")
        ),
        Outcome::Dropped { event, reason, at } => format!(
            "t={at} dropped {}:{} (pasted t={}): {}",
            event.file,
            event.line,
            event.t,
            drop_reason_text(*reason)
        ),
    }
}

pub fn simulation_text(logs: &[ProjectLog]) -> String {
    let mut out = String::new();
    for (i, p) in logs.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "project {}", p.project);
        for o in &p.log {
            let _ = writeln!(out, "  {}", log_line(o));
        }
        let _ = writeln!(
            out,
            "  {} recommendation(s), {} pending",
            p.recommendations, p.pending
        );
    }
    out
}

pub fn thresholds_text(
    sample_size: usize,
    sensitivity: &CategorySensitivity,
    values: &BTreeMap<SubmetricId, f64>,
) -> String {
    let mut out = format!("{sample_size} methods sampled\n");
    let _ = writeln!(
        out,
        "{:<34} {:>11} {:>10}",
        "submetric", "sensitivity", "threshold"
    );
    for id in SubmetricId::ALL {
        if let Some(v) = values.get(&id) {
            let _ = writeln!(
                out,
                "{:<34} {:>11} {:>10}",
                id.name(),
                sensitivity.get(id.category()),
                short(*v)
            );
        }
    }
    out
}
