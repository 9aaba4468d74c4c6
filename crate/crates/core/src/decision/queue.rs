//! Delayed evaluation of paste events on an injected logical clock.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::clone_detect::{find_duplicates, token_occurrences, CloneMatch};
use crate::metrics::{fragment_vector, ProjectDistribution};
use crate::source_model::{
    tokenize, validate_fragment, FileIndex, Fragment, MethodUnit, PasteSite,
};

use super::gate::{evaluate_gate, GateReport};
use super::settings::{SearchScope, Settings};

/// Logical time in seconds.
pub type Timestamp = u64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PasteEvent {
    pub project_root: PathBuf,
    /// Relative to the project root, `/`-separated.
    pub file_path: String,
    pub paste_line: u32,
    pub fragment_text: String,
    pub timestamp: Timestamp,
}

/// The identifying part of an event as it appears in logs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EventRef {
    pub file: String,
    pub line: u32,
    pub t: Timestamp,
}

impl From<&PasteEvent> for EventRef {
    fn from(e: &PasteEvent) -> Self {
        Self {
            file: e.file_path.clone(),
            line: e.paste_line,
            t: e.timestamp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    InvalidFragment,
    NoEnclosingMethod,
    Edited,
    FileMissing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Recommendation {
    pub event: EventRef,
    pub report: GateReport,
    pub matches: Vec<CloneMatch>,
    pub action: String,
    pub emitted_at: Timestamp,
}

/// What became of one paste event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "outcome",
    rename_all = "snake_case",
    rename_all_fields = "camelCase"
)]
pub enum Outcome {
    Recommended(Recommendation),
    NotTriggered {
        event: EventRef,
        report: GateReport,
        matches: Vec<CloneMatch>,
        at: Timestamp,
    },
    Dropped {
        event: EventRef,
        reason: DropReason,
        at: Timestamp,
    },
}

impl Outcome {
    pub fn recommendation(&self) -> Option<&Recommendation> {
        match self {
            Outcome::Recommended(r) => Some(r),
            _ => None,
        }
    }

    pub fn report(&self) -> Option<&GateReport> {
        match self {
            Outcome::Recommended(r) => Some(&r.report),
            Outcome::NotTriggered { report, .. } => Some(report),
            Outcome::Dropped { .. } => None,
        }
    }

    pub fn drop_reason(&self) -> Option<DropReason> {
        match self {
            Outcome::Dropped { reason, .. } => Some(*reason),
            _ => None,
        }
    }
}

/// Read access to one project's state, as needed by the pipeline.
pub trait AnalysisContext {
    fn settings(&self) -> &Settings;
    /// Current text of a project file, `None` if it no longer exists.
    fn read_source(&self, file_path: &str) -> Option<String>;
    fn file_index(&self, file_path: &str) -> Option<&FileIndex>;
    /// Every indexed method, ordered by id.
    fn all_methods(&self) -> Vec<&MethodUnit>;
    fn distribution(&self) -> Option<&ProjectDistribution>;
}

#[derive(Debug, Clone, PartialEq)]
struct Pending {
    event: PasteEvent,
    fragment: Fragment,
    due: Timestamp,
}

/// Pending paste events of one project keyed by paste site.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PasteQueue {
    pending: BTreeMap<(String, u32), Pending>,
}

impl PasteQueue {
    pub fn len(&self) -> usize {
        self.pending.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }

    /// Due time of the entry at a paste site, if one is pending.
    pub fn due_at(&self, file_path: &str, line: u32) -> Option<Timestamp> {
        self.pending
            .get(&(file_path.to_string(), line))
            .map(|p| p.due)
    }

    pub fn next_due(&self) -> Option<Timestamp> {
        self.pending.values().map(|p| p.due).min()
    }

    /// Drops pending entries for a file, e.g. after it was deleted.
    pub fn remove_file(&mut self, file_path: &str) -> Vec<PasteEvent> {
        let keys: Vec<_> = self
            .pending
            .keys()
            .filter(|(f, _)| f == file_path)
            .cloned()
            .collect();
        keys.into_iter()
            .filter_map(|k| self.pending.remove(&k))
            .map(|p| p.event)
            .collect()
    }
}

/// Queues a paste for evaluation after the configured delay. A later paste
/// at the same site replaces the pending one and restarts its timer.
pub fn enqueue_paste(
    queue: &mut PasteQueue,
    event: PasteEvent,
    ctx: &impl AnalysisContext,
) -> Result<Timestamp, DropReason> {
    let fragment = validate_fragment(&event.fragment_text);
    if !fragment.valid {
        return Err(DropReason::InvalidFragment);
    }
    if ctx.read_source(&event.file_path).is_none() {
        return Err(DropReason::FileMissing);
    }
    ctx.file_index(&event.file_path)
        .and_then(|idx| idx.method_at_line(event.paste_line))
        .ok_or(DropReason::NoEnclosingMethod)?;
    let due = event.timestamp + ctx.settings().delay_seconds;
    queue.pending.insert(
        (event.file_path.clone(), event.paste_line),
        Pending {
            event,
            fragment,
            due,
        },
    );
    Ok(due)
}

/// Evaluates every entry due at `now`, in due-time then site order.
pub fn tick(queue: &mut PasteQueue, now: Timestamp, ctx: &impl AnalysisContext) -> Vec<Outcome> {
    let mut due: Vec<_> = queue
        .pending
        .iter()
        .filter(|(_, p)| p.due <= now)
        .map(|(k, p)| (p.due, k.clone()))
        .collect();
    due.sort();
    due.into_iter()
        .filter_map(|(_, key)| queue.pending.remove(&key))
        .map(|p| evaluate_due(&p.event, p.fragment, ctx, now))
        .collect()
}

/// Evaluates one paste as if its delay has elapsed.
pub fn evaluate_paste(event: &PasteEvent, ctx: &impl AnalysisContext, now: Timestamp) -> Outcome {
    let fragment = validate_fragment(&event.fragment_text);
    if !fragment.valid {
        return Outcome::Dropped {
            event: event.into(),
            reason: DropReason::InvalidFragment,
            at: now,
        };
    }
    evaluate_due(event, fragment, ctx, now)
}

/// True when the fragment's tokens still start on `line` of `source`.
pub fn fragment_present_at(source: &str, fragment: &Fragment, line: u32) -> bool {
    let Ok(tokens) = tokenize(source) else {
        return false;
    };
    token_occurrences(&tokens, &fragment.tokens)
        .into_iter()
        .any(|i| tokens[i].line == line)
}

fn evaluate_due(
    event: &PasteEvent,
    fragment: Fragment,
    ctx: &impl AnalysisContext,
    now: Timestamp,
) -> Outcome {
    let dropped = |reason| Outcome::Dropped {
        event: event.into(),
        reason,
        at: now,
    };
    let Some(source) = ctx.read_source(&event.file_path) else {
        return dropped(DropReason::FileMissing);
    };
    if !fragment_present_at(&source, &fragment, event.paste_line) {
        return dropped(DropReason::Edited);
    }
    let Some(enclosing) = ctx
        .file_index(&event.file_path)
        .and_then(|idx| idx.method_at_line(event.paste_line))
    else {
        return dropped(DropReason::NoEnclosingMethod);
    };
    let settings = ctx.settings();
    let fragment = fragment.with_paste_site(PasteSite {
        file_path: event.file_path.clone(),
        line: event.paste_line,
        method_id: Some(enclosing.id.clone()),
    });

    let candidates: Vec<&MethodUnit> = match settings.search_scope {
        SearchScope::Project => ctx.all_methods(),
        SearchScope::File => ctx
            .file_index(&event.file_path)
            .map(|idx| idx.methods.iter().collect())
            .unwrap_or_default(),
    };
    let matches =
        find_duplicates(&fragment, candidates, settings.near_match_threshold).unwrap_or_default();
    let duplicates = matches.len() as u32;

    let report = gate_report(&fragment, enclosing, ctx)
        .with_duplicates(duplicates, settings.min_duplicate_methods);
    if report.triggered {
        Outcome::Recommended(Recommendation {
            event: event.into(),
            report,
            matches,
            action: "extract_method".to_string(),
            emitted_at: now,
        })
    } else {
        Outcome::NotTriggered {
            event: event.into(),
            report,
            matches,
            at: now,
        }
    }
}

fn gate_report(
    fragment: &Fragment,
    enclosing: &MethodUnit,
    ctx: &impl AnalysisContext,
) -> GateReport {
    let settings = ctx.settings();
    let Some(distribution) = ctx.distribution() else {
        return GateReport::not_computable("no indexed methods to derive thresholds from");
    };
    let vector = match fragment_vector(fragment, enclosing, &settings.keywords) {
        Ok(v) => v,
        Err(e) => return GateReport::not_computable(e.to_string()),
    };
    let thresholds = match distribution.thresholds(&settings.sensitivity) {
        Ok(t) => t,
        Err(e) => return GateReport::not_computable(e.to_string()),
    };
    evaluate_gate(&vector, &thresholds, settings.flags())
        .unwrap_or_else(|e| GateReport::not_computable(e.to_string()))
}
