//! Deterministic replay of paste and edit events against project sessions.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::thread;

use anticopypaster_core::decision::{EventRef, Outcome, PasteEvent, Timestamp};
use anticopypaster_core::workspace::{
    load_settings, open_project, open_project_with, ProjectSession,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub projects: Vec<ProjectDecl>,
    #[serde(default)]
    pub events: Vec<ScenarioEvent>,
    /// Final clock value; without it the run ends once every queue drains.
    #[serde(default)]
    pub until: Option<Timestamp>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectDecl {
    pub root: String,
    #[serde(default)]
    pub config: Option<ConfigRef>,
}

/// A settings file path or the settings object itself.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ConfigRef {
    Path(String),
    Inline(serde_json::Map<String, serde_json::Value>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioEvent {
    Paste {
        #[serde(default)]
        project: Option<String>,
        file: String,
        line: u32,
        #[serde(default)]
        fragment: Option<String>,
        #[serde(default, rename = "fragmentFile")]
        fragment_file: Option<String>,
        t: Timestamp,
    },
    Edit {
        #[serde(default)]
        project: Option<String>,
        file: String,
        #[serde(default)]
        content: Option<String>,
        #[serde(default, rename = "contentFile")]
        content_file: Option<String>,
        #[serde(default)]
        delete: bool,
        t: Timestamp,
    },
}

impl ScenarioEvent {
    fn t(&self) -> Timestamp {
        match self {
            ScenarioEvent::Paste { t, .. } | ScenarioEvent::Edit { t, .. } => *t,
        }
    }

    fn project(&self) -> Option<&str> {
        match self {
            ScenarioEvent::Paste { project, .. } | ScenarioEvent::Edit { project, .. } => {
                project.as_deref()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioError(pub String);

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ScenarioError {}

fn err(msg: impl Into<String>) -> ScenarioError {
    ScenarioError(msg.into())
}

#[derive(Debug, Clone, PartialEq)]
enum Action {
    Paste(PasteEvent),
    Edit {
        file: String,
        content: Option<String>,
    },
}

/// One project of a loaded scenario with its events resolved.
#[derive(Debug, Clone)]
pub struct ProjectRun {
    pub name: String,
    session: ProjectSession,
    actions: Vec<(Timestamp, Action)>,
    cursor: usize,
    log: Vec<Outcome>,
}

impl ProjectRun {
    fn next_time(&self, until: Option<Timestamp>) -> Option<Timestamp> {
        let next_event = self.actions.get(self.cursor).map(|(t, _)| *t);
        let next = match (next_event, self.session.next_due()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }?;
        match until {
            Some(u) if next > u => None,
            _ => Some(next),
        }
    }

    fn step(&mut self, now: Timestamp) {
        while let Some((t, action)) = self.actions.get(self.cursor) {
            if *t > now {
                break;
            }
            match action.clone() {
                Action::Paste(event) => {
                    let event_ref = EventRef::from(&event);
                    if let Err(reason) = self.session.enqueue(event) {
                        self.log.push(Outcome::Dropped {
                            event: event_ref,
                            reason,
                            at: now,
                        });
                    }
                }
                Action::Edit { file, content } => self.session.update_file(&file, content),
            }
            self.cursor += 1;
        }
        self.log.extend(self.session.tick(now));
    }

    fn run_to_end(&mut self, until: Option<Timestamp>) {
        while let Some(t) = self.next_time(until) {
            self.step(t);
        }
    }

    fn finish(self) -> ProjectLog {
        ProjectLog {
            project: self.name,
            recommendations: self
                .log
                .iter()
                .filter(|o| o.recommendation().is_some())
                .count(),
            pending: self.session.queue().len(),
            log: self.log,
        }
    }
}

/// Everything one project produced during a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProjectLog {
    pub project: String,
    pub log: Vec<Outcome>,
    pub recommendations: usize,
    /// Pastes still queued when the clock stopped.
    pub pending: usize,
}

/// How independent projects are driven.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    /// Each project runs to completion before the next starts.
    Sequential,
    /// One thread per project.
    Threaded,
    /// A shared clock steps every project in reverse declaration order.
    Interleaved,
}

#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub runs: Vec<ProjectRun>,
    pub until: Option<Timestamp>,
}

fn read_relative(base: &Path, path: &str) -> Result<String, ScenarioError> {
    let full = base.join(path);
    fs::read_to_string(&full).map_err(|e| err(format!("{}: {e}", full.display())))
}

/// Parses a scenario file, opening every declared project. Relative paths
/// are resolved against the scenario file's directory.
pub fn load_scenario(path: &Path) -> Result<LoadedScenario, ScenarioError> {
    let text = fs::read_to_string(path).map_err(|e| err(format!("{}: {e}", path.display())))?;
    let scenario: Scenario =
        serde_json::from_str(&text).map_err(|e| err(format!("{}: {e}", path.display())))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    prepare(scenario, &base)
}

/// Opens the projects of an already parsed scenario.
pub fn prepare(scenario: Scenario, base: &Path) -> Result<LoadedScenario, ScenarioError> {
    if scenario.projects.is_empty() {
        return Err(err("scenario declares no project"));
    }
    let mut runs = Vec::new();
    let mut by_name: BTreeMap<String, usize> = BTreeMap::new();
    for decl in &scenario.projects {
        if by_name.contains_key(&decl.root) {
            return Err(err(format!("project `{}` declared twice", decl.root)));
        }
        let root: PathBuf = base.join(&decl.root);
        let session = match &decl.config {
            None => open_project(&root, None),
            Some(ConfigRef::Path(p)) => open_project(&root, Some(&base.join(p))),
            Some(ConfigRef::Inline(map)) => {
                let text = serde_json::to_string(map).expect("json object serializes");
                let settings = load_settings(&text)
                    .map_err(|e| err(format!("project `{}`: {e}", decl.root)))?;
                open_project_with(&root, settings)
            }
        }
        .map_err(|e| err(format!("project `{}`: {e}", decl.root)))?;
        by_name.insert(decl.root.clone(), runs.len());
        runs.push(ProjectRun {
            name: decl.root.clone(),
            session,
            actions: Vec::new(),
            cursor: 0,
            log: Vec::new(),
        });
    }

    let mut last = 0;
    for (i, event) in scenario.events.iter().enumerate() {
        let t = event.t();
        if t < last {
            return Err(err(format!("event {i}: time {t} is earlier than {last}")));
        }
        last = t;
        let idx = match event.project() {
            Some(name) => *by_name
                .get(name)
                .ok_or_else(|| err(format!("event {i}: undeclared project `{name}`")))?,
            None if runs.len() == 1 => 0,
            None => return Err(err(format!("event {i}: `project` is required"))),
        };
        let run = &mut runs[idx];
        let action = match event {
            ScenarioEvent::Paste {
                file,
                line,
                fragment,
                fragment_file,
                ..
            } => {
                let fragment_text = match (fragment, fragment_file) {
                    (Some(text), None) => text.clone(),
                    (None, Some(p)) => read_relative(base, p)?,
                    _ => {
                        return Err(err(format!(
                            "event {i}: give exactly one of `fragment` and `fragmentFile`"
                        )))
                    }
                };
                Action::Paste(PasteEvent {
                    project_root: run.session.root().to_path_buf(),
                    file_path: file.clone(),
                    paste_line: *line,
                    fragment_text,
                    timestamp: t,
                })
            }
            ScenarioEvent::Edit {
                file,
                content,
                content_file,
                delete,
                ..
            } => {
                let content = match (content, content_file, delete) {
                    (Some(text), None, false) => Some(text.clone()),
                    (None, Some(p), false) => Some(read_relative(base, p)?),
                    (None, None, true) => None,
                    _ => {
                        return Err(err(format!(
                            "event {i}: give exactly one of `content`, `contentFile`, and `delete`"
                        )))
                    }
                };
                Action::Edit {
                    file: file.clone(),
                    content,
                }
            }
        };
        run.actions.push((t, action));
    }
    Ok(LoadedScenario {
        runs,
        until: scenario.until,
    })
}

/// Replays every project and returns their logs in declaration order.
pub fn simulate(loaded: LoadedScenario, execution: Execution) -> Vec<ProjectLog> {
    let LoadedScenario { mut runs, until } = loaded;
    match execution {
        Execution::Sequential => {
            for run in &mut runs {
                run.run_to_end(until);
            }
        }
        Execution::Threaded => thread::scope(|scope| {
            for run in &mut runs {
                scope.spawn(move || run.run_to_end(until));
            }
        }),
        Execution::Interleaved => {
            while let Some(now) = runs.iter().filter_map(|r| r.next_time(until)).min() {
                for run in runs.iter_mut().rev() {
                    if run.next_time(until) == Some(now) {
                        run.step(now);
                    }
                }
            }
        }
    }
    runs.into_iter().map(ProjectRun::finish).collect()
}
