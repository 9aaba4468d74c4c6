use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use globset::{Glob, GlobSet, GlobSetBuilder};
use walkdir::WalkDir;

use crate::clone_detect::{find_duplicates, CloneMatch};
use crate::decision::{
    enqueue_paste, evaluate_paste, tick, AnalysisContext, DropReason, Outcome, PasteEvent,
    PasteQueue, Settings, Timestamp,
};
use crate::metrics::{method_vector, MetricVector, ProjectDistribution};
use crate::refactor::{
    analyze_extractability, apply_extraction, plan_extraction, ExtractionPlan, ExtractionResult,
    RefactorError,
};
use crate::source_model::{index_file, validate_fragment, FileIndex, MethodUnit, PasteSite};

use super::config::{load_settings, ConfigError, CONFIG_FILE_NAME};
use super::WorkspaceError;

#[derive(Debug, Clone, PartialEq)]
struct IndexedFile {
    index: FileIndex,
    vectors: Vec<MetricVector>,
}

/// One open project: its sources, index, distributions, and paste queue.
///
/// Sources are held in memory; [`ProjectSession::update_file`] changes the
/// snapshot without touching the disk.
#[derive(Debug, Clone)]
pub struct ProjectSession {
    root: PathBuf,
    settings: Settings,
    sources: BTreeMap<String, String>,
    indexed: BTreeMap<String, IndexedFile>,
    distribution: Option<ProjectDistribution>,
    queue: PasteQueue,
    warnings: Vec<String>,
}

fn ignore_set(globs: &[String]) -> Result<GlobSet, WorkspaceError> {
    let mut builder = GlobSetBuilder::new();
    for g in globs {
        let glob = Glob::new(g).map_err(|e| {
            WorkspaceError::Config(ConfigError::InvalidGlob {
                glob: g.clone(),
                message: e.to_string(),
            })
        })?;
        builder.add(glob);
    }
    builder.build().map_err(|e| {
        WorkspaceError::Config(ConfigError::InvalidGlob {
            glob: globs.join(", "),
            message: e.to_string(),
        })
    })
}

fn relative_path(root: &Path, path: &Path) -> Option<String> {
    let rel = path.strip_prefix(root).ok()?;
    let parts: Vec<String> = rel
        .components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect();
    Some(parts.join("/"))
}

/// Opens `root`, reading settings from `config` or the root's settings file.
pub fn open_project(root: &Path, config: Option<&Path>) -> Result<ProjectSession, WorkspaceError> {
    if !root.is_dir() {
        return Err(WorkspaceError::MissingRoot(root.to_path_buf()));
    }
    let root = root
        .canonicalize()
        .map_err(|_| WorkspaceError::MissingRoot(root.to_path_buf()))?;
    let config_path = config
        .map(Path::to_path_buf)
        .unwrap_or_else(|| root.join(CONFIG_FILE_NAME));
    let settings = if config.is_some() || config_path.is_file() {
        let text = fs::read_to_string(&config_path).map_err(|e| WorkspaceError::Io {
            path: config_path.clone(),
            message: e.to_string(),
        })?;
        load_settings(&text)?
    } else {
        Settings::default()
    };
    open_project_with(&root, settings)
}

/// Opens `root` with explicit settings, ignoring any settings file.
pub fn open_project_with(
    root: &Path,
    settings: Settings,
) -> Result<ProjectSession, WorkspaceError> {
    if !root.is_dir() {
        return Err(WorkspaceError::MissingRoot(root.to_path_buf()));
    }
    let root = root
        .canonicalize()
        .map_err(|_| WorkspaceError::MissingRoot(root.to_path_buf()))?;
    let ignore = ignore_set(&settings.ignore)?;
    let mut session = ProjectSession {
        root: root.clone(),
        settings,
        sources: BTreeMap::new(),
        indexed: BTreeMap::new(),
        distribution: None,
        queue: PasteQueue::default(),
        warnings: Vec::new(),
    };
    let walker = WalkDir::new(&root).sort_by_file_name().into_iter();
    for entry in walker {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                session
                    .warnings
                    .push(format!("cannot read directory entry: {e}"));
                continue;
            }
        };
        if !entry.file_type().is_file() || entry.path().extension().is_none_or(|ext| ext != "java")
        {
            continue;
        }
        let Some(rel) = relative_path(&root, entry.path()) else {
            continue;
        };
        if ignore.is_match(&rel) {
            continue;
        }
        match fs::read_to_string(entry.path()) {
            Ok(text) => session.load_file(&rel, text),
            Err(e) => session.warnings.push(format!("{rel}: {e}")),
        }
    }
    session.rebuild_distribution();
    Ok(session)
}

impl ProjectSession {
    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn settings(&self) -> &Settings {
        &self.settings
    }

    /// Replaces the settings and recomputes everything derived from them.
    pub fn set_settings(&mut self, settings: Settings) {
        let recompute = settings.keywords != self.settings.keywords;
        self.settings = settings;
        if recompute {
            let paths: Vec<String> = self.indexed.keys().cloned().collect();
            for path in paths {
                let text = self.sources[&path].clone();
                self.load_file(&path, text);
            }
            self.rebuild_distribution();
        }
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn file_paths(&self) -> impl Iterator<Item = &str> {
        self.sources.keys().map(String::as_str)
    }

    pub fn sources(&self) -> &BTreeMap<String, String> {
        &self.sources
    }

    pub fn indices(&self) -> impl Iterator<Item = (&str, &FileIndex)> {
        self.indexed.iter().map(|(p, f)| (p.as_str(), &f.index))
    }

    pub fn method_count(&self) -> usize {
        self.indexed.values().map(|f| f.index.methods.len()).sum()
    }

    pub fn queue(&self) -> &PasteQueue {
        &self.queue
    }

    pub fn next_due(&self) -> Option<Timestamp> {
        self.queue.next_due()
    }

    fn load_file(&mut self, path: &str, text: String) {
        match index_file(&text, path) {
            Ok(index) => {
                let vectors = index
                    .methods
                    .iter()
                    .map(|m| method_vector(m, &self.settings.keywords))
                    .collect();
                self.indexed
                    .insert(path.to_string(), IndexedFile { index, vectors });
            }
            Err(e) => {
                self.indexed.remove(path);
                self.warnings.push(format!("{path}: skipped, {e}"));
            }
        }
        self.sources.insert(path.to_string(), text);
    }

    fn rebuild_distribution(&mut self) {
        self.distribution =
            ProjectDistribution::from_vectors(self.indexed.values().flat_map(|f| &f.vectors)).ok();
    }

    /// Sets the in-memory text of one file (`None` deletes it) and refreshes
    /// the index and distributions. Pending pastes in a deleted file are
    /// dropped at their due time.
    pub fn update_file(&mut self, path: &str, content: Option<String>) {
        self.apply_change(path, content);
        self.rebuild_distribution();
    }

    fn apply_change(&mut self, path: &str, content: Option<String>) {
        match content {
            Some(text) => self.load_file(path, text),
            None => {
                self.sources.remove(path);
                self.indexed.remove(path);
            }
        }
    }

    /// Re-reads the given root-relative files from disk; missing files are
    /// treated as deleted. Files matching the ignore globs are left alone.
    pub fn refresh_index(&mut self, changed: &[String]) -> Result<(), WorkspaceError> {
        if changed.is_empty() {
            return Ok(());
        }
        let ignore = ignore_set(&self.settings.ignore)?;
        for path in changed {
            if ignore.is_match(path) || !path.ends_with(".java") {
                continue;
            }
            let content = fs::read_to_string(self.root.join(path)).ok();
            self.apply_change(path, content);
        }
        self.rebuild_distribution();
        Ok(())
    }

    /// Queues a paste; the caller is responsible for routing by root.
    pub fn enqueue(&mut self, event: PasteEvent) -> Result<Timestamp, DropReason> {
        let mut queue = std::mem::take(&mut self.queue);
        let result = enqueue_paste(&mut queue, event, self);
        self.queue = queue;
        result
    }

    /// Evaluates every queued paste due at `now`.
    pub fn tick(&mut self, now: Timestamp) -> Vec<Outcome> {
        let mut queue = std::mem::take(&mut self.queue);
        let out = tick(&mut queue, now, self);
        self.queue = queue;
        out
    }

    /// Evaluates a fragment at `file:line` as if its delay had elapsed.
    pub fn check(&self, fragment_text: &str, file: &str, line: u32, now: Timestamp) -> Outcome {
        let event = PasteEvent {
            project_root: self.root.clone(),
            file_path: file.to_string(),
            paste_line: line,
            fragment_text: fragment_text.to_string(),
            timestamp: now,
        };
        evaluate_paste(&event, self, now)
    }

    /// Plans and applies extraction of the fragment at `file:line` into a
    /// method called `name`, leaving the session unchanged.
    pub fn extract(
        &self,
        fragment_text: &str,
        file: &str,
        line: u32,
        name: &str,
    ) -> Result<(ExtractionPlan, ExtractionResult), RefactorError> {
        let fragment = validate_fragment(fragment_text);
        if !fragment.valid {
            return Err(RefactorError::InvalidFragment);
        }
        let source = self
            .sources
            .get(file)
            .ok_or_else(|| RefactorError::MissingSource(file.to_string()))?;
        let host = self
            .file_index(file)
            .and_then(|idx| idx.method_at_line(line))
            .ok_or_else(|| RefactorError::FragmentNotFound(format!("{file}:{line}")))?;
        let fragment = fragment.with_paste_site(PasteSite {
            file_path: file.to_string(),
            line,
            method_id: Some(host.id.clone()),
        });
        let summary = analyze_extractability(&fragment, host)?;
        let methods = self.all_methods();
        let matches: Vec<CloneMatch> = find_duplicates(
            &fragment,
            methods.iter().copied(),
            self.settings.near_match_threshold,
        )
        .map_err(|_| RefactorError::InvalidFragment)?;
        let pairs: Vec<(&MethodUnit, &CloneMatch)> = matches
            .iter()
            .filter_map(|m| {
                let unit = methods.iter().find(|u| u.id == m.method_id)?;
                Some((*unit, m))
            })
            .collect();
        let plan = plan_extraction(&summary, name, host, source, &pairs)?;
        let result = apply_extraction(&plan, &self.sources)?;
        Ok((plan, result))
    }

    /// Writes the files an extraction changed and re-indexes them.
    pub fn write_extraction(
        &mut self,
        result: &ExtractionResult,
    ) -> Result<Vec<String>, WorkspaceError> {
        let changed: Vec<String> = result
            .sources
            .iter()
            .filter(|(p, text)| self.sources.get(*p) != Some(*text))
            .map(|(p, _)| p.clone())
            .collect();
        for path in &changed {
            let full = self.root.join(path);
            fs::write(&full, &result.sources[path]).map_err(|e| WorkspaceError::Io {
                path: full.clone(),
                message: e.to_string(),
            })?;
        }
        self.refresh_index(&changed)?;
        Ok(changed)
    }
}

impl AnalysisContext for ProjectSession {
    fn settings(&self) -> &Settings {
        &self.settings
    }

    fn read_source(&self, file_path: &str) -> Option<String> {
        self.sources.get(file_path).cloned()
    }

    fn file_index(&self, file_path: &str) -> Option<&FileIndex> {
        self.indexed.get(file_path).map(|f| &f.index)
    }

    fn all_methods(&self) -> Vec<&MethodUnit> {
        let mut all: Vec<&MethodUnit> = self
            .indexed
            .values()
            .flat_map(|f| &f.index.methods)
            .collect();
        all.sort_by(|a, b| a.id.cmp(&b.id));
        all
    }

    fn distribution(&self) -> Option<&ProjectDistribution> {
        self.distribution.as_ref()
    }
}
