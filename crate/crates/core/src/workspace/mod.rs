//! Per-project sessions and the workspace that routes events between them.

mod config;
mod session;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::decision::PasteEvent;

pub use config::{load_settings, save_settings, ConfigError, CONFIG_FILE_NAME};
pub use session::{open_project, open_project_with, ProjectSession};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorkspaceError {
    #[error("project root `{}` does not exist or is not a directory", .0.display())]
    MissingRoot(PathBuf),
    #[error("no open project at `{}`", .0.display())]
    UnknownProject(PathBuf),
    #[error("project `{}` is already open", .0.display())]
    AlreadyOpen(PathBuf),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
}

fn canonical(path: &Path) -> PathBuf {
    path.canonicalize().unwrap_or_else(|_| path.to_path_buf())
}

/// Open sessions keyed by canonical root.
#[derive(Debug, Default)]
pub struct Workspace {
    sessions: BTreeMap<PathBuf, ProjectSession>,
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an already opened session.
    pub fn insert(
        &mut self,
        session: ProjectSession,
    ) -> Result<&mut ProjectSession, WorkspaceError> {
        let root = session.root().to_path_buf();
        if self.sessions.contains_key(&root) {
            return Err(WorkspaceError::AlreadyOpen(root));
        }
        Ok(self.sessions.entry(root).or_insert(session))
    }

    pub fn open(
        &mut self,
        root: &Path,
        config: Option<&Path>,
    ) -> Result<&mut ProjectSession, WorkspaceError> {
        let session = open_project(root, config)?;
        self.insert(session)
    }

    pub fn close(&mut self, root: &Path) -> Option<ProjectSession> {
        self.sessions.remove(&canonical(root))
    }

    pub fn session(&self, root: &Path) -> Option<&ProjectSession> {
        self.sessions.get(&canonical(root))
    }

    pub fn session_mut(&mut self, root: &Path) -> Option<&mut ProjectSession> {
        self.sessions.get_mut(&canonical(root))
    }

    pub fn sessions(&self) -> impl Iterator<Item = &ProjectSession> {
        self.sessions.values()
    }

    pub fn sessions_mut(&mut self) -> impl Iterator<Item = &mut ProjectSession> {
        self.sessions.values_mut()
    }

    /// The session owning `event`'s project root.
    pub fn route_event(&self, event: &PasteEvent) -> Result<&ProjectSession, WorkspaceError> {
        self.session(&event.project_root)
            .ok_or_else(|| WorkspaceError::UnknownProject(event.project_root.clone()))
    }

    pub fn route_event_mut(
        &mut self,
        event: &PasteEvent,
    ) -> Result<&mut ProjectSession, WorkspaceError> {
        let root = canonical(&event.project_root);
        self.sessions
            .get_mut(&root)
            .ok_or_else(|| WorkspaceError::UnknownProject(event.project_root.clone()))
    }
}
