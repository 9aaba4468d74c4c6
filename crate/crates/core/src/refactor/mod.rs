//! Extract Method: feasibility, planning, rewriting, and an inlining check.

mod apply;
mod dataflow;
mod plan;
mod verify;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::source_model::IndexError;

pub use apply::{apply_extraction, ExtractionResult};
pub use dataflow::{analyze_extractability, locate_fragment, summarize_dataflow, DataFlowSummary};
pub use plan::{is_java_identifier, plan_extraction, ExtractionPlan, SkippedSite, TargetSite};
pub use verify::{verify_by_inlining, SiteVerdict, Verification};

/// A local variable crossing the fragment boundary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Variable {
    pub name: String,
    pub type_text: String,
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.type_text, self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpKind {
    Return,
    Break,
    Continue,
}

/// A jump that would leave the extracted method's body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FlowViolation {
    pub kind: JumpKind,
    pub line: u32,
    pub label: Option<String>,
}

impl fmt::Display for FlowViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word = match self.kind {
            JumpKind::Return => "return",
            JumpKind::Break => "break",
            JumpKind::Continue => "continue",
        };
        match &self.label {
            Some(l) => write!(f, "`{word} {l}` on line {}", self.line),
            None => write!(f, "`{word}` on line {}", self.line),
        }
    }
}

fn join_display<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RefactorError {
    #[error("fragment is not valid Java")]
    InvalidFragment,
    #[error("fragment does not occur as a statement sequence in method `{0}`")]
    FragmentNotFound(String),
    #[error("fragment shares its first or last line with other code")]
    UnalignedFragment,
    #[error("fragment defines {} values used afterwards: {}", .0.len(), .0.join(", "))]
    TooManyOutputs(Vec<String>),
    #[error("control flow leaves the fragment: {}", join_display(.0))]
    IllegalFlow(Vec<FlowViolation>),
    #[error("cannot determine the declared type of `{0}`")]
    UnresolvedType(String),
    #[error("`{0}` is not a valid Java identifier")]
    InvalidIdentifier(String),
    #[error("class already declares a method named `{0}`")]
    NameCollision(String),
    #[error("{file}:{line}: site no longer matches the fragment")]
    StaleSite { file: String, line: u32 },
    #[error("no source text for `{0}`")]
    MissingSource(String),
    #[error(transparent)]
    Index(#[from] IndexError),
}
