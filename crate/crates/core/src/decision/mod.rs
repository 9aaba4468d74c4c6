//! The just-in-time gate: paste queueing, delay handling, and the
//! enabled/required metric rule.

mod gate;
mod queue;
mod settings;

use thiserror::Error;

use crate::metrics::SubmetricId;

pub use gate::{evaluate_gate, GateReport, SubmetricResult, GATE_RULE};
pub use queue::{
    enqueue_paste, evaluate_paste, fragment_present_at, tick, AnalysisContext, DropReason,
    EventRef, Outcome, PasteEvent, PasteQueue, Recommendation, Timestamp,
};
pub use settings::{
    default_ignore_globs, SearchScope, Settings, SubmetricFlags, DEFAULT_DELAY_SECONDS,
    DEFAULT_MIN_DUPLICATE_METHODS,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecisionError {
    #[error("no threshold or value for enabled submetric `{0}`")]
    NotComputable(SubmetricId),
}
