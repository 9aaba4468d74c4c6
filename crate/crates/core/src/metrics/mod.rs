//! Keyword, coupling, complexity and size submetrics, their per-project
//! distributions, and percentile thresholds.

mod calculators;
mod distribution;
mod submetric;

use thiserror::Error;

use crate::source_model::EmptyScope;

pub use calculators::{
    complexity_metrics, count_connectivity, coupling_metrics, fragment_vector, keyword_metrics,
    method_vector, size_metrics, ComplexityMetrics, ConnectivityCounts, CouplingMetrics,
    KeywordMetrics, SizeMetrics,
};
pub use distribution::{
    build_distributions, check_sensitivity, percentile_threshold, CategorySensitivity,
    ProjectDistribution, SampleSummary, DEFAULT_SENSITIVITY,
};
pub use submetric::{
    Category, Connectivity, KeywordSet, MetricVector, SizeScope, SubmetricId, KEYWORD_CATALOGUE,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("fragment is not a valid statement sequence")]
    InvalidFragment,
    #[error("no enclosing method or class context")]
    MissingContext,
    #[error(transparent)]
    EmptyScope(#[from] EmptyScope),
    #[error("no indexed methods to build a distribution from")]
    EmptyDistribution,
    #[error("sensitivity {0} is outside 1..=100")]
    InvalidSensitivity(u32),
    #[error("unknown submetric `{0}`")]
    UnknownSubmetric(String),
    #[error("unknown metric category `{0}`")]
    UnknownCategory(String),
    #[error("`{0}` is not a configurable keyword")]
    UnknownKeyword(String),
}
