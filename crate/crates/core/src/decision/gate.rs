use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::metrics::{MetricVector, SubmetricId};

use super::settings::SubmetricFlags;
use super::DecisionError;

/// The rule every report applies, spelled out for readers of its output.
pub const GATE_RULE: &str = "triggered = duplicates >= minimum AND every required submetric passes \
AND (some enabled optional submetric passes OR none is enabled); a submetric passes when value >= threshold";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubmetricResult {
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
    pub required: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GateReport {
    pub rule: String,
    pub submetrics: BTreeMap<SubmetricId, SubmetricResult>,
    pub required_all_passed: bool,
    pub any_enabled_passed: bool,
    /// Outcome of the metric rule alone, before the duplicate count.
    pub metrics_passed: bool,
    pub duplicate_method_count: u32,
    pub min_duplicate_methods: u32,
    pub triggered: bool,
    pub reason: Option<String>,
}

impl GateReport {
    /// A report for a rule that could not be evaluated.
    pub fn not_computable(reason: impl Into<String>) -> Self {
        Self {
            rule: GATE_RULE.to_string(),
            submetrics: BTreeMap::new(),
            required_all_passed: false,
            any_enabled_passed: false,
            metrics_passed: false,
            duplicate_method_count: 0,
            min_duplicate_methods: 0,
            triggered: false,
            reason: Some(reason.into()),
        }
    }

    /// Folds the duplicate count into the verdict.
    pub fn with_duplicates(mut self, count: u32, minimum: u32) -> Self {
        self.duplicate_method_count = count;
        self.min_duplicate_methods = minimum;
        self.triggered = self.metrics_passed && count >= minimum;
        if self.reason.is_none() && !self.triggered {
            self.reason = Some(if count < minimum {
                format!("{count} duplicate method(s), {minimum} required")
            } else {
                "metric rule not satisfied".to_string()
            });
        }
        self
    }
}

/// Applies the enabled/required rule to `vector` against `thresholds`.
///
/// The returned report carries no duplicate count yet; see
/// [`GateReport::with_duplicates`].
pub fn evaluate_gate(
    vector: &MetricVector,
    thresholds: &BTreeMap<SubmetricId, f64>,
    flags: &BTreeMap<SubmetricId, SubmetricFlags>,
) -> Result<GateReport, DecisionError> {
    let mut submetrics = BTreeMap::new();
    for (&id, f) in flags.iter().filter(|(_, f)| f.enabled || f.required) {
        let threshold = *thresholds
            .get(&id)
            .ok_or(DecisionError::NotComputable(id))?;
        let value = vector.get(id).ok_or(DecisionError::NotComputable(id))?;
        submetrics.insert(
            id,
            SubmetricResult {
                value,
                threshold,
                passed: value >= threshold,
                required: f.required,
            },
        );
    }
    let required_all_passed = submetrics.values().filter(|r| r.required).all(|r| r.passed);
    let mut optional = submetrics.values().filter(|r| !r.required).peekable();
    let has_optional = optional.peek().is_some();
    let any_enabled_passed = optional.any(|r| r.passed);
    let metrics_passed =
        !submetrics.is_empty() && required_all_passed && (any_enabled_passed || !has_optional);
    Ok(GateReport {
        rule: GATE_RULE.to_string(),
        reason: submetrics
            .is_empty()
            .then(|| "no submetric is enabled".to_string()),
        submetrics,
        required_all_passed,
        any_enabled_passed,
        metrics_passed,
        duplicate_method_count: 0,
        min_duplicate_methods: 0,
        triggered: metrics_passed,
    })
}
