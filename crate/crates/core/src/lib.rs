//! Headless engine that spots freshly pasted duplicate Java code, scores it
//! against per-project metric thresholds, and plans Extract Method
//! refactorings for the exact copies.

pub mod clone_detect;
pub mod decision;
pub mod metrics;
pub mod refactor;
pub mod source_model;
pub mod workspace;
