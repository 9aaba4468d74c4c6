use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::clone_detect::DEFAULT_NEAR_MATCH_THRESHOLD;
use crate::metrics::{CategorySensitivity, KeywordSet, SubmetricId};

pub const DEFAULT_MIN_DUPLICATE_METHODS: u32 = 2;
pub const DEFAULT_DELAY_SECONDS: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubmetricFlags {
    pub enabled: bool,
    pub required: bool,
}

impl SubmetricFlags {
    /// Builds flags, turning `enabled` on whenever `required` is set.
    pub fn new(enabled: bool, required: bool) -> Self {
        Self {
            enabled: enabled || required,
            required,
        }
    }

    pub const OFF: SubmetricFlags = SubmetricFlags {
        enabled: false,
        required: false,
    };
}

impl Default for SubmetricFlags {
    fn default() -> Self {
        Self::new(true, false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchScope {
    File,
    #[default]
    Project,
}

/// The detection rule for one project.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub min_duplicate_methods: u32,
    pub delay_seconds: u64,
    pub sensitivity: CategorySensitivity,
    flags: BTreeMap<SubmetricId, SubmetricFlags>,
    pub keywords: KeywordSet,
    pub near_match_threshold: f64,
    pub search_scope: SearchScope,
    pub ignore: Vec<String>,
}

pub fn default_ignore_globs() -> Vec<String> {
    vec!["**/target/**".to_string(), "**/build/**".to_string()]
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            min_duplicate_methods: DEFAULT_MIN_DUPLICATE_METHODS,
            delay_seconds: DEFAULT_DELAY_SECONDS,
            sensitivity: CategorySensitivity::default(),
            flags: SubmetricId::ALL
                .iter()
                .map(|id| (*id, SubmetricFlags::default()))
                .collect(),
            keywords: KeywordSet::all(),
            near_match_threshold: DEFAULT_NEAR_MATCH_THRESHOLD,
            search_scope: SearchScope::Project,
            ignore: default_ignore_globs(),
        }
    }
}

impl Settings {
    pub fn flags(&self) -> &BTreeMap<SubmetricId, SubmetricFlags> {
        &self.flags
    }

    pub fn flag(&self, id: SubmetricId) -> SubmetricFlags {
        self.flags.get(&id).copied().unwrap_or(SubmetricFlags::OFF)
    }

    pub fn set_flags(&mut self, id: SubmetricId, flags: SubmetricFlags) {
        self.flags
            .insert(id, SubmetricFlags::new(flags.enabled, flags.required));
    }

    /// Disables every submetric; handy before enabling a chosen few.
    pub fn disable_all(&mut self) {
        for flags in self.flags.values_mut() {
            *flags = SubmetricFlags::OFF;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let s = Settings::default();
        assert_eq!(s.min_duplicate_methods, 2);
        assert_eq!(s.delay_seconds, 10);
        assert_eq!(s.near_match_threshold, 0.8);
        assert_eq!(s.search_scope, SearchScope::Project);
        assert_eq!(s.keywords.len(), 31);
        assert!(s.flags().values().all(|f| f.enabled && !f.required));
        assert_eq!(s.flags().len(), SubmetricId::ALL.len());
    }

    #[test]
    fn required_forces_enabled() {
        let mut s = Settings::default();
        s.disable_all();
        s.set_flags(
            SubmetricId::KeywordTotal,
            SubmetricFlags {
                enabled: false,
                required: true,
            },
        );
        assert_eq!(
            s.flag(SubmetricId::KeywordTotal),
            SubmetricFlags::new(true, true)
        );
        assert_eq!(s.flag(SubmetricId::KeywordDensity), SubmetricFlags::OFF);
    }
}
