use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decision::{SearchScope, Settings, SubmetricFlags};
use crate::metrics::{check_sensitivity, Category, KeywordSet, MetricError, SubmetricId};

/// Settings file looked up in every project root.
pub const CONFIG_FILE_NAME: &str = ".anticopypaster.json";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("malformed settings: {0}")]
    ConfigSyntax(String),
    #[error("sensitivity for `{category}` must be within 1..=100, got {value}")]
    InvalidSensitivity { category: String, value: u32 },
    #[error("unknown submetric `{0}`")]
    UnknownSubmetric(String),
    #[error("unknown keyword `{0}`")]
    UnknownKeyword(String),
    #[error("near-match threshold must be within (0, 1], got {0}")]
    InvalidThreshold(f64),
    #[error("invalid ignore glob `{glob}`: {message}")]
    InvalidGlob { glob: String, message: String },
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SensitivityFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    keyword: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coupling: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    complexity: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    size: Option<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlagsFile {
    #[serde(default = "yes")]
    enabled: bool,
    #[serde(default)]
    required: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    min_duplicate_methods: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delay_seconds: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    near_match_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    search_scope: Option<SearchScope>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sensitivity: Option<SensitivityFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    submetrics: Option<BTreeMap<String, FlagsFile>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    keywords: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ignore: Option<Vec<String>>,
}

/// Parses a settings file; absent keys keep their defaults.
pub fn load_settings(text: &str) -> Result<Settings, ConfigError> {
    let file: ConfigFile =
        serde_json::from_str(text).map_err(|e| ConfigError::ConfigSyntax(e.to_string()))?;
    let mut settings = Settings::default();
    if let Some(n) = file.min_duplicate_methods {
        settings.min_duplicate_methods = n;
    }
    if let Some(d) = file.delay_seconds {
        settings.delay_seconds = d;
    }
    if let Some(t) = file.near_match_threshold {
        if !(t > 0.0 && t <= 1.0) {
            return Err(ConfigError::InvalidThreshold(t));
        }
        settings.near_match_threshold = t;
    }
    if let Some(scope) = file.search_scope {
        settings.search_scope = scope;
    }
    if let Some(s) = file.sensitivity {
        let entries = [
            (Category::Keyword, s.keyword),
            (Category::Coupling, s.coupling),
            (Category::Complexity, s.complexity),
            (Category::Size, s.size),
        ];
        for (category, value) in entries {
            let Some(value) = value else { continue };
            check_sensitivity(value).map_err(|_| ConfigError::InvalidSensitivity {
                category: category.name().to_string(),
                value,
            })?;
            settings
                .sensitivity
                .set(category, value)
                .expect("checked above");
        }
    }
    if let Some(submetrics) = file.submetrics {
        for (name, flags) in submetrics {
            let id: SubmetricId = name
                .parse()
                .map_err(|_| ConfigError::UnknownSubmetric(name.clone()))?;
            settings.set_flags(id, SubmetricFlags::new(flags.enabled, flags.required));
        }
    }
    if let Some(words) = file.keywords {
        settings.keywords = KeywordSet::from_names(&words).map_err(|e| match e {
            MetricError::UnknownKeyword(w) => ConfigError::UnknownKeyword(w),
            other => ConfigError::ConfigSyntax(other.to_string()),
        })?;
    }
    if let Some(globs) = file.ignore {
        for glob in &globs {
            globset::Glob::new(glob).map_err(|e| ConfigError::InvalidGlob {
                glob: glob.clone(),
                message: e.to_string(),
            })?;
        }
        settings.ignore = globs;
    }
    Ok(settings)
}

/// Renders settings in the file format, every key spelled out.
pub fn save_settings(settings: &Settings) -> String {
    let s = settings.sensitivity;
    let file = ConfigFile {
        min_duplicate_methods: Some(settings.min_duplicate_methods),
        delay_seconds: Some(settings.delay_seconds),
        near_match_threshold: Some(settings.near_match_threshold),
        search_scope: Some(settings.search_scope),
        sensitivity: Some(SensitivityFile {
            keyword: Some(s.keyword),
            coupling: Some(s.coupling),
            complexity: Some(s.complexity),
            size: Some(s.size),
        }),
        submetrics: Some(
            settings
                .flags()
                .iter()
                .map(|(id, f)| {
                    (
                        id.name().to_string(),
                        FlagsFile {
                            enabled: f.enabled,
                            required: f.required,
                        },
                    )
                })
                .collect(),
        ),
        keywords: Some(settings.keywords.iter().map(str::to_string).collect()),
        ignore: Some(settings.ignore.clone()),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("settings serialize");
    text.push('\n');
    text
}
