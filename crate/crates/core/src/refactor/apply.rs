use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use similar::TextDiff;

use crate::source_model::{normalize_newlines, tokenize};

use super::plan::{line_tokens, texts_equal, ExtractionPlan};
use super::RefactorError;

/// Rewritten sources keyed by path plus the unified diff of the change.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExtractionResult {
    pub sources: BTreeMap<String, String>,
    pub diff: String,
    pub replaced_sites: usize,
}

/// Unified diff of one file with three lines of context.
pub fn unified_diff(path: &str, before: &str, after: &str) -> String {
    TextDiff::from_lines(before, after)
        .unified_diff()
        .context_radius(3)
        .header(&format!("a/{path}"), &format!("b/{path}"))
        .to_string()
}

/// Replaces every target site with a call and inserts the new method.
///
/// Nothing is rewritten unless every site still holds the fragment.
pub fn apply_extraction(
    plan: &ExtractionPlan,
    sources: &BTreeMap<String, String>,
) -> Result<ExtractionResult, RefactorError> {
    let original = sources
        .get(&plan.file_path)
        .ok_or_else(|| RefactorError::MissingSource(plan.file_path.clone()))?;
    let before = normalize_newlines(original);
    let tokens = tokenize(&before).map_err(|e| RefactorError::Index(e.into()))?;
    for site in &plan.target_sites {
        if !texts_equal(
            line_tokens(&tokens, site.start_line, site.end_line),
            &plan.fragment_tokens,
        ) {
            return Err(RefactorError::StaleSite {
                file: plan.file_path.clone(),
                line: site.start_line,
            });
        }
    }

    let mut lines: Vec<String> = before.lines().map(str::to_string).collect();
    if plan.insertion_line as usize > lines.len() {
        return Err(RefactorError::StaleSite {
            file: plan.file_path.clone(),
            line: plan.insertion_line,
        });
    }

    // (position, lines removed, replacement), applied bottom-up
    let mut edits: Vec<(usize, usize, Vec<String>)> = plan
        .target_sites
        .iter()
        .map(|site| {
            let first = &lines[site.start_line as usize - 1];
            let indent = &first[..first.len() - first.trim_start().len()];
            (
                site.start_line as usize - 1,
                (site.end_line - site.start_line + 1) as usize,
                vec![format!("{indent}{}", plan.call_template())],
            )
        })
        .collect();
    let mut inserted = vec![String::new()];
    inserted.extend(plan.render_method());
    edits.push((plan.insertion_line as usize, 0, inserted));
    edits.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.cmp(&a.1)));
    for (at, remove, replacement) in edits {
        lines.splice(at..at + remove, replacement);
    }

    let mut after = lines.join("\n");
    if before.ends_with('\n') {
        after.push('\n');
    }
    let diff = unified_diff(&plan.file_path, &before, &after);
    let mut out = sources.clone();
    out.insert(plan.file_path.clone(), after);
    Ok(ExtractionResult {
        sources: out,
        diff,
        replaced_sites: plan.target_sites.len(),
    })
}
