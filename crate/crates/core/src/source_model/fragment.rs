use serde::{Deserialize, Serialize};

use super::index::MethodId;
use super::lexer::{normalize_newlines, tokenize, Token};
use super::nesting::LineScope;
use super::syntax::{delimiters_balanced, parse_statements};

/// Where a fragment was pasted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PasteSite {
    /// Path relative to the project root, `/`-separated.
    pub file_path: String,
    /// Line holding the fragment's first token.
    pub line: u32,
    pub method_id: Option<MethodId>,
}

/// A pasted code segment together with its validity verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fragment {
    pub raw_text: String,
    /// Tokens of the trimmed text; line 1 is the first non-blank line.
    pub tokens: Vec<Token>,
    pub line_count: u32,
    pub symbol_count: u32,
    pub valid: bool,
    pub invalid_reason: Option<String>,
    pub paste_site: Option<PasteSite>,
    trimmed: String,
}

impl Fragment {
    /// The raw text without leading and trailing blank lines, LF-normalized.
    pub fn trimmed_text(&self) -> &str {
        &self.trimmed
    }

    pub fn with_paste_site(mut self, site: PasteSite) -> Self {
        self.paste_site = Some(site);
        self
    }

    pub fn token_texts(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }
}

impl LineScope for Fragment {
    fn scope_tokens(&self) -> &[Token] {
        &self.tokens
    }

    fn line_range(&self) -> Option<(u32, u32)> {
        (self.line_count > 0).then_some((1, self.line_count))
    }
}

/// Drops whitespace-only lines at both ends.
pub fn trim_blank_lines(text: &str) -> String {
    let text = normalize_newlines(text);
    let lines: Vec<&str> = text.split('\n').collect();
    let first = lines.iter().position(|l| !l.trim().is_empty());
    let last = lines.iter().rposition(|l| !l.trim().is_empty());
    match (first, last) {
        (Some(a), Some(b)) => lines[a..=b].join("\n"),
        _ => String::new(),
    }
}

pub fn count_symbols(text: &str) -> u32 {
    text.chars().filter(|c| !c.is_whitespace()).count() as u32
}

/// Checks whether `text` is a well-formed sequence of Java block statements.
///
/// Invalidity is reported through `valid` and `invalid_reason`; this never
/// fails.
pub fn validate_fragment(text: &str) -> Fragment {
    let trimmed = trim_blank_lines(text);
    let line_count = if trimmed.is_empty() {
        0
    } else {
        trimmed.split('\n').count() as u32
    };
    let mut fragment = Fragment {
        raw_text: text.to_string(),
        tokens: Vec::new(),
        line_count,
        symbol_count: count_symbols(text),
        valid: false,
        invalid_reason: None,
        paste_site: None,
        trimmed,
    };
    match tokenize(&fragment.trimmed) {
        Err(e) => fragment.invalid_reason = Some(e.to_string()),
        Ok(tokens) => {
            fragment.tokens = tokens;
            fragment.invalid_reason = if fragment.tokens.is_empty() {
                Some("fragment contains no code".to_string())
            } else if !delimiters_balanced(&fragment.tokens) {
                Some("unbalanced delimiters".to_string())
            } else {
                parse_statements(&fragment.tokens)
                    .err()
                    .map(|e| e.to_string())
            };
            fragment.valid = fragment.invalid_reason.is_none();
        }
    }
    fragment
}
