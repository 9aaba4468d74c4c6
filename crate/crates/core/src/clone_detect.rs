//! Duplicate detection for pasted fragments.
//!
//! Two tiers: an exact (type-1) test on the normalized token sequence, and a
//! bag-of-tokens overlap ratio for near copies. Exact hits are the only ones
//! later turned into call sites.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::source_model::{Fragment, MethodId, MethodUnit, Token, TokenKind};

pub const DEFAULT_NEAR_MATCH_THRESHOLD: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CloneError {
    #[error("similarity is undefined for two empty token bags")]
    UndefinedSimilarity,
    #[error("fragment is not a valid statement sequence")]
    InvalidFragment,
    #[error("near-match threshold {0} is outside (0, 1]")]
    InvalidThreshold(f64),
}

/// Order-insensitive multiset of token texts, punctuation excluded.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenBag {
    counts: BTreeMap<String, u32>,
    total: u32,
}

impl TokenBag {
    pub fn total_count(&self) -> u32 {
        self.total
    }

    pub fn multiplicity(&self, text: &str) -> u32 {
        self.counts.get(text).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Size of the multiset intersection.
    pub fn shared_count(&self, other: &TokenBag) -> u32 {
        let (small, large) = if self.counts.len() <= other.counts.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .counts
            .iter()
            .map(|(text, &n)| n.min(large.multiplicity(text)))
            .sum()
    }
}

pub fn normalize_bag(tokens: &[Token]) -> TokenBag {
    let mut bag = TokenBag::default();
    for t in tokens.iter().filter(|t| t.kind != TokenKind::Punctuation) {
        *bag.counts.entry(t.text.clone()).or_insert(0) += 1;
        bag.total += 1;
    }
    bag
}

/// `|a ∩ b| / max(|a|, |b|)` over multisets.
pub fn overlap_similarity(a: &TokenBag, b: &TokenBag) -> Result<f64, CloneError> {
    let denom = a.total.max(b.total);
    if denom == 0 {
        return Err(CloneError::UndefinedSimilarity);
    }
    Ok(f64::from(a.shared_count(b)) / f64::from(denom))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchKind {
    Exact,
    Near,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LineSpan {
    pub start: u32,
    pub end: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CloneMatch {
    pub method_id: MethodId,
    pub similarity: f64,
    pub kind: MatchKind,
    /// Source lines of the matched copy, exact matches only.
    pub match_span: Option<LineSpan>,
    /// Half-open range into the method's body tokens, exact matches only.
    #[serde(skip)]
    pub token_range: Option<(usize, usize)>,
}

/// Start indices of every contiguous occurrence of `needle` in `haystack`.
pub fn token_occurrences(haystack: &[Token], needle: &[Token]) -> Vec<usize> {
    if needle.is_empty() || needle.len() > haystack.len() {
        return Vec::new();
    }
    haystack
        .windows(needle.len())
        .enumerate()
        .filter(|(_, w)| w.iter().zip(needle).all(|(a, b)| a.text == b.text))
        .map(|(i, _)| i)
        .collect()
}

fn is_paste_host(fragment: &Fragment, method: &MethodUnit) -> bool {
    fragment
        .paste_site
        .as_ref()
        .is_some_and(|site| match &site.method_id {
            Some(id) => *id == method.id,
            None => site.file_path == method.file_path() && method.contains_line(site.line),
        })
}

/// Scans `methods` for copies of `fragment`, reporting at most one match per
/// method ordered by method id.
pub fn find_duplicates<'m>(
    fragment: &Fragment,
    methods: impl IntoIterator<Item = &'m MethodUnit>,
    threshold: f64,
) -> Result<Vec<CloneMatch>, CloneError> {
    if !fragment.valid {
        return Err(CloneError::InvalidFragment);
    }
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(CloneError::InvalidThreshold(threshold));
    }
    let fragment_bag = normalize_bag(&fragment.tokens);
    let width = fragment.tokens.len();
    let mut matches = Vec::new();
    for method in methods {
        let hits = token_occurrences(&method.body_tokens, &fragment.tokens);
        if !hits.is_empty() {
            // in the paste host, the copy at the paste line is the one to report
            let start = fragment
                .paste_site
                .as_ref()
                .filter(|_| is_paste_host(fragment, method))
                .and_then(|site| {
                    hits.iter()
                        .copied()
                        .find(|&i| method.body_tokens[i].line == site.line)
                })
                .unwrap_or(hits[0]);
            let end = start + width;
            matches.push(CloneMatch {
                method_id: method.id.clone(),
                similarity: 1.0,
                kind: MatchKind::Exact,
                match_span: Some(LineSpan {
                    start: method.body_tokens[start].line,
                    end: method.body_tokens[end - 1].line,
                }),
                token_range: Some((start, end)),
            });
            continue;
        }
        let body_bag = normalize_bag(&method.body_tokens);
        let similarity = match overlap_similarity(&fragment_bag, &body_bag) {
            Ok(s) => s,
            Err(_) => continue,
        };
        if similarity >= threshold {
            matches.push(CloneMatch {
                method_id: method.id.clone(),
                similarity,
                kind: MatchKind::Near,
                match_span: None,
                token_range: None,
            });
        }
    }
    matches.sort_by(|a, b| a.method_id.cmp(&b.method_id));
    Ok(matches)
}
