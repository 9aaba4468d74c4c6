use thiserror::Error;

use super::lexer::Token;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("scope has no lines to profile")]
pub struct EmptyScope;

/// A run of source lines with the tokens that fall on them.
pub trait LineScope {
    fn scope_tokens(&self) -> &[Token];
    /// Inclusive line range, or `None` for an empty scope.
    fn line_range(&self) -> Option<(u32, u32)>;
}

/// Per-line nesting depth of a scope whose top level is depth 1.
///
/// A line takes the depth in force at its first token; `}` lowers the depth
/// before its own line is measured and `{` raises it afterwards. Lines
/// without tokens inherit the running depth.
pub fn nesting_profile(scope: &impl LineScope) -> Result<Vec<u32>, EmptyScope> {
    let (first, last) = scope.line_range().ok_or(EmptyScope)?;
    Ok(profile_lines(scope.scope_tokens(), first, last))
}

pub(crate) fn profile_lines(tokens: &[Token], first: u32, last: u32) -> Vec<u32> {
    let mut depth: u32 = 1;
    let mut next = 0;
    let mut profile = Vec::with_capacity((last - first + 1) as usize);
    while next < tokens.len() && tokens[next].line < first {
        next += 1;
    }
    for line in first..=last {
        let mut at_first_token = None;
        while next < tokens.len() && tokens[next].line == line {
            let tok = &tokens[next];
            if tok.is("}") {
                depth = depth.saturating_sub(1).max(1);
            }
            at_first_token.get_or_insert(depth);
            if tok.is("{") {
                depth += 1;
            }
            next += 1;
        }
        profile.push(at_first_token.unwrap_or(depth));
    }
    profile
}
