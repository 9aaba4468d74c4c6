//! Statement-level Java grammar over token slices.
//!
//! No expression typing happens here. Expressions are opaque runs of tokens
//! ending in `;`, with bracketed groups skipped as a unit, which is enough to
//! recognise statement sequences, local declarations, and control flow.

use thiserror::Error;

use super::lexer::{Token, TokenKind};

pub const PRIMITIVE_TYPES: [&str; 8] = [
    "boolean", "byte", "char", "short", "int", "long", "float", "double",
];

/// Keywords that can never appear at the top level of an expression statement.
const NON_EXPRESSION_KEYWORDS: [&str; 31] = [
    "if",
    "for",
    "while",
    "do",
    "try",
    "return",
    "break",
    "continue",
    "throw",
    "else",
    "case",
    "catch",
    "finally",
    "default",
    "synchronized",
    "assert",
    "public",
    "private",
    "protected",
    "static",
    "abstract",
    "native",
    "transient",
    "volatile",
    "strictfp",
    "import",
    "package",
    "interface",
    "enum",
    "extends",
    "implements",
];

const DECLARATION_KEYWORDS: [&str; 3] = ["throws", "goto", "const"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct SyntaxError {
    pub line: u32,
    pub message: String,
}

fn closer_for(open: &str) -> Option<&'static str> {
    match open {
        "(" => Some(")"),
        "[" => Some("]"),
        "{" => Some("}"),
        _ => None,
    }
}

fn is_open(t: &Token) -> bool {
    t.kind == TokenKind::Punctuation && matches!(t.text.as_str(), "(" | "[" | "{")
}

fn is_close(t: &Token) -> bool {
    t.kind == TokenKind::Punctuation && matches!(t.text.as_str(), ")" | "]" | "}")
}

/// Index of the token closing the group opened at `open`, honouring nesting
/// of all three bracket kinds.
pub fn matching_close(tokens: &[Token], open: usize) -> Option<usize> {
    let mut stack = vec![closer_for(&tokens.get(open)?.text)?];
    for (i, t) in tokens.iter().enumerate().skip(open + 1) {
        if is_open(t) {
            stack.push(closer_for(&t.text).unwrap());
        } else if is_close(t) {
            if stack.pop() != Some(t.text.as_str()) {
                return None;
            }
            if stack.is_empty() {
                return Some(i);
            }
        }
    }
    None
}

/// True when every `(`, `[` and `{` is closed by its own kind in order.
pub fn delimiters_balanced(tokens: &[Token]) -> bool {
    let mut stack = Vec::new();
    for t in tokens {
        if is_open(t) {
            stack.push(closer_for(&t.text).unwrap());
        } else if is_close(t) && stack.pop() != Some(t.text.as_str()) {
            return false;
        }
    }
    stack.is_empty()
}

/// Skips a generic argument list starting at a `<`; returns the index after
/// the closing `>`.
fn skip_type_arguments(tokens: &[Token], lt: usize) -> Option<usize> {
    let mut depth = 0i32;
    let mut i = lt;
    while let Some(t) = tokens.get(i) {
        match t.text.as_str() {
            "<" => depth += 1,
            ">" => depth -= 1,
            ">>" => depth -= 2,
            ">>>" => depth -= 3,
            "," | "." | "?" | "&" | "[" | "]" | "@" => {}
            "extends" | "super" => {}
            _ if t.kind == TokenKind::Identifier => {}
            _ if t.kind == TokenKind::Keyword && PRIMITIVE_TYPES.contains(&t.text.as_str()) => {}
            _ => return None,
        }
        i += 1;
        if depth == 0 {
            return Some(i);
        }
        if depth < 0 {
            return None;
        }
    }
    None
}

/// Parses a type reference (`int`, `a.b.C<D>[]`, `String...`) beginning at
/// `start`; returns the index just past it.
pub fn parse_type(tokens: &[Token], start: usize) -> Option<usize> {
    let first = tokens.get(start)?;
    let is_primitive =
        first.kind == TokenKind::Keyword && PRIMITIVE_TYPES.contains(&first.text.as_str());
    if !(first.is_identifier() || is_primitive) {
        return None;
    }
    let mut i = start + 1;
    if !is_primitive {
        loop {
            match tokens.get(i) {
                Some(t) if t.is(".") && tokens.get(i + 1).is_some_and(Token::is_identifier) => {
                    i += 2
                }
                Some(t) if t.is("<") => i = skip_type_arguments(tokens, i)?,
                _ => break,
            }
        }
    }
    while tokens.get(i).is_some_and(|t| t.is("[")) && tokens.get(i + 1).is_some_and(|t| t.is("]")) {
        i += 2;
    }
    if tokens.get(i).is_some_and(|t| t.is("...")) {
        i += 1;
    }
    Some(i)
}

/// Renders a token run as compact Java source, e.g. `Map<String, Integer>`.
pub fn render_tokens(tokens: &[Token]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            let prev = &tokens[i - 1];
            let needs_space = prev.is(",")
                || t.is("|")
                || prev.is("|")
                || t.is("&")
                || prev.is("&")
                || (is_wordlike(prev) && is_wordlike(t));
            if needs_space {
                out.push(' ');
            }
        }
        out.push_str(&t.text);
    }
    out
}

fn is_wordlike(t: &Token) -> bool {
    matches!(
        t.kind,
        TokenKind::Identifier | TokenKind::Keyword | TokenKind::Literal
    )
}

/// Skips modifiers and annotations that may precede a declaration.
pub(crate) fn skip_modifiers(tokens: &[Token], mut i: usize) -> usize {
    loop {
        match tokens.get(i) {
            Some(t) if t.is_keyword("final") => i += 1,
            Some(t) if t.is("@") && tokens.get(i + 1).is_some_and(Token::is_identifier) => {
                i += 2;
                while tokens.get(i).is_some_and(|t| t.is("."))
                    && tokens.get(i + 1).is_some_and(Token::is_identifier)
                {
                    i += 2;
                }
                if tokens.get(i).is_some_and(|t| t.is("(")) {
                    match matching_close(tokens, i) {
                        Some(close) => i = close + 1,
                        None => return i,
                    }
                }
            }
            _ => return i,
        }
    }
}

/// One declared local variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeclaredName {
    pub name: String,
    pub type_text: String,
    /// Index of the name token in the scanned slice.
    pub index: usize,
    pub line: u32,
}

/// Recognises `[final] Type name [= init] (, name [= init])*` at `start`.
///
/// Returns the declared names and the index of the token that ended the
/// declaration (`;`, `:` or `)`), or `None` if the tokens are not a
/// declaration.
pub fn parse_local_declaration(
    tokens: &[Token],
    start: usize,
) -> Option<(Vec<DeclaredName>, usize)> {
    let type_start = skip_modifiers(tokens, start);
    let type_end = parse_type(tokens, type_start)?;
    let type_text = render_tokens(&tokens[type_start..type_end]);
    let mut names = Vec::new();
    let mut i = type_end;
    loop {
        let name_index = i;
        let name = tokens.get(i).filter(|t| t.is_identifier())?;
        let mut declared_type = type_text.clone();
        i += 1;
        while tokens.get(i).is_some_and(|t| t.is("["))
            && tokens.get(i + 1).is_some_and(|t| t.is("]"))
        {
            declared_type.push_str("[]");
            i += 2;
        }
        names.push(DeclaredName {
            name: name.text.clone(),
            type_text: declared_type,
            index: name_index,
            line: name.line,
        });
        let next = tokens.get(i)?;
        match next.text.as_str() {
            ";" | ":" | ")" => return Some((names, i)),
            "," => i += 1,
            "=" => {
                i = skip_expression(tokens, i + 1, &[",", ";", ")"])?;
                let end = &tokens[i];
                if end.is(",") {
                    i += 1;
                } else {
                    return Some((names, i));
                }
            }
            _ => return None,
        }
    }
}

/// Skips an expression until one of `stops` appears at bracket depth zero.
/// Returns the index of the stop token.
pub fn skip_expression(tokens: &[Token], mut i: usize, stops: &[&str]) -> Option<usize> {
    while let Some(t) = tokens.get(i) {
        if is_open(t) {
            i = matching_close(tokens, i)? + 1;
            continue;
        }
        if is_close(t) && !stops.contains(&t.text.as_str()) {
            return None;
        }
        if stops.contains(&t.text.as_str()) {
            return Some(i);
        }
        i += 1;
    }
    None
}

fn is_statement_boundary(tokens: &[Token], i: usize) -> bool {
    if i == 0 {
        return true;
    }
    let prev = &tokens[i - 1];
    if prev.is("{") || prev.is("}") || prev.is(";") {
        return true;
    }
    if prev.is("(") && i >= 2 {
        let kw = &tokens[i - 2];
        return kw.is_keyword("for") || kw.is_keyword("try");
    }
    false
}

/// Finds every local variable declared in a token run: statement-level
/// declarations, `for` headers, try-with-resources, and catch parameters.
pub fn scan_declarations(tokens: &[Token]) -> Vec<DeclaredName> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let t = &tokens[i];
        if t.is_keyword("catch") && tokens.get(i + 1).is_some_and(|t| t.is("(")) {
            if let Some(close) = matching_close(tokens, i + 1) {
                if close >= i + 4 && tokens[close - 1].is_identifier() {
                    let name = &tokens[close - 1];
                    let ty_start = skip_modifiers(tokens, i + 2);
                    out.push(DeclaredName {
                        name: name.text.clone(),
                        type_text: render_tokens(&tokens[ty_start..close - 1]),
                        index: close - 1,
                        line: name.line,
                    });
                }
            }
            i += 2;
            continue;
        }
        if is_statement_boundary(tokens, i) {
            if let Some((names, _end)) = parse_local_declaration(tokens, i) {
                out.extend(names);
            }
        }
        i += 1;
    }
    out.sort_by_key(|d| d.index);
    out
}

// ---------------------------------------------------------------------------
// Statement tree

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    Block(Vec<Stmt>),
    If {
        then_branch: Box<Stmt>,
        else_branch: Option<Box<Stmt>>,
    },
    /// `for`, enhanced `for`, `while`, and `do … while`.
    Loop(Box<Stmt>),
    /// Statements of a switch body with the case labels removed.
    Switch(Vec<Stmt>),
    /// The try block followed by every catch and finally block.
    Try(Vec<Stmt>),
    Synchronized(Box<Stmt>),
    Labeled {
        label: String,
        body: Box<Stmt>,
    },
    Return,
    Break(Option<String>),
    Continue(Option<String>),
    Throw,
    LocalDeclaration,
    Expression,
    Empty,
}

/// A statement covering tokens `start..end` (end exclusive).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub start: usize,
    pub end: usize,
}

struct StmtParser<'t> {
    tokens: &'t [Token],
    pos: usize,
}

impl<'t> StmtParser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn error(&self, message: impl Into<String>) -> SyntaxError {
        let line = self
            .peek()
            .or_else(|| self.tokens.last())
            .map_or(1, |t| t.line);
        SyntaxError {
            line,
            message: message.into(),
        }
    }

    fn expect(&mut self, text: &str) -> Result<(), SyntaxError> {
        match self.peek() {
            Some(t) if t.is(text) => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.error(format!("expected `{text}`, found `{}`", t.text))),
            None => Err(self.error(format!("expected `{text}`, found end of input"))),
        }
    }

    fn skip_group(&mut self, open: &str) -> Result<(), SyntaxError> {
        if !self.peek().is_some_and(|t| t.is(open)) {
            return Err(self.error(format!("expected `{open}`")));
        }
        let close = matching_close(self.tokens, self.pos)
            .ok_or_else(|| self.error(format!("unclosed `{open}`")))?;
        self.pos = close + 1;
        Ok(())
    }

    fn statements_until_close(&mut self) -> Result<Vec<Stmt>, SyntaxError> {
        let mut stmts = Vec::new();
        loop {
            match self.peek() {
                None => return Err(self.error("unclosed block")),
                Some(t) if t.is("}") => {
                    self.pos += 1;
                    return Ok(stmts);
                }
                Some(_) => stmts.push(self.statement()?),
            }
        }
    }

    fn block(&mut self) -> Result<Stmt, SyntaxError> {
        let start = self.pos;
        self.expect("{")?;
        let body = self.statements_until_close()?;
        Ok(Stmt {
            kind: StmtKind::Block(body),
            start,
            end: self.pos,
        })
    }

    fn simple(&mut self, start: usize, kind: StmtKind) -> Result<Stmt, SyntaxError> {
        let end = skip_expression(self.tokens, self.pos, &[";"])
            .ok_or_else(|| self.error("expected `;`"))?;
        self.check_expression_tokens(self.pos, end)?;
        self.pos = end + 1;
        Ok(Stmt {
            kind,
            start,
            end: self.pos,
        })
    }

    fn check_expression_tokens(&self, from: usize, to: usize) -> Result<(), SyntaxError> {
        let mut i = from;
        while i < to {
            let t = &self.tokens[i];
            if is_open(t) {
                i = matching_close(self.tokens, i).unwrap_or(to) + 1;
                continue;
            }
            let after_dot = i > 0 && self.tokens[i - 1].is(".");
            if t.kind == TokenKind::Keyword && !after_dot {
                let w = t.text.as_str();
                let forbidden = NON_EXPRESSION_KEYWORDS.contains(&w)
                    || DECLARATION_KEYWORDS.contains(&w)
                    || w == "class"
                    || (w == "void" && !self.tokens.get(i + 1).is_some_and(|n| n.is(".")));
                if forbidden {
                    return Err(SyntaxError {
                        line: t.line,
                        message: format!("`{w}` cannot appear in an expression"),
                    });
                }
            }
            i += 1;
        }
        Ok(())
    }

    fn statement(&mut self) -> Result<Stmt, SyntaxError> {
        let start = self.pos;
        let tok = self
            .peek()
            .ok_or_else(|| self.error("expected a statement"))?;
        let text = tok.text.as_str();

        if tok.kind == TokenKind::Punctuation {
            match text {
                "{" => return self.block(),
                ";" => {
                    self.pos += 1;
                    return Ok(Stmt {
                        kind: StmtKind::Empty,
                        start,
                        end: self.pos,
                    });
                }
                "(" | "@" => return self.expression_statement(start),
                _ => return Err(self.error(format!("unexpected `{text}`"))),
            }
        }

        if tok.kind == TokenKind::Identifier
            && self.tokens.get(start + 1).is_some_and(|t| t.is(":"))
        {
            self.pos += 2;
            let body = self.statement()?;
            return Ok(Stmt {
                kind: StmtKind::Labeled {
                    label: tok.text.clone(),
                    body: Box::new(body),
                },
                start,
                end: self.pos,
            });
        }

        if tok.kind != TokenKind::Keyword {
            return self.expression_statement(start);
        }

        match text {
            "if" => {
                self.pos += 1;
                self.skip_group("(")?;
                let then_branch = Box::new(self.statement()?);
                let else_branch = if self.peek().is_some_and(|t| t.is_keyword("else")) {
                    self.pos += 1;
                    Some(Box::new(self.statement()?))
                } else {
                    None
                };
                Ok(Stmt {
                    kind: StmtKind::If {
                        then_branch,
                        else_branch,
                    },
                    start,
                    end: self.pos,
                })
            }
            "while" | "for" => {
                self.pos += 1;
                self.skip_group("(")?;
                let body = self.statement()?;
                Ok(Stmt {
                    kind: StmtKind::Loop(Box::new(body)),
                    start,
                    end: self.pos,
                })
            }
            "do" => {
                self.pos += 1;
                let body = self.statement()?;
                if !self.peek().is_some_and(|t| t.is_keyword("while")) {
                    return Err(self.error("expected `while` after do body"));
                }
                self.pos += 1;
                self.skip_group("(")?;
                self.expect(";")?;
                Ok(Stmt {
                    kind: StmtKind::Loop(Box::new(body)),
                    start,
                    end: self.pos,
                })
            }
            "switch" => {
                // switch used as an expression (`switch (x) {…}.foo();`) is rare
                // enough that the statement form is all we accept here
                self.pos += 1;
                self.skip_group("(")?;
                self.expect("{")?;
                let body = self.switch_body()?;
                Ok(Stmt {
                    kind: StmtKind::Switch(body),
                    start,
                    end: self.pos,
                })
            }
            "try" => {
                self.pos += 1;
                let has_resources = self.peek().is_some_and(|t| t.is("("));
                if has_resources {
                    self.skip_group("(")?;
                }
                let mut parts = vec![self.block()?];
                let mut handlers = 0;
                while self.peek().is_some_and(|t| t.is_keyword("catch")) {
                    self.pos += 1;
                    self.skip_group("(")?;
                    parts.push(self.block()?);
                    handlers += 1;
                }
                if self.peek().is_some_and(|t| t.is_keyword("finally")) {
                    self.pos += 1;
                    parts.push(self.block()?);
                    handlers += 1;
                }
                if handlers == 0 && !has_resources {
                    return Err(self.error("try without catch or finally"));
                }
                Ok(Stmt {
                    kind: StmtKind::Try(parts),
                    start,
                    end: self.pos,
                })
            }
            "synchronized" => {
                self.pos += 1;
                self.skip_group("(")?;
                let body = self.block()?;
                Ok(Stmt {
                    kind: StmtKind::Synchronized(Box::new(body)),
                    start,
                    end: self.pos,
                })
            }
            "return" => {
                self.pos += 1;
                self.simple(start, StmtKind::Return)
            }
            "throw" => {
                self.pos += 1;
                self.simple(start, StmtKind::Throw)
            }
            "assert" => {
                self.pos += 1;
                self.simple(start, StmtKind::Expression)
            }
            "break" | "continue" => {
                self.pos += 1;
                let label = match self.peek() {
                    Some(t) if t.is_identifier() => {
                        self.pos += 1;
                        Some(t.text.clone())
                    }
                    _ => None,
                };
                self.expect(";")?;
                let kind = if text == "break" {
                    StmtKind::Break(label)
                } else {
                    StmtKind::Continue(label)
                };
                Ok(Stmt {
                    kind,
                    start,
                    end: self.pos,
                })
            }
            "final" | "this" | "super" | "new" => self.expression_statement(start),
            w if PRIMITIVE_TYPES.contains(&w) => self.expression_statement(start),
            w => Err(self.error(format!("`{w}` cannot start a statement"))),
        }
    }

    fn switch_body(&mut self) -> Result<Vec<Stmt>, SyntaxError> {
        let mut stmts = Vec::new();
        loop {
            match self.peek() {
                None => return Err(self.error("unclosed switch body")),
                Some(t) if t.is("}") => {
                    self.pos += 1;
                    return Ok(stmts);
                }
                Some(t) if t.is_keyword("case") || t.is_keyword("default") => {
                    self.pos += 1;
                    let end = skip_expression(self.tokens, self.pos, &[":", "->"])
                        .ok_or_else(|| self.error("malformed case label"))?;
                    self.pos = end + 1;
                }
                Some(_) => stmts.push(self.statement()?),
            }
        }
    }

    fn expression_statement(&mut self, start: usize) -> Result<Stmt, SyntaxError> {
        let first = &self.tokens[start];
        let starts_ok = match first.kind {
            TokenKind::Identifier | TokenKind::Literal | TokenKind::Keyword => true,
            TokenKind::Punctuation => first.is("(") || first.is("@"),
            TokenKind::Operator => {
                matches!(first.text.as_str(), "++" | "--" | "+" | "-" | "!" | "~")
            }
        };
        if !starts_ok {
            return Err(self.error(format!("unexpected `{}`", first.text)));
        }
        let is_decl = parse_local_declaration(self.tokens, start)
            .is_some_and(|(_, end)| self.tokens[end].is(";"));
        let kind = if is_decl {
            StmtKind::LocalDeclaration
        } else {
            StmtKind::Expression
        };
        self.simple(start, kind)
    }
}

/// Parses `tokens` as a sequence of block statements.
pub fn parse_statements(tokens: &[Token]) -> Result<Vec<Stmt>, SyntaxError> {
    let mut parser = StmtParser { tokens, pos: 0 };
    let mut stmts = Vec::new();
    while parser.pos < tokens.len() {
        stmts.push(parser.statement()?);
    }
    Ok(stmts)
}
