//! Java lexer producing position-tagged tokens.
//!
//! Comments and whitespace are dropped. String, text-block and character
//! literals each become a single literal token carrying their verbatim text.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The 50 reserved words of the Java language.
pub const RESERVED_WORDS: [&str; 50] = [
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "try",
    "void",
    "volatile",
    "while",
];

pub fn is_reserved(word: &str) -> bool {
    RESERVED_WORDS.contains(&word)
}

// Longest first so that maximal munch falls out of a linear scan.
const OPERATORS: [&str; 41] = [
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>", "+", "-", "*", "/", "%", "=", "<",
    ">", "!", "~", "?", ":", "&", "|", "^", ".",
];

const PUNCTUATION: [char; 9] = ['(', ')', '{', '}', '[', ']', ';', ',', '@'];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Keyword,
    Identifier,
    Literal,
    Operator,
    Punctuation,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// 1-based source line.
    pub line: u32,
    /// 1-based column, counted in characters.
    pub column: u32,
}

impl Token {
    pub fn is(&self, text: &str) -> bool {
        self.text == text
    }

    pub fn is_identifier(&self) -> bool {
        self.kind == TokenKind::Identifier
    }

    pub fn is_keyword(&self, word: &str) -> bool {
        self.kind == TokenKind::Keyword && self.text == word
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("line {line}: unterminated block comment")]
    UnterminatedComment { line: u32 },
    #[error("line {line}: unterminated string literal")]
    UnterminatedString { line: u32 },
    #[error("line {line}: unterminated character literal")]
    UnterminatedChar { line: u32 },
    #[error("line {line}, column {column}: unexpected character {ch:?}")]
    UnexpectedChar { line: u32, column: u32, ch: char },
}

impl LexError {
    pub fn line(&self) -> u32 {
        match self {
            LexError::UnterminatedComment { line }
            | LexError::UnterminatedString { line }
            | LexError::UnterminatedChar { line }
            | LexError::UnexpectedChar { line, .. } => *line,
        }
    }
}

/// Converts CRLF and lone CR line endings to LF.
pub fn normalize_newlines(text: &str) -> String {
    if !text.contains('\r') {
        return text.to_string();
    }
    text.replace("\r\n", "\n").replace('\r', "\n")
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    column: u32,
}

impl Cursor {
    fn new(text: &str) -> Self {
        Self {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars()
            .enumerate()
            .all(|(i, c)| self.peek_at(i) == Some(c))
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }
}

/// Splits Java source text into tokens.
///
/// Line endings are normalized before scanning, so positions refer to the
/// LF-normalized text.
pub fn tokenize(text: &str) -> Result<Vec<Token>, LexError> {
    let text = normalize_newlines(text);
    let mut cur = Cursor::new(&text);
    let mut tokens = Vec::new();

    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        let (line, column) = (cur.line, cur.column);

        if cur.starts_with("//") {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        if cur.starts_with("/*") {
            cur.bump();
            cur.bump();
            loop {
                if cur.peek().is_none() {
                    return Err(LexError::UnterminatedComment { line });
                }
                if cur.starts_with("*/") {
                    cur.bump();
                    cur.bump();
                    break;
                }
                cur.bump();
            }
            continue;
        }

        let push = |tokens: &mut Vec<Token>, kind, text: String| {
            tokens.push(Token {
                kind,
                text,
                line,
                column,
            })
        };

        if cur.starts_with("\"\"\"") {
            let mut lit = String::new();
            for _ in 0..3 {
                lit.push(cur.bump().unwrap());
            }
            loop {
                if cur.peek().is_none() {
                    return Err(LexError::UnterminatedString { line });
                }
                if cur.starts_with("\"\"\"") {
                    for _ in 0..3 {
                        lit.push(cur.bump().unwrap());
                    }
                    break;
                }
                let ch = cur.bump().unwrap();
                lit.push(ch);
                if ch == '\\' {
                    if let Some(next) = cur.bump() {
                        lit.push(next);
                    }
                }
            }
            push(&mut tokens, TokenKind::Literal, lit);
            continue;
        }

        if c == '"' || c == '\'' {
            let quote = c;
            let mut lit = String::new();
            lit.push(cur.bump().unwrap());
            loop {
                match cur.peek() {
                    None | Some('\n') => {
                        return Err(if quote == '"' {
                            LexError::UnterminatedString { line }
                        } else {
                            LexError::UnterminatedChar { line }
                        });
                    }
                    Some(ch) => {
                        cur.bump();
                        lit.push(ch);
                        if ch == '\\' {
                            match cur.peek() {
                                None | Some('\n') => {}
                                Some(next) => {
                                    cur.bump();
                                    lit.push(next);
                                }
                            }
                        } else if ch == quote {
                            break;
                        }
                    }
                }
            }
            push(&mut tokens, TokenKind::Literal, lit);
            continue;
        }

        if c.is_ascii_digit() || (c == '.' && cur.peek_at(1).is_some_and(|d| d.is_ascii_digit())) {
            let lit = lex_number(&mut cur);
            push(&mut tokens, TokenKind::Literal, lit);
            continue;
        }

        if c.is_alphabetic() || c == '_' || c == '$' {
            let mut word = String::new();
            while let Some(ch) = cur.peek() {
                if ch.is_alphanumeric() || ch == '_' || ch == '$' {
                    word.push(ch);
                    cur.bump();
                } else {
                    break;
                }
            }
            let kind = if is_reserved(&word) {
                TokenKind::Keyword
            } else if matches!(word.as_str(), "true" | "false" | "null") {
                TokenKind::Literal
            } else {
                TokenKind::Identifier
            };
            push(&mut tokens, kind, word);
            continue;
        }

        if PUNCTUATION.contains(&c) {
            cur.bump();
            push(&mut tokens, TokenKind::Punctuation, c.to_string());
            continue;
        }

        if let Some(op) = OPERATORS.iter().find(|op| cur.starts_with(op)) {
            for _ in 0..op.chars().count() {
                cur.bump();
            }
            push(&mut tokens, TokenKind::Operator, (*op).to_string());
            continue;
        }

        return Err(LexError::UnexpectedChar {
            line,
            column,
            ch: c,
        });
    }
    Ok(tokens)
}

fn lex_number(cur: &mut Cursor) -> String {
    let mut lit = String::new();
    if cur.starts_with("0x")
        || cur.starts_with("0X")
        || cur.starts_with("0b")
        || cur.starts_with("0B")
    {
        lit.push(cur.bump().unwrap());
        lit.push(cur.bump().unwrap());
        while let Some(ch) = cur.peek() {
            if ch.is_ascii_hexdigit() || ch == '_' {
                lit.push(ch);
                cur.bump();
            } else {
                break;
            }
        }
    } else {
        let mut seen_exp = false;
        while let Some(ch) = cur.peek() {
            // `3.toString` is a member access, `1.e5` and `2.f` are literals
            let dot_ok = ch == '.'
                && !seen_exp
                && !lit.contains('.')
                && match cur.peek_at(1) {
                    Some(n) if n.is_alphabetic() || n == '_' || n == '$' => {
                        matches!(n, 'e' | 'E' | 'f' | 'F' | 'd' | 'D')
                    }
                    _ => true,
                };
            let take = ch.is_ascii_digit()
                || ch == '_'
                || dot_ok
                || ((ch == 'e' || ch == 'E') && !seen_exp);
            if !take {
                break;
            }
            if ch == 'e' || ch == 'E' {
                seen_exp = true;
                lit.push(ch);
                cur.bump();
                if let Some(sign @ ('+' | '-')) = cur.peek() {
                    lit.push(sign);
                    cur.bump();
                }
                continue;
            }
            lit.push(ch);
            cur.bump();
        }
    }
    if let Some(suffix @ ('l' | 'L' | 'f' | 'F' | 'd' | 'D')) = cur.peek() {
        lit.push(suffix);
        cur.bump();
    }
    lit
}
