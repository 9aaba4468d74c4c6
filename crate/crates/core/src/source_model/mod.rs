//! Lexing, method indexing, fragment validation and nesting profiles for
//! Java sources.

mod fragment;
mod index;
mod lexer;
mod nesting;
pub mod syntax;

pub use fragment::{count_symbols, trim_blank_lines, validate_fragment, Fragment, PasteSite};
pub use index::{
    index_file, ClassContext, FileIndex, IndexError, LocalDeclaration, MethodId, MethodUnit,
    Parameter,
};
pub use lexer::{
    is_reserved, normalize_newlines, tokenize, LexError, Token, TokenKind, RESERVED_WORDS,
};
pub use nesting::{nesting_profile, EmptyScope, LineScope};
