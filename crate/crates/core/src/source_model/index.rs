//! Method and class discovery by header pattern plus brace matching.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::lexer::{normalize_newlines, tokenize, LexError, Token, TokenKind};
use super::nesting::{profile_lines, LineScope};
use super::syntax::{parse_local_declaration, render_tokens, scan_declarations, skip_modifiers};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("line {line}: unbalanced braces at file scope")]
    UnbalancedBraces { line: u32 },
}

/// Stable method identity: `path:line:name`, where `line` is the line of the
/// method's name token.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MethodId(String);

impl MethodId {
    pub fn new(file_path: &str, line: u32, name: &str) -> Self {
        Self(format!("{file_path}:{line}:{name}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameter {
    pub name: String,
    pub type_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalDeclaration {
    pub name: String,
    pub type_text: String,
    pub line: u32,
    /// Position of the name token within the method's body tokens.
    pub token_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassContext {
    /// Dotted for nested classes, e.g. `Outer.Inner`.
    pub class_name: String,
    pub field_names: BTreeMap<String, String>,
    pub method_names: BTreeSet<String>,
    pub file_path: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodUnit {
    pub id: MethodId,
    pub name: String,
    pub parameters: Vec<Parameter>,
    pub body_tokens: Vec<Token>,
    /// Inclusive body line range. Brace lines are excluded when no body token
    /// shares them.
    pub start_line: u32,
    pub end_line: u32,
    pub nesting_profile: Vec<u32>,
    pub local_declarations: Vec<LocalDeclaration>,
    pub owner: Arc<ClassContext>,
    pub is_static: bool,
    /// Source text of lines `start_line..=end_line`.
    pub body_text: String,
    /// First line of the declaration (annotations and modifiers included).
    pub header_line: u32,
    pub name_line: u32,
    pub close_brace_line: u32,
    pub header_indent: String,
}

impl MethodUnit {
    pub fn line_count(&self) -> u32 {
        self.end_line - self.start_line + 1
    }

    pub fn contains_line(&self, line: u32) -> bool {
        (self.start_line..=self.end_line).contains(&line)
    }

    pub fn file_path(&self) -> &str {
        &self.owner.file_path
    }

    /// The latest declaration of `name` whose name token precedes
    /// `before_token`, or the parameter of that name.
    pub fn resolve_local(&self, name: &str, before_token: usize) -> Option<&str> {
        self.local_declarations
            .iter()
            .rfind(|d| d.name == name && d.token_index < before_token)
            .map(|d| d.type_text.as_str())
            .or_else(|| {
                self.parameters
                    .iter()
                    .find(|p| p.name == name)
                    .map(|p| p.type_text.as_str())
            })
    }
}

impl LineScope for MethodUnit {
    fn scope_tokens(&self) -> &[Token] {
        &self.body_tokens
    }

    fn line_range(&self) -> Option<(u32, u32)> {
        Some((self.start_line, self.end_line))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FileIndex {
    pub methods: Vec<MethodUnit>,
    pub classes: Vec<Arc<ClassContext>>,
}

impl FileIndex {
    /// The method whose body line range contains `line`.
    pub fn method_at_line(&self, line: u32) -> Option<&MethodUnit> {
        self.methods
            .iter()
            .filter(|m| m.contains_line(line))
            .min_by_key(|m| m.line_count())
    }
}

const CLASS_MODIFIERS: [&str; 12] = [
    "public",
    "private",
    "protected",
    "static",
    "final",
    "transient",
    "volatile",
    "abstract",
    "synchronized",
    "native",
    "strictfp",
    "default",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TypeKind {
    Class,
    Enum,
}

struct ClassBuilder {
    name: String,
    fields: BTreeMap<String, String>,
    methods: BTreeSet<String>,
}

struct RawMethod {
    class: usize,
    name_idx: usize,
    open: usize,
    close: usize,
    header_start: usize,
    params: Vec<Parameter>,
    is_static: bool,
}

struct Indexer<'t> {
    tokens: &'t [Token],
    classes: Vec<ClassBuilder>,
    methods: Vec<RawMethod>,
}

fn match_brace(tokens: &[Token], open: usize) -> usize {
    let mut depth = 0usize;
    for (i, t) in tokens.iter().enumerate().skip(open) {
        if t.is("{") {
            depth += 1;
        } else if t.is("}") {
            depth -= 1;
            if depth == 0 {
                return i;
            }
        }
    }
    // braces were checked for balance before indexing started
    unreachable!("unbalanced braces after balance check")
}

fn check_brace_balance(tokens: &[Token]) -> Result<(), IndexError> {
    let mut open_lines = Vec::new();
    for t in tokens {
        if t.is("{") {
            open_lines.push(t.line);
        } else if t.is("}") && open_lines.pop().is_none() {
            return Err(IndexError::UnbalancedBraces { line: t.line });
        }
    }
    match open_lines.pop() {
        Some(line) => Err(IndexError::UnbalancedBraces { line }),
        None => Ok(()),
    }
}

/// Depth-0 (outside parentheses and brackets) occurrence of `text`.
fn has_top_level(tokens: &[Token], text: &str) -> bool {
    let mut depth = 0i32;
    tokens.iter().any(|t| {
        match t.text.as_str() {
            "(" | "[" => depth += 1,
            ")" | "]" => depth -= 1,
            _ => {}
        }
        depth == 0 && t.is(text)
    })
}

fn type_header(tokens: &[Token]) -> Option<(TypeKind, String)> {
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 && tokens[i - 1].is(".") {
            continue;
        }
        let next_ident = tokens.get(i + 1).filter(|n| n.is_identifier());
        let kind = match (t.kind, t.text.as_str()) {
            (TokenKind::Keyword, "class" | "interface") => TypeKind::Class,
            (TokenKind::Keyword, "enum") => TypeKind::Enum,
            (TokenKind::Identifier, "record") if next_ident.is_some() => TypeKind::Class,
            _ => continue,
        };
        return next_ident.map(|n| (kind, n.text.clone()));
    }
    None
}

fn skip_class_modifiers(tokens: &[Token], mut i: usize, end: usize) -> usize {
    loop {
        let before = i;
        while i < end
            && tokens[i].kind == TokenKind::Keyword
            && CLASS_MODIFIERS.contains(&tokens[i].text.as_str())
        {
            i += 1;
        }
        i = skip_modifiers(tokens, i).min(end);
        if i == before {
            return i;
        }
    }
}

fn split_parameters(tokens: &[Token]) -> Vec<Parameter> {
    let mut params = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for i in 0..=tokens.len() {
        let at_end = i == tokens.len();
        if !at_end {
            match tokens[i].text.as_str() {
                "(" | "[" | "<" => depth += 1,
                ")" | "]" | ">" => depth -= 1,
                ">>" => depth -= 2,
                ">>>" => depth -= 3,
                _ => {}
            }
        }
        if at_end || (depth == 0 && tokens[i].is(",")) {
            if let Some(p) = parameter(&tokens[start..i]) {
                params.push(p);
            }
            start = i + 1;
        }
    }
    params
}

fn parameter(tokens: &[Token]) -> Option<Parameter> {
    let ty_start = skip_modifiers(tokens, 0);
    let mut name_idx = tokens.len().checked_sub(1)?;
    let mut suffix = String::new();
    while name_idx >= 2 && tokens[name_idx].is("]") && tokens[name_idx - 1].is("[") {
        suffix.push_str("[]");
        name_idx -= 2;
    }
    let name = tokens.get(name_idx).filter(|t| t.is_identifier())?;
    if name_idx <= ty_start {
        return None;
    }
    Some(Parameter {
        name: name.text.clone(),
        type_text: render_tokens(&tokens[ty_start..name_idx]) + &suffix,
    })
}

impl<'t> Indexer<'t> {
    fn file_scope(&mut self) {
        let tokens = self.tokens;
        let mut i = 0;
        let mut member_start = 0;
        while i < tokens.len() {
            let t = &tokens[i];
            if t.is("{") {
                let close = match_brace(tokens, i);
                if let Some((kind, name)) = type_header(&tokens[member_start..i]) {
                    self.class_body(i, close, name, kind);
                }
                i = close + 1;
                member_start = i;
                continue;
            }
            if t.is(";") {
                member_start = i + 1;
            }
            i += 1;
        }
    }

    fn class_body(&mut self, open: usize, close: usize, name: String, kind: TypeKind) {
        let tokens = self.tokens;
        let class = self.classes.len();
        self.classes.push(ClassBuilder {
            name: name.clone(),
            fields: BTreeMap::new(),
            methods: BTreeSet::new(),
        });
        let mut in_enum_constants = kind == TypeKind::Enum;
        let mut member_start = open + 1;
        let mut i = open + 1;
        while i < close {
            let t = &tokens[i];
            if t.is("{") {
                let end = match_brace(tokens, i);
                let member = &tokens[member_start..i];
                if in_enum_constants || has_top_level(member, "=") {
                    // constant body, array initializer, lambda or anonymous class
                    i = end + 1;
                    continue;
                }
                if let Some((inner_kind, inner)) = type_header(member) {
                    self.class_body(i, end, format!("{name}.{inner}"), inner_kind);
                } else if let Some(raw) = self.method_header(class, member_start, i, end) {
                    self.classes[class]
                        .methods
                        .insert(tokens[raw.name_idx].text.clone());
                    self.methods.push(raw);
                }
                i = end + 1;
                member_start = i;
                continue;
            }
            if t.is(";") {
                if in_enum_constants {
                    in_enum_constants = false;
                } else {
                    self.field_or_abstract_method(class, member_start, i);
                }
                member_start = i + 1;
            }
            i += 1;
        }
    }

    fn method_header(
        &self,
        class: usize,
        start: usize,
        open: usize,
        close: usize,
    ) -> Option<RawMethod> {
        let tokens = self.tokens;
        if open == start {
            return None;
        }
        // walk back over an optional throws clause to the parameter list
        let mut j = open - 1;
        while !tokens[j].is(")") {
            let t = &tokens[j];
            let allowed = t.is_identifier()
                || t.is_keyword("throws")
                || matches!(t.text.as_str(), "." | "," | "<" | ">" | ">>" | "?");
            if !allowed || j == start {
                return None;
            }
            j -= 1;
        }
        let close_paren = j;
        let mut depth = 0i32;
        let mut open_paren = None;
        for k in (start..=close_paren).rev() {
            match tokens[k].text.as_str() {
                ")" => depth += 1,
                "(" => {
                    depth -= 1;
                    if depth == 0 {
                        open_paren = Some(k);
                        break;
                    }
                }
                _ => {}
            }
        }
        let open_paren = open_paren?;
        let name_idx = open_paren.checked_sub(1).filter(|&k| k >= start)?;
        if !tokens[name_idx].is_identifier() {
            return None;
        }
        if name_idx > start {
            let before = &tokens[name_idx - 1];
            if before.is_keyword("new") || before.is(".") {
                return None;
            }
        }
        let prefix = &tokens[start..name_idx];
        Some(RawMethod {
            class,
            name_idx,
            open,
            close,
            header_start: start,
            params: split_parameters(&tokens[open_paren + 1..close_paren]),
            is_static: prefix.iter().any(|t| t.is_keyword("static")),
        })
    }

    fn field_or_abstract_method(&mut self, class: usize, start: usize, semi: usize) {
        let tokens = self.tokens;
        let mut i = skip_class_modifiers(tokens, start, semi);
        if i < semi && tokens[i].is("<") {
            // generic method type parameters
            let mut depth = 0i32;
            while i < semi {
                match tokens[i].text.as_str() {
                    "<" => depth += 1,
                    ">" => depth -= 1,
                    ">>" => depth -= 2,
                    _ => {}
                }
                i += 1;
                if depth <= 0 {
                    break;
                }
            }
        }
        let member = &tokens[i..semi];
        if member.is_empty() {
            return;
        }
        let first_paren = member.iter().position(|t| t.is("("));
        let first_eq = member.iter().position(|t| t.is("="));
        if let Some(p) = first_paren {
            if first_eq.is_none_or(|e| p < e) && p > 0 && member[p - 1].is_identifier() {
                self.classes[class]
                    .methods
                    .insert(member[p - 1].text.clone());
                return;
            }
        }
        if let Some((names, _)) = parse_local_declaration(&tokens[..=semi], i) {
            for n in names {
                self.classes[class].fields.insert(n.name, n.type_text);
            }
        }
    }
}

/// Indexes every method body and class in one Java source file.
pub fn index_file(text: &str, file_path: &str) -> Result<FileIndex, IndexError> {
    let text = normalize_newlines(text);
    let tokens = tokenize(&text)?;
    check_brace_balance(&tokens)?;
    let lines: Vec<&str> = text.split('\n').collect();

    let mut indexer = Indexer {
        tokens: &tokens,
        classes: Vec::new(),
        methods: Vec::new(),
    };
    indexer.file_scope();

    let classes: Vec<Arc<ClassContext>> = indexer
        .classes
        .into_iter()
        .map(|c| {
            Arc::new(ClassContext {
                class_name: c.name,
                field_names: c.fields,
                method_names: c.methods,
                file_path: file_path.to_string(),
            })
        })
        .collect();

    let mut raw = indexer.methods;
    raw.sort_by_key(|m| m.open);
    let methods = raw
        .into_iter()
        .map(|m| build_method(&tokens, &lines, file_path, m, &classes))
        .collect();
    Ok(FileIndex { methods, classes })
}

fn build_method(
    tokens: &[Token],
    lines: &[&str],
    file_path: &str,
    raw: RawMethod,
    classes: &[Arc<ClassContext>],
) -> MethodUnit {
    let body: Vec<Token> = tokens[raw.open + 1..raw.close].to_vec();
    let open_line = tokens[raw.open].line;
    let close_line = tokens[raw.close].line;
    let (start_line, end_line) = match (body.first(), body.last()) {
        (Some(first), Some(last)) => (
            if first.line == open_line {
                open_line
            } else {
                open_line + 1
            },
            if last.line == close_line {
                close_line
            } else {
                close_line - 1
            },
        ),
        _ => (open_line, close_line),
    };
    let name_tok = &tokens[raw.name_idx];
    let header_line = tokens[raw.header_start].line;
    let header_indent: String = lines[header_line as usize - 1]
        .chars()
        .take_while(|c| c.is_whitespace())
        .collect();
    let local_declarations = scan_declarations(&body)
        .into_iter()
        .map(|d| LocalDeclaration {
            name: d.name,
            type_text: d.type_text,
            line: d.line,
            token_index: d.index,
        })
        .collect();
    MethodUnit {
        id: MethodId::new(file_path, name_tok.line, &name_tok.text),
        name: name_tok.text.clone(),
        parameters: raw.params,
        nesting_profile: profile_lines(&body, start_line, end_line),
        body_text: lines[start_line as usize - 1..end_line as usize].join("\n"),
        body_tokens: body,
        start_line,
        end_line,
        local_declarations,
        owner: Arc::clone(&classes[raw.class]),
        is_static: raw.is_static,
        header_line,
        name_line: name_tok.line,
        close_brace_line: close_line,
        header_indent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_METHODS: &str = "\
class TwoMethods {
    int total;

    void first(int a) {
        total += a;
        total *= 2;
        log(total);
    }

    static int second(String s, int[] xs) throws IOException {
        int n = s.length();
        n += xs.length;
        return n;
    }
}
";

    #[test]
    fn two_methods_ranges() {
        let idx = index_file(TWO_METHODS, "TwoMethods.java").unwrap();
        assert_eq!(idx.methods.len(), 2);
        let first = &idx.methods[0];
        assert_eq!(first.name, "first");
        assert_eq!((first.start_line, first.end_line), (5, 7));
        assert_eq!(first.nesting_profile, vec![1, 1, 1]);
        assert!(!first.is_static);
        assert_eq!(first.id.as_str(), "TwoMethods.java:4:first");
        assert_eq!(first.header_line, 4);
        assert_eq!(first.close_brace_line, 8);
        assert_eq!(first.header_indent, "    ");

        let second = &idx.methods[1];
        assert_eq!((second.start_line, second.end_line), (11, 13));
        assert!(second.is_static);
        assert_eq!(
            second.parameters,
            vec![
                Parameter {
                    name: "s".into(),
                    type_text: "String".into()
                },
                Parameter {
                    name: "xs".into(),
                    type_text: "int[]".into()
                }
            ]
        );
        assert_eq!(second.local_declarations.len(), 1);
        assert_eq!(second.local_declarations[0].name, "n");
        assert_eq!(second.local_declarations[0].line, 11);

        let owner = &idx.classes[0];
        assert_eq!(owner.class_name, "TwoMethods");
        assert_eq!(
            owner.field_names.get("total").map(String::as_str),
            Some("int")
        );
        assert_eq!(
            owner.method_names.iter().collect::<Vec<_>>(),
            vec!["first", "second"]
        );
    }

    #[test]
    fn fields_only() {
        let idx = index_file(
            "public class F {\n  private static final int A = 1, B = 2;\n  java.util.List<String> names = new java.util.ArrayList<>();\n  int[] xs = {1, 2};\n}",
            "F.java",
        )
        .unwrap();
        assert!(idx.methods.is_empty());
        assert_eq!(idx.classes.len(), 1);
        let fields: Vec<_> = idx.classes[0].field_names.keys().cloned().collect();
        assert_eq!(fields, vec!["A", "B", "names", "xs"]);
    }

    #[test]
    fn inner_class_owns_its_methods() {
        let src = "\
class Outer {
    int x;
    void outer() {
        x++;
    }
    static class Inner {
        int y;
        void inner() {
            y++;
        }
    }
}
";
        let idx = index_file(src, "Outer.java").unwrap();
        assert_eq!(idx.classes.len(), 2);
        let inner = idx.methods.iter().find(|m| m.name == "inner").unwrap();
        assert_eq!(inner.owner.class_name, "Outer.Inner");
        assert!(inner.owner.field_names.contains_key("y"));
        assert!(!inner.owner.field_names.contains_key("x"));
        let outer = idx.methods.iter().find(|m| m.name == "outer").unwrap();
        assert_eq!(outer.owner.class_name, "Outer");
        assert!(!outer.owner.method_names.contains("inner"));
    }

    #[test]
    fn constructors_count_and_abstract_methods_do_not() {
        let src = "\
abstract class A {
    A(int v) { this.v = v; }
    abstract void run();
    Runnable r = new Runnable() {
        public void run() { }
    };
    static { init(); }
}
interface I { void f(); default int g() { return 1; } }
";
        let idx = index_file(src, "A.java").unwrap();
        let names: Vec<_> = idx.methods.iter().map(|m| m.name.as_str()).collect();
        assert_eq!(names, vec!["A", "g"]);
        let ctor = &idx.methods[0];
        // one-line body keeps its brace line
        assert_eq!((ctor.start_line, ctor.end_line), (2, 2));
        assert!(idx.classes[0].method_names.contains("run"));
        assert!(idx.classes[0].field_names.contains_key("r"));
        assert!(idx.classes[1].method_names.contains("f"));
    }

    #[test]
    fn enum_constants_with_bodies_are_not_methods() {
        let src = "enum Op {\n  ADD { int apply() { return 1; } },\n  SUB;\n  int code() {\n    return 0;\n  }\n}";
        let idx = index_file(src, "Op.java").unwrap();
        let names: Vec<_> = idx.methods.iter().map(|m| m.name.as_str()).collect();
        assert_eq!(names, vec!["code"]);
    }

    #[test]
    fn annotations_and_generics_in_headers() {
        let src = "class G {\n  @Test(expected = X.class)\n  public <T extends Comparable<T>> Map<String, List<T>> pick(@Nullable final T a, T... rest) {\n    return null;\n  }\n}";
        let idx = index_file(src, "G.java").unwrap();
        assert_eq!(idx.methods.len(), 1);
        let m = &idx.methods[0];
        assert_eq!(m.name, "pick");
        assert_eq!(m.header_line, 2);
        assert_eq!(m.name_line, 3);
        let types: Vec<_> = m.parameters.iter().map(|p| p.type_text.as_str()).collect();
        assert_eq!(types, vec!["T", "T..."]);
    }

    #[test]
    fn unbalanced_braces_are_rejected() {
        assert_eq!(
            index_file("class A {\n void f() {\n}\n", "A.java").unwrap_err(),
            IndexError::UnbalancedBraces { line: 1 }
        );
        assert!(matches!(
            index_file("class A { }\n}", "A.java"),
            Err(IndexError::UnbalancedBraces { line: 2 })
        ));
    }

    #[test]
    fn lex_errors_surface() {
        assert!(matches!(
            index_file("class A { String s = \"x; }", "A.java"),
            Err(IndexError::Lex(_))
        ));
    }

    #[test]
    fn method_at_line_lookup() {
        let idx = index_file(TWO_METHODS, "TwoMethods.java").unwrap();
        assert_eq!(idx.method_at_line(6).unwrap().name, "first");
        assert_eq!(idx.method_at_line(12).unwrap().name, "second");
        assert!(idx.method_at_line(2).is_none());
        assert!(idx.method_at_line(9).is_none());
    }

    #[test]
    fn resolve_local_prefers_latest_declaration_then_parameters() {
        let src = "class R {\n  void f(long a) {\n    int a2 = 1;\n    String b = \"\";\n    a2++;\n  }\n}";
        let idx = index_file(src, "R.java").unwrap();
        let m = &idx.methods[0];
        assert_eq!(m.resolve_local("a", 0), Some("long"));
        assert_eq!(m.resolve_local("b", 0), None);
        assert_eq!(m.resolve_local("b", m.body_tokens.len()), Some("String"));
    }
}
