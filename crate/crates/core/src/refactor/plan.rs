use serde::{Deserialize, Serialize};

use crate::clone_detect::{CloneMatch, MatchKind};
use crate::source_model::{is_reserved, normalize_newlines, tokenize, MethodId, MethodUnit, Token};

use super::dataflow::{summarize_dataflow, DataFlowSummary};
use super::{RefactorError, Variable};

const DEFAULT_INDENT_UNIT: &str = "    ";

/// A clone site to be replaced by a call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TargetSite {
    pub method_id: MethodId,
    pub start_line: u32,
    pub end_line: u32,
}

/// A match left untouched, with the reason.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SkippedSite {
    pub method_id: MethodId,
    pub reason: String,
}

/// Everything needed to rewrite one file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExtractionPlan {
    pub method_name: String,
    pub parameters: Vec<Variable>,
    /// Expressions passed at each call, normally the parameter names.
    pub arguments: Vec<String>,
    pub return_type: String,
    pub output: Option<Variable>,
    /// Call sites declare the output (`T y = m(..);`) instead of assigning it.
    pub declare_output_at_call: bool,
    /// The output is assigned before being read, so the new method declares it.
    pub declare_output_in_body: bool,
    pub is_static: bool,
    /// Fragment lines relative to the body indentation, plus the return.
    pub body_text: String,
    pub file_path: String,
    pub class_name: String,
    /// Sites ordered by line; the paste site is always among them.
    pub target_sites: Vec<TargetSite>,
    pub skipped_sites: Vec<SkippedSite>,
    /// The new method goes right after this line.
    pub insertion_line: u32,
    pub method_indent: String,
    pub indent_unit: String,
    pub fragment_tokens: Vec<String>,
}

impl ExtractionPlan {
    pub fn signature(&self) -> String {
        let params: Vec<String> = self
            .parameters
            .iter()
            .map(|p| format!("{} {}", array_form(&p.type_text), p.name))
            .collect();
        format!(
            "private {}{} {}({})",
            if self.is_static { "static " } else { "" },
            self.return_type,
            self.method_name,
            params.join(", ")
        )
    }

    /// The statement that replaces each site.
    pub fn call_template(&self) -> String {
        let call = format!("{}({});", self.method_name, self.arguments.join(", "));
        match &self.output {
            Some(out) if self.declare_output_at_call => {
                format!("{} {} = {call}", out.type_text, out.name)
            }
            Some(out) => format!("{} = {call}", out.name),
            None => call,
        }
    }

    /// Lines of the generated method, indented for insertion.
    pub fn render_method(&self) -> Vec<String> {
        let inner = format!("{}{}", self.method_indent, self.indent_unit);
        let mut lines = vec![format!("{}{} {{", self.method_indent, self.signature())];
        for line in self.body_text.lines() {
            if line.trim().is_empty() {
                lines.push(String::new());
            } else {
                lines.push(format!("{inner}{line}"));
            }
        }
        lines.push(format!("{}}}", self.method_indent));
        lines
    }
}

/// Varargs parameters become arrays since the call passes the array itself.
fn array_form(type_text: &str) -> String {
    match type_text.strip_suffix("...") {
        Some(base) => format!("{base}[]"),
        None => type_text.to_string(),
    }
}

pub fn is_java_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    (first.is_alphabetic() || first == '_' || first == '$')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '$')
        && name != "_"
        && !is_reserved(name)
        && !matches!(name, "true" | "false" | "null")
}

/// Tokens on lines `start..=end` of a token stream.
pub(super) fn line_tokens(tokens: &[Token], start: u32, end: u32) -> &[Token] {
    let from = tokens.partition_point(|t| t.line < start);
    let to = tokens.partition_point(|t| t.line <= end);
    &tokens[from..to]
}

pub(super) fn texts_equal(tokens: &[Token], texts: &[String]) -> bool {
    tokens.len() == texts.len() && tokens.iter().zip(texts).all(|(t, s)| t.text == *s)
}

fn leading_ws(line: &str) -> &str {
    &line[..line.len() - line.trim_start().len()]
}

/// Plans the extraction described by `summary` into a method called `name`.
///
/// `source` is the text of the enclosing method's file and `candidates` the
/// clone matches found for the fragment with their methods. Only exact
/// matches in the same class whose lines hold nothing but the fragment, and
/// whose variables line up with the paste site, become target sites.
pub fn plan_extraction(
    summary: &DataFlowSummary,
    name: &str,
    enclosing: &MethodUnit,
    source: &str,
    candidates: &[(&MethodUnit, &CloneMatch)],
) -> Result<ExtractionPlan, RefactorError> {
    if !is_java_identifier(name) {
        return Err(RefactorError::InvalidIdentifier(name.to_string()));
    }
    if enclosing.owner.method_names.contains(name) {
        return Err(RefactorError::NameCollision(name.to_string()));
    }
    if !summary.is_feasible() {
        return Err(if summary.illegal_flow.is_empty() {
            RefactorError::TooManyOutputs(summary.outputs.iter().map(|v| v.name.clone()).collect())
        } else {
            RefactorError::IllegalFlow(summary.illegal_flow.clone())
        });
    }

    let source = normalize_newlines(source);
    let file_tokens = tokenize(&source).map_err(|e| RefactorError::Index(e.into()))?;
    let (s, e) = summary.token_range;
    let fragment_tokens: Vec<String> = enclosing.body_tokens[s..e]
        .iter()
        .map(|t| t.text.clone())
        .collect();
    if !texts_equal(
        line_tokens(&file_tokens, summary.start_line, summary.end_line),
        &fragment_tokens,
    ) {
        return Err(RefactorError::UnalignedFragment);
    }

    let mut target_sites = vec![TargetSite {
        method_id: enclosing.id.clone(),
        start_line: summary.start_line,
        end_line: summary.end_line,
    }];
    let mut skipped_sites = Vec::new();
    for (method, m) in candidates {
        if m.method_id == enclosing.id {
            continue;
        }
        match site_for(
            summary,
            enclosing,
            method,
            m,
            &file_tokens,
            &fragment_tokens,
        ) {
            Ok(site) => target_sites.push(site),
            Err(reason) => skipped_sites.push(SkippedSite {
                method_id: m.method_id.clone(),
                reason,
            }),
        }
    }
    target_sites.sort_by_key(|t| t.start_line);

    let lines: Vec<&str> = source.lines().collect();
    let base = leading_ws(lines[summary.start_line as usize - 1]);
    let first_body_line = lines[enclosing.body_tokens[0].line as usize - 1];
    let indent_unit = leading_ws(first_body_line)
        .strip_prefix(enclosing.header_indent.as_str())
        .filter(|u| !u.is_empty() && enclosing.body_tokens[0].line != enclosing.header_line)
        .unwrap_or(DEFAULT_INDENT_UNIT)
        .to_string();

    let output = summary.output().cloned();
    let declare_output_at_call = output.is_some() && summary.output_declared_in_fragment;
    let declare_output_in_body = output.as_ref().is_some_and(|o| {
        !summary.output_declared_in_fragment && !summary.inputs.iter().any(|i| i.name == o.name)
    });
    let mut body: Vec<String> = Vec::new();
    if let (true, Some(out)) = (declare_output_in_body, &output) {
        body.push(format!("{} {};", out.type_text, out.name));
    }
    for line in &lines[summary.start_line as usize - 1..summary.end_line as usize] {
        let rel = line.strip_prefix(base).unwrap_or_else(|| line.trim_start());
        body.push(rel.trim_end().to_string());
    }
    if let Some(out) = &output {
        body.push(format!("return {};", out.name));
    }

    Ok(ExtractionPlan {
        method_name: name.to_string(),
        arguments: summary.inputs.iter().map(|v| v.name.clone()).collect(),
        parameters: summary.inputs.clone(),
        return_type: output
            .as_ref()
            .map_or("void".to_string(), |o| o.type_text.clone()),
        output,
        declare_output_at_call,
        declare_output_in_body,
        is_static: enclosing.is_static,
        body_text: body.join("\n"),
        file_path: enclosing.file_path().to_string(),
        class_name: enclosing.owner.class_name.clone(),
        target_sites,
        skipped_sites,
        insertion_line: enclosing.close_brace_line,
        method_indent: enclosing.header_indent.clone(),
        indent_unit,
        fragment_tokens,
    })
}

fn site_for(
    summary: &DataFlowSummary,
    enclosing: &MethodUnit,
    method: &MethodUnit,
    m: &CloneMatch,
    file_tokens: &[Token],
    fragment_tokens: &[String],
) -> Result<TargetSite, String> {
    if m.kind != MatchKind::Exact {
        return Err("near match; only exact copies are replaced".to_string());
    }
    if method.owner.file_path != enclosing.owner.file_path
        || method.owner.class_name != enclosing.owner.class_name
    {
        return Err(format!(
            "declared in another class ({})",
            method.owner.class_name
        ));
    }
    let (Some(range), Some(span)) = (m.token_range, m.match_span) else {
        return Err("match has no location".to_string());
    };
    if !texts_equal(
        line_tokens(file_tokens, span.start, span.end),
        fragment_tokens,
    ) {
        return Err("copy shares its lines with other code".to_string());
    }
    let site = summarize_dataflow(method, range).map_err(|e| e.to_string())?;
    if !site.illegal_flow.is_empty() {
        return Err("control flow leaves the copy".to_string());
    }
    if site.inputs != summary.inputs {
        return Err("copy reads different local variables".to_string());
    }
    if !site.outputs.iter().all(|o| summary.outputs.contains(o))
        || site.output_declared_in_fragment != summary.output_declared_in_fragment
            && !site.outputs.is_empty()
    {
        return Err("copy defines different values used afterwards".to_string());
    }
    Ok(TargetSite {
        method_id: method.id.clone(),
        start_line: span.start,
        end_line: span.end,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clone_detect::find_duplicates;
    use crate::refactor::analyze_extractability;
    use crate::source_model::{index_file, validate_fragment, FileIndex, PasteSite};

    fn setup(
        src: &str,
        frag: &str,
        line: u32,
        name: &str,
    ) -> Result<ExtractionPlan, RefactorError> {
        let idx: FileIndex = index_file(src, "T.java").unwrap();
        let host = idx.method_at_line(line).unwrap();
        let fragment = validate_fragment(frag).with_paste_site(PasteSite {
            file_path: "T.java".into(),
            line,
            method_id: Some(host.id.clone()),
        });
        let summary = analyze_extractability(&fragment, host)?;
        let matches = find_duplicates(&fragment, &idx.methods, 0.8).unwrap();
        let pairs: Vec<(&MethodUnit, &CloneMatch)> = matches
            .iter()
            .map(|m| (idx.methods.iter().find(|u| u.id == m.method_id).unwrap(), m))
            .collect();
        plan_extraction(&summary, name, host, src, &pairs)
    }

    const SRC: &str = "\
class T {
    int f(int x) {
        int k = 2;
        int y = x * k;
        return y;
    }
    int g(int x) {
        int k = 3;
        int y = x * k;
        return y + 1;
    }
}
";

    #[test]
    fn non_void_plan() {
        let plan = setup(SRC, "int y = x * k;", 4, "compute").unwrap();
        assert_eq!(plan.signature(), "private int compute(int x, int k)");
        assert_eq!(plan.call_template(), "int y = compute(x, k);");
        assert_eq!(plan.body_text, "int y = x * k;\nreturn y;");
        assert_eq!(plan.target_sites.len(), 2);
        assert_eq!(plan.insertion_line, 6);
        assert_eq!(
            plan.render_method(),
            [
                "    private int compute(int x, int k) {",
                "        int y = x * k;",
                "        return y;",
                "    }"
            ]
        );
    }

    #[test]
    fn void_plan_and_static() {
        let src = "class T {\n  static void f(int a) {\n    log(a);\n  }\n}";
        let plan = setup(src, "log(a);", 3, "emit").unwrap();
        assert_eq!(plan.signature(), "private static void emit(int a)");
        assert_eq!(plan.call_template(), "emit(a);");
        assert_eq!(plan.indent_unit, "  ");
    }

    #[test]
    fn assignment_call_for_existing_output() {
        let src = "class T {\n  int f(int x) {\n    int y;\n    y = x + 1;\n    return y;\n  }\n}";
        let plan = setup(src, "y = x + 1;", 4, "next").unwrap();
        assert_eq!(plan.call_template(), "y = next(x);");
        assert!(plan.declare_output_in_body);
        assert_eq!(plan.body_text, "int y;\ny = x + 1;\nreturn y;");
    }

    #[test]
    fn name_checks() {
        assert_eq!(
            setup(SRC, "int y = x * k;", 4, "g").unwrap_err(),
            RefactorError::NameCollision("g".into())
        );
        assert_eq!(
            setup(SRC, "int y = x * k;", 4, "2bad").unwrap_err(),
            RefactorError::InvalidIdentifier("2bad".into())
        );
        assert!(!is_java_identifier("class"));
        assert!(is_java_identifier("$ok_1"));
    }

    #[test]
    fn varargs_parameter_becomes_array() {
        let src = "class T {\n  void f(String... xs) {\n    use(xs);\n  }\n}";
        let plan = setup(src, "use(xs);", 3, "h").unwrap();
        assert_eq!(plan.signature(), "private void h(String[] xs)");
    }

    #[test]
    fn mismatching_copy_is_skipped() {
        let src = "\
class T {
    void f(int a) {
        log(a);
    }
    int a;
    void g() {
        log(a);
    }
}
";
        let plan = setup(src, "log(a);", 3, "emit").unwrap();
        assert_eq!(plan.target_sites.len(), 1);
        assert_eq!(plan.skipped_sites.len(), 1);
        assert_eq!(
            plan.skipped_sites[0].reason,
            "copy reads different local variables"
        );
    }
}
