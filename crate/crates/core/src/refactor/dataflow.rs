use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::clone_detect::token_occurrences;
use crate::source_model::syntax::{parse_statements, Stmt, StmtKind};
use crate::source_model::{Fragment, MethodId, MethodUnit, Token};

use super::{FlowViolation, JumpKind, RefactorError, Variable};

const ASSIGN_OPS: [&str; 12] = [
    "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>=",
];

/// Variables flowing into and out of a fragment within its enclosing method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DataFlowSummary {
    pub method_id: MethodId,
    /// Fragment position within the method's body tokens, end exclusive.
    pub token_range: (usize, usize),
    pub start_line: u32,
    pub end_line: u32,
    /// In order of first use.
    pub inputs: Vec<Variable>,
    pub outputs: Vec<Variable>,
    /// Whether the single output is declared by the fragment itself.
    pub output_declared_in_fragment: bool,
    pub illegal_flow: Vec<FlowViolation>,
}

impl DataFlowSummary {
    pub fn is_feasible(&self) -> bool {
        self.outputs.len() <= 1 && self.illegal_flow.is_empty()
    }

    pub fn output(&self) -> Option<&Variable> {
        self.outputs.first()
    }
}

#[derive(Debug, Clone)]
struct VarRef {
    index: usize,
    name: String,
    read: bool,
    write: bool,
    pure_write: bool,
}

fn is_variable_ref(tokens: &[Token], i: usize) -> bool {
    let t = &tokens[i];
    if !t.is_identifier() {
        return false;
    }
    let prev = i.checked_sub(1).map(|p| &tokens[p]);
    let next = tokens.get(i + 1);
    if prev.is_some_and(|p| {
        p.is(".")
            || p.is("::")
            || p.is("@")
            || p.is_keyword("new")
            || p.is_keyword("break")
            || p.is_keyword("continue")
            || p.is_keyword("case")
    }) {
        return false;
    }
    if next.is_some_and(|n| n.is("(") || n.is("->") || n.is_identifier()) {
        return false;
    }
    let label_position = prev.is_none_or(|p| p.is(";") || p.is("{") || p.is("}") || p.is(":"));
    !(label_position && next.is_some_and(|n| n.is(":")))
}

fn variable_refs(tokens: &[Token]) -> Vec<VarRef> {
    (0..tokens.len())
        .filter(|&i| is_variable_ref(tokens, i))
        .map(|i| {
            let next = tokens.get(i + 1);
            let prev = i.checked_sub(1).map(|p| &tokens[p]);
            let step = |t: Option<&Token>| t.is_some_and(|t| t.is("++") || t.is("--"));
            let pure_write = next.is_some_and(|n| n.is("="));
            let write = pure_write
                || next.is_some_and(|n| ASSIGN_OPS.contains(&n.text.as_str()))
                || step(next)
                || step(prev);
            VarRef {
                index: i,
                name: tokens[i].text.clone(),
                read: !pure_write,
                write,
                pure_write,
            }
        })
        .collect()
}

fn sublists(stmt: &Stmt) -> Vec<&[Stmt]> {
    match &stmt.kind {
        StmtKind::Block(v) | StmtKind::Switch(v) | StmtKind::Try(v) => vec![v.as_slice()],
        StmtKind::If {
            then_branch,
            else_branch,
        } => {
            let mut out = vec![std::slice::from_ref(then_branch.as_ref())];
            if let Some(e) = else_branch {
                out.push(std::slice::from_ref(e.as_ref()));
            }
            out
        }
        StmtKind::Loop(b) | StmtKind::Synchronized(b) | StmtKind::Labeled { body: b, .. } => {
            vec![std::slice::from_ref(b.as_ref())]
        }
        _ => Vec::new(),
    }
}

/// True when `start..end` is a run of whole sibling statements.
fn spans_statements(list: &[Stmt], start: usize, end: usize) -> bool {
    if let Some(k) = list.iter().position(|s| s.start == start) {
        if list[k..].iter().any(|s| s.end == end) {
            return true;
        }
    }
    list.iter()
        .filter(|s| s.start <= start && end <= s.end)
        .flat_map(sublists)
        .any(|sub| spans_statements(sub, start, end))
}

/// Token ranges of loop statements strictly enclosing `start..end`.
fn enclosing_loops(list: &[Stmt], start: usize, end: usize, out: &mut Vec<(usize, usize)>) {
    for s in list.iter().filter(|s| s.start <= start && end <= s.end) {
        if matches!(s.kind, StmtKind::Loop(_)) && (s.start, s.end) != (start, end) {
            out.push((s.start, s.end));
        }
        for sub in sublists(s) {
            enclosing_loops(sub, start, end, out);
        }
    }
}

#[derive(Default)]
struct JumpScope {
    loops: u32,
    breakables: u32,
    labels: Vec<String>,
}

fn collect_violations(
    list: &[Stmt],
    tokens: &[Token],
    scope: &mut JumpScope,
    out: &mut Vec<FlowViolation>,
) {
    for s in list {
        let line = tokens[s.start].line;
        let violation = |kind, label: &Option<String>| FlowViolation {
            kind,
            line,
            label: label.clone(),
        };
        match &s.kind {
            StmtKind::Return => out.push(violation(JumpKind::Return, &None)),
            StmtKind::Break(label) => {
                let escapes = match label {
                    Some(l) => !scope.labels.contains(l),
                    None => scope.breakables == 0,
                };
                if escapes {
                    out.push(violation(JumpKind::Break, label));
                }
            }
            StmtKind::Continue(label) => {
                let escapes = match label {
                    Some(l) => !scope.labels.contains(l),
                    None => scope.loops == 0,
                };
                if escapes {
                    out.push(violation(JumpKind::Continue, label));
                }
            }
            StmtKind::Loop(body) => {
                scope.loops += 1;
                scope.breakables += 1;
                collect_violations(std::slice::from_ref(body), tokens, scope, out);
                scope.loops -= 1;
                scope.breakables -= 1;
            }
            StmtKind::Switch(body) => {
                scope.breakables += 1;
                collect_violations(body, tokens, scope, out);
                scope.breakables -= 1;
            }
            StmtKind::Labeled { label, body } => {
                scope.labels.push(label.clone());
                collect_violations(std::slice::from_ref(body), tokens, scope, out);
                scope.labels.pop();
            }
            _ => {
                for sub in sublists(s) {
                    collect_violations(sub, tokens, scope, out);
                }
            }
        }
    }
}

/// Position of the fragment in `method`'s body, preferring the copy on the
/// paste line when the fragment carries a paste site.
pub fn locate_fragment(fragment: &Fragment, method: &MethodUnit) -> Option<(usize, usize)> {
    let hits = token_occurrences(&method.body_tokens, &fragment.tokens);
    let paste_line = fragment.paste_site.as_ref().map(|s| s.line);
    let start = hits
        .iter()
        .copied()
        .find(|&i| Some(method.body_tokens[i].line) == paste_line)
        .or_else(|| hits.first().copied())?;
    Some((start, start + fragment.tokens.len()))
}

fn known_type(name: &str, type_text: &str) -> Result<Variable, RefactorError> {
    if type_text == "var" {
        return Err(RefactorError::UnresolvedType(name.to_string()));
    }
    Ok(Variable {
        name: name.to_string(),
        type_text: type_text.to_string(),
    })
}

/// Computes inputs, outputs, and escaping jumps for the fragment occupying
/// `range` of `method`'s body without judging feasibility.
pub fn summarize_dataflow(
    method: &MethodUnit,
    range: (usize, usize),
) -> Result<DataFlowSummary, RefactorError> {
    let (s, e) = range;
    let body = &method.body_tokens;
    let not_found = || RefactorError::FragmentNotFound(method.id.to_string());
    if s >= e || e > body.len() {
        return Err(not_found());
    }
    let stmts = parse_statements(body).map_err(|_| not_found())?;
    if !spans_statements(&stmts, s, e) {
        return Err(not_found());
    }

    let refs = variable_refs(body);
    let inside: Vec<&VarRef> = refs.iter().filter(|r| (s..e).contains(&r.index)).collect();
    let declared_inside = |name: &str, before: usize| {
        method
            .local_declarations
            .iter()
            .any(|d| d.name == name && (s..=before).contains(&d.token_index))
    };

    // paren/brace depth relative to the fragment start
    let mut depth = vec![0i32; e - s];
    let mut d = 0;
    for i in s..e {
        if body[i].is("}") || body[i].is(")") {
            d -= 1;
        }
        depth[i - s] = d;
        if body[i].is("{") || body[i].is("(") {
            d += 1;
        }
    }

    let mut inputs = Vec::new();
    let mut decided: BTreeMap<&str, bool> = BTreeMap::new();
    for r in &inside {
        if decided.contains_key(r.name.as_str()) || declared_inside(&r.name, r.index) {
            continue;
        }
        let Some(ty) = method.resolve_local(&r.name, s) else {
            continue;
        };
        let statement_start =
            r.index == s || body[r.index - 1].is(";") || body[r.index - 1].is("}");
        let assigned_first = r.pure_write && statement_start && depth[r.index - s] == 0;
        decided.insert(&r.name, !assigned_first);
        if !assigned_first {
            inputs.push(known_type(&r.name, ty)?);
        }
    }

    let redeclared_between = |name: &str, from: usize, to: usize| {
        method
            .local_declarations
            .iter()
            .any(|d| d.name == name && d.token_index >= from && d.token_index <= to)
    };
    let mut loops = Vec::new();
    enclosing_loops(&stmts, s, e, &mut loops);

    let mut outputs: Vec<(usize, Variable, bool)> = Vec::new();
    for decl in method
        .local_declarations
        .iter()
        .filter(|d| (s..e).contains(&d.token_index))
    {
        let used_after = refs.iter().any(|r| {
            r.index >= e && r.name == decl.name && !redeclared_between(&decl.name, e, r.index)
        });
        if used_after && !outputs.iter().any(|(_, v, _)| v.name == decl.name) {
            outputs.push((
                decl.token_index,
                known_type(&decl.name, &decl.type_text)?,
                true,
            ));
        }
    }
    for r in inside.iter().filter(|r| r.write) {
        if declared_inside(&r.name, r.index) || outputs.iter().any(|(_, v, _)| v.name == r.name) {
            continue;
        }
        let Some(ty) = method.resolve_local(&r.name, s) else {
            continue;
        };
        let after = refs
            .iter()
            .find(|a| a.index >= e && a.name == r.name && !redeclared_between(&r.name, e, a.index));
        let read_after = after.is_some_and(|a| a.read);
        let read_in_loop = loops.iter().any(|&(ls, le)| {
            refs.iter().any(|a| {
                a.read
                    && a.name == r.name
                    && (ls..le).contains(&a.index)
                    && !(s..e).contains(&a.index)
            })
        });
        if read_after || read_in_loop {
            outputs.push((r.index, known_type(&r.name, ty)?, false));
        }
    }
    outputs.sort_by_key(|(i, _, _)| *i);

    let mut illegal_flow = Vec::new();
    let fragment_stmts = parse_statements(&body[s..e]).map_err(|_| not_found())?;
    collect_violations(
        &fragment_stmts,
        &body[s..e],
        &mut JumpScope::default(),
        &mut illegal_flow,
    );

    Ok(DataFlowSummary {
        method_id: method.id.clone(),
        token_range: range,
        start_line: body[s].line,
        end_line: body[e - 1].line,
        inputs,
        output_declared_in_fragment: outputs.len() == 1 && outputs[0].2,
        outputs: outputs.into_iter().map(|(_, v, _)| v).collect(),
        illegal_flow,
    })
}

/// Decides whether `fragment` can become its own method inside `enclosing`.
pub fn analyze_extractability(
    fragment: &Fragment,
    enclosing: &MethodUnit,
) -> Result<DataFlowSummary, RefactorError> {
    if !fragment.valid {
        return Err(RefactorError::InvalidFragment);
    }
    let range = locate_fragment(fragment, enclosing)
        .ok_or_else(|| RefactorError::FragmentNotFound(enclosing.id.to_string()))?;
    let summary = summarize_dataflow(enclosing, range)?;
    if !summary.illegal_flow.is_empty() {
        return Err(RefactorError::IllegalFlow(summary.illegal_flow));
    }
    if summary.outputs.len() > 1 {
        return Err(RefactorError::TooManyOutputs(
            summary.outputs.iter().map(|v| v.name.clone()).collect(),
        ));
    }
    Ok(summary)
}
