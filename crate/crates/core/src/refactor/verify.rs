use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::source_model::syntax::{matching_close, parse_local_declaration};
use crate::source_model::{index_file, normalize_newlines, tokenize, Token};

use super::plan::{line_tokens, ExtractionPlan};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SiteVerdict {
    /// First line of the site in the original text.
    pub original_line: u32,
    /// Line of the replacing call in the rewritten text.
    pub call_line: Option<u32>,
    pub equivalent: bool,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Verification {
    pub passed: bool,
    pub sites: Vec<SiteVerdict>,
    pub problems: Vec<String>,
}

impl Verification {
    fn failed(problem: impl Into<String>) -> Self {
        Self {
            passed: false,
            sites: Vec::new(),
            problems: vec![problem.into()],
        }
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &SiteVerdict> {
        self.sites.iter().filter(|s| !s.equivalent)
    }
}

struct Call {
    line: u32,
    /// Assigned variable and whether the statement declares it.
    target: Option<(String, bool)>,
    arguments: Vec<Vec<String>>,
}

fn split_arguments(tokens: &[Token]) -> Vec<Vec<String>> {
    let mut args = vec![Vec::new()];
    let mut depth = 0i32;
    for t in tokens {
        match t.text.as_str() {
            "(" | "[" | "{" => depth += 1,
            ")" | "]" | "}" => depth -= 1,
            "," if depth == 0 => {
                args.push(Vec::new());
                continue;
            }
            _ => {}
        }
        args.last_mut().unwrap().push(t.text.clone());
    }
    if args.len() == 1 && args[0].is_empty() {
        args.clear();
    }
    args
}

fn find_calls(tokens: &[Token], name: &str, declaration_line: u32) -> Vec<Call> {
    let mut calls = Vec::new();
    for i in 0..tokens.len() {
        let t = &tokens[i];
        if !t.is(name)
            || t.line == declaration_line
            || !tokens.get(i + 1).is_some_and(|n| n.is("("))
        {
            continue;
        }
        if i > 0 && tokens[i - 1].is(".") {
            continue;
        }
        let Some(close) = matching_close(tokens, i + 1) else {
            continue;
        };
        if !tokens.get(close + 1).is_some_and(|t| t.is(";")) {
            continue;
        }
        let start = tokens[..i]
            .iter()
            .rposition(|t| t.is(";") || t.is("{") || t.is("}"))
            .map_or(0, |p| p + 1);
        let lhs = &tokens[start..i];
        let target = match lhs {
            [] => None,
            [.., var, eq] if eq.is("=") && var.is_identifier() => {
                Some((var.text.clone(), lhs.len() > 2))
            }
            _ => continue,
        };
        calls.push(Call {
            line: tokens[start].line,
            target,
            arguments: split_arguments(&tokens[i + 2..close]),
        });
    }
    calls
}

/// Inlines the generated method back into each call of the rewritten file
/// and checks that every site reproduces the original tokens.
pub fn verify_by_inlining(
    plan: &ExtractionPlan,
    before: &BTreeMap<String, String>,
    after: &BTreeMap<String, String>,
) -> Verification {
    let (Some(before_text), Some(after_text)) =
        (before.get(&plan.file_path), after.get(&plan.file_path))
    else {
        return Verification::failed(format!("no source text for `{}`", plan.file_path));
    };
    let (before_text, after_text) = (
        normalize_newlines(before_text),
        normalize_newlines(after_text),
    );
    let (Ok(before_tokens), Ok(after_tokens)) = (tokenize(&before_text), tokenize(&after_text))
    else {
        return Verification::failed("source does not lex");
    };
    let index = match index_file(&after_text, &plan.file_path) {
        Ok(i) => i,
        Err(e) => return Verification::failed(format!("rewritten file does not index: {e}")),
    };
    let Some(callee) = index
        .methods
        .iter()
        .find(|m| m.name == plan.method_name && m.owner.class_name == plan.class_name)
    else {
        return Verification::failed(format!("method `{}` not found", plan.method_name));
    };

    let mut body: Vec<String> = callee.body_tokens.iter().map(|t| t.text.clone()).collect();
    let mut returned = None;
    if let [.., ret, var, semi] = callee.body_tokens.as_slice() {
        if ret.is_keyword("return") && var.is_identifier() && semi.is(";") {
            returned = Some(var.text.clone());
            body.truncate(body.len() - 3);
        }
    }
    let leading_declaration = returned.as_ref().and_then(|r| {
        let (names, end) = parse_local_declaration(&callee.body_tokens, 0)?;
        let bare = names.len() == 1 && names[0].name == *r && names[0].index + 1 == end;
        bare.then_some(end + 1)
    });
    let params: Vec<&str> = callee.parameters.iter().map(|p| p.name.as_str()).collect();

    let calls = find_calls(&after_tokens, &plan.method_name, callee.name_line);
    let mut sites_sorted = plan.target_sites.clone();
    sites_sorted.sort_by_key(|s| s.start_line);
    let mut problems = Vec::new();
    if calls.len() != sites_sorted.len() {
        problems.push(format!(
            "{} call(s) for {} site(s)",
            calls.len(),
            sites_sorted.len()
        ));
    }

    let mut sites = Vec::new();
    for (k, site) in sites_sorted.iter().enumerate() {
        let original: Vec<&str> = line_tokens(&before_tokens, site.start_line, site.end_line)
            .iter()
            .map(|t| t.text.as_str())
            .collect();
        let Some(call) = calls.get(k) else {
            sites.push(SiteVerdict {
                original_line: site.start_line,
                call_line: None,
                equivalent: false,
                detail: Some("no call replaces this site".to_string()),
            });
            continue;
        };
        if call.arguments.len() != params.len() {
            sites.push(SiteVerdict {
                original_line: site.start_line,
                call_line: Some(call.line),
                equivalent: false,
                detail: Some(format!(
                    "{} argument(s) for {} parameter(s)",
                    call.arguments.len(),
                    params.len()
                )),
            });
            continue;
        }
        let mut mapping: BTreeMap<&str, Vec<String>> = params
            .iter()
            .copied()
            .zip(call.arguments.iter().cloned())
            .collect();
        let mut skip = 0;
        if let (Some(r), Some((target, declares))) = (&returned, &call.target) {
            mapping
                .entry(r.as_str())
                .or_insert_with(|| vec![target.clone()]);
            if !declares {
                skip = leading_declaration.unwrap_or(0);
            }
        }
        let mut expanded: Vec<String> = Vec::new();
        for (i, text) in body.iter().enumerate().skip(skip) {
            let member = i > 0 && body[i - 1] == ".";
            match mapping.get(text.as_str()) {
                Some(repl) if !member && callee.body_tokens[i].is_identifier() => {
                    expanded.extend(repl.iter().cloned())
                }
                _ => expanded.push(text.clone()),
            }
        }
        let equivalent = expanded == original;
        sites.push(SiteVerdict {
            original_line: site.start_line,
            call_line: Some(call.line),
            equivalent,
            detail: (!equivalent).then(|| {
                format!(
                    "inlined `{}` differs from `{}`",
                    expanded.join(" "),
                    original.join(" ")
                )
            }),
        });
    }
    Verification {
        passed: problems.is_empty() && sites.iter().all(|s| s.equivalent),
        sites,
        problems,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clone_detect::{find_duplicates, CloneMatch};
    use crate::refactor::{analyze_extractability, apply_extraction, plan_extraction};
    use crate::source_model::{validate_fragment, MethodUnit, PasteSite};

    fn plan_for(src: &str, frag: &str, line: u32, name: &str) -> ExtractionPlan {
        let idx = index_file(src, "T.java").unwrap();
        let host = idx.method_at_line(line).unwrap();
        let fragment = validate_fragment(frag).with_paste_site(PasteSite {
            file_path: "T.java".into(),
            line,
            method_id: Some(host.id.clone()),
        });
        let summary = analyze_extractability(&fragment, host).unwrap();
        let matches = find_duplicates(&fragment, &idx.methods, 0.8).unwrap();
        let pairs: Vec<(&MethodUnit, &CloneMatch)> = matches
            .iter()
            .map(|m| (idx.methods.iter().find(|u| u.id == m.method_id).unwrap(), m))
            .collect();
        plan_extraction(&summary, name, host, src, &pairs).unwrap()
    }

    fn round_trip(src: &str, plan: &ExtractionPlan) -> Verification {
        let before = BTreeMap::from([("T.java".to_string(), src.to_string())]);
        let after = apply_extraction(plan, &before).unwrap().sources;
        verify_by_inlining(plan, &before, &after)
    }

    const TWO_SITES: &str = "\
class T {
    int f(int a, int b) {
        int d = a - b;
        return d;
    }
    int g(int a, int b) {
        int d = a - b;
        return d * 2;
    }
}
";

    #[test]
    fn two_sites_round_trip() {
        let plan = plan_for(TWO_SITES, "int d = a - b;", 3, "diff");
        assert_eq!(plan.target_sites.len(), 2);
        let v = round_trip(TWO_SITES, &plan);
        assert!(v.passed, "{v:?}");
        assert_eq!(v.sites.len(), 2);
    }

    #[test]
    fn swapped_arguments_mismatch_everywhere() {
        let mut plan = plan_for(TWO_SITES, "int d = a - b;", 3, "diff");
        plan.arguments.reverse();
        let v = round_trip(TWO_SITES, &plan);
        assert!(!v.passed);
        assert_eq!(v.mismatches().count(), 2);
    }

    #[test]
    fn void_and_predeclared_outputs() {
        let src = "class T {\n  void f(int a) {\n    log(a);\n    log(a + 1);\n  }\n}";
        let plan = plan_for(src, "log(a);\nlog(a + 1);", 3, "both");
        assert!(round_trip(src, &plan).passed);

        let src = "class T {\n  int f(int x) {\n    int y;\n    y = x + 1;\n    return y;\n  }\n}";
        let plan = plan_for(src, "y = x + 1;", 4, "next");
        assert!(round_trip(src, &plan).passed);
    }
}
