//! Acceptance criteria, one PASS/FAIL line each.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anticopypaster_cli::scenario::{prepare, simulate, Execution, ProjectLog, Scenario};
use anticopypaster_core::clone_detect::{find_duplicates, CloneMatch, LineSpan, MatchKind};
use anticopypaster_core::decision::{evaluate_gate, AnalysisContext, Outcome, SubmetricFlags};
use anticopypaster_core::metrics::{
    fragment_vector, percentile_threshold, Category, CategorySensitivity, Connectivity, KeywordSet,
    MetricVector, ProjectDistribution, SizeScope, SubmetricId,
};
use anticopypaster_core::refactor::verify_by_inlining;
use anticopypaster_core::source_model::{
    index_file, nesting_profile, validate_fragment, Fragment, MethodUnit, PasteSite, Token,
    TokenKind,
};
use anticopypaster_core::workspace::open_project;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use serde_json::Value;

use common::*;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn runner() -> TestRunner {
    TestRunner::new_with_rng(
        Config::default(),
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn draw<S: Strategy>(runner: &mut TestRunner, strategy: &S) -> S::Value {
    strategy.new_tree(runner).unwrap().current()
}

fn corpus_check() -> Verdict {
    let cases = corpus();
    ensure(cases.len() == 10, || {
        format!("expected 10 cases, found {}", cases.len())
    })?;
    let started = Instant::now();
    let (mut exact, mut near) = (0, 0);
    for case in &cases {
        let run = cli(&[
            "check".as_ref(),
            case.project().as_os_str(),
            "--fragment".as_ref(),
            case.fragment_path().as_os_str(),
            "--at".as_ref(),
            case.meta.at.as_ref(),
            "--json".as_ref(),
        ]);
        let expected = if case.is_exact() { 0 } else { 1 };
        ensure(run.code == expected, || {
            format!(
                "{}: exit {} (want {expected}) {}",
                case.name, run.code, run.stderr
            )
        })?;
        let json: Value = serde_json::from_str(&run.stdout).map_err(|e| e.to_string())?;
        let exact_matches = json["matches"]
            .as_array()
            .map(|m| m.iter().filter(|m| m["kind"] == "exact").count())
            .unwrap_or(0);
        if case.is_exact() {
            exact += 1;
        } else {
            // only the pasted copy itself is an exact site
            ensure(exact_matches == 1, || {
                format!("{}: {exact_matches} exact sites in a near case", case.name)
            })?;
            near += 1;
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(5), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{exact}/7 exact triggered, 0/{near} near triggered, {elapsed:.2?}"
    ))
}

fn oracle_percentile(sample: &[f64], sensitivity: u32) -> f64 {
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut k = 1;
    while k * 100 < sensitivity as usize * n {
        k += 1;
    }
    sorted[k - 1]
}

fn percentile_oracle() -> Verdict {
    let mut runner = runner();
    let value = prop_oneof![(0u32..20).prop_map(f64::from), -1000.0..1000.0f64];
    let strategy = (prop::collection::vec(value, 1..=500), 1u32..=100);
    let cases: Vec<(Vec<f64>, u32)> = (0..1000).map(|_| draw(&mut runner, &strategy)).collect();
    let started = Instant::now();
    let mut mismatches = 0;
    for (sample, s) in &cases {
        let mut sorted = sample.clone();
        sorted.sort_by(f64::total_cmp);
        let got = percentile_threshold(&sorted, *s).map_err(|e| e.to_string())?;
        if got.to_bits() != oracle_percentile(sample, *s).to_bits() {
            mismatches += 1;
        }
    }
    let elapsed = started.elapsed();
    ensure(mismatches == 0, || {
        format!("{mismatches} of 1000 samples differ")
    })?;
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("1000 samples, 0 mismatches, {elapsed:.2?}"))
}

fn brute_force_matches(
    fragment: &Fragment,
    methods: &[&MethodUnit],
    threshold: f64,
) -> Vec<CloneMatch> {
    let needle = &fragment.tokens;
    let words = |ts: &[Token]| -> Vec<String> {
        ts.iter()
            .filter(|t| t.kind != TokenKind::Punctuation)
            .map(|t| t.text.clone())
            .collect()
    };
    let mut out = Vec::new();
    for m in methods {
        let hay = &m.body_tokens;
        let mut starts = Vec::new();
        if needle.len() <= hay.len() {
            for i in 0..=hay.len() - needle.len() {
                if (0..needle.len()).all(|j| hay[i + j].text == needle[j].text) {
                    starts.push(i);
                }
            }
        }
        if let Some(&first) = starts.first() {
            let site = fragment.paste_site.as_ref();
            let host = site.is_some_and(|s| s.method_id.as_ref() == Some(&m.id));
            let start = site
                .filter(|_| host)
                .and_then(|s| starts.iter().copied().find(|&i| hay[i].line == s.line))
                .unwrap_or(first);
            let end = start + needle.len();
            out.push(CloneMatch {
                method_id: m.id.clone(),
                similarity: 1.0,
                kind: MatchKind::Exact,
                match_span: Some(LineSpan {
                    start: hay[start].line,
                    end: hay[end - 1].line,
                }),
                token_range: Some((start, end)),
            });
            continue;
        }
        let a = words(needle);
        let mut pool = words(hay);
        let mut shared = 0u32;
        for w in &a {
            if let Some(p) = pool.iter().position(|x| x == w) {
                pool.swap_remove(p);
                shared += 1;
            }
        }
        let denom = a.len().max(words(hay).len());
        if denom == 0 {
            continue;
        }
        let similarity = f64::from(shared) / denom as f64;
        if similarity >= threshold {
            out.push(CloneMatch {
                method_id: m.id.clone(),
                similarity,
                kind: MatchKind::Near,
                match_span: None,
                token_range: None,
            });
        }
    }
    out.sort_by(|a, b| a.method_id.cmp(&b.method_id));
    out
}

fn fixture_projects() -> Vec<std::path::PathBuf> {
    let mut roots: Vec<_> = corpus().iter().map(Case::project).collect();
    roots.push(fixtures().join("extract/rect/project"));
    roots.push(scenarios_dir().join("shop"));
    roots.push(Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/tree"));
    roots
}

fn clone_oracle() -> Verdict {
    let mut projects = 0;
    let mut comparisons = 0;
    for root in fixture_projects() {
        let session = open_project(&root, None).map_err(|e| e.to_string())?;
        let methods = session.all_methods();
        if methods.len() > 50 {
            continue;
        }
        projects += 1;
        let mut fragments: Vec<Fragment> = methods
            .iter()
            .map(|m| {
                validate_fragment(&m.body_text).with_paste_site(PasteSite {
                    file_path: m.file_path().to_string(),
                    line: m.start_line,
                    method_id: Some(m.id.clone()),
                })
            })
            .collect();
        if let Some(case) = corpus().into_iter().find(|c| c.project() == root) {
            let (file, line) = case.site();
            let host = session
                .file_index(&file)
                .and_then(|i| i.method_at_line(line));
            fragments.push(
                validate_fragment(&case.fragment()).with_paste_site(PasteSite {
                    file_path: file,
                    line,
                    method_id: host.map(|h| h.id.clone()),
                }),
            );
            fragments.push(validate_fragment(&case.fragment()));
        }
        for fragment in fragments.iter().filter(|f| f.valid) {
            for threshold in [0.8, 0.5, 0.2] {
                let got = find_duplicates(fragment, methods.iter().copied(), threshold)
                    .map_err(|e| e.to_string())?;
                let want = brute_force_matches(fragment, &methods, threshold);
                ensure(got == want, || {
                    format!(
                        "{}: mismatch for `{}`",
                        root.display(),
                        fragment.trimmed_text()
                    )
                })?;
                comparisons += 1;
            }
        }
    }
    Ok(format!(
        "{projects} fixture projects, {comparisons} comparisons, all equal"
    ))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-9
}

fn metric_fixtures() -> Verdict {
    use SubmetricId::*;
    let src = "class Acc {\n    int sum;\n    void add(int x) {\n        if (x > 0) {\n            sum += x;\n        }\n    }\n    void log() {\n    }\n}\n";
    let idx = index_file(src, "Acc.java").map_err(|e| e.to_string())?;
    let add = &idx.methods[0];
    let profile = nesting_profile(add).map_err(|e| e.to_string())?;
    ensure(profile == [1, 2, 1], || {
        format!("nesting trace {profile:?}")
    })?;

    let if_sum = validate_fragment("if (x > 0) {\n    sum += x;\n}");
    let v = fragment_vector(&if_sum, add, &KeywordSet::all()).map_err(|e| e.to_string())?;
    let third = 1.0 / 3.0;
    let expected: [(SubmetricId, f64); 18] = [
        (KeywordTotal, 1.0),
        (KeywordDensity, third),
        (CouplingTotal(Connectivity::Total), 1.0),
        (CouplingTotal(Connectivity::Field), 1.0),
        (CouplingTotal(Connectivity::Method), 0.0),
        (CouplingDensity(Connectivity::Total), third),
        (CouplingDensity(Connectivity::Field), third),
        (CouplingDensity(Connectivity::Method), 0.0),
        (ComplexityTotalArea, 4.0),
        (ComplexityAreaDensity, 4.0 * third),
        (ComplexityMethodArea, 4.0),
        (ComplexityMethodDepthDensity, 4.0 * third),
        (SizeLines(SizeScope::Segment), 3.0),
        (SizeSymbols(SizeScope::Segment), 16.0),
        (SizeSymbolDensity(SizeScope::Segment), 16.0 * third),
        (SizeLines(SizeScope::MethodDeclaration), 3.0),
        (SizeSymbols(SizeScope::MethodDeclaration), 16.0),
        (
            SizeSymbolDensity(SizeScope::MethodDeclaration),
            16.0 * third,
        ),
    ];
    for (id, want) in expected {
        let got = v.get(id).ok_or_else(|| format!("{} missing", id.name()))?;
        ensure(close(got, want), || {
            format!("{}: {got} != {want}", id.name())
        })?;
    }

    let only_for = KeywordSet::from_names(["for"]).map_err(|e| e.to_string())?;
    let v = fragment_vector(&if_sum, add, &only_for).map_err(|e| e.to_string())?;
    ensure(v.get(KeywordTotal) == Some(0.0), || {
        "keyword set {for} counted `if`".into()
    })?;

    let returns = validate_fragment("return x;\nreturn y;");
    let v = fragment_vector(&returns, add, &KeywordSet::all()).map_err(|e| e.to_string())?;
    ensure(
        v.get(KeywordTotal) == Some(2.0) && v.get(KeywordDensity) == Some(1.0),
        || "two returns over two lines".into(),
    )?;

    let calls = validate_fragment("log();\nsum = 0;\nthis.sum++;\nother.sum = 1;");
    let v = fragment_vector(&calls, add, &KeywordSet::all()).map_err(|e| e.to_string())?;
    ensure(
        v.get(CouplingTotal(Connectivity::Method)) == Some(1.0)
            && v.get(CouplingTotal(Connectivity::Field)) == Some(2.0)
            && v.get(CouplingTotal(Connectivity::Total)) == Some(3.0)
            && close(v.get(CouplingDensity(Connectivity::Total)).unwrap(), 0.75),
        || format!("coupling fixture gave {v:?}"),
    )?;
    Ok("nesting [1,2,1] -> area 4, 3-line fragment -> 16 symbols, 18 submetrics exact".into())
}

fn vector_of(values: &[u32]) -> MetricVector {
    let mut v = MetricVector::default();
    for (id, x) in SubmetricId::ALL.iter().zip(values) {
        v.set(*id, f64::from(*x));
    }
    v
}

fn thresholds_for(
    dist: &ProjectDistribution,
    s: &CategorySensitivity,
) -> BTreeMap<SubmetricId, f64> {
    dist.thresholds(s).unwrap()
}

fn gate_monotonicity() -> Verdict {
    let mut runner = runner();
    let n = SubmetricId::ALL.len();
    let strategy = (
        prop::collection::vec(prop::collection::vec(0u32..8, n), 1..40),
        prop::collection::vec(0u32..10, n),
        prop::collection::vec((any::<bool>(), prop::bool::weighted(0.2)), n),
        prop::array::uniform4(1u32..=100),
        prop::array::uniform4(1u32..=100),
    );
    let mut sensitivity_checks = 0;
    let mut required_checks = 0;
    let mut violations = 0;
    for _ in 0..500 {
        let (samples, fragment, flag_bits, sens, raise) = draw(&mut runner, &strategy);
        let vectors: Vec<MetricVector> = samples.iter().map(|s| vector_of(s)).collect();
        let dist = ProjectDistribution::from_vectors(&vectors).unwrap();
        let vector = vector_of(&fragment);
        let flags: BTreeMap<SubmetricId, SubmetricFlags> = SubmetricId::ALL
            .iter()
            .zip(&flag_bits)
            .map(|(id, (e, r))| (*id, SubmetricFlags::new(*e, *r)))
            .collect();
        let base = CategorySensitivity {
            keyword: sens[0],
            coupling: sens[1],
            complexity: sens[2],
            size: sens[3],
        };
        let before = evaluate_gate(&vector, &thresholds_for(&dist, &base), &flags)
            .map_err(|e| e.to_string())?
            .metrics_passed;

        for (i, category) in Category::ALL.iter().enumerate() {
            let mut raised = base;
            let higher = base.get(*category).max(raise[i]);
            raised.set(*category, higher).map_err(|e| e.to_string())?;
            let after = evaluate_gate(&vector, &thresholds_for(&dist, &raised), &flags)
                .map_err(|e| e.to_string())?
                .metrics_passed;
            sensitivity_checks += 1;
            if after && !before {
                violations += 1;
            }
        }

        let thresholds = thresholds_for(&dist, &base);
        for (id, f) in &flags {
            if !f.enabled || f.required {
                continue;
            }
            let mut stricter = flags.clone();
            stricter.insert(*id, SubmetricFlags::new(true, true));
            let after = evaluate_gate(&vector, &thresholds, &stricter)
                .map_err(|e| e.to_string())?
                .metrics_passed;
            required_checks += 1;
            if after && !before {
                violations += 1;
            }
        }
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok(format!(
        "500 instances, {sensitivity_checks} sensitivity raises, {required_checks} added required flags, 0 violations"
    ))
}

fn load(name: &str) -> Result<Scenario, String> {
    let path = scenarios_dir().join(name);
    let text = fs::read_to_string(&path).map_err(|e| e.to_string())?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn run_scenario(scenario: Scenario, execution: Execution) -> Result<Vec<ProjectLog>, String> {
    let loaded = prepare(scenario, &scenarios_dir()).map_err(|e| e.to_string())?;
    Ok(simulate(loaded, execution))
}

fn golden_matches(name: &str) -> Result<(), String> {
    let path = scenarios_dir().join(format!("{name}.json"));
    let run = cli(&["simulate".as_ref(), path.as_os_str(), "--json".as_ref()]);
    ensure(run.code == 0, || {
        format!("{name}: exit {} {}", run.code, run.stderr)
    })?;
    let golden = fs::read_to_string(
        scenarios_dir()
            .join("expected")
            .join(format!("{name}.json")),
    )
    .map_err(|e| e.to_string())?;
    ensure(run.stdout == golden, || {
        format!("{name}: log differs from golden")
    })
}

fn single_log(logs: &[ProjectLog]) -> &[Outcome] {
    &logs[0].log
}

fn delay_semantics() -> Verdict {
    for name in ["a-delay", "b-edited", "c-repaste", "d-defaults"] {
        golden_matches(name)?;
    }

    let mut early = load("a-delay.json")?;
    early.until = Some(9);
    let logs = run_scenario(early, Execution::Sequential)?;
    ensure(logs[0].log.is_empty() && logs[0].pending == 1, || {
        "recommendation before the delay elapsed".into()
    })?;
    let logs = run_scenario(load("a-delay.json")?, Execution::Sequential)?;
    match single_log(&logs) {
        [Outcome::Recommended(r)] if r.emitted_at == 10 => {}
        other => return Err(format!("(a) unexpected log {other:?}")),
    }

    let logs = run_scenario(load("b-edited.json")?, Execution::Sequential)?;
    ensure(
        matches!(single_log(&logs), [o] if o.drop_reason() == Some(anticopypaster_core::decision::DropReason::Edited)),
        || "(b) edit did not cancel the paste".into(),
    )?;

    let logs = run_scenario(load("c-repaste.json")?, Execution::Sequential)?;
    match single_log(&logs) {
        [Outcome::Recommended(r)] if r.emitted_at == 16 && r.event.t == 6 => {}
        other => return Err(format!("(c) unexpected log {other:?}")),
    }

    let logs = run_scenario(load("d-defaults.json")?, Execution::Sequential)?;
    match single_log(&logs) {
        [Outcome::Recommended(r)] if r.emitted_at == 13 && r.report.min_duplicate_methods == 2 => {}
        other => return Err(format!("(d) unexpected log {other:?}")),
    }
    Ok("4 golden logs identical; delay, edit cancel, re-paste reset and defaults hold".into())
}

fn method_count(root: &Path) -> Result<usize, String> {
    Ok(open_project(root, None)
        .map_err(|e| e.to_string())?
        .method_count())
}

fn extraction_round_trip() -> Verdict {
    let mut targets: Vec<(String, std::path::PathBuf, String, String, u32)> = corpus()
        .into_iter()
        .filter(Case::is_exact)
        .map(|c| {
            let (file, line) = c.site();
            (c.name.clone(), c.project(), c.fragment(), file, line)
        })
        .collect();
    let rect = fixtures().join("extract/rect");
    targets.push((
        "rect".into(),
        rect.join("project"),
        fs::read_to_string(rect.join("fragment.java")).map_err(|e| e.to_string())?,
        "src/geo/Rect.java".into(),
        18,
    ));

    let (mut plans, mut refused) = (0, 0);
    for (name, root, fragment, file, line) in &targets {
        let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
        copy_tree(root, tmp.path());
        let before = method_count(tmp.path())?;
        let mut session = open_project(tmp.path(), None).map_err(|e| e.to_string())?;
        let Ok((plan, result)) = session.extract(fragment, file, *line, "extracted") else {
            refused += 1;
            continue;
        };
        plans += 1;
        let v = verify_by_inlining(&plan, session.sources(), &result.sources);
        ensure(v.passed, || format!("{name}: inlining check failed {v:?}"))?;
        session
            .write_extraction(&result)
            .map_err(|e| e.to_string())?;
        let after = method_count(tmp.path())?;
        ensure(after == before + 1, || {
            format!("{name}: {before} methods became {after}")
        })?;
    }
    ensure(plans > 0, || "no plan produced".into())?;

    let run = cli(&[
        "extract".as_ref(),
        rect.join("project").as_os_str(),
        "--fragment".as_ref(),
        rect.join("fragment.java").as_os_str(),
        "--at".as_ref(),
        "src/geo/Rect.java:18".as_ref(),
        "--name".as_ref(),
        "aspectRatio".as_ref(),
    ]);
    let golden = fs::read_to_string(rect.join("expected.diff")).map_err(|e| e.to_string())?;
    ensure(run.code == 0 && run.stdout == golden, || {
        "2-site diff differs from golden".into()
    })?;
    Ok(format!(
        "{plans}/{plans} plans verified and re-indexed with one more method, {refused} refused, golden diff identical"
    ))
}

fn isolation() -> Verdict {
    golden_matches("isolation")?;
    let sequential = run_scenario(load("isolation.json")?, Execution::Sequential)?;
    let interleaved = run_scenario(load("isolation.json")?, Execution::Interleaved)?;
    let threaded = run_scenario(load("isolation.json")?, Execution::Threaded)?;
    ensure(sequential == interleaved, || {
        "interleaved output differs".into()
    })?;
    ensure(sequential == threaded, || "threaded output differs".into())?;
    let triggered: Vec<bool> = sequential.iter().map(|p| p.recommendations > 0).collect();
    ensure(triggered == [true, false], || {
        format!("triggered per project {triggered:?}")
    })?;
    ensure(
        sequential[1]
            .log
            .iter()
            .all(|o| matches!(o, Outcome::NotTriggered { .. })),
        || "strict project log is not all not-triggered".into(),
    )?;
    Ok("lenient project triggered, strict did not; sequential = interleaved = threaded".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("reproduction mini-corpus", corpus_check),
        ("percentile oracle", percentile_oracle),
        ("clone-detector oracle", clone_oracle),
        ("metric fixtures", metric_fixtures),
        ("gate monotonicity", gate_monotonicity),
        ("delay semantics", delay_semantics),
        ("extraction round-trip", extraction_round_trip),
        ("multi-project isolation", isolation),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name} ({detail})", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
