//! The `anticopypaster` command line.

pub mod output;
pub mod scenario;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anticopypaster_core::decision::{AnalysisContext, Outcome};
use anticopypaster_core::metrics::{check_sensitivity, Category};
use anticopypaster_core::refactor::verify_by_inlining;
use anticopypaster_core::workspace::{open_project, ProjectSession};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::json;

use scenario::{load_scenario, simulate, Execution};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_TRIGGERED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ANALYSIS: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "anticopypaster",
    version,
    about = "Spot pasted duplicate Java code and extract it into methods"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Index a project and print metric distributions and thresholds
    Analyze {
        root: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a fragment as a paste whose delay has elapsed
    Check {
        root: PathBuf,
        /// File holding the pasted code
        #[arg(long)]
        fragment: PathBuf,
        /// Paste site as FILE:LINE, FILE relative to the root
        #[arg(long)]
        at: Site,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Replay a scenario of timed paste and edit events
    Simulate {
        scenario: PathBuf,
        #[arg(long)]
        json: bool,
        /// Run projects one after another instead of in parallel
        #[arg(long)]
        sequential: bool,
    },
    /// Extract a fragment and its exact copies into a new method
    Extract {
        root: PathBuf,
        #[arg(long)]
        fragment: PathBuf,
        #[arg(long)]
        at: Site,
        /// Name of the new method
        #[arg(long)]
        name: String,
        /// Write the rewritten files instead of printing a diff
        #[arg(long)]
        write: bool,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Print percentile thresholds for the given sensitivities
    Thresholds {
        root: PathBuf,
        /// Override as CATEGORY=N, e.g. size=80; repeatable
        #[arg(long = "sensitivity", value_name = "CAT=N")]
        sensitivity: Vec<SensitivityArg>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone)]
struct Site {
    file: PathBuf,
    line: u32,
}

impl FromStr for Site {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (file, line) = s
            .rsplit_once(':')
            .ok_or_else(|| format!("expected FILE:LINE, got `{s}`"))?;
        let line: u32 = line
            .parse()
            .ok()
            .filter(|l| *l > 0)
            .ok_or_else(|| format!("invalid line number `{line}`"))?;
        if file.is_empty() {
            return Err("missing file name".to_string());
        }
        Ok(Site {
            file: PathBuf::from(file),
            line,
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct SensitivityArg {
    category: Category,
    value: u32,
}

impl FromStr for SensitivityArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (cat, value) = s
            .split_once('=')
            .ok_or_else(|| format!("expected CATEGORY=N, got `{s}`"))?;
        let category: Category = cat.parse().map_err(|e| format!("{e}"))?;
        let value = value
            .parse::<u32>()
            .ok()
            .and_then(|v| check_sensitivity(v).ok())
            .ok_or_else(|| {
                format!("sensitivity must be an integer within 1..=100, got `{value}`")
            })?;
        Ok(SensitivityArg { category, value })
    }
}

/// A failed command: the message and the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

fn analysis(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_ANALYSIS,
        message: message.to_string(),
    }
}

type CmdResult = Result<i32, Failure>;

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Analyze { root, config, json } => analyze(&root, config.as_deref(), json, stdout),
        Command::Check {
            root,
            fragment,
            at,
            config,
            json,
        } => check(&root, &fragment, &at, config.as_deref(), json, stdout),
        Command::Simulate {
            scenario,
            json,
            sequential,
        } => simulate_cmd(&scenario, json, sequential, stdout),
        Command::Extract {
            root,
            fragment,
            at,
            name,
            write,
            config,
            json,
        } => extract(
            &root,
            &fragment,
            &at,
            &name,
            write,
            config.as_deref(),
            json,
            stdout,
        ),
        Command::Thresholds {
            root,
            sensitivity,
            config,
            json,
        } => thresholds(&root, &sensitivity, config.as_deref(), json, stdout),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn emit(stdout: &mut dyn Write, text: &str) -> Result<(), Failure> {
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| analysis(format!("cannot write output: {e}")))
}

fn emit_json(stdout: &mut dyn Write, value: &impl serde::Serialize) -> Result<(), Failure> {
    let value = serde_json::to_value(value).map_err(analysis)?;
    let mut text = serde_json::to_string_pretty(&value).map_err(analysis)?;
    text.push('\n');
    emit(stdout, &text)
}

fn open(root: &Path, config: Option<&Path>) -> Result<ProjectSession, Failure> {
    open_project(root, config).map_err(analysis)
}

/// The site's file as a root-relative `/`-separated path.
fn relative_site(session: &ProjectSession, site: &Site) -> Result<String, Failure> {
    let file = if site.file.is_absolute() {
        let canonical = site
            .file
            .canonicalize()
            .unwrap_or_else(|_| site.file.clone());
        canonical
            .strip_prefix(session.root())
            .map(Path::to_path_buf)
            .map_err(|_| analysis(format!("`{}` is outside the project", site.file.display())))?
    } else {
        site.file.clone()
    };
    let parts: Vec<String> = file
        .components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .filter(|c| c != ".")
        .collect();
    Ok(parts.join("/"))
}

fn read_fragment(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| analysis(format!("{}: {e}", path.display())))
}

fn analyze(root: &Path, config: Option<&Path>, json: bool, stdout: &mut dyn Write) -> CmdResult {
    let session = open(root, config)?;
    if json {
        emit_json(stdout, &output::analysis_json(&session))?;
    } else {
        emit(stdout, &output::analysis_text(&session))?;
    }
    Ok(EXIT_OK)
}

fn check(
    root: &Path,
    fragment: &Path,
    at: &Site,
    config: Option<&Path>,
    json: bool,
    stdout: &mut dyn Write,
) -> CmdResult {
    let session = open(root, config)?;
    let text = read_fragment(fragment)?;
    let file = relative_site(&session, at)?;
    let outcome = session.check(&text, &file, at.line, 0);
    if json {
        emit_json(stdout, &outcome)?;
    } else {
        emit(stdout, &output::outcome_text(&outcome))?;
    }
    match outcome {
        Outcome::Recommended(_) => Ok(EXIT_OK),
        Outcome::NotTriggered { .. } => Ok(EXIT_NOT_TRIGGERED),
        Outcome::Dropped { reason, .. } => Err(analysis(format!(
            "fragment cannot be evaluated at {file}:{}: {}",
            at.line,
            output::drop_reason_text(reason)
        ))),
    }
}

fn simulate_cmd(path: &Path, json: bool, sequential: bool, stdout: &mut dyn Write) -> CmdResult {
    let loaded = load_scenario(path).map_err(analysis)?;
    let execution = if sequential {
        Execution::Sequential
    } else {
        Execution::Threaded
    };
    let logs = simulate(loaded, execution);
    if json {
        emit_json(stdout, &json!({ "projects": logs }))?;
    } else {
        emit(stdout, &output::simulation_text(&logs))?;
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn extract(
    root: &Path,
    fragment: &Path,
    at: &Site,
    name: &str,
    write: bool,
    config: Option<&Path>,
    json: bool,
    stdout: &mut dyn Write,
) -> CmdResult {
    let mut session = open(root, config)?;
    let text = read_fragment(fragment)?;
    let file = relative_site(&session, at)?;
    let (plan, result) = session
        .extract(&text, &file, at.line, name)
        .map_err(analysis)?;
    let verification = verify_by_inlining(&plan, session.sources(), &result.sources);
    if !verification.passed {
        let detail: Vec<String> = verification
            .problems
            .iter()
            .cloned()
            .chain(verification.mismatches().filter_map(|s| s.detail.clone()))
            .collect();
        return Err(analysis(format!(
            "rewrite failed the inlining check: {}",
            detail.join("; ")
        )));
    }
    let written = if write {
        session.write_extraction(&result).map_err(analysis)?
    } else {
        Vec::new()
    };
    if json {
        emit_json(
            stdout,
            &json!({
                "plan": plan,
                "signature": plan.signature(),
                "callTemplate": plan.call_template(),
                "diff": result.diff,
                "verification": verification,
                "written": written,
            }),
        )?;
    } else if write {
        for path in &written {
            emit(stdout, &format!("wrote {path}\n"))?;
        }
    } else {
        emit(stdout, &result.diff)?;
    }
    Ok(EXIT_OK)
}

fn thresholds(
    root: &Path,
    overrides: &[SensitivityArg],
    config: Option<&Path>,
    json: bool,
    stdout: &mut dyn Write,
) -> CmdResult {
    let mut session = open(root, config)?;
    let mut settings = session.settings().clone();
    for o in overrides {
        settings
            .sensitivity
            .set(o.category, o.value)
            .map_err(analysis)?;
    }
    session.set_settings(settings);
    let dist = session
        .distribution()
        .ok_or_else(|| analysis("project has no methods to derive thresholds from"))?;
    let sensitivity = session.settings().sensitivity;
    let values = dist.thresholds(&sensitivity).map_err(analysis)?;
    if json {
        emit_json(
            stdout,
            &json!({
                "sampleSize": dist.sample_size(),
                "sensitivity": sensitivity,
                "thresholds": values,
            }),
        )?;
    } else {
        emit(
            stdout,
            &output::thresholds_text(dist.sample_size(), &sensitivity, &values),
        )?;
    }
    Ok(EXIT_OK)
}
