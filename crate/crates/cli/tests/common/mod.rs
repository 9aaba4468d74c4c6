#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn corpus_dir() -> PathBuf {
    fixtures().join("corpus")
}

pub fn scenarios_dir() -> PathBuf {
    fixtures().join("scenarios")
}

#[derive(Debug, Clone, Deserialize)]
pub struct CaseMeta {
    pub kind: String,
    pub at: String,
    pub note: String,
}

#[derive(Debug, Clone)]
pub struct Case {
    pub name: String,
    pub dir: PathBuf,
    pub meta: CaseMeta,
}

impl Case {
    pub fn project(&self) -> PathBuf {
        self.dir.join("project")
    }

    pub fn fragment_path(&self) -> PathBuf {
        self.dir.join("fragment.java")
    }

    pub fn fragment(&self) -> String {
        fs::read_to_string(self.fragment_path()).unwrap()
    }

    pub fn is_exact(&self) -> bool {
        self.meta.kind == "exact"
    }

    /// The paste site split into file and line.
    pub fn site(&self) -> (String, u32) {
        let (file, line) = self.meta.at.rsplit_once(':').unwrap();
        (file.to_string(), line.parse().unwrap())
    }
}

pub fn corpus() -> Vec<Case> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    dirs.into_iter()
        .map(|dir| {
            let meta: CaseMeta =
                serde_json::from_str(&fs::read_to_string(dir.join("case.json")).unwrap()).unwrap();
            Case {
                name: dir.file_name().unwrap().to_string_lossy().into_owned(),
                dir,
                meta,
            }
        })
        .collect()
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the command line in process; `args` excludes the program name.
pub fn cli<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv: Vec<std::ffi::OsString> = std::iter::once("anticopypaster".into())
        .chain(args.iter().map(|a| a.as_ref().to_os_string()))
        .collect();
    let code = anticopypaster_cli::run(argv, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

/// Copies a directory tree, for tests that write into a project.
pub fn copy_tree(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for entry in fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_tree(&entry.path(), &target);
        } else {
            fs::copy(entry.path(), target).unwrap();
        }
    }
}
