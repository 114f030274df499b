use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::exit::{CliError, Code};

/// Writes through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub code: Code,
}

/// Accumulates one run's human-readable report and machine-readable summary.
#[derive(Debug, Clone)]
pub struct Outcome {
    command: String,
    report: String,
    checks: Vec<Check>,
    values: BTreeMap<String, f64>,
    error: Option<CliError>,
}

#[derive(Serialize)]
struct Summary<'a> {
    command: &'a str,
    status: &'a str,
    exit_code: i32,
    failure: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
    checks: BTreeMap<&'a str, &'a str>,
    values: &'a BTreeMap<String, f64>,
}

impl Outcome {
    pub fn new(command: &str) -> Self {
        let mut report = String::new();
        let _ = writeln!(report, "polargeo {command}");
        Self { command: command.to_string(), report, checks: Vec::new(), values: BTreeMap::new(), error: None }
    }

    pub fn section(&mut self, title: &str) {
        let _ = writeln!(self.report, "\n[{title}]");
    }

    pub fn line(&mut self, text: impl AsRef<str>) {
        self.report.push_str(text.as_ref());
        self.report.push('\n');
    }

    pub fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.report, "{key:<28} {value}");
    }

    pub fn value(&mut self, key: &str, v: f64) {
        self.kv(key, fmt_f(v));
        self.values.insert(key.to_string(), v);
    }

    pub fn check(&mut self, name: &str, passed: bool, code: Code) {
        self.kv(&format!("check {name}"), if passed { "pass" } else { "FAIL" });
        self.checks.push(Check { name: name.to_string(), passed, code });
    }

    /// Records an error that stopped the run.
    pub fn fail(&mut self, e: CliError) {
        self.section("error");
        self.line(&e.message);
        self.checks.push(Check { name: e.code.name().to_string(), passed: false, code: e.code });
        self.error = Some(e);
    }

    pub fn exit_code(&self) -> Code {
        self.checks.iter().find(|c| !c.passed).map_or(Code::Ok, |c| c.code)
    }

    pub fn report(&self) -> String {
        let code = self.exit_code();
        let mut out = self.report.clone();
        let _ = writeln!(out, "\n[result]");
        let _ = writeln!(out, "{:<28} {}", "status", if code == Code::Ok { "pass" } else { "fail" });
        let _ = writeln!(out, "{:<28} {} ({})", "exit_code", code as i32, code.name());
        out
    }

    pub fn summary(&self) -> String {
        let code = self.exit_code();
        let mut checks = BTreeMap::new();
        for c in &self.checks {
            let entry = checks.entry(c.name.as_str()).or_insert("pass");
            if !c.passed {
                *entry = "fail";
            }
        }
        let s = Summary {
            command: &self.command,
            status: if code == Code::Ok { "pass" } else { "fail" },
            exit_code: code as i32,
            failure: code.name(),
            error: self.error.as_ref().map(|e| e.message.as_str()),
            checks,
            values: &self.values,
        };
        toml::to_string(&s).expect("summary serializes")
    }

    /// Writes `report.txt` and `summary.toml` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf), CliError> {
        let report = dir.join("report.txt");
        let summary = dir.join("summary.toml");
        write_atomic(&report, &self.report())?;
        write_atomic(&summary, &self.summary())?;
        Ok((report, summary))
    }
}

/// Fixed scientific format so reports are byte-stable.
pub fn fmt_f(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6e}")
    } else {
        format!("{v}")
    }
}

pub fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}
