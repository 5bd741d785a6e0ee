// SPDX-License-Identifier: Apache-2.0

//! Running external SMT solvers, checking their models and cross-validating
//! their answers.

mod model;
mod process;
mod schedule;
mod verdict;

use std::path::{Path, PathBuf};
use std::time::Duration;

use thiserror::Error;

use crate::pool::Limiter;
use crate::store::{SolverResult, StoreError};

pub use model::{model_check_script, parse_model, validate_model, ModelBinding, ModelCheck};
pub use process::{install_interrupt_handler, kill_running};
pub use schedule::{
    cross_validate_instance, ensure_results, pending_pairs, schedule_runs, ScheduleOptions,
    ScheduleReport,
};
pub use verdict::{cross_validate, validation_for, CrossValidation, Verdict, VerdictKind};

static RUNS: Limiter = Limiter::new(usize::MAX);

/// Bounds the number of solver processes alive at once across all callers.
pub fn set_max_concurrent_runs(n: usize) {
    RUNS.set_max(n);
}

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(20);

/// Placeholder in argument templates replaced by the instance path.
pub const FILE_PLACEHOLDER: &str = "{file}";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot start solver `{solver}` ({binary}): {source}")]
    Spawn {
        solver: String,
        binary: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Config {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot read model: {0}")]
    ModelParse(String),
    #[error(transparent)]
    Store(#[from] StoreError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub name: String,
    pub binary: PathBuf,
    pub arg_template: Vec<String>,
    pub timeout: Duration,
    pub model_flag: Option<String>,
}

impl SolverConfig {
    pub fn new(name: impl Into<String>, binary: impl Into<PathBuf>) -> Self {
        SolverConfig {
            name: name.into(),
            binary: binary.into(),
            arg_template: vec![FILE_PLACEHOLDER.to_string()],
            timeout: DEFAULT_TIMEOUT,
            model_flag: None,
        }
    }

    pub fn args_for(&self, file: &Path) -> Vec<String> {
        let file = file.to_string_lossy();
        let mut args: Vec<String> = self
            .arg_template
            .iter()
            .map(|a| a.replace(FILE_PLACEHOLDER, &file))
            .collect();
        if !self
            .arg_template
            .iter()
            .any(|a| a.contains(FILE_PLACEHOLDER))
        {
            args.push(file.into_owned());
        }
        if let Some(flag) = &self.model_flag {
            args.push(flag.clone());
        }
        args
    }
}

/// Finds the configuration for `name`, ignoring case.
pub fn find_solver<'a>(solvers: &'a [SolverConfig], name: &str) -> Option<&'a SolverConfig> {
    solvers.iter().find(|s| s.name.eq_ignore_ascii_case(name))
}

fn is_executable(path: &Path) -> bool {
    use std::os::unix::fs::PermissionsExt;
    path.metadata()
        .map(|m| m.is_file() && m.permissions().mode() & 0o111 != 0)
        .unwrap_or(false)
}

fn resolve_binary(binary: &str, base: &Path) -> Option<PathBuf> {
    if binary.contains('/') {
        let p = base.join(binary);
        return is_executable(&p).then_some(p);
    }
    std::env::var_os("PATH")
        .into_iter()
        .flat_map(|paths| std::env::split_paths(&paths).collect::<Vec<_>>())
        .map(|dir| dir.join(binary))
        .find(|p| is_executable(p))
}

/// Parses `solvers.conf` text. Each non-comment line reads
/// `name | binary | arguments | timeout seconds | model flag`; the last
/// three fields are optional. Relative binary paths are resolved against
/// `base`, bare names through `PATH`.
pub fn parse_solvers_conf(
    text: &str,
    base: &Path,
    origin: &Path,
    default_timeout: Duration,
) -> Result<Vec<SolverConfig>, HarnessError> {
    let mut out: Vec<SolverConfig> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| HarnessError::Config {
            path: origin.to_path_buf(),
            line: i + 1,
            message,
        };
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        if fields.len() < 2 || fields.len() > 5 {
            return Err(err(format!(
                "expected `name | binary | arguments | timeout | model flag`, got {} fields",
                fields.len()
            )));
        }
        let name = fields[0];
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(err(format!("invalid solver name `{name}`")));
        }
        if find_solver(&out, name).is_some() {
            return Err(err(format!("solver `{name}` configured twice")));
        }
        let binary = resolve_binary(fields[1], base).ok_or_else(|| {
            err(format!(
                "solver binary `{}` not found or not executable",
                fields[1]
            ))
        })?;
        let args = fields.get(2).copied().unwrap_or("");
        let arg_template = if args.is_empty() {
            vec![FILE_PLACEHOLDER.to_string()]
        } else {
            args.split_whitespace().map(str::to_string).collect()
        };
        let timeout = match fields.get(3).copied().filter(|t| !t.is_empty()) {
            None => default_timeout,
            Some(t) => t
                .parse::<f64>()
                .ok()
                .filter(|s| s.is_finite() && *s > 0.0)
                .map(Duration::from_secs_f64)
                .ok_or_else(|| err(format!("invalid timeout `{t}`")))?,
        };
        let model_flag = fields
            .get(4)
            .copied()
            .filter(|f| !f.is_empty())
            .map(str::to_string);
        out.push(SolverConfig {
            name: name.to_string(),
            binary,
            arg_template,
            timeout,
            model_flag,
        });
    }
    Ok(out)
}

pub fn load_solvers_conf(
    path: &Path,
    default_timeout: Duration,
) -> Result<Vec<SolverConfig>, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_solvers_conf(&text, base, path, default_timeout)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOutcome {
    pub result: SolverResult,
    /// Wall-clock seconds.
    pub time: f64,
    pub model: Option<String>,
    pub stdout: String,
    pub stderr: String,
}

/// Index of the first standalone `sat`, `unsat` or `unknown` token and the
/// verdict it names.
fn find_verdict(stdout: &str) -> Option<(SolverResult, usize)> {
    let mut offset = 0;
    for token in stdout.split_inclusive(|c: char| c.is_whitespace() || c == '(' || c == ')') {
        let word = token.trim_end_matches(|c: char| c.is_whitespace() || c == '(' || c == ')');
        let result = match word {
            "sat" => Some(SolverResult::Satisfied),
            "unsat" => Some(SolverResult::Unsatisfied),
            "unknown" => Some(SolverResult::Unknown),
            _ => None,
        };
        if let Some(r) = result {
            // Only count tokens standing on their own, not inside an s-expression.
            let line_start = stdout[..offset].rfind('\n').map_or(0, |i| i + 1);
            if stdout[line_start..offset].trim().is_empty() {
                return Some((r, offset + word.len()));
            }
        }
        offset += token.len();
    }
    None
}

/// Classifies a finished process: the first verdict token wins; a nonzero
/// exit without one is a crash and a clean exit without one is unknown.
pub fn classify_output(
    stdout: &str,
    exit_code: Option<i32>,
    timed_out: bool,
) -> (SolverResult, Option<String>) {
    if timed_out {
        return (SolverResult::Timeout, None);
    }
    match find_verdict(stdout) {
        Some((SolverResult::Satisfied, end)) => {
            let rest = stdout[end..].trim();
            (
                SolverResult::Satisfied,
                (!rest.is_empty()).then(|| rest.to_string()),
            )
        }
        Some((r, _)) => (r, None),
        None if exit_code == Some(0) => (SolverResult::Unknown, None),
        None => (SolverResult::Crash, None),
    }
}

/// Runs `cfg` on `file` with its timeout.
pub fn run_solver(cfg: &SolverConfig, file: &Path) -> Result<SolverOutcome, HarnessError> {
    let _permit = RUNS.acquire();
    let out =
        process::run_process(&cfg.binary, &cfg.args_for(file), cfg.timeout).map_err(|source| {
            HarnessError::Spawn {
                solver: cfg.name.clone(),
                binary: cfg.binary.clone(),
                source,
            }
        })?;
    let (result, model) = classify_output(&out.stdout, out.exit_code, out.timed_out);
    let time = if out.timed_out {
        out.elapsed.as_secs_f64().max(cfg.timeout.as_secs_f64())
    } else {
        out.elapsed.as_secs_f64()
    };
    log::debug!("{} on {}: {result} in {time:.3}s", cfg.name, file.display());
    Ok(SolverOutcome {
        result,
        time,
        model,
        stdout: out.stdout,
        stderr: out.stderr,
    })
}

#[cfg(test)]
pub(crate) mod testing {
    use std::os::unix::fs::PermissionsExt;
    use std::path::{Path, PathBuf};

    /// Writes an executable shell script.
    pub fn script(dir: &Path, name: &str, body: &str) -> PathBuf {
        let path = dir.join(name);
        std::fs::write(&path, format!("#!/bin/sh\n{body}\n")).unwrap();
        std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
        path
    }
}
