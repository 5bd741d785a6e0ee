// SPDX-License-Identifier: Apache-2.0

//! Renderers for query results: counts, tables, exported SMT-LIB files and
//! plot data.

mod dot;
mod svg;
pub mod table;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::smtlib::{print_script, Script};
use crate::store::{InstanceRec, SolverResult};

pub use dot::{smt_plot_dot, vardep_dot, vardep_edges};

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("unknown extractor `{0}`")]
    Unknown(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExtractError + '_ {
    move |source| ExtractError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Extractor {
    Count,
    InstanceTable,
    ResultsTable,
    SMTLib,
    CactusPlot,
    MatchingPie,
    SMTPlot,
    VarDepPlot,
}

pub struct ExtractorInfo {
    pub extractor: Extractor,
    pub name: &'static str,
    pub description: &'static str,
}

pub const EXTRACTORS: &[ExtractorInfo] = &[
    ExtractorInfo {
        extractor: Extractor::Count,
        name: "Count",
        description: "matching instance count and per-benchmark distribution",
    },
    ExtractorInfo {
        extractor: Extractor::InstanceTable,
        name: "InstanceTable",
        description: "result and time of every solver per instance",
    },
    ExtractorInfo {
        extractor: Extractor::ResultsTable,
        name: "ResultsTable",
        description: "per-solver result counts and total times",
    },
    ExtractorInfo {
        extractor: Extractor::SMTLib,
        name: "SMTLib",
        description: "export the instances as SMT-LIB files",
    },
    ExtractorInfo {
        extractor: Extractor::CactusPlot,
        name: "CactusPlot",
        description: "cumulative solving time per solver",
    },
    ExtractorInfo {
        extractor: Extractor::MatchingPie,
        name: "MatchingPie",
        description: "matching vs non-matching instances",
    },
    ExtractorInfo {
        extractor: Extractor::SMTPlot,
        name: "SMTPlot",
        description: "syntax tree of every instance as a DOT graph",
    },
    ExtractorInfo {
        extractor: Extractor::VarDepPlot,
        name: "VarDepPlot",
        description: "variable/assertion dependency graph as DOT",
    },
];

impl Extractor {
    /// Case-insensitive catalog lookup.
    pub fn from_name(name: &str) -> Result<Extractor, ExtractError> {
        EXTRACTORS
            .iter()
            .find(|e| e.name.eq_ignore_ascii_case(name))
            .map(|e| e.extractor)
            .ok_or_else(|| ExtractError::Unknown(name.to_string()))
    }

    pub fn name(self) -> &'static str {
        EXTRACTORS
            .iter()
            .find(|e| e.extractor == self)
            .map(|e| e.name)
            .expect("every extractor is in the catalog")
    }

    /// Whether the extractor reads solver results.
    pub fn needs_results(self) -> bool {
        matches!(
            self,
            Extractor::InstanceTable | Extractor::ResultsTable | Extractor::CactusPlot
        )
    }

    /// Whether the extractor writes files.
    pub fn writes_files(self) -> bool {
        !matches!(
            self,
            Extractor::Count | Extractor::InstanceTable | Extractor::ResultsTable
        )
    }
}

impl std::fmt::Display for Extractor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct Matched {
    pub instance: InstanceRec,
    /// The instance after the `Apply` function.
    pub script: Script,
}

#[derive(Clone, Debug, Default)]
pub struct QueryResult {
    pub matched: Vec<Matched>,
    /// Instances in the selected dataset before filtering.
    pub universe_size: usize,
    /// Benchmark name to (matched, total).
    pub per_benchmark: BTreeMap<String, (usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Run {
    pub result: SolverResult,
    pub time: f64,
}

/// Newest result of each solver on each matched instance; `cells[i][s]`
/// belongs to `matched[i]` and `solvers[s]`.
#[derive(Clone, Debug, Default)]
pub struct Runs {
    pub solvers: Vec<String>,
    pub cells: Vec<Vec<Option<Run>>>,
}

#[derive(Clone, Debug)]
pub struct ExtractOptions {
    pub outdir: PathBuf,
    /// Also write SVG renderings next to plot data.
    pub render: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExtractOutput {
    /// Text for standard output.
    pub text: String,
    pub files: Vec<PathBuf>,
}

pub fn run_extractor(
    e: Extractor,
    r: &QueryResult,
    runs: &Runs,
    opts: &ExtractOptions,
) -> Result<ExtractOutput, ExtractError> {
    let text_only = |text: String| {
        Ok(ExtractOutput {
            text,
            files: Vec::new(),
        })
    };
    let files_only = |files: Vec<PathBuf>| {
        Ok(ExtractOutput {
            text: String::new(),
            files,
        })
    };
    match e {
        Extractor::Count => text_only(extract_count(r)),
        Extractor::InstanceTable => text_only(instance_table(r, runs)),
        Extractor::ResultsTable => text_only(results_table(runs)),
        Extractor::SMTLib => files_only(extract_smtlib(r, &opts.outdir)?),
        Extractor::CactusPlot => files_only(extract_cactus(runs, &opts.outdir, opts.render)?),
        Extractor::MatchingPie => files_only(extract_matching_pie(r, &opts.outdir, opts.render)?),
        Extractor::SMTPlot => files_only(extract_smt_plot(r, &opts.outdir)?),
        Extractor::VarDepPlot => files_only(extract_vardep_plot(r, &opts.outdir)?),
    }
}

// Count

/// `100 * m / n` truncated to two decimals; 0.00 when `n` is 0.
pub fn percentage(m: usize, n: usize) -> String {
    if n == 0 {
        return "0.00".into();
    }
    let hundredths = (m as u128 * 10_000) / n as u128;
    format!("{}.{:02}", hundredths / 100, hundredths % 100)
}

pub fn count_line(m: usize, n: usize) -> String {
    format!(
        "Total matching instances: {m} of {n} within the selected set ({}%)",
        percentage(m, n)
    )
}

pub fn extract_count(r: &QueryResult) -> String {
    let mut out = count_line(r.matched.len(), r.universe_size);
    out.push('\n');
    for (bench, (m, n)) in &r.per_benchmark {
        out.push_str(&format!("{bench}: {m} of {n}\n"));
    }
    out
}

// Tables

/// Six significant digits without trailing zeros, like C's `%g`.
pub fn format_time(t: f64) -> String {
    if t == 0.0 || !t.is_finite() {
        return format!("{t}");
    }
    let exp = t.abs().log10().floor() as i32;
    if !(-4..6).contains(&exp) {
        let s = format!("{t:.5e}");
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        let e: i32 = e.parse().expect("exponent");
        return format!("{mantissa}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs());
    }
    let s = format!("{t:.*}", (5 - exp) as usize);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn instance_table(r: &QueryResult, runs: &Runs) -> String {
    let mut headers = vec!["Instance".to_string()];
    for s in &runs.solvers {
        headers.push(format!("Result {s}"));
        headers.push(format!("Time {s}"));
    }
    let rows: Vec<Vec<String>> = r
        .matched
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let mut row = vec![m.instance.label()];
            for s in 0..runs.solvers.len() {
                match runs.cells.get(i).and_then(|c| c[s]) {
                    Some(run) => {
                        row.push(run.result.to_string());
                        row.push(format_time(run.time));
                    }
                    None => {
                        row.push("-".into());
                        row.push("-".into());
                    }
                }
            }
            row
        })
        .collect();
    table::render(&headers, &rows)
}

/// Per-solver totals over the matched instances.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolverSummary {
    pub sat: usize,
    pub unsat: usize,
    pub unknown: usize,
    pub timeout: usize,
    pub crash: usize,
    pub time_without_timeout: f64,
    pub total_time: f64,
}

pub fn summarize(runs: &Runs, solver: usize) -> SolverSummary {
    let mut s = SolverSummary::default();
    for run in runs.cells.iter().filter_map(|c| c[solver]) {
        match run.result {
            SolverResult::Satisfied => s.sat += 1,
            SolverResult::Unsatisfied => s.unsat += 1,
            SolverResult::Unknown => s.unknown += 1,
            SolverResult::Timeout => s.timeout += 1,
            SolverResult::Crash => s.crash += 1,
        }
        if run.result != SolverResult::Timeout {
            s.time_without_timeout += run.time;
        }
        s.total_time += run.time;
    }
    s
}

pub fn results_table(runs: &Runs) -> String {
    let mut headers = vec![String::new()];
    headers.extend(runs.solvers.iter().cloned());
    let sums: Vec<SolverSummary> = (0..runs.solvers.len())
        .map(|s| summarize(runs, s))
        .collect();
    let row = |label: &str, f: &dyn Fn(&SolverSummary) -> String| {
        let mut r = vec![label.to_string()];
        r.extend(sums.iter().map(f));
        r
    };
    let rows = vec![
        row("SAT", &|s| s.sat.to_string()),
        row("UNSAT", &|s| s.unsat.to_string()),
        row("Unknown", &|s| s.unknown.to_string()),
        row("Timeout", &|s| s.timeout.to_string()),
        row("Crash", &|s| s.crash.to_string()),
        row("Time w/o Timeout", &|s| format_time(s.time_without_timeout)),
        row("Total Time", &|s| format_time(s.total_time)),
    ];
    table::render(&headers, &rows)
}

// Files

fn write_file(path: &Path, contents: &str) -> Result<(), ExtractError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    std::fs::write(path, contents).map_err(io_err(path))
}

fn instance_path(outdir: &Path, inst: &InstanceRec, suffix: &str) -> PathBuf {
    outdir
        .join(&inst.benchmark)
        .join(&inst.track)
        .join(format!("{}{suffix}", inst.name))
}

/// Writes each matched script to `outdir/benchmark/track/name`.
pub fn extract_smtlib(r: &QueryResult, outdir: &Path) -> Result<Vec<PathBuf>, ExtractError> {
    std::fs::create_dir_all(outdir).map_err(io_err(outdir))?;
    let mut files = Vec::new();
    for m in &r.matched {
        let path = instance_path(outdir, &m.instance, "");
        write_file(&path, &print_script(&m.script))?;
        files.push(path);
    }
    Ok(files)
}

/// (solver, index, cumulative time) over solved cases sorted by runtime.
pub fn cactus_rows(runs: &Runs) -> Vec<(String, usize, f64)> {
    let mut rows = Vec::new();
    for (s, name) in runs.solvers.iter().enumerate() {
        let mut times: Vec<f64> = runs
            .cells
            .iter()
            .filter_map(|c| c[s])
            .filter(|r| r.result.is_decisive())
            .map(|r| r.time)
            .collect();
        times.sort_by(f64::total_cmp);
        let mut acc = 0.0;
        for (i, t) in times.into_iter().enumerate() {
            acc += t;
            rows.push((name.clone(), i + 1, acc));
        }
    }
    rows
}

pub fn extract_cactus(
    runs: &Runs,
    outdir: &Path,
    render: bool,
) -> Result<Vec<PathBuf>, ExtractError> {
    let rows = cactus_rows(runs);
    let mut csv = String::from("solver,index,cumulative_time\n");
    for (s, i, t) in &rows {
        csv.push_str(&format!("{s},{i},{t}\n"));
    }
    let path = outdir.join("cactus.csv");
    write_file(&path, &csv)?;
    let mut files = vec![path];
    if render {
        let path = outdir.join("cactus.svg");
        write_file(&path, &svg::cactus(&runs.solvers, &rows))?;
        files.push(path);
    }
    Ok(files)
}

pub fn pie_slices(r: &QueryResult) -> (usize, usize) {
    let m = r.matched.len();
    (m, r.universe_size.saturating_sub(m))
}

pub fn extract_matching_pie(
    r: &QueryResult,
    outdir: &Path,
    render: bool,
) -> Result<Vec<PathBuf>, ExtractError> {
    let (m, rest) = pie_slices(r);
    let path = outdir.join("matching_pie.csv");
    write_file(
        &path,
        &format!("slice,count\nmatching,{m}\nnot matching,{rest}\n"),
    )?;
    let mut files = vec![path];
    if render {
        let path = outdir.join("matching_pie.svg");
        write_file(&path, &svg::pie(m, rest))?;
        files.push(path);
    }
    Ok(files)
}

pub fn extract_smt_plot(r: &QueryResult, outdir: &Path) -> Result<Vec<PathBuf>, ExtractError> {
    let mut files = Vec::new();
    for m in &r.matched {
        let path = instance_path(outdir, &m.instance, ".dot");
        write_file(&path, &smt_plot_dot(&m.script))?;
        files.push(path);
    }
    Ok(files)
}

pub fn extract_vardep_plot(r: &QueryResult, outdir: &Path) -> Result<Vec<PathBuf>, ExtractError> {
    let mut files = Vec::new();
    for m in &r.matched {
        let path = instance_path(outdir, &m.instance, ".vardep.dot");
        write_file(&path, &vardep_dot(&m.script))?;
        files.push(path);
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    #[test]
    fn times_use_six_significant_digits() {
        use super::format_time;
        assert_eq!(format_time(0.0089760612), "0.00897606");
        assert_eq!(format_time(97.51543), "97.5154");
        assert_eq!(format_time(669.8591), "669.859");
        assert_eq!(format_time(0.028013), "0.028013");
        assert_eq!(format_time(21.0), "21");
        assert_eq!(format_time(1234567.0), "1.23457e+06");
        assert_eq!(format_time(0.00001234), "1.234e-05");
        assert_eq!(format_time(0.0), "0");
    }

    use super::*;
    use crate::smtlib::parse_script;

    fn inst(b: &str, t: &str, name: &str) -> InstanceRec {
        InstanceRec {
            id: 1,
            name: name.into(),
            path: PathBuf::from(name),
            track_id: 1,
            benchmark: b.into(),
            track: t.into(),
        }
    }

    fn matched(b: &str, t: &str, name: &str, text: &str) -> Matched {
        Matched {
            instance: inst(b, t, name),
            script: parse_script(text).unwrap(),
        }
    }

    fn run(result: SolverResult, time: f64) -> Option<Run> {
        Some(Run { result, time })
    }

    #[test]
    fn count_lines() {
        assert_eq!(
            count_line(51, 94),
            "Total matching instances: 51 of 94 within the selected set (54.25%)"
        );
        assert!(count_line(76, 94).ends_with("(80.85%)"));
        assert!(count_line(47070, 114468).ends_with("(41.12%)"));
        assert_eq!(
            count_line(0, 0),
            "Total matching instances: 0 of 0 within the selected set (0.00%)"
        );
        let mut r = QueryResult {
            universe_size: 3,
            ..Default::default()
        };
        r.per_benchmark.insert("b".into(), (0, 1));
        r.per_benchmark.insert("a".into(), (1, 2));
        r.matched.push(matched("a", "t", "x.smt2", ""));
        assert_eq!(
            extract_count(&r),
            "Total matching instances: 1 of 3 within the selected set (33.33%)\na: 1 of 2\nb: 0 of 1\n"
        );
    }

    #[test]
    fn results_table_sums() {
        let runs = Runs {
            solvers: vec!["M".into()],
            cells: vec![
                vec![run(SolverResult::Satisfied, 1.0)],
                vec![run(SolverResult::Timeout, 20.0)],
            ],
        };
        let s = summarize(&runs, 0);
        assert_eq!(
            (s.sat, s.timeout, s.time_without_timeout, s.total_time),
            (1, 1, 1.0, 21.0)
        );
        let text = results_table(&runs);
        assert!(text.contains("Time w/o Timeout    1\n"), "{text}");
        assert!(text.contains("Total Time         21\n"), "{text}");
        let empty = results_table(&Runs {
            solvers: vec!["M".into()],
            cells: vec![],
        });
        assert!(empty.contains("SAT                 0\n"), "{empty}");
    }

    #[test]
    fn instance_table_rows() {
        let r = QueryResult {
            matched: vec![matched("pisa", "pisa", "pisa-011.smt2", "")],
            universe_size: 1,
            per_benchmark: BTreeMap::new(),
        };
        let runs = Runs {
            solvers: vec!["CVC5".into()],
            cells: vec![vec![run(SolverResult::Satisfied, 0.00897606)]],
        };
        let text = instance_table(&r, &runs);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(
            lines[2],
            "pisa:pisa:pisa-011.smt2  Satisfied       0.00897606"
        );
        let empty = instance_table(&QueryResult::default(), &runs);
        assert_eq!(empty.lines().count(), 2);
    }

    #[test]
    fn cactus_prefix_sums() {
        let runs = Runs {
            solvers: vec!["A".into(), "B".into()],
            cells: vec![
                vec![
                    run(SolverResult::Satisfied, 3.0),
                    run(SolverResult::Timeout, 20.0),
                ],
                vec![
                    run(SolverResult::Unsatisfied, 1.0),
                    run(SolverResult::Crash, 0.1),
                ],
                vec![run(SolverResult::Satisfied, 2.0), None],
            ],
        };
        let rows = cactus_rows(&runs);
        assert_eq!(
            rows,
            [
                ("A".into(), 1, 1.0),
                ("A".into(), 2, 3.0),
                ("A".into(), 3, 6.0)
            ]
        );
    }

    #[test]
    fn files_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let r = QueryResult {
            matched: vec![
                matched(
                    "b",
                    "t1",
                    "x.smt2",
                    "(declare-fun x () String)(assert (= x \"a\"))",
                ),
                matched(
                    "b",
                    "t2",
                    "x.smt2",
                    "(declare-fun y () String)(assert (= y \"b\"))",
                ),
            ],
            universe_size: 5,
            per_benchmark: BTreeMap::new(),
        };
        let opts = ExtractOptions {
            outdir: dir.path().to_path_buf(),
            render: true,
        };
        let out = run_extractor(Extractor::SMTLib, &r, &Runs::default(), &opts).unwrap();
        assert_eq!(out.files.len(), 2);
        assert_ne!(out.files[0], out.files[1]);
        for f in &out.files {
            parse_script(&std::fs::read_to_string(f).unwrap()).unwrap();
        }
        let pie = run_extractor(Extractor::MatchingPie, &r, &Runs::default(), &opts).unwrap();
        let csv = std::fs::read_to_string(&pie.files[0]).unwrap();
        assert_eq!(csv, "slice,count\nmatching,2\nnot matching,3\n");
        assert!(pie.files[1].exists());
        let plots = run_extractor(Extractor::SMTPlot, &r, &Runs::default(), &opts).unwrap();
        assert_eq!(plots.files.len(), 2);
    }

    #[test]
    fn catalog_lookup() {
        for e in EXTRACTORS {
            assert_eq!(
                Extractor::from_name(&e.name.to_lowercase()).unwrap(),
                e.extractor
            );
        }
        assert!(Extractor::from_name("Histogram").is_err());
    }
}
