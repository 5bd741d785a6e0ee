// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Once;

use super::ast::{Condition, OutputField, Query};
use super::QlangError;
use crate::extractors::{
    run_extractor, ExtractOptions, Extractor, Matched, QueryResult, Run, Runs,
};
use crate::harness::{schedule_runs, ScheduleOptions, SolverConfig};
use crate::intel::IntelSpec;
use crate::pool::parallel_map;
use crate::predicates::{eval_structural, EvalContext, Predicate, PredicateError};
use crate::smtlib::{content_hash, Script};
use crate::store::{load_uncached, AstCache, DatasetAtom, InstanceRec, Store};
use crate::transforms::{apply_transform, Transform};

/// Everything a query needs to run.
pub struct Engine<'a> {
    pub store: &'a Store,
    /// `None` parses every instance afresh.
    pub cache: Option<&'a AstCache>,
    pub solvers: &'a [SolverConfig],
    pub jobs: usize,
    /// Extractor files go to a fresh directory below this one.
    pub output_root: PathBuf,
    pub render: bool,
    /// Print "Waiting for results ..." before solver runs.
    pub progress: bool,
}

#[derive(Debug, Default)]
pub struct Evaluation {
    pub result: QueryResult,
    /// Text for standard output.
    pub stdout: String,
    pub files: Vec<PathBuf>,
    /// Directory that received extractor files.
    pub outdir: Option<PathBuf>,
    /// Instances skipped because they could not be loaded or transformed.
    pub warnings: Vec<String>,
}

enum Outcome {
    Match(Script),
    NoMatch,
    Skipped(String),
}

fn wanted_intel(c: &Condition) -> Vec<&'static dyn IntelSpec> {
    let mut out: Vec<&'static dyn IntelSpec> = Vec::new();
    for p in c.predicates() {
        for spec in p.required_intel() {
            if !out.iter().any(|s| s.key() == spec.key()) {
                out.push(spec);
            }
        }
    }
    out
}

/// Left-to-right, short-circuiting.
fn eval_condition(
    c: &Condition,
    inst: &InstanceRec,
    script: &Script,
    ctx: &EvalContext,
) -> Result<bool, PredicateError> {
    Ok(match c {
        Condition::True => true,
        Condition::False => false,
        Condition::Not(a) => !eval_condition(a, inst, script, ctx)?,
        Condition::And(a, b) => {
            eval_condition(a, inst, script, ctx)? && eval_condition(b, inst, script, ctx)?
        }
        Condition::Or(a, b) => {
            eval_condition(a, inst, script, ctx)? || eval_condition(b, inst, script, ctx)?
        }
        Condition::Pred(p) if p.is_structural() => eval_structural(p, script),
        Condition::Pred(p) => ctx.eval_solver_predicate(p, inst)?,
    })
}

fn unique_dir(root: &Path, stem: &str) -> PathBuf {
    let first = root.join(stem);
    if !first.exists() {
        return first;
    }
    (2..)
        .map(|i| root.join(format!("{stem}-{i}")))
        .find(|p| !p.exists())
        .expect("unbounded search")
}

impl Engine<'_> {
    fn load(&self, inst: &InstanceRec, wanted: &[&dyn IntelSpec]) -> Result<Script, String> {
        let loaded = match self.cache {
            Some(cache) => cache.load(inst, wanted),
            None => load_uncached(&inst.path, wanted),
        };
        loaded.map_err(|e| format!("{}: skipped: {e}", inst.label()))
    }

    fn check_solvers(&self, ctx: &EvalContext, c: &Condition) -> Result<(), QlangError> {
        for p in c.predicates() {
            for s in p.solvers() {
                ctx.resolve_solver(s)?;
            }
        }
        Ok(())
    }

    /// Instances of `dataset` satisfying `condition`, in benchmark, track
    /// and name order, with their annotated scripts.
    pub fn matches(
        &self,
        dataset: &[DatasetAtom],
        condition: &Condition,
    ) -> Result<(QueryResult, Vec<String>), QlangError> {
        let instances = self.store.select_instances(dataset)?;
        let notice = Once::new();
        let on_run = || {
            if self.progress {
                notice.call_once(|| eprintln!("Waiting for results ..."));
            }
        };
        let ctx = EvalContext {
            store: self.store,
            solvers: self.solvers,
            schedule: ScheduleOptions::default(),
            on_run: Some(&on_run),
        };
        self.check_solvers(&ctx, condition)?;
        let wanted = wanted_intel(condition);
        let outcomes = parallel_map(instances.clone(), self.jobs, |inst| {
            let script = match self.load(&inst, &wanted) {
                Ok(s) => s,
                Err(w) => return Ok(Outcome::Skipped(w)),
            };
            Ok::<_, QlangError>(if eval_condition(condition, &inst, &script, &ctx)? {
                Outcome::Match(script)
            } else {
                Outcome::NoMatch
            })
        });
        let mut result = QueryResult {
            universe_size: instances.len(),
            ..Default::default()
        };
        let mut warnings = Vec::new();
        for (inst, outcome) in instances.into_iter().zip(outcomes) {
            let entry = result
                .per_benchmark
                .entry(inst.benchmark.clone())
                .or_insert((0, 0));
            entry.1 += 1;
            match outcome? {
                Outcome::Match(script) => {
                    entry.0 += 1;
                    result.matched.push(Matched {
                        instance: inst,
                        script,
                    });
                }
                Outcome::NoMatch => {}
                Outcome::Skipped(w) => warnings.push(w),
            }
        }
        Ok((result, warnings))
    }

    pub fn evaluate(&self, q: &Query) -> Result<Evaluation, QlangError> {
        let (result, warnings) = self.matches(q.dataset(), q.condition())?;
        let mut ev = Evaluation {
            result,
            warnings,
            ..Default::default()
        };
        match q {
            Query::Select { output, .. } => self.select_output(*output, &mut ev),
            Query::Extract {
                extractor,
                function,
                ..
            } => self.extract(*extractor, *function, &mut ev)?,
        }
        Ok(ev)
    }

    fn select_output(&self, field: OutputField, ev: &mut Evaluation) {
        let mut kept = Vec::new();
        for m in std::mem::take(&mut ev.result.matched) {
            let line = match field {
                OutputField::Name => Ok(m.instance.label()),
                OutputField::Hash => std::fs::read(&m.instance.path).map(|b| content_hash(&b)),
                OutputField::Content => std::fs::read_to_string(&m.instance.path),
            };
            match line {
                Ok(mut text) => {
                    if !text.ends_with('\n') {
                        text.push('\n');
                    }
                    ev.stdout.push_str(&text);
                    kept.push(m);
                }
                Err(e) => ev
                    .warnings
                    .push(format!("{}: skipped: {e}", m.instance.label())),
            }
        }
        ev.result.matched = kept;
    }

    fn extract(&self, e: Extractor, f: Transform, ev: &mut Evaluation) -> Result<(), QlangError> {
        let matched = std::mem::take(&mut ev.result.matched);
        let transformed = parallel_map(matched, self.jobs, |m| {
            apply_transform(f, &m.script)
                .map(|script| Matched {
                    instance: m.instance.clone(),
                    script,
                })
                .map_err(|err| format!("{}: skipped: {err}", m.instance.label()))
        });
        for t in transformed {
            match t {
                Ok(m) => ev.result.matched.push(m),
                Err(w) => ev.warnings.push(w),
            }
        }
        let runs = if e.needs_results() {
            self.collect_runs(&ev.result)?
        } else {
            Runs::default()
        };
        let outdir = if e.writes_files() {
            let stamp = chrono::Local::now().format("%Y%m%d-%H%M%S");
            let dir = unique_dir(&self.output_root, &format!("{stamp}-{e}"));
            std::fs::create_dir_all(&dir).map_err(|source| QlangError::Io {
                path: dir.clone(),
                source,
            })?;
            Some(dir)
        } else {
            None
        };
        let opts = ExtractOptions {
            outdir: outdir.clone().unwrap_or_default(),
            render: self.render,
        };
        let out = run_extractor(e, &ev.result, &runs, &opts)?;
        ev.stdout = out.text;
        if let Some(dir) = &outdir {
            ev.stdout.push_str(&format!(
                "{} file(s) written to {}\n",
                out.files.len(),
                dir.display()
            ));
        }
        ev.files = out.files;
        ev.outdir = outdir;
        Ok(())
    }

    /// Newest results of the configured solvers (or, without a
    /// configuration, of every solver with stored results), running missing
    /// configured solvers first.
    fn collect_runs(&self, r: &QueryResult) -> Result<Runs, QlangError> {
        let solvers: Vec<String> = if self.solvers.is_empty() {
            self.store.solver_names()?
        } else {
            let instances: Vec<InstanceRec> =
                r.matched.iter().map(|m| m.instance.clone()).collect();
            schedule_runs(
                self.store,
                &instances,
                self.solvers,
                ScheduleOptions {
                    parallelism: self.jobs,
                    progress: self.progress,
                },
            )?;
            self.solvers.iter().map(|s| s.name.clone()).collect()
        };
        let mut cells = Vec::with_capacity(r.matched.len());
        for m in &r.matched {
            let mut row = Vec::with_capacity(solvers.len());
            for s in &solvers {
                row.push(self.store.latest_result(m.instance.id, s)?.map(|rec| Run {
                    result: rec.result,
                    time: rec.time,
                }));
            }
            cells.push(row);
        }
        Ok(Runs { solvers, cells })
    }
}

/// Names of matched instances, keyed for set comparisons in tests.
pub fn match_labels(r: &QueryResult) -> Vec<String> {
    r.matched.iter().map(|m| m.instance.label()).collect()
}

/// Per-benchmark totals of `instances`.
pub fn benchmark_totals(instances: &[InstanceRec]) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for i in instances {
        *out.entry(i.benchmark.clone()).or_insert(0) += 1;
    }
    out
}

/// Predicates of `c` that need solver results.
pub fn solver_predicates(c: &Condition) -> Vec<&Predicate> {
    c.predicates()
        .into_iter()
        .filter(|p| !p.is_structural())
        .collect()
}
