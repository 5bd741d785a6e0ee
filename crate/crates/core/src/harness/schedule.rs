// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;

use super::{
    cross_validate, run_solver, validate_model, HarnessError, ModelCheck, SolverConfig,
    SolverOutcome,
};
use crate::pool::parallel_map;
use crate::smtlib::{parse_script, Script};
use crate::store::{InstanceRec, NewResult, SolverResult, Store};

#[derive(Clone, Copy, Debug)]
pub struct ScheduleOptions {
    pub parallelism: usize,
    /// Print "Waiting for results ..." to stderr when runs are needed.
    pub progress: bool,
}

impl Default for ScheduleOptions {
    fn default() -> Self {
        ScheduleOptions {
            parallelism: 1,
            progress: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ScheduleReport {
    pub runs: usize,
    pub validations: usize,
}

/// (instance index, solver index) pairs without a stored result.
pub fn pending_pairs(
    store: &Store,
    instances: &[InstanceRec],
    solvers: &[SolverConfig],
) -> Result<Vec<(usize, usize)>, HarnessError> {
    let mut out = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        for (s, cfg) in solvers.iter().enumerate() {
            if store.latest_result(inst.id, &cfg.name)?.is_none() {
                out.push((i, s));
            }
        }
    }
    Ok(out)
}

fn outcome_or_crash(cfg: &SolverConfig, inst: &InstanceRec) -> SolverOutcome {
    match run_solver(cfg, &inst.path) {
        Ok(o) => o,
        Err(e) => {
            log::warn!("{}: {e}", inst.label());
            SolverOutcome {
                result: SolverResult::Crash,
                time: 0.0,
                model: None,
                stdout: String::new(),
                stderr: e.to_string(),
            }
        }
    }
}

/// Runs every configured solver lacking a stored result on each instance,
/// then cross-validates the instances that received new results.
pub fn schedule_runs(
    store: &Store,
    instances: &[InstanceRec],
    solvers: &[SolverConfig],
    options: ScheduleOptions,
) -> Result<ScheduleReport, HarnessError> {
    let pending = pending_pairs(store, instances, solvers)?;
    if pending.is_empty() {
        return Ok(ScheduleReport::default());
    }
    if options.progress {
        eprintln!("Waiting for results ...");
    }
    let stored = parallel_map(pending.clone(), options.parallelism, |(i, s)| {
        let inst = &instances[i];
        let cfg = &solvers[s];
        let o = outcome_or_crash(cfg, inst);
        store.put_result(&NewResult {
            instance_id: inst.id,
            solver: cfg.name.clone(),
            result: o.result,
            time: o.time,
            model: o.model,
        })
    });
    for r in stored {
        r?;
    }
    let touched: BTreeSet<usize> = pending.iter().map(|(i, _)| *i).collect();
    let validated = parallel_map(touched.into_iter().collect(), options.parallelism, |i| {
        cross_validate_instance(store, &instances[i], solvers)
    });
    let mut validations = 0;
    for v in validated {
        validations += v?;
    }
    Ok(ScheduleReport {
        runs: pending.len(),
        validations,
    })
}

/// Runs missing solvers on one instance.
pub fn ensure_results(
    store: &Store,
    inst: &InstanceRec,
    solvers: &[SolverConfig],
    options: ScheduleOptions,
) -> Result<ScheduleReport, HarnessError> {
    schedule_runs(store, std::slice::from_ref(inst), solvers, options)
}

fn load_script(inst: &InstanceRec) -> Option<Script> {
    let text = std::fs::read_to_string(&inst.path).ok()?;
    match parse_script(&text) {
        Ok(s) => Some(s),
        Err(e) => {
            log::warn!("{}: models cannot be checked: {e}", inst.label());
            None
        }
    }
}

/// Cross-validates the newest result of each solver on `inst`, using the
/// configured solvers as validators, and stores one validation record per
/// result. Returns the number of records written.
pub fn cross_validate_instance(
    store: &Store,
    inst: &InstanceRec,
    solvers: &[SolverConfig],
) -> Result<usize, HarnessError> {
    let mut ids = Vec::new();
    let mut outcomes = Vec::new();
    for r in store.latest_results(inst.id)? {
        ids.push(r.id);
        outcomes.push((
            r.solver,
            SolverOutcome {
                result: r.result,
                time: r.time,
                model: r.model,
                stdout: String::new(),
                stderr: String::new(),
            },
        ));
    }
    if outcomes.is_empty() {
        return Ok(0);
    }
    let script = if outcomes.iter().any(|(_, o)| o.model.is_some()) {
        load_script(inst)
    } else {
        None
    };
    let names: Vec<String> = solvers.iter().map(|s| s.name.clone()).collect();
    let mut check = |claimant: &str, model: &str, validator: &str| -> ModelCheck {
        let Some(script) = &script else {
            return ModelCheck::Indecisive;
        };
        let Some(cfg) = solvers.iter().find(|s| s.name == validator) else {
            return ModelCheck::Indecisive;
        };
        match validate_model(script, model, cfg) {
            Ok(c) => c,
            Err(HarnessError::ModelParse(e)) => {
                log::info!("{}: model of {claimant} rejected: {e}", inst.label());
                ModelCheck::Invalid
            }
            Err(e) => {
                log::warn!("{}: validation with {validator} failed: {e}", inst.label());
                ModelCheck::Indecisive
            }
        }
    };
    let cv = cross_validate(&outcomes, &names, &mut check);
    for (id, kind) in ids.iter().zip(&cv.records) {
        store.put_validation(*id, *kind)?;
    }
    Ok(ids.len())
}
