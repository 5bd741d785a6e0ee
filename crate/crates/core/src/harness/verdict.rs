// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use super::{ModelCheck, SolverOutcome};
use crate::store::{SolverResult, ValidationKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VerdictKind {
    /// Some solver's model was confirmed by another solver.
    SatValidated,
    /// Strictly more than half of the sat/unsat answers are unsat.
    UnsatMajority,
    /// Sat and unsat answers without validation or majority.
    Disagreement,
    Inconclusive,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::SatValidated => "SatValidated",
            VerdictKind::UnsatMajority => "UnsatMajority",
            VerdictKind::Disagreement => "Disagreement",
            VerdictKind::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Solver and model confirming satisfiability.
    pub witness: Option<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossValidation {
    pub verdict: Verdict,
    /// Per outcome: whether its own model was confirmed (`Some(true)`),
    /// refuted (`Some(false)`) or never decided.
    pub model_checks: Vec<Option<bool>>,
    /// Per outcome: the validation record to store.
    pub records: Vec<ValidationKind>,
}

/// Validation record of one result given its model check and the verdict.
pub fn validation_for(
    result: SolverResult,
    own_model: Option<bool>,
    verdict: VerdictKind,
) -> ValidationKind {
    use ValidationKind::*;
    match (result, own_model) {
        (SolverResult::Satisfied, Some(true)) => ModelValid,
        (SolverResult::Satisfied, Some(false)) => ModelInvalid,
        (SolverResult::Satisfied, None) => match verdict {
            VerdictKind::SatValidated => MajorityAgree,
            VerdictKind::UnsatMajority => MajorityDisagree,
            _ => Inconclusive,
        },
        (SolverResult::Unsatisfied, _) => match verdict {
            VerdictKind::SatValidated => MajorityDisagree,
            VerdictKind::UnsatMajority => MajorityAgree,
            _ => Inconclusive,
        },
        _ => Inconclusive,
    }
}

/// Decides the consensus of `outcomes` (solver name, outcome).
///
/// Every satisfiable answer carrying a model is checked by `check(claimant,
/// model, validator)`, trying the other solvers of `validators` in order,
/// starting after the claimant and wrapping around, until one answers
/// decisively. A confirmed model wins over any vote; otherwise unsat wins by
/// strict majority of the sat/unsat answers.
pub fn cross_validate(
    outcomes: &[(String, SolverOutcome)],
    validators: &[String],
    check: &mut dyn FnMut(&str, &str, &str) -> ModelCheck,
) -> CrossValidation {
    let mut model_checks = vec![None; outcomes.len()];
    let mut witness = None;
    for (i, (name, outcome)) in outcomes.iter().enumerate() {
        let (SolverResult::Satisfied, Some(model)) = (outcome.result, &outcome.model) else {
            continue;
        };
        let start = validators
            .iter()
            .position(|v| v.eq_ignore_ascii_case(name))
            .map_or(0, |p| p + 1);
        let n = validators.len();
        for k in 0..n {
            let v = &validators[(start + k) % n];
            if v.eq_ignore_ascii_case(name) {
                continue;
            }
            match check(name, model, v) {
                ModelCheck::Valid => {
                    model_checks[i] = Some(true);
                    break;
                }
                ModelCheck::Invalid => {
                    model_checks[i] = Some(false);
                    break;
                }
                ModelCheck::Indecisive => {}
            }
        }
        if model_checks[i] == Some(true) && witness.is_none() {
            witness = Some((name.clone(), model.clone()));
        }
    }

    let sat = outcomes
        .iter()
        .filter(|(_, o)| o.result == SolverResult::Satisfied)
        .count();
    let unsat = outcomes
        .iter()
        .filter(|(_, o)| o.result == SolverResult::Unsatisfied)
        .count();
    let kind = if witness.is_some() {
        VerdictKind::SatValidated
    } else if unsat > 0 && 2 * unsat > sat + unsat {
        VerdictKind::UnsatMajority
    } else if sat > 0 && unsat > 0 {
        VerdictKind::Disagreement
    } else {
        VerdictKind::Inconclusive
    };
    let records = outcomes
        .iter()
        .zip(&model_checks)
        .map(|((_, o), m)| validation_for(o.result, *m, kind))
        .collect();
    CrossValidation {
        verdict: Verdict { kind, witness },
        model_checks,
        records,
    }
}
