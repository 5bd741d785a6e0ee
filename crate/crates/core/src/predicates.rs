// SPDX-License-Identifier: Apache-2.0

//! The predicate catalog of the query language.
//!
//! Structural predicates read intel values of the instance's script; solver
//! predicates read the newest stored result per solver and its validation
//! record, running missing solvers on demand.

use std::fmt;

use thiserror::Error;

use crate::harness::{
    cross_validate_instance, ensure_results, find_solver, HarnessError, ScheduleOptions,
    SolverConfig,
};
use crate::intel::{
    constraint_kinds, equation_sides, regex_classification, upper_bounds, variable_counts,
    IntelSpec, KindsSpec, RegexShapeSpec, UpperBoundSpec, VarCountSpec, WeqSidesSpec,
};
use crate::smtlib::{Script, Sort};
use crate::store::{InstanceRec, ResultRec, SolverResult, Store, StoreError, ValidationKind};

#[derive(Debug, Error)]
pub enum PredicateError {
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("predicate `{name}` takes {expected} argument(s), got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("unknown solver `{0}`")]
    UnknownSolver(String),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PredicateInfo {
    pub name: &'static str,
    pub arity: usize,
    pub description: &'static str,
}

pub const CATALOG: &[PredicateInfo] = &[
    PredicateInfo {
        name: "hasWEQ",
        arity: 0,
        description: "contains a word equation",
    },
    PredicateInfo {
        name: "hasRegex",
        arity: 0,
        description: "contains a regular membership constraint",
    },
    PredicateInfo {
        name: "hasLinears",
        arity: 0,
        description: "contains a linear length constraint",
    },
    PredicateInfo {
        name: "hasHigherOrder",
        arity: 0,
        description: "uses substr, indexof, replace or similar functions",
    },
    PredicateInfo {
        name: "isQuadratic",
        arity: 0,
        description: "every string variable occurs at most twice",
    },
    PredicateInfo {
        name: "isPatternMatching",
        arity: 0,
        description: "every word equation is x = t with x occurring nowhere else",
    },
    PredicateInfo {
        name: "hasAtLeast5Variables",
        arity: 0,
        description: "declares at least 5 string variables",
    },
    PredicateInfo {
        name: "isSimpleRegex",
        arity: 0,
        description: "only memberships of a variable or constant in complement-free expressions",
    },
    PredicateInfo {
        name: "isSimpleRegexConcatenation",
        arity: 0,
        description: "like isSimpleRegex, left sides may be concatenations",
    },
    PredicateInfo {
        name: "isUpperBounded",
        arity: 0,
        description: "every string variable has a syntactic length upper bound",
    },
    PredicateInfo {
        name: "isSAT",
        arity: 1,
        description: "the solver answered sat",
    },
    PredicateInfo {
        name: "isUNSAT",
        arity: 1,
        description: "the solver answered unsat",
    },
    PredicateInfo {
        name: "hasValidModel",
        arity: 1,
        description: "the solver answered sat with a model confirmed by another solver",
    },
    PredicateInfo {
        name: "isCorrect",
        arity: 1,
        description: "the solver's answer agrees with a confirmed model or the unsat majority",
    },
    PredicateInfo {
        name: "isFaster",
        arity: 2,
        description: "both solvers answered and the first was quicker",
    },
];

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Predicate {
    HasWeq,
    HasRegex,
    HasLinears,
    HasHigherOrder,
    IsQuadratic,
    IsPatternMatching,
    HasAtLeast5Variables,
    IsSimpleRegex,
    IsSimpleRegexConcatenation,
    IsUpperBounded,
    IsSat(String),
    IsUnsat(String),
    HasValidModel(String),
    IsCorrect(String),
    IsFaster(String, String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PredicateCall {
    pub name: String,
    pub args: Vec<String>,
}

impl fmt::Display for PredicateCall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.args.is_empty() {
            write!(f, "({})", self.args.join(", "))?;
        }
        Ok(())
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())?;
        let args = self.solvers();
        if !args.is_empty() {
            write!(f, "({})", args.join(", "))?;
        }
        Ok(())
    }
}

impl Predicate {
    /// Resolves a call against the catalog. Names match case-insensitively.
    pub fn resolve(call: &PredicateCall) -> Result<Predicate, PredicateError> {
        let info = CATALOG
            .iter()
            .find(|p| p.name.eq_ignore_ascii_case(&call.name))
            .ok_or_else(|| PredicateError::UnknownPredicate(call.name.clone()))?;
        if call.args.len() != info.arity {
            return Err(PredicateError::Arity {
                name: info.name.to_string(),
                expected: info.arity,
                got: call.args.len(),
            });
        }
        let a = |i: usize| call.args[i].clone();
        Ok(match info.name {
            "hasWEQ" => Predicate::HasWeq,
            "hasRegex" => Predicate::HasRegex,
            "hasLinears" => Predicate::HasLinears,
            "hasHigherOrder" => Predicate::HasHigherOrder,
            "isQuadratic" => Predicate::IsQuadratic,
            "isPatternMatching" => Predicate::IsPatternMatching,
            "hasAtLeast5Variables" => Predicate::HasAtLeast5Variables,
            "isSimpleRegex" => Predicate::IsSimpleRegex,
            "isSimpleRegexConcatenation" => Predicate::IsSimpleRegexConcatenation,
            "isUpperBounded" => Predicate::IsUpperBounded,
            "isSAT" => Predicate::IsSat(a(0)),
            "isUNSAT" => Predicate::IsUnsat(a(0)),
            "hasValidModel" => Predicate::HasValidModel(a(0)),
            "isCorrect" => Predicate::IsCorrect(a(0)),
            "isFaster" => Predicate::IsFaster(a(0), a(1)),
            other => unreachable!("catalog entry {other} without variant"),
        })
    }

    /// Catalog spelling of the predicate name.
    pub fn name(&self) -> &'static str {
        match self {
            Predicate::HasWeq => "hasWEQ",
            Predicate::HasRegex => "hasRegex",
            Predicate::HasLinears => "hasLinears",
            Predicate::HasHigherOrder => "hasHigherOrder",
            Predicate::IsQuadratic => "isQuadratic",
            Predicate::IsPatternMatching => "isPatternMatching",
            Predicate::HasAtLeast5Variables => "hasAtLeast5Variables",
            Predicate::IsSimpleRegex => "isSimpleRegex",
            Predicate::IsSimpleRegexConcatenation => "isSimpleRegexConcatenation",
            Predicate::IsUpperBounded => "isUpperBounded",
            Predicate::IsSat(_) => "isSAT",
            Predicate::IsUnsat(_) => "isUNSAT",
            Predicate::HasValidModel(_) => "hasValidModel",
            Predicate::IsCorrect(_) => "isCorrect",
            Predicate::IsFaster(..) => "isFaster",
        }
    }

    pub fn is_structural(&self) -> bool {
        self.solvers().is_empty()
    }

    pub fn solvers(&self) -> Vec<&str> {
        match self {
            Predicate::IsSat(s)
            | Predicate::IsUnsat(s)
            | Predicate::HasValidModel(s)
            | Predicate::IsCorrect(s) => vec![s],
            Predicate::IsFaster(a, b) => vec![a, b],
            _ => Vec::new(),
        }
    }

    /// Intel passes a structural predicate reads.
    pub fn required_intel(&self) -> Vec<&'static dyn IntelSpec> {
        match self {
            Predicate::HasWeq
            | Predicate::HasRegex
            | Predicate::HasLinears
            | Predicate::HasHigherOrder => vec![&KindsSpec],
            Predicate::IsQuadratic => vec![&VarCountSpec],
            Predicate::IsPatternMatching => vec![&VarCountSpec, &WeqSidesSpec],
            Predicate::IsSimpleRegex | Predicate::IsSimpleRegexConcatenation => {
                vec![&KindsSpec, &RegexShapeSpec]
            }
            Predicate::IsUpperBounded => vec![&UpperBoundSpec],
            Predicate::HasAtLeast5Variables => Vec::new(),
            _ => Vec::new(),
        }
    }
}

/// Truth value of a structural predicate on an instance script.
///
/// # Panics
/// When called with a solver predicate.
pub fn eval_structural(p: &Predicate, script: &Script) -> bool {
    match p {
        Predicate::HasWeq => constraint_kinds(script).has_weq,
        Predicate::HasRegex => constraint_kinds(script).has_regex,
        Predicate::HasLinears => constraint_kinds(script).has_linears,
        Predicate::HasHigherOrder => constraint_kinds(script).has_higher_order,
        Predicate::IsQuadratic => {
            let counts = variable_counts(script);
            script.string_variables().all(|v| counts.get(v) <= 2)
        }
        Predicate::IsPatternMatching => {
            let counts = variable_counts(script);
            let equations = equation_sides(script);
            !equations.0.is_empty()
                && equations
                    .0
                    .iter()
                    .all(|sides| sides.iter().any(|x| counts.get(x) == 1))
        }
        Predicate::HasAtLeast5Variables => script.string_variables().count() >= 5,
        Predicate::IsSimpleRegex | Predicate::IsSimpleRegexConcatenation => {
            let shape = regex_classification(script);
            let lhs_ok = if *p == Predicate::IsSimpleRegex {
                shape.simple_lhs
            } else {
                shape.concat_lhs
            };
            constraint_kinds(script).has_regex
                && shape.only_membership
                && lhs_ok
                && !shape.uses_complement_or_inter
        }
        Predicate::IsUpperBounded => {
            let bounds = upper_bounds(script);
            script
                .declarations
                .iter()
                .filter(|d| d.sort == Sort::String)
                .all(|d| bounds.bound(&d.name).is_some())
        }
        _ => panic!("{p:?} is not a structural predicate"),
    }
}

/// Newest result of one solver together with its validation record.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverFacts {
    pub result: ResultRec,
    pub validation: Option<ValidationKind>,
}

fn answered(f: Option<&SolverFacts>) -> Option<&SolverFacts> {
    f.filter(|f| !matches!(f.result.result, SolverResult::Timeout | SolverResult::Crash))
}

/// Truth value of a solver predicate given the facts of its solvers (in
/// argument order); `None` marks a solver without any result.
pub fn eval_with_facts(p: &Predicate, facts: &[Option<SolverFacts>]) -> bool {
    let get = |i: usize| facts.get(i).and_then(Option::as_ref);
    match p {
        Predicate::IsSat(_) => get(0).is_some_and(|f| f.result.result == SolverResult::Satisfied),
        Predicate::IsUnsat(_) => {
            get(0).is_some_and(|f| f.result.result == SolverResult::Unsatisfied)
        }
        Predicate::HasValidModel(_) => get(0).is_some_and(|f| {
            f.result.result == SolverResult::Satisfied
                && f.validation == Some(ValidationKind::ModelValid)
        }),
        Predicate::IsCorrect(_) => get(0).is_some_and(|f| {
            f.validation == Some(ValidationKind::ModelValid)
                || f.result.result == SolverResult::Unsatisfied
                    && f.validation == Some(ValidationKind::MajorityAgree)
        }),
        Predicate::IsFaster(_, _) => match (answered(get(0)), answered(get(1))) {
            (Some(a), Some(b)) => a.result.time < b.result.time,
            _ => false,
        },
        _ => panic!("{p:?} is not a solver predicate"),
    }
}

/// Read access to results and on-demand solver runs.
pub struct EvalContext<'a> {
    pub store: &'a Store,
    pub solvers: &'a [SolverConfig],
    pub schedule: ScheduleOptions,
    /// Called before solvers are run on demand.
    pub on_run: Option<&'a (dyn Fn() + Sync)>,
}

impl EvalContext<'_> {
    /// Canonical name of a solver: the configured name, or the stored name
    /// of a solver that has results but no configuration.
    pub fn resolve_solver(&self, name: &str) -> Result<String, PredicateError> {
        if let Some(cfg) = find_solver(self.solvers, name) {
            return Ok(cfg.name.clone());
        }
        self.store
            .solver_names()?
            .into_iter()
            .find(|s| s.eq_ignore_ascii_case(name))
            .ok_or_else(|| PredicateError::UnknownSolver(name.to_string()))
    }

    /// Facts for `solver` on `inst`, running configured solvers that have
    /// no result yet and cross-validating when no validation is stored.
    pub fn facts(
        &self,
        inst: &InstanceRec,
        solver: &str,
    ) -> Result<Option<SolverFacts>, PredicateError> {
        let name = self.resolve_solver(solver)?;
        let mut latest = self.store.latest_result(inst.id, &name)?;
        if latest.is_none() && find_solver(self.solvers, &name).is_some() {
            if let Some(f) = self.on_run {
                f();
            }
            ensure_results(self.store, inst, self.solvers, self.schedule)?;
            latest = self.store.latest_result(inst.id, &name)?;
        }
        let Some(result) = latest else {
            return Ok(None);
        };
        let mut validation = self.store.get_validation(result.id)?.map(|v| v.result);
        if validation.is_none() {
            cross_validate_instance(self.store, inst, self.solvers)?;
            validation = self.store.get_validation(result.id)?.map(|v| v.result);
        }
        Ok(Some(SolverFacts { result, validation }))
    }

    pub fn eval_solver_predicate(
        &self,
        p: &Predicate,
        inst: &InstanceRec,
    ) -> Result<bool, PredicateError> {
        let facts = p
            .solvers()
            .iter()
            .map(|s| self.facts(inst, s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(eval_with_facts(p, &facts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smtlib::parse_script;
    use crate::store::{IngestOptions, NewResult};

    fn call(name: &str, args: &[&str]) -> PredicateCall {
        PredicateCall {
            name: name.into(),
            args: args.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn holds(name: &str, text: &str) -> bool {
        let p = Predicate::resolve(&call(name, &[])).unwrap();
        eval_structural(&p, &parse_script(text).unwrap())
    }

    const XYZ: &str = "(declare-fun X () String)(declare-fun Y () String)(declare-fun Z () String)
        (assert (= (str.++ \"a\" Y \"ab\" X) (str.++ Z \"abb\" Y)))";

    const GHJ: &str = "(set-logic QF_S)
(declare-fun H () String)
(declare-fun G () String)
(declare-fun J () String)
(assert (= (str.++  \"aacfb\" G \"abdeddaaa\")  (str.++  \"aacfbdffebaaaaac\" H \"aaa\") ))
(assert (= (str.++  \"efbaeecedaaecfceffaffaedfcebcf\" J \"aeaadcbe\")  (str.++  \"e\" J \"aeecedaaecfceffaffaedfcebcf\" J \"aeaadcbe\") ))
(assert (= (str.++  \"bdceafbededddcfcacffdeaefcfa\" J \"dbabcdebee\")  (str.++  \"bdceafbededddcfcacffdeaefcfa\" J \"dbabcdebee\") ))
(check-sat)";

    #[test]
    fn resolution() {
        assert_eq!(
            Predicate::resolve(&call("haswEQ", &[])).unwrap(),
            Predicate::HasWeq
        );
        assert!(matches!(
            Predicate::resolve(&call("isSAT", &[])),
            Err(PredicateError::Arity { expected: 1, .. })
        ));
        assert!(matches!(
            Predicate::resolve(&call("isFast", &["a"])),
            Err(PredicateError::UnknownPredicate(_))
        ));
        assert_eq!(
            Predicate::resolve(&call("isFaster", &["a", "b"]))
                .unwrap()
                .solvers(),
            ["a", "b"]
        );
    }

    #[test]
    fn quadratic() {
        assert!(holds("isQuadratic", XYZ));
        assert!(!holds("isQuadratic", GHJ));
        // Integer variables do not count.
        assert!(holds(
            "isQuadratic",
            "(declare-fun n () Int)(assert (= n n))(assert (= n 1))"
        ));
    }

    #[test]
    fn pattern_matching() {
        let base = "(declare-fun x () String)(declare-fun y () String)";
        assert!(holds(
            "isPatternMatching",
            &format!("{base}(assert (= x (str.++ y \"a\" y)))")
        ));
        assert!(holds(
            "isPatternMatching",
            &format!("{base}(assert (= (str.++ y y) x))")
        ));
        assert!(!holds(
            "isPatternMatching",
            &format!("{base}(assert (= x (str.++ y \"a\")))(assert (= (str.len x) 2))")
        ));
        assert!(!holds(
            "isPatternMatching",
            &format!("{base}(assert (= (str.++ x x) y))(assert (= y \"a\"))")
        ));
        assert!(!holds(
            "isPatternMatching",
            &format!("{base}(assert (str.in_re x re.all))")
        ));
    }

    #[test]
    fn variable_threshold_and_regex_fragments() {
        let listing = "(declare-fun v1 () String)(declare-fun v2 () String)(declare-fun v3 () Int)\
                       (declare-fun ret () String)(assert (= v2 \"<\"))";
        assert!(!holds("hasAtLeast5Variables", listing));
        let five: String = (0..5)
            .map(|i| format!("(declare-fun s{i} () String)"))
            .collect();
        assert!(holds("hasAtLeast5Variables", &five));

        let decl = "(declare-fun x () String)(declare-fun y () String)";
        let simple = format!(
            "{decl}(assert (and (str.in_re x (re.* re.allchar)) (str.in_re \"ab\" re.all)))"
        );
        assert!(holds("isSimpleRegex", &simple));
        assert!(holds("isSimpleRegexConcatenation", &simple));
        let concat = format!("{decl}(assert (str.in_re (str.++ x y) re.all))");
        assert!(!holds("isSimpleRegex", &concat));
        assert!(holds("isSimpleRegexConcatenation", &concat));
        let comp = format!("{decl}(assert (str.in_re x (re.comp re.all)))");
        assert!(!holds("isSimpleRegex", &comp));
        assert!(!holds("isSimpleRegex", decl));
    }

    #[test]
    fn upper_bounded() {
        let decl = "(declare-fun x () String)(declare-fun y () String)";
        assert!(holds(
            "isUpperBounded",
            &format!("{decl}(assert (<= (str.len x) 3))(assert (= y \"ab\"))")
        ));
        assert!(!holds(
            "isUpperBounded",
            &format!("{decl}(assert (<= (str.len x) 3))")
        ));
    }

    fn facts(
        result: SolverResult,
        time: f64,
        validation: Option<ValidationKind>,
    ) -> Option<SolverFacts> {
        Some(SolverFacts {
            result: ResultRec {
                id: 1,
                instance_id: 1,
                solver: "s".into(),
                result,
                time,
                model: None,
                date: String::new(),
            },
            validation,
        })
    }

    #[test]
    fn solver_predicates_from_facts() {
        use SolverResult::*;
        let faster = Predicate::IsFaster("CVC5".into(), "Z3Str3".into());
        // pisa-011: CVC5 0.00897606 s, Z3str3 0.0344819 s.
        let cvc5 = facts(Satisfied, 0.00897606, None);
        let z3str3 = facts(Satisfied, 0.0344819, None);
        assert!(eval_with_facts(&faster, &[cvc5.clone(), z3str3.clone()]));
        assert!(!eval_with_facts(&faster, &[z3str3, cvc5.clone()]));
        assert!(!eval_with_facts(
            &faster,
            &[cvc5.clone(), facts(Timeout, 20.0, None)]
        ));
        assert!(!eval_with_facts(&faster, &[cvc5, None]));

        let s = || "s".to_string();
        let valid = facts(Satisfied, 1.0, Some(ValidationKind::ModelValid));
        assert!(eval_with_facts(
            &Predicate::HasValidModel(s()),
            std::slice::from_ref(&valid)
        ));
        assert!(eval_with_facts(&Predicate::IsCorrect(s()), &[valid]));
        let unsat = facts(Unsatisfied, 1.0, Some(ValidationKind::MajorityAgree));
        assert!(eval_with_facts(
            &Predicate::IsCorrect(s()),
            std::slice::from_ref(&unsat)
        ));
        assert!(eval_with_facts(
            &Predicate::IsUnsat(s()),
            std::slice::from_ref(&unsat)
        ));
        assert!(!eval_with_facts(&Predicate::IsSat(s()), &[unsat]));
        let sat_agree = facts(Satisfied, 1.0, Some(ValidationKind::MajorityAgree));
        assert!(!eval_with_facts(
            &Predicate::IsCorrect(s()),
            std::slice::from_ref(&sat_agree)
        ));
        assert!(!eval_with_facts(
            &Predicate::HasValidModel(s()),
            &[sat_agree]
        ));
        assert!(!eval_with_facts(&Predicate::IsSat(s()), &[None]));
    }

    #[test]
    fn stored_results_without_configuration() {
        let dir = tempfile::tempdir().unwrap();
        let t = dir.path().join("pisa/pisa");
        std::fs::create_dir_all(&t).unwrap();
        std::fs::write(t.join("pisa-011.smt2"), "(check-sat)").unwrap();
        let store = Store::in_memory().unwrap();
        store
            .allocate_new(dir.path(), IngestOptions::default())
            .unwrap();
        let inst = store.all_instances().unwrap().remove(0);
        for (solver, time) in [("CVC5", 0.00897606), ("Z3Str3", 0.0344819)] {
            store
                .put_result(&NewResult {
                    instance_id: inst.id,
                    solver: solver.into(),
                    result: SolverResult::Satisfied,
                    time,
                    model: None,
                })
                .unwrap();
        }
        let ctx = EvalContext {
            store: &store,
            solvers: &[],
            schedule: ScheduleOptions::default(),
            on_run: None,
        };
        let p = Predicate::IsFaster("cvc5".into(), "z3str3".into());
        assert!(ctx.eval_solver_predicate(&p, &inst).unwrap());
        let f = ctx.facts(&inst, "CVC5").unwrap().unwrap();
        assert_eq!(f.validation, Some(ValidationKind::Inconclusive));
        assert!(matches!(
            ctx.eval_solver_predicate(&Predicate::IsSat("nope".into()), &inst),
            Err(PredicateError::UnknownSolver(_))
        ));
    }
}
