// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};

use super::{run_solver, HarnessError, SolverConfig};
use crate::smtlib::lexer::{read_all, Atom, SExpr};
use crate::smtlib::{parse_script, print_script, quote_symbol, Script, Sort};
use crate::store::SolverResult;

/// One `(define-fun name () Sort value)` entry of a model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelBinding {
    pub name: String,
    pub sort: Sort,
    /// Value as SMT-LIB text.
    pub value: String,
}

/// Outcome of asserting a model into its instance and re-solving.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelCheck {
    Valid,
    Invalid,
    /// The validator answered unknown, timed out or crashed.
    Indecisive,
}

fn model_err(sx: &SExpr, msg: &str) -> HarnessError {
    HarnessError::ModelParse(format!("{msg} at {}: `{sx}`", sx.pos()))
}

fn collect(sx: &SExpr, out: &mut Vec<ModelBinding>) -> Result<(), HarnessError> {
    let SExpr::List(items, _) = sx else {
        return Err(model_err(sx, "expected a list"));
    };
    match items.first().and_then(SExpr::symbol) {
        Some("define-fun") => {
            let [_, name, SExpr::List(args, _), sort, value] = items.as_slice() else {
                return Err(model_err(sx, "malformed define-fun"));
            };
            if !args.is_empty() {
                return Err(model_err(sx, "functions with arguments are not supported"));
            }
            let name = name
                .symbol()
                .ok_or_else(|| model_err(sx, "expected a symbol"))?;
            let sort = sort
                .symbol()
                .and_then(Sort::from_smt_name)
                .filter(|s| matches!(s, Sort::String | Sort::Integer | Sort::Bool))
                .ok_or_else(|| model_err(sort, "unsupported sort"))?;
            out.push(ModelBinding {
                name: name.to_string(),
                sort,
                value: value.to_string(),
            });
            Ok(())
        }
        Some("model") => items[1..].iter().try_for_each(|i| collect(i, out)),
        _ if items.iter().all(|i| matches!(i, SExpr::List(..))) => {
            items.iter().try_for_each(|i| collect(i, out))
        }
        _ => Err(model_err(sx, "expected define-fun")),
    }
}

/// Reads the bindings of a `get-model` style response.
pub fn parse_model(text: &str) -> Result<Vec<ModelBinding>, HarnessError> {
    let forms = read_all(text)
        .map_err(|e| HarnessError::ModelParse(format!("{}: {}", e.pos, e.message)))?;
    let mut out = Vec::new();
    for f in &forms {
        if let SExpr::Atom(Atom::Symbol(s), _) = f {
            // Some solvers repeat the verdict before the model.
            if matches!(s.as_str(), "sat" | "unsat" | "unknown") {
                continue;
            }
        }
        collect(f, &mut out)?;
    }
    Ok(out)
}

/// `script` with one `(assert (= var value))` per binding of a declared
/// variable, followed by `(check-sat)`.
pub fn model_check_script(
    script: &Script,
    bindings: &[ModelBinding],
) -> Result<String, HarnessError> {
    let mut base = script.clone();
    base.trailing.retain(|c| c.starts_with("(set-option"));
    let mut text = print_script(&base);
    for b in bindings {
        match script.sort_of(&b.name) {
            Some(sort) if sort == b.sort => {
                writeln!(text, "(assert (= {} {}))", quote_symbol(&b.name), b.value).unwrap();
            }
            Some(sort) => {
                return Err(HarnessError::ModelParse(format!(
                    "model gives `{}` sort {}, declared {sort}",
                    b.name, b.sort
                )))
            }
            None => log::debug!("ignoring model binding for undeclared `{}`", b.name),
        }
    }
    text.push_str("(check-sat)\n");
    parse_script(&text).map_err(|e| HarnessError::ModelParse(e.to_string()))?;
    Ok(text)
}

static COUNTER: AtomicU64 = AtomicU64::new(0);

struct TempFile(PathBuf);

impl Drop for TempFile {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.0);
    }
}

/// Asserts `model` into `script` and asks `validator` whether the result is
/// satisfiable.
pub fn validate_model(
    script: &Script,
    model: &str,
    validator: &SolverConfig,
) -> Result<ModelCheck, HarnessError> {
    let bindings = parse_model(model)?;
    let text = model_check_script(script, &bindings)?;
    let path = std::env::temp_dir().join(format!(
        "smtquery-model-{}-{}.smt2",
        std::process::id(),
        COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::write(&path, text).map_err(|source| HarnessError::Io {
        path: path.clone(),
        source,
    })?;
    let file = TempFile(path);
    let outcome = run_solver(validator, &file.0)?;
    Ok(match outcome.result {
        SolverResult::Satisfied => ModelCheck::Valid,
        SolverResult::Unsatisfied => ModelCheck::Invalid,
        _ => ModelCheck::Indecisive,
    })
}

#[cfg(test)]
mod tests {
    use super::super::testing::script;
    use super::*;

    const LISTING_1: &str = "(set-logic QF_SLIA)
(declare-fun v1 () String)
(declare-fun v2 () String)
(declare-fun v3 () Int)
(declare-fun ret () String)
(assert (= v2 \"<\") )
(assert (ite (str.contains v1 v2) (and (= v3 (str.indexof v1 v2 0)) (= ret (str.substr v1 0 v3))) (= ret v1)))
(assert (or (str.contains ret \"<\")  (str.contains ret \">\")))
(check-sat)";

    #[test]
    fn parses_common_model_shapes() {
        let z3 = "(model\n  (define-fun v1 () String \"x>y\")\n  (define-fun v3 () Int (- 1))\n)";
        let b = parse_model(z3).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b[0].value, "\"x>y\"");
        assert_eq!(b[1].value, "(- 1)");
        let cvc = "(\n(define-fun ok () Bool true)\n)";
        assert_eq!(parse_model(cvc).unwrap()[0].sort, Sort::Bool);
        assert!(parse_model("").unwrap().is_empty());
        assert!(parse_model("(define-fun f ((x Int)) Int x)").is_err());
        assert!(parse_model("(model (oops))").is_err());
    }

    #[test]
    fn builds_check_script() {
        let s = parse_script(LISTING_1).unwrap();
        let b = parse_model(
            "((define-fun v1 () String \"x>y\") (define-fun v2 () String \"<\") \
              (define-fun v3 () Int 0) (define-fun ret () String \"x>y\") (define-fun zz () Int 1))",
        )
        .unwrap();
        let text = model_check_script(&s, &b).unwrap();
        let checked = parse_script(&text).unwrap();
        assert_eq!(checked.assertions.len(), 7);
        assert!(text.ends_with("(assert (= ret \"x>y\"))\n(check-sat)\n"));

        let wrong = parse_model("((define-fun v3 () String \"a\"))").unwrap();
        assert!(matches!(
            model_check_script(&s, &wrong),
            Err(HarnessError::ModelParse(_))
        ));
    }

    #[test]
    fn validator_answer_decides() {
        let dir = tempfile::tempdir().unwrap();
        let s = parse_script(LISTING_1).unwrap();
        let model = "((define-fun v2 () String \"<\"))";
        // The mock validator answers sat iff the asserted value of v2 is "<".
        let v = SolverConfig::new(
            "grep",
            script(
                dir.path(),
                "v",
                "if grep -q '(assert (= v2 \"<\"))' \"$1\" && ! grep -q 'v2 \"x\"' \"$1\"; then echo sat; else echo unsat; fi",
            ),
        );
        assert_eq!(validate_model(&s, model, &v).unwrap(), ModelCheck::Valid);
        let bad = "((define-fun v2 () String \"x\"))";
        assert_eq!(validate_model(&s, bad, &v).unwrap(), ModelCheck::Invalid);
        let unknown = SolverConfig::new("u", script(dir.path(), "u", "echo unknown"));
        assert_eq!(
            validate_model(&s, model, &unknown).unwrap(),
            ModelCheck::Indecisive
        );
    }
}
