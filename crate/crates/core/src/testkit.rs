// SPDX-License-Identifier: Apache-2.0

//! Seeded random generators shared by property tests and benchmarks.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::harness::VerdictKind;
use crate::predicates::{Predicate, PredicateCall, CATALOG};
use crate::qlang::Condition;
use crate::smtlib::{Declaration, Expr, Script, Sort};
use crate::store::{SolverResult, ValidationKind};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn pick<'a, T, R: Rng + ?Sized>(rng: &mut R, items: &'a [T]) -> &'a T {
    &items[rng.random_range(0..items.len())]
}

const LITERAL_CHARS: &[char] = &[
    'a',
    'b',
    'c',
    '<',
    '>',
    ' ',
    '"',
    '\\',
    'x',
    '0',
    'é',
    '\u{7}',
    '\u{1F600}',
];

fn literal<R: Rng + ?Sized>(rng: &mut R) -> String {
    let n = rng.random_range(0..5);
    (0..n).map(|_| *pick(rng, LITERAL_CHARS)).collect()
}

struct Gen<'a, R: Rng + ?Sized> {
    rng: &'a mut R,
    strings: Vec<String>,
    ints: Vec<String>,
    bools: Vec<String>,
}

impl<R: Rng + ?Sized> Gen<'_, R> {
    fn app(&self, op: &str, children: Vec<Expr>) -> Expr {
        Expr::app(op, children).expect("generator respects signatures")
    }

    fn string(&mut self, depth: u32) -> Expr {
        let leaf = depth == 0 || self.rng.random_bool(0.4);
        if leaf {
            return if !self.strings.is_empty() && self.rng.random_bool(0.7) {
                Expr::var(pick(self.rng, &self.strings).clone(), Sort::String)
            } else {
                Expr::str_lit(literal(self.rng))
            };
        }
        match self.rng.random_range(0..5) {
            0 | 1 => {
                let n = self.rng.random_range(2..4);
                let parts = (0..n).map(|_| self.string(depth - 1)).collect();
                self.app("str.++", parts)
            }
            2 => {
                let s = self.string(depth - 1);
                let (a, b) = (self.int(depth - 1), self.int(depth - 1));
                self.app("str.substr", vec![s, a, b])
            }
            3 => {
                let s = self.string(depth - 1);
                let i = self.int(depth - 1);
                self.app("str.at", vec![s, i])
            }
            _ => {
                let parts = (0..3).map(|_| self.string(depth - 1)).collect();
                self.app("str.replace", parts)
            }
        }
    }

    fn int(&mut self, depth: u32) -> Expr {
        let leaf = depth == 0 || self.rng.random_bool(0.4);
        if leaf {
            return if !self.ints.is_empty() && self.rng.random_bool(0.5) {
                Expr::var(pick(self.rng, &self.ints).clone(), Sort::Integer)
            } else {
                Expr::int_lit(self.rng.random_range(0..20))
            };
        }
        match self.rng.random_range(0..4) {
            0 | 1 => {
                let s = self.string(depth - 1);
                self.app("str.len", vec![s])
            }
            2 => {
                let op = *pick(self.rng, &["+", "-"]);
                let parts = (0..2).map(|_| self.int(depth - 1)).collect();
                self.app(op, parts)
            }
            _ => {
                let (a, b) = (self.string(depth - 1), self.string(depth - 1));
                let i = self.int(depth - 1);
                self.app("str.indexof", vec![a, b, i])
            }
        }
    }

    fn regex(&mut self, depth: u32) -> Expr {
        if depth == 0 || self.rng.random_bool(0.3) {
            return match self.rng.random_range(0..4) {
                0 => self.app("re.allchar", vec![]),
                1 => self.app("re.range", vec![Expr::str_lit("a"), Expr::str_lit("z")]),
                _ => {
                    let lit = Expr::str_lit(literal(self.rng));
                    self.app("str.to_re", vec![lit])
                }
            };
        }
        match self.rng.random_range(0..7) {
            0 | 1 => {
                let parts = (0..2).map(|_| self.regex(depth - 1)).collect();
                self.app("re.++", parts)
            }
            2 => {
                let parts = (0..2).map(|_| self.regex(depth - 1)).collect();
                self.app("re.union", parts)
            }
            3 => {
                let op = *pick(self.rng, &["re.*", "re.+", "re.opt", "re.comp"]);
                let r = self.regex(depth - 1);
                self.app(op, vec![r])
            }
            4 => {
                let parts = (0..2).map(|_| self.regex(depth - 1)).collect();
                self.app("re.inter", parts)
            }
            _ => {
                let lo = self.rng.random_range(0..3);
                let hi = lo + self.rng.random_range(0..3);
                let r = self.regex(depth - 1);
                Expr::app_with_params("re.loop", vec![lo, hi], vec![r]).expect("valid loop")
            }
        }
    }

    fn atom(&mut self, depth: u32) -> Expr {
        match self.rng.random_range(0..7) {
            0 | 1 => {
                let (a, b) = (self.string(depth), self.string(depth));
                self.app("=", vec![a, b])
            }
            2 => {
                let s = self.string(depth);
                let r = self.regex(depth);
                self.app("str.in_re", vec![s, r])
            }
            3 => {
                let op = *pick(self.rng, &["<", "<=", ">", ">=", "="]);
                let (a, b) = (self.int(depth), self.int(depth));
                self.app(op, vec![a, b])
            }
            4 => {
                let op = *pick(self.rng, &["str.contains", "str.prefixof", "str.suffixof"]);
                let (a, b) = (self.string(depth), self.string(depth));
                self.app(op, vec![a, b])
            }
            5 if !self.bools.is_empty() => {
                Expr::var(pick(self.rng, &self.bools).clone(), Sort::Bool)
            }
            _ => Expr::bool_lit(self.rng.random_bool(0.5)),
        }
    }

    fn formula(&mut self, depth: u32) -> Expr {
        if depth == 0 || self.rng.random_bool(0.4) {
            return self.atom(depth.min(2));
        }
        match self.rng.random_range(0..5) {
            0 => {
                let a = self.formula(depth - 1);
                self.app("not", vec![a])
            }
            1 | 2 => {
                let op = *pick(self.rng, &["and", "or"]);
                let n = self.rng.random_range(2..4);
                let parts = (0..n).map(|_| self.formula(depth - 1)).collect();
                self.app(op, parts)
            }
            3 => {
                let parts = (0..2).map(|_| self.formula(depth - 1)).collect();
                self.app("=>", parts)
            }
            _ => {
                let parts = (0..3).map(|_| self.formula(depth - 1)).collect();
                self.app("ite", parts)
            }
        }
    }
}

/// A well-formed script with up to six declarations and four assertions.
pub fn random_script<R: Rng + ?Sized>(rng: &mut R) -> Script {
    let mut declarations = Vec::new();
    let mut names = (Vec::new(), Vec::new(), Vec::new());
    let n = rng.random_range(0..7);
    for i in 0..n {
        let (sort, list) = match rng.random_range(0..5) {
            0..=2 => (Sort::String, &mut names.0),
            3 => (Sort::Integer, &mut names.1),
            _ => (Sort::Bool, &mut names.2),
        };
        // Every few names needs quoting when printed.
        let name = if i % 4 == 3 {
            format!("v {i}")
        } else {
            format!("v{i}")
        };
        list.push(name.clone());
        declarations.push(Declaration { name, sort });
    }
    let mut g = Gen {
        rng,
        strings: names.0,
        ints: names.1,
        bools: names.2,
    };
    let k = g.rng.random_range(0..5);
    let assertions = (0..k).map(|_| g.formula(3)).collect();
    let mut script = Script {
        logic: g.rng.random_bool(0.5).then(|| "QF_SLIA".to_string()),
        declarations,
        assertions,
        trailing: vec!["(check-sat)".into()],
    };
    script.renumber();
    script
}

/// Nested `not`/`and`/`or` over Bool variables p0..p3, as a script with
/// one assertion.
pub fn random_bool_tree<R: Rng + ?Sized>(rng: &mut R, depth: u32) -> Script {
    fn tree<R: Rng + ?Sized>(rng: &mut R, depth: u32) -> Expr {
        if depth == 0 || rng.random_bool(0.2) {
            return Expr::var(format!("p{}", rng.random_range(0..4)), Sort::Bool);
        }
        match rng.random_range(0..4) {
            0 | 1 => Expr::app("not", vec![tree(rng, depth - 1)]).unwrap(),
            2 => Expr::app("and", vec![tree(rng, depth - 1), tree(rng, depth - 1)]).unwrap(),
            _ => Expr::app("or", vec![tree(rng, depth - 1), tree(rng, depth - 1)]).unwrap(),
        }
    }
    let mut script = Script {
        declarations: (0..4)
            .map(|i| Declaration {
                name: format!("p{i}"),
                sort: Sort::Bool,
            })
            .collect(),
        assertions: vec![tree(rng, depth)],
        ..Script::default()
    };
    script.renumber();
    script
}

/// A random condition over the structural predicates.
pub fn random_condition<R: Rng + ?Sized>(rng: &mut R, depth: u32) -> Condition {
    if depth == 0 || rng.random_bool(0.3) {
        let structural: Vec<&str> = CATALOG
            .iter()
            .filter(|p| p.arity == 0)
            .map(|p| p.name)
            .collect();
        return match rng.random_range(0..12) {
            0 => Condition::True,
            1 => Condition::False,
            _ => Condition::Pred(
                Predicate::resolve(&PredicateCall {
                    name: pick(rng, &structural).to_string(),
                    args: Vec::new(),
                })
                .expect("catalog name"),
            ),
        };
    }
    match rng.random_range(0..3) {
        0 => Condition::not(random_condition(rng, depth - 1)),
        1 => Condition::and(
            random_condition(rng, depth - 1),
            random_condition(rng, depth - 1),
        ),
        _ => Condition::or(
            random_condition(rng, depth - 1),
            random_condition(rng, depth - 1),
        ),
    }
}

const FRAGMENTS_25: &[&str] = &[
    "str.in.re",
    "str.to.re",
    "int.to.str",
    "str.to.int",
    "re.nostr",
    "re.empty",
    "str.++",
    "x",
    "(",
    ")",
    " ",
    "\n",
    "; str.to.re\n",
    "|str.in.re|",
    "str.in.re2",
    "re.emptyset",
];

const LITERAL_PARTS_25: &[&str] = &[
    "a",
    "\\x05",
    "\\x41",
    "\\x7f",
    "\\x0a",
    "\\\\",
    "\"\"",
    "str.in.re",
    "\\xg",
    "\\x",
    "\\u{5}",
    " ",
];

/// SMT-LIB 2.5 style text mixing keywords, comments, quoted symbols and
/// string literals with `\x` escapes.
pub fn random_smt25_text<R: Rng + ?Sized>(rng: &mut R) -> String {
    let mut out = String::new();
    for _ in 0..rng.random_range(1..12) {
        if rng.random_bool(0.3) {
            out.push('"');
            for _ in 0..rng.random_range(0..5) {
                out.push_str(pick(rng, LITERAL_PARTS_25));
            }
            out.push('"');
        } else {
            out.push_str(pick(rng, FRAGMENTS_25));
        }
        out.push(' ');
    }
    out
}

/// Root of the bundled fixture corpus (`benchmark/track/name.smt2`).
pub const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/smtfiles");

/// Fixture files in path order.
pub fn fixture_files() -> Vec<PathBuf> {
    fn walk(dir: &Path, out: &mut Vec<PathBuf>) {
        for entry in std::fs::read_dir(dir).expect("fixture dir") {
            let path = entry.expect("fixture entry").path();
            if path.is_dir() {
                walk(&path, out);
            } else if path.extension().is_some_and(|e| e == "smt2") {
                out.push(path);
            }
        }
    }
    let mut out = Vec::new();
    walk(Path::new(FIXTURES), &mut out);
    out.sort();
    out
}

/// Occurrences of `names` inside top-level `assert` forms, found by a flat
/// token scan of the raw text. Independent of the parser.
pub fn flat_var_counts(text: &str, names: &[String]) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut depth, mut in_assert) = (0, 0usize, false);
    let mut symbol_at_depth1 = false;
    let mut bump = |sym: &str, in_assert: bool| {
        if in_assert && names.iter().any(|n| n == sym) {
            *counts.entry(sym.to_string()).or_insert(0) += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        match c {
            ';' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '"' => {
                i += 1;
                while i < chars.len() {
                    if chars[i] == '"' {
                        if chars.get(i + 1) == Some(&'"') {
                            i += 1;
                        } else {
                            break;
                        }
                    }
                    i += 1;
                }
            }
            '(' => {
                depth += 1;
                symbol_at_depth1 = depth == 1;
            }
            ')' => {
                depth = depth.saturating_sub(1);
                if depth == 0 {
                    in_assert = false;
                }
            }
            '|' => {
                let start = i + 1;
                i = start;
                while i < chars.len() && chars[i] != '|' {
                    i += 1;
                }
                let sym: String = chars[start..i.min(chars.len())].iter().collect();
                bump(&sym, in_assert);
            }
            c if c.is_whitespace() => {}
            _ => {
                let start = i;
                while i + 1 < chars.len() && !"()|\"; \t\r\n".contains(chars[i + 1]) {
                    i += 1;
                }
                let sym: String = chars[start..=i].iter().collect();
                if symbol_at_depth1 {
                    in_assert = sym == "assert";
                    symbol_at_depth1 = false;
                } else {
                    bump(&sym, in_assert);
                }
            }
        }
        i += 1;
    }
    counts
}

/// Reference evaluation: every predicate recomputed on a freshly parsed
/// script with no stored annotations.
pub fn naive_eval(c: &Condition, script: &Script) -> bool {
    match c {
        Condition::True => true,
        Condition::False => false,
        Condition::Not(a) => !naive_eval(a, script),
        Condition::And(a, b) => naive_eval(a, script) && naive_eval(b, script),
        Condition::Or(a, b) => naive_eval(a, script) || naive_eval(b, script),
        Condition::Pred(p) => crate::predicates::eval_structural(p, script),
    }
}

/// Writes an executable shell script standing in for a solver.
pub fn mock_solver(dir: &Path, name: &str, body: &str) -> PathBuf {
    use std::os::unix::fs::PermissionsExt;
    let path = dir.join(name);
    std::fs::write(&path, format!("#!/bin/sh\n{body}\n")).expect("write mock solver");
    std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).expect("chmod");
    path
}

/// Consensus a three-way solver vote must reach, written out case by case.
/// `valid[i]` says whether solver i's model survives checking by any other
/// solver; every sat answer carries a model.
pub fn expected_verdict(results: &[SolverResult], valid: &[bool]) -> VerdictKind {
    let validated = results
        .iter()
        .zip(valid)
        .any(|(r, v)| *r == SolverResult::Satisfied && *v);
    if validated {
        return VerdictKind::SatValidated;
    }
    let sat = results
        .iter()
        .filter(|r| **r == SolverResult::Satisfied)
        .count();
    let unsat = results
        .iter()
        .filter(|r| **r == SolverResult::Unsatisfied)
        .count();
    if unsat > (sat + unsat) / 2 {
        VerdictKind::UnsatMajority
    } else if sat > 0 && unsat > 0 {
        VerdictKind::Disagreement
    } else {
        VerdictKind::Inconclusive
    }
}

/// Record stored for one result under `verdict`.
pub fn expected_record(
    result: SolverResult,
    own_valid: bool,
    verdict: VerdictKind,
) -> ValidationKind {
    match result {
        SolverResult::Satisfied if own_valid => ValidationKind::ModelValid,
        SolverResult::Satisfied => ValidationKind::ModelInvalid,
        SolverResult::Unsatisfied if verdict == VerdictKind::SatValidated => {
            ValidationKind::MajorityDisagree
        }
        SolverResult::Unsatisfied if verdict == VerdictKind::UnsatMajority => {
            ValidationKind::MajorityAgree
        }
        _ => ValidationKind::Inconclusive,
    }
}
