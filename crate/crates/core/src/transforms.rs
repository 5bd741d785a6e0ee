// SPDX-License-Identifier: Apache-2.0

//! Script rewrites used by the `Apply` clause of a query.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::intel::{is_linear_length_constraint, is_word_equation};
use crate::smtlib::{Expr, Script, Sort};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("unknown function `{0}`")]
    Unknown(String),
    #[error("{transform} produced an invalid script: {message}")]
    Invalid {
        transform: Transform,
        message: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Transform {
    Restrict2WEQ,
    Restrict2Length,
    Restrict2RegEx,
    RenameVariables,
    DisjoinConstraints,
    ReduceNegations,
    EqualsTrue,
    Identity,
}

pub struct TransformInfo {
    pub transform: Transform,
    pub name: &'static str,
    pub description: &'static str,
}

pub const TRANSFORMS: &[TransformInfo] = &[
    TransformInfo {
        transform: Transform::Restrict2WEQ,
        name: "Restrict2WEQ",
        description: "keep only word equations",
    },
    TransformInfo {
        transform: Transform::Restrict2Length,
        name: "Restrict2Length",
        description: "keep only linear length constraints",
    },
    TransformInfo {
        transform: Transform::Restrict2RegEx,
        name: "Restrict2RegEx",
        description: "keep only regular membership constraints",
    },
    TransformInfo {
        transform: Transform::RenameVariables,
        name: "RenameVariables",
        description: "rename variables to str01, int01, ... in declaration order",
    },
    TransformInfo {
        transform: Transform::DisjoinConstraints,
        name: "DisjoinConstraints",
        description: "split conjunctions into separate assertions",
    },
    TransformInfo {
        transform: Transform::ReduceNegations,
        name: "ReduceNegations",
        description: "remove double negations",
    },
    TransformInfo {
        transform: Transform::EqualsTrue,
        name: "EqualsTrue",
        description: "rewrite (= e true) to e",
    },
    TransformInfo {
        transform: Transform::Identity,
        name: "Identity",
        description: "leave the script unchanged",
    },
];

impl Transform {
    /// Case-insensitive catalog lookup.
    pub fn from_name(name: &str) -> Result<Transform, TransformError> {
        TRANSFORMS
            .iter()
            .find(|t| t.name.eq_ignore_ascii_case(name))
            .map(|t| t.transform)
            .ok_or_else(|| TransformError::Unknown(name.to_string()))
    }

    pub fn name(self) -> &'static str {
        TRANSFORMS
            .iter()
            .find(|t| t.transform == self)
            .map(|t| t.name)
            .expect("every transform is in the catalog")
    }
}

impl std::fmt::Display for Transform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub fn apply_transform(t: Transform, script: &Script) -> Result<Script, TransformError> {
    if t == Transform::Identity {
        return Ok(script.clone());
    }
    let mut out = match t {
        Transform::Restrict2WEQ => restrict(script, &is_word_equation),
        Transform::Restrict2Length => restrict(script, &is_linear_length_constraint),
        Transform::Restrict2RegEx => restrict(script, &|e: &Expr| e.is_app("str.in_re")),
        Transform::RenameVariables => rename_variables(script),
        Transform::DisjoinConstraints => disjoin(script),
        Transform::ReduceNegations => map_assertions(script, reduce_negations),
        Transform::EqualsTrue => map_assertions(script, equals_true),
        Transform::Identity => unreachable!(),
    };
    for a in &mut out.assertions {
        a.clear_intel();
    }
    out.renumber();
    out.validate().map_err(|message| TransformError::Invalid {
        transform: t,
        message,
    })?;
    Ok(out)
}

fn map_assertions(script: &Script, f: fn(Expr) -> Expr) -> Script {
    Script {
        assertions: script.assertions.iter().cloned().map(f).collect(),
        ..script.clone()
    }
}

// Restrict2X

const CONNECTIVES: &[&str] = &["and", "or", "not", "=>"];

fn is_connective(e: &Expr) -> bool {
    e.sort == Sort::Bool
        && (CONNECTIVES.iter().any(|c| e.is_app(c)) || e.is_app("ite") && e.children.len() == 3)
}

/// No foreign atom anywhere in `e`.
fn pure(e: &Expr, keep: &dyn Fn(&Expr) -> bool) -> bool {
    if e.is_true() || e.is_false() {
        return true;
    }
    if is_connective(e) {
        return e.children.iter().all(|c| pure(c, keep));
    }
    keep(e)
}

fn and_of(children: Vec<Expr>) -> Expr {
    if children.iter().any(Expr::is_false) {
        return Expr::bool_lit(false);
    }
    let mut rest: Vec<Expr> = children.into_iter().filter(|c| !c.is_true()).collect();
    match rest.len() {
        0 => Expr::bool_lit(true),
        1 => rest.pop().unwrap(),
        _ => Expr::app("and", rest).expect("Bool children"),
    }
}

fn or_of(children: Vec<Expr>) -> Expr {
    if children.iter().any(Expr::is_true) {
        return Expr::bool_lit(true);
    }
    let mut rest: Vec<Expr> = children.into_iter().filter(|c| !c.is_false()).collect();
    match rest.len() {
        0 => Expr::bool_lit(false),
        1 => rest.pop().unwrap(),
        _ => Expr::app("or", rest).expect("Bool children"),
    }
}

fn not_of(e: Expr) -> Expr {
    if e.is_true() || e.is_false() {
        return Expr::bool_lit(e.is_false());
    }
    Expr::app("not", vec![e]).expect("Bool child")
}

/// Replaces every foreign atom by the literal that weakens the formula at
/// its position: `true` under an even number of negations, `false` under
/// an odd number. The result is implied by the input.
fn prune(e: &Expr, keep: &dyn Fn(&Expr) -> bool, positive: bool) -> Expr {
    if e.is_true() || e.is_false() {
        return e.clone();
    }
    if !is_connective(e) {
        return if keep(e) {
            e.clone()
        } else {
            Expr::bool_lit(positive)
        };
    }
    let kids =
        |pos: bool| -> Vec<Expr> { e.children.iter().map(|c| prune(c, keep, pos)).collect() };
    match e.decl.as_str() {
        "and" => and_of(kids(positive)),
        "or" => or_of(kids(positive)),
        "not" => not_of(prune(&e.children[0], keep, !positive)),
        "=>" => {
            let (last, premises) = e.children.split_last().expect("arity checked");
            let conclusion = prune(last, keep, positive);
            let premises: Vec<Expr> = premises.iter().map(|c| prune(c, keep, !positive)).collect();
            if conclusion.is_true() || premises.iter().any(Expr::is_false) {
                return Expr::bool_lit(true);
            }
            let mut premises: Vec<Expr> = premises.into_iter().filter(|p| !p.is_true()).collect();
            if premises.is_empty() {
                return conclusion;
            }
            if conclusion.is_false() {
                return not_of(and_of(premises));
            }
            premises.push(conclusion);
            Expr::app("=>", premises).expect("Bool children")
        }
        "ite" => {
            let then = prune(&e.children[1], keep, positive);
            let other = prune(&e.children[2], keep, positive);
            if pure(&e.children[0], keep) {
                let cond = e.children[0].clone();
                if then.same_shape(&other) {
                    return then;
                }
                return Expr::app("ite", vec![cond, then, other]).expect("Bool branches");
            }
            // The condition cannot be kept; bound the ite by its branches.
            if positive {
                or_of(vec![then, other])
            } else {
                and_of(vec![then, other])
            }
        }
        _ => unreachable!("is_connective"),
    }
}

fn restrict(script: &Script, keep: &dyn Fn(&Expr) -> bool) -> Script {
    let assertions: Vec<Expr> = script
        .assertions
        .iter()
        .map(|a| prune(a, keep, true))
        .filter(|a| !a.is_true())
        .collect();
    let used: BTreeSet<&str> = assertions.iter().flat_map(Expr::variables).collect();
    let declarations = script
        .declarations
        .iter()
        .filter(|d| used.contains(d.name.as_str()))
        .cloned()
        .collect();
    Script {
        logic: script.logic.clone(),
        declarations,
        assertions,
        trailing: without_get_value(script),
    }
}

// get-value names variables that may have been dropped or renamed.
fn without_get_value(script: &Script) -> Vec<String> {
    script
        .trailing
        .iter()
        .filter(|c| !c.starts_with("(get-value"))
        .cloned()
        .collect()
}

// RenameVariables

fn sort_prefix(sort: Sort) -> &'static str {
    match sort {
        Sort::String => "str",
        Sort::Integer => "int",
        Sort::Bool => "bool",
        Sort::Re => "re",
        Sort::Unknown => "var",
    }
}

fn rename_map(script: &Script) -> BTreeMap<String, String> {
    let mut counters: BTreeMap<&str, usize> = BTreeMap::new();
    let mut map = BTreeMap::new();
    for d in &script.declarations {
        let prefix = sort_prefix(d.sort);
        let n = counters.entry(prefix).or_insert(0);
        *n += 1;
        map.insert(d.name.clone(), format!("{prefix}{n:02}"));
    }
    map
}

fn rename(e: &mut Expr, map: &BTreeMap<String, String>) {
    if e.is_variable() {
        if let Some(new) = map.get(&e.decl) {
            e.decl = new.clone();
        }
    }
    for c in &mut e.children {
        rename(c, map);
    }
}

fn rename_variables(script: &Script) -> Script {
    let map = rename_map(script);
    let mut out = script.clone();
    for d in &mut out.declarations {
        d.name = map[&d.name].clone();
    }
    for a in &mut out.assertions {
        rename(a, &map);
    }
    out.trailing = without_get_value(script);
    out
}

// DisjoinConstraints

fn flatten_and(e: Expr, out: &mut Vec<Expr>) {
    if e.is_app("and") {
        for c in e.children {
            flatten_and(c, out);
        }
    } else {
        out.push(e);
    }
}

fn disjoin(script: &Script) -> Script {
    let mut assertions = Vec::new();
    for a in &script.assertions {
        flatten_and(a.clone(), &mut assertions);
    }
    Script {
        assertions,
        ..script.clone()
    }
}

// ReduceNegations, EqualsTrue

fn reduce_negations(mut e: Expr) -> Expr {
    e.children = std::mem::take(&mut e.children)
        .into_iter()
        .map(reduce_negations)
        .collect();
    // Children are already reduced, so one step suffices here.
    if e.is_app("not") && e.children[0].is_app("not") {
        let mut inner = e.children.pop().unwrap();
        return inner.children.pop().unwrap();
    }
    e
}

fn equals_true(mut e: Expr) -> Expr {
    e.children = std::mem::take(&mut e.children)
        .into_iter()
        .map(equals_true)
        .collect();
    if e.is_app("=") && e.children.len() == 2 && e.children.iter().all(|c| c.sort == Sort::Bool) {
        if e.children[1].is_true() {
            return e.children.swap_remove(0);
        }
        if e.children[0].is_true() {
            return e.children.pop().unwrap();
        }
    }
    e
}
