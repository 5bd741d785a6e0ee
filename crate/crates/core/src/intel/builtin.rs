// SPDX-License-Identifier: Apache-2.0

//! Intel passes backing the structural predicates.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{compute_intel, script_value, IntelSpec, IntelValue};
use crate::smtlib::{Expr, Literal, Script, Sort};

/// Functions whose presence makes an instance "higher-order".
pub const HIGHER_ORDER_FUNCTIONS: &[&str] = &[
    "str.substr",
    "str.indexof",
    "str.replace",
    "str.at",
    "str.contains",
    "str.prefixof",
    "str.suffixof",
    "str.to_int",
    "str.from_int",
];

/// Regular expressions larger than this are treated as unbounded.
pub const REGEX_NODE_BUDGET: usize = 10_000;

const COMPARISONS: &[&str] = &["=", "distinct", "<", "<=", ">", ">="];
const CONNECTIVES: &[&str] = &["and", "or", "not", "=>", "ite"];

pub fn builtin_specs() -> Vec<&'static dyn IntelSpec> {
    vec![
        &VarCountSpec,
        &KindsSpec,
        &RegexShapeSpec,
        &UpperBoundSpec,
        &WeqSidesSpec,
    ]
}

fn shape_error(expected: &str) -> String {
    format!("merged value is not a {expected} value")
}

// ---------------------------------------------------------------------------
// variable counts

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarCounts(pub BTreeMap<String, u64>);

impl VarCounts {
    pub fn get(&self, name: &str) -> u64 {
        self.0.get(name).copied().unwrap_or(0)
    }

    fn merged(&self, other: &VarCounts) -> VarCounts {
        let mut out = self.0.clone();
        for (k, v) in &other.0 {
            *out.entry(k.clone()).or_insert(0) += v;
        }
        VarCounts(out)
    }
}

pub struct VarCountSpec;

impl IntelSpec for VarCountSpec {
    fn name(&self) -> &str {
        "varcount"
    }

    fn version(&self) -> u32 {
        1
    }

    fn neutral(&self) -> IntelValue {
        IntelValue::Counts(VarCounts::default())
    }

    fn apply(&self, node: &Expr, merged: IntelValue) -> Result<IntelValue, String> {
        let IntelValue::Counts(mut counts) = merged else {
            return Err(shape_error("count"));
        };
        if node.is_variable() {
            *counts.0.entry(node.decl.clone()).or_insert(0) += 1;
        }
        Ok(IntelValue::Counts(counts))
    }

    fn merge(&self, a: &IntelValue, b: &IntelValue) -> IntelValue {
        match (a, b) {
            (IntelValue::Counts(x), IntelValue::Counts(y)) => IntelValue::Counts(x.merged(y)),
            _ => self.neutral(),
        }
    }
}

pub fn variable_counts(script: &Script) -> VarCounts {
    match script_value(script, &VarCountSpec) {
        Ok(IntelValue::Counts(c)) => c,
        _ => VarCounts::default(),
    }
}

// ---------------------------------------------------------------------------
// constraint kinds

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindFlags {
    pub has_weq: bool,
    pub has_regex: bool,
    pub has_linears: bool,
    pub has_higher_order: bool,
}

impl KindFlags {
    fn or(self, o: KindFlags) -> KindFlags {
        KindFlags {
            has_weq: self.has_weq || o.has_weq,
            has_regex: self.has_regex || o.has_regex,
            has_linears: self.has_linears || o.has_linears,
            has_higher_order: self.has_higher_order || o.has_higher_order,
        }
    }
}

/// Shape of an integer term as seen from its parent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermShape {
    /// Built only from `+`, `-`, `*` by constants, numerals, integer
    /// variables and `str.len` of concatenations.
    pub linear: bool,
    /// Number of non-constant terms (saturating); a `*` node is linear only
    /// if at most one factor is non-constant.
    pub nonconstant: u32,
    pub mentions_len: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindsValue {
    pub flags: KindFlags,
    pub term: TermShape,
}

pub struct KindsSpec;

fn is_word(e: &Expr) -> bool {
    e.is_variable() && e.sort == Sort::String
        || matches!(e.literal, Some(Literal::Str(_)))
        || e.decl == "str.++" && e.children.iter().all(is_word)
}

fn own_term(node: &Expr, merged: TermShape) -> TermShape {
    let non_linear = TermShape {
        linear: false,
        nonconstant: 1,
        mentions_len: merged.mentions_len,
    };
    if node.is_variable() {
        return TermShape {
            linear: node.sort == Sort::Integer,
            nonconstant: 1,
            mentions_len: false,
        };
    }
    if matches!(node.literal, Some(Literal::Int(_))) {
        return TermShape {
            linear: true,
            nonconstant: 0,
            mentions_len: false,
        };
    }
    match node.decl.as_str() {
        "str.len" => TermShape {
            linear: node.children.iter().all(is_word),
            nonconstant: u32::from(node.has_variables()),
            mentions_len: true,
        },
        "+" | "-" => TermShape {
            linear: merged.linear,
            nonconstant: merged.nonconstant.min(1),
            mentions_len: merged.mentions_len,
        },
        "*" => TermShape {
            linear: merged.linear && merged.nonconstant <= 1,
            nonconstant: merged.nonconstant.min(1),
            mentions_len: merged.mentions_len,
        },
        _ => non_linear,
    }
}

impl IntelSpec for KindsSpec {
    fn name(&self) -> &str {
        "kinds"
    }

    fn version(&self) -> u32 {
        1
    }

    fn neutral(&self) -> IntelValue {
        IntelValue::Kinds(KindsValue {
            flags: KindFlags::default(),
            term: TermShape {
                linear: true,
                nonconstant: 0,
                mentions_len: false,
            },
        })
    }

    fn apply(&self, node: &Expr, merged: IntelValue) -> Result<IntelValue, String> {
        let IntelValue::Kinds(merged) = merged else {
            return Err(shape_error("kinds"));
        };
        let mut flags = merged.flags;
        let decl = node.decl.as_str();
        let first_sort = node.children.first().map(|c| c.sort);
        if decl == "=" && node.children.iter().all(|c| c.sort == Sort::String) {
            flags.has_weq = true;
        }
        if decl == "str.in_re" {
            flags.has_regex = true;
        }
        if HIGHER_ORDER_FUNCTIONS.contains(&decl) {
            flags.has_higher_order = true;
        }
        if COMPARISONS.contains(&decl)
            && first_sort == Some(Sort::Integer)
            && merged.term.linear
            && merged.term.mentions_len
        {
            flags.has_linears = true;
        }
        Ok(IntelValue::Kinds(KindsValue {
            flags,
            term: own_term(node, merged.term),
        }))
    }

    fn merge(&self, a: &IntelValue, b: &IntelValue) -> IntelValue {
        match (a, b) {
            (IntelValue::Kinds(x), IntelValue::Kinds(y)) => IntelValue::Kinds(KindsValue {
                flags: x.flags.or(y.flags),
                term: TermShape {
                    linear: x.term.linear && y.term.linear,
                    nonconstant: x.term.nonconstant.saturating_add(y.term.nonconstant),
                    mentions_len: x.term.mentions_len || y.term.mentions_len,
                },
            }),
            _ => self.neutral(),
        }
    }
}

pub fn constraint_kinds(script: &Script) -> KindFlags {
    match script_value(script, &KindsSpec) {
        Ok(IntelValue::Kinds(k)) => k.flags,
        _ => KindFlags::default(),
    }
}

/// `=` between concatenations of string variables and string literals.
pub fn is_word_equation(e: &Expr) -> bool {
    e.decl == "=" && e.children.len() >= 2 && e.children.iter().all(is_word)
}

/// Comparison of integer terms built linearly from `str.len` of words,
/// integer variables and numerals, mentioning `str.len` at least once.
pub fn is_linear_length_constraint(e: &Expr) -> bool {
    if !COMPARISONS.contains(&e.decl.as_str())
        || e.children.first().map(|c| c.sort) != Some(Sort::Integer)
    {
        return false;
    }
    let mut merged = KindsSpec.neutral();
    for child in &e.children {
        let mut c = child.clone();
        if compute_intel(&mut c, &KindsSpec).is_err() {
            return false;
        }
        merged = KindsSpec.merge(&merged, c.intel.get(&KindsSpec.key()).expect("computed"));
    }
    matches!(merged, IntelValue::Kinds(k) if k.term.linear && k.term.mentions_len)
}

// ---------------------------------------------------------------------------
// regular expression shape

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegexShape {
    pub only_membership: bool,
    pub simple_lhs: bool,
    pub concat_lhs: bool,
    pub uses_complement_or_inter: bool,
}

impl Default for RegexShape {
    fn default() -> Self {
        RegexShape {
            only_membership: true,
            simple_lhs: true,
            concat_lhs: true,
            uses_complement_or_inter: false,
        }
    }
}

pub struct RegexShapeSpec;

impl IntelSpec for RegexShapeSpec {
    fn name(&self) -> &str {
        "regex"
    }

    fn version(&self) -> u32 {
        1
    }

    fn neutral(&self) -> IntelValue {
        IntelValue::Regex(RegexShape::default())
    }

    fn apply(&self, node: &Expr, merged: IntelValue) -> Result<IntelValue, String> {
        let IntelValue::Regex(mut shape) = merged else {
            return Err(shape_error("regex"));
        };
        let decl = node.decl.as_str();
        match decl {
            "str.in_re" => {
                let lhs = &node.children[0];
                let simple = lhs.is_variable() || !lhs.has_variables();
                shape.only_membership = true;
                shape.simple_lhs &= simple;
                shape.concat_lhs &= simple || is_word(lhs);
            }
            "re.comp" | "re.inter" | "re.diff" => shape.uses_complement_or_inter = true,
            _ if node.sort == Sort::Bool
                && !CONNECTIVES.contains(&decl)
                && !matches!(node.literal, Some(Literal::Bool(_))) =>
            {
                shape.only_membership = false;
            }
            _ if node.sort == Sort::Unknown => shape.only_membership = false,
            _ => {}
        }
        Ok(IntelValue::Regex(shape))
    }

    fn merge(&self, a: &IntelValue, b: &IntelValue) -> IntelValue {
        match (a, b) {
            (IntelValue::Regex(x), IntelValue::Regex(y)) => IntelValue::Regex(RegexShape {
                only_membership: x.only_membership && y.only_membership,
                simple_lhs: x.simple_lhs && y.simple_lhs,
                concat_lhs: x.concat_lhs && y.concat_lhs,
                uses_complement_or_inter: x.uses_complement_or_inter || y.uses_complement_or_inter,
            }),
            _ => self.neutral(),
        }
    }
}

pub fn regex_classification(script: &Script) -> RegexShape {
    match script_value(script, &RegexShapeSpec) {
        Ok(IntelValue::Regex(r)) => r,
        _ => RegexShape::default(),
    }
}

// ---------------------------------------------------------------------------
// length upper bounds

/// Per-variable length bound; `None` marks a variable known to be unbounded.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds(pub BTreeMap<String, Option<u64>>);

impl Bounds {
    pub fn bound(&self, name: &str) -> Option<u64> {
        self.0.get(name).copied().flatten()
    }

    fn single(name: &str, bound: Option<u64>) -> Bounds {
        Bounds(BTreeMap::from([(name.to_string(), bound)]))
    }

    fn merged(&self, other: &Bounds) -> Bounds {
        let mut out = self.0.clone();
        for (k, v) in &other.0 {
            let entry = out.entry(k.clone()).or_insert(*v);
            *entry = match (*entry, *v) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (Some(a), None) | (None, Some(a)) => Some(a),
                (None, None) => None,
            };
        }
        Bounds(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegexLength {
    Finite(u64),
    Unbounded,
}

impl RegexLength {
    fn map2(self, other: RegexLength, f: impl Fn(u64, u64) -> u64) -> RegexLength {
        match (self, other) {
            (RegexLength::Finite(a), RegexLength::Finite(b)) => RegexLength::Finite(f(a, b)),
            _ => RegexLength::Unbounded,
        }
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            RegexLength::Finite(n) => Some(n),
            RegexLength::Unbounded => None,
        }
    }
}

/// Longest word of the language of `re`, computed structurally.
pub fn regex_max_length(re: &Expr) -> RegexLength {
    let mut budget = REGEX_NODE_BUDGET;
    max_len(re, &mut budget)
}

fn max_len(re: &Expr, budget: &mut usize) -> RegexLength {
    use RegexLength::{Finite, Unbounded};
    if *budget == 0 {
        return Unbounded;
    }
    *budget -= 1;
    let mut kids = re.children.iter().map(|c| max_len(c, budget));
    match re.decl.as_str() {
        "str.to_re" => match re.children[0].str_value() {
            Some(s) => Finite(s.chars().count() as u64),
            None => Unbounded,
        },
        "re.none" => Finite(0),
        "re.allchar" | "re.range" => Finite(1),
        "re.++" => kids.fold(Finite(0), |a, b| a.map2(b, u64::saturating_add)),
        "re.union" => kids.fold(Finite(0), |a, b| a.map2(b, u64::max)),
        "re.inter" => {
            // The intersection is bounded as soon as one side is.
            let lens: Vec<RegexLength> = kids.collect();
            lens.iter()
                .filter_map(|l| l.finite())
                .min()
                .map_or(Unbounded, Finite)
        }
        "re.opt" => kids.next().unwrap_or(Unbounded),
        "re.*" | "re.+" => match kids.next() {
            Some(Finite(0)) => Finite(0),
            _ => Unbounded,
        },
        "re.loop" if re.params.len() == 2 => match kids.next() {
            Some(Finite(n)) => Finite(n.saturating_mul(re.params[1].max(0) as u64)),
            _ => Unbounded,
        },
        _ => Unbounded,
    }
}

fn len_of_var(e: &Expr) -> Option<&str> {
    (e.decl == "str.len" && e.children[0].is_variable()).then(|| e.children[0].decl.as_str())
}

fn numeral(e: &Expr) -> Option<u64> {
    e.int_value()
}

fn atom_bound(node: &Expr) -> Option<Bounds> {
    let c = &node.children;
    match node.decl.as_str() {
        "<=" | "<" | ">=" | ">" if c.len() == 2 => {
            let (var, k, strict) = match node.decl.as_str() {
                "<=" => (len_of_var(&c[0])?, numeral(&c[1])?, false),
                "<" => (len_of_var(&c[0])?, numeral(&c[1])?, true),
                ">=" => (len_of_var(&c[1])?, numeral(&c[0])?, false),
                _ => (len_of_var(&c[1])?, numeral(&c[0])?, true),
            };
            let k = if strict { k.saturating_sub(1) } else { k };
            Some(Bounds::single(var, Some(k)))
        }
        "=" if c.len() == 2 && c[0].sort == Sort::String => {
            let (var, word) = if c[0].is_variable() {
                (&c[0], &c[1])
            } else {
                (&c[1], &c[0])
            };
            let w = word.str_value()?;
            var.is_variable()
                .then(|| Bounds::single(&var.decl, Some(w.chars().count() as u64)))
        }
        "str.in_re" if c[0].is_variable() => {
            Some(Bounds::single(&c[0].decl, regex_max_length(&c[1]).finite()))
        }
        _ => None,
    }
}

pub struct UpperBoundSpec;

impl IntelSpec for UpperBoundSpec {
    fn name(&self) -> &str {
        "bounds"
    }

    fn version(&self) -> u32 {
        1
    }

    fn neutral(&self) -> IntelValue {
        IntelValue::Bounds(Bounds::default())
    }

    fn apply(&self, node: &Expr, merged: IntelValue) -> Result<IntelValue, String> {
        let IntelValue::Bounds(merged) = merged else {
            return Err(shape_error("bounds"));
        };
        // Only conjunctions pass bounds upwards; anything else contributes
        // at most its own atom.
        if node.decl == "and" {
            return Ok(IntelValue::Bounds(merged));
        }
        Ok(IntelValue::Bounds(atom_bound(node).unwrap_or_default()))
    }

    fn merge(&self, a: &IntelValue, b: &IntelValue) -> IntelValue {
        match (a, b) {
            (IntelValue::Bounds(x), IntelValue::Bounds(y)) => IntelValue::Bounds(x.merged(y)),
            _ => self.neutral(),
        }
    }
}

pub fn upper_bounds(script: &Script) -> Bounds {
    match script_value(script, &UpperBoundSpec) {
        Ok(IntelValue::Bounds(b)) => b,
        _ => Bounds::default(),
    }
}

// ---------------------------------------------------------------------------
// word equation sides

/// One entry per word equation in pre-order; each entry lists the sides
/// that are a single string variable.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationSides(pub Vec<Vec<String>>);

pub struct WeqSidesSpec;

impl IntelSpec for WeqSidesSpec {
    fn name(&self) -> &str {
        "weq"
    }

    fn version(&self) -> u32 {
        1
    }

    fn neutral(&self) -> IntelValue {
        IntelValue::Equations(EquationSides::default())
    }

    fn apply(&self, node: &Expr, merged: IntelValue) -> Result<IntelValue, String> {
        let IntelValue::Equations(EquationSides(nested)) = merged else {
            return Err(shape_error("equation"));
        };
        if node.decl == "=" && node.children.iter().all(|c| c.sort == Sort::String) {
            let sides = node
                .children
                .iter()
                .filter(|c| c.is_variable())
                .map(|c| c.decl.clone())
                .collect();
            let mut all = vec![sides];
            all.extend(nested);
            return Ok(IntelValue::Equations(EquationSides(all)));
        }
        Ok(IntelValue::Equations(EquationSides(nested)))
    }

    fn merge(&self, a: &IntelValue, b: &IntelValue) -> IntelValue {
        match (a, b) {
            (IntelValue::Equations(x), IntelValue::Equations(y)) => {
                let mut v = x.0.clone();
                v.extend(y.0.iter().cloned());
                IntelValue::Equations(EquationSides(v))
            }
            _ => self.neutral(),
        }
    }
}

pub fn equation_sides(script: &Script) -> EquationSides {
    match script_value(script, &WeqSidesSpec) {
        Ok(IntelValue::Equations(e)) => e,
        _ => EquationSides::default(),
    }
}
