// SPDX-License-Identifier: Apache-2.0

//! SMT-LIB string-constraint instances: lexing, parsing, printing and the
//! 2.5 to 2.6 keyword translation.
//!
//! Parsed instances are held as a [`Script`], whose assertions are trees of
//! annotated [`Expr`] nodes. Every node carries its operator (`decl`), sort,
//! integer parameters (the bounds of `re.loop`), children, and an
//! [`IntelDictionary`] that the intel passes fill in later.

pub(crate) mod lexer;
mod ops;
mod parser;
mod printer;
mod translate;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::intel::IntelDictionary;

pub use lexer::Pos;
pub use ops::{check_signature, is_builtin_constant, is_recognized, SignatureError};
pub use parser::{parse_script, parse_script_with, ParseError, ParseOptions};
pub use printer::{print_expr, print_script, quote_string_literal, quote_symbol};
pub use translate::translate_25_to_26;

/// Operator marker of string literal leaves.
pub const STR_LIT: &str = "str-lit";
/// Operator marker of integer literal leaves.
pub const INT_LIT: &str = "int-lit";
/// Operator marker of Boolean literal leaves.
pub const BOOL_LIT: &str = "bool-lit";
/// Operator marker of constructs outside the recognized operator set.
pub const GENERIC: &str = "generic";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sort {
    String,
    Bool,
    Re,
    Integer,
    /// Only found on `generic` nodes.
    Unknown,
}

impl Sort {
    /// The SMT-LIB sort symbol, `None` for [`Sort::Unknown`].
    pub fn smt_name(self) -> Option<&'static str> {
        match self {
            Sort::String => Some("String"),
            Sort::Bool => Some("Bool"),
            Sort::Re => Some("RegLan"),
            Sort::Integer => Some("Int"),
            Sort::Unknown => None,
        }
    }

    pub fn from_smt_name(name: &str) -> Option<Sort> {
        match name {
            "String" => Some(Sort::String),
            "Bool" => Some(Sort::Bool),
            "RegLan" => Some(Sort::Re),
            "Int" => Some(Sort::Integer),
            _ => None,
        }
    }

    /// Whether a value of sort `self` may stand where `expected` is required.
    /// `Unknown` is compatible with everything since generic nodes are not
    /// sort-checked.
    pub fn fits(self, expected: Sort) -> bool {
        self == expected || self == Sort::Unknown || expected == Sort::Unknown
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Sort::String => "String",
            Sort::Bool => "Bool",
            Sort::Re => "RE",
            Sort::Integer => "Integer",
            Sort::Unknown => "Unknown",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    Variable,
    Other,
}

/// Value of a literal leaf.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Literal {
    /// Decoded code points; `\u{..}` escapes are resolved at parse time.
    Str(String),
    /// Decimal digits of a non-negative numeral.
    Int(String),
    Bool(bool),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Declaration {
    pub name: String,
    pub sort: Sort,
}

/// One node of the annotated syntax tree.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Expr {
    pub id: u32,
    pub kind: Kind,
    /// Operator name, the variable name for variables, or one of the
    /// literal/generic markers.
    pub decl: String,
    pub sort: Sort,
    pub params: Vec<i64>,
    pub children: Vec<Expr>,
    /// Present exactly on literal leaves.
    pub literal: Option<Literal>,
    /// Raw head text of a `generic` node, e.g. `str.replace_all` or
    /// `(_ re.^ 3)`.
    pub symbol: Option<String>,
    pub intel: IntelDictionary,
}

impl Expr {
    fn node(decl: impl Into<String>, sort: Sort, children: Vec<Expr>) -> Expr {
        Expr {
            id: 0,
            kind: Kind::Other,
            decl: decl.into(),
            sort,
            params: Vec::new(),
            children,
            literal: None,
            symbol: None,
            intel: IntelDictionary::default(),
        }
    }

    pub fn var(name: impl Into<String>, sort: Sort) -> Expr {
        Expr {
            kind: Kind::Variable,
            ..Expr::node(name, sort, Vec::new())
        }
    }

    pub fn str_lit(value: impl Into<String>) -> Expr {
        Expr {
            literal: Some(Literal::Str(value.into())),
            ..Expr::node(STR_LIT, Sort::String, Vec::new())
        }
    }

    pub fn int_lit(value: u64) -> Expr {
        Expr {
            literal: Some(Literal::Int(value.to_string())),
            ..Expr::node(INT_LIT, Sort::Integer, Vec::new())
        }
    }

    pub fn bool_lit(value: bool) -> Expr {
        Expr {
            literal: Some(Literal::Bool(value)),
            ..Expr::node(BOOL_LIT, Sort::Bool, Vec::new())
        }
    }

    /// Application of a recognized operator. The result sort is derived from
    /// the operator signature; the call fails when children do not fit it.
    pub fn app(decl: &str, children: Vec<Expr>) -> Result<Expr, SignatureError> {
        Expr::app_with_params(decl, Vec::new(), children)
    }

    pub fn app_with_params(
        decl: &str,
        params: Vec<i64>,
        children: Vec<Expr>,
    ) -> Result<Expr, SignatureError> {
        let sorts: Vec<Sort> = children.iter().map(|c| c.sort).collect();
        let sort = check_signature(decl, &sorts, &params)?;
        Ok(Expr {
            params,
            ..Expr::node(decl, sort, children)
        })
    }

    /// A node outside the recognized operator set.
    pub fn generic(symbol: impl Into<String>, children: Vec<Expr>) -> Expr {
        Expr {
            symbol: Some(symbol.into()),
            ..Expr::node(GENERIC, Sort::Unknown, children)
        }
    }

    pub fn is_variable(&self) -> bool {
        self.kind == Kind::Variable
    }

    pub fn is_literal(&self) -> bool {
        self.literal.is_some()
    }

    pub fn is_true(&self) -> bool {
        matches!(self.literal, Some(Literal::Bool(true)))
    }

    pub fn is_false(&self) -> bool {
        matches!(self.literal, Some(Literal::Bool(false)))
    }

    pub fn is_app(&self, decl: &str) -> bool {
        self.kind == Kind::Other && self.literal.is_none() && self.decl == decl
    }

    pub fn str_value(&self) -> Option<&str> {
        match &self.literal {
            Some(Literal::Str(s)) => Some(s),
            _ => None,
        }
    }

    pub fn int_value(&self) -> Option<u64> {
        match &self.literal {
            Some(Literal::Int(s)) => s.parse().ok(),
            _ => None,
        }
    }

    /// Structural equality ignoring node ids and intel.
    pub fn same_shape(&self, other: &Expr) -> bool {
        self.kind == other.kind
            && self.decl == other.decl
            && self.sort == other.sort
            && self.params == other.params
            && self.literal == other.literal
            && self.symbol == other.symbol
            && self.children.len() == other.children.len()
            && self
                .children
                .iter()
                .zip(&other.children)
                .all(|(a, b)| a.same_shape(b))
    }

    /// Pre-order iterator over the subtree.
    pub fn iter(&self) -> PreOrder<'_> {
        PreOrder { stack: vec![self] }
    }

    pub fn node_count(&self) -> usize {
        self.iter().count()
    }

    /// Names of variables occurring in the subtree.
    pub fn variables(&self) -> BTreeSet<&str> {
        self.iter()
            .filter(|e| e.is_variable())
            .map(|e| e.decl.as_str())
            .collect()
    }

    pub fn has_variables(&self) -> bool {
        self.iter().any(Expr::is_variable)
    }

    /// Assigns ids in pre-order starting at `next`; returns the next free id.
    pub fn renumber(&mut self, mut next: u32) -> u32 {
        self.id = next;
        next += 1;
        for child in &mut self.children {
            next = child.renumber(next);
        }
        next
    }

    /// Drops all intel entries in the subtree.
    pub fn clear_intel(&mut self) {
        self.intel = IntelDictionary::default();
        for child in &mut self.children {
            child.clear_intel();
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_expr(self))
    }
}

pub struct PreOrder<'a> {
    stack: Vec<&'a Expr>,
}

impl<'a> Iterator for PreOrder<'a> {
    type Item = &'a Expr;

    fn next(&mut self) -> Option<&'a Expr> {
        let e = self.stack.pop()?;
        self.stack.extend(e.children.iter().rev());
        Some(e)
    }
}

/// One SMT-LIB instance.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Script {
    pub logic: Option<String>,
    pub declarations: Vec<Declaration>,
    pub assertions: Vec<Expr>,
    /// Canonical text of `set-option`, `check-sat`, `get-model` and other
    /// solver commands, in source order.
    pub trailing: Vec<String>,
}

impl Script {
    pub fn declaration(&self, name: &str) -> Option<&Declaration> {
        self.declarations.iter().find(|d| d.name == name)
    }

    pub fn sort_of(&self, name: &str) -> Option<Sort> {
        self.declaration(name).map(|d| d.sort)
    }

    pub fn string_variables(&self) -> impl Iterator<Item = &str> {
        self.declarations
            .iter()
            .filter(|d| d.sort == Sort::String)
            .map(|d| d.name.as_str())
    }

    /// Reassigns node ids so they are distinct across all assertions.
    pub fn renumber(&mut self) {
        let mut next = 0;
        for a in &mut self.assertions {
            next = a.renumber(next);
        }
    }

    pub fn same_shape(&self, other: &Script) -> bool {
        self.logic == other.logic
            && self.declarations == other.declarations
            && self.trailing == other.trailing
            && self.assertions.len() == other.assertions.len()
            && self
                .assertions
                .iter()
                .zip(&other.assertions)
                .all(|(a, b)| a.same_shape(b))
    }

    /// Checks the script invariants: distinct ids, every variable declared
    /// with a matching sort, Bool assertions, and operator signatures.
    pub fn validate(&self) -> Result<(), String> {
        let mut ids = BTreeSet::new();
        for (i, a) in self.assertions.iter().enumerate() {
            if a.sort != Sort::Bool && a.sort != Sort::Unknown {
                return Err(format!("assertion {} has sort {}", i + 1, a.sort));
            }
            for e in a.iter() {
                if !ids.insert(e.id) {
                    return Err(format!("duplicate node id {}", e.id));
                }
                self.validate_node(e)?;
            }
        }
        Ok(())
    }

    fn validate_node(&self, e: &Expr) -> Result<(), String> {
        if e.is_variable() {
            if !e.children.is_empty() {
                return Err(format!("variable {} has children", e.decl));
            }
            return match self.sort_of(&e.decl) {
                Some(s) if s == e.sort => Ok(()),
                Some(s) => Err(format!(
                    "variable {} used as {} but declared {}",
                    e.decl, e.sort, s
                )),
                None => Err(format!("undeclared variable {}", e.decl)),
            };
        }
        if e.is_literal() || e.decl == GENERIC {
            return Ok(());
        }
        let sorts: Vec<Sort> = e.children.iter().map(|c| c.sort).collect();
        match check_signature(&e.decl, &sorts, &e.params) {
            Ok(s) if s.fits(e.sort) => Ok(()),
            Ok(s) => Err(format!(
                "{} node has sort {} but signature yields {}",
                e.decl, e.sort, s
            )),
            Err(err) => Err(err.to_string()),
        }
    }
}

/// Lowercase hex SHA-256 of the exact file bytes.
pub fn content_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
