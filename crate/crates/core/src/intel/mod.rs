// SPDX-License-Identifier: Apache-2.0

//! Bottom-up per-node analysis results.
//!
//! An [`IntelSpec`] describes one analysis by an `apply` function, a `merge`
//! function and the neutral element of `merge`. [`compute_intel`] walks an
//! assertion tree in post-order; every node receives
//! `apply(node, merge(v(c1), .., v(ck), neutral))` under the spec's
//! [`IntelKey`]. Values of a whole script are the merge of its assertion
//! roots.

mod builtin;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::smtlib::{Expr, Script};

pub use builtin::{
    builtin_specs, constraint_kinds, equation_sides, is_linear_length_constraint, is_word_equation,
    regex_classification, regex_max_length, upper_bounds, variable_counts, Bounds, EquationSides,
    KindFlags, KindsSpec, KindsValue, RegexLength, RegexShape, RegexShapeSpec, TermShape,
    UpperBoundSpec, VarCountSpec, VarCounts, WeqSidesSpec, HIGHER_ORDER_FUNCTIONS,
    REGEX_NODE_BUDGET,
};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IntelKey {
    pub name: String,
    pub version: u32,
}

impl IntelKey {
    pub fn new(name: impl Into<String>, version: u32) -> Self {
        IntelKey {
            name: name.into(),
            version,
        }
    }
}

impl std::fmt::Display for IntelKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}@{}", self.name, self.version)
    }
}

/// Value computed by one intel pass at one node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntelValue {
    Counts(VarCounts),
    Kinds(KindsValue),
    Regex(RegexShape),
    Bounds(Bounds),
    Equations(EquationSides),
    // General-purpose shapes for passes registered outside this crate.
    Bool(bool),
    Int(i64),
    Text(String),
    List(Vec<IntelValue>),
    Map(BTreeMap<String, IntelValue>),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntelDictionary {
    entries: BTreeMap<IntelKey, IntelValue>,
}

impl IntelDictionary {
    pub fn get(&self, key: &IntelKey) -> Option<&IntelValue> {
        self.entries.get(key)
    }

    pub fn contains(&self, key: &IntelKey) -> bool {
        self.entries.contains_key(key)
    }

    /// Stores `value` under `key`, dropping other versions of the same name.
    pub fn insert(&mut self, key: IntelKey, value: IntelValue) {
        self.entries.retain(|k, _| k.name != key.name);
        self.entries.insert(key, value);
    }

    pub fn keys(&self) -> impl Iterator<Item = &IntelKey> {
        self.entries.keys()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntelError {
    #[error("intel `{key}` failed at node {node} (`{decl}`): {message}")]
    Apply {
        key: IntelKey,
        node: u32,
        decl: String,
        message: String,
    },
    #[error("intel `{key}` produced a value of the wrong shape")]
    Shape { key: IntelKey },
}

/// One bottom-up analysis.
pub trait IntelSpec: Send + Sync {
    fn name(&self) -> &str;

    fn version(&self) -> u32;

    fn neutral(&self) -> IntelValue;

    /// Computes the value of `node` given the merged values of its children.
    /// The children of `node` are already annotated with this spec's key.
    fn apply(&self, node: &Expr, merged: IntelValue) -> Result<IntelValue, String>;

    /// Associative, with [`IntelSpec::neutral`] as identity.
    fn merge(&self, a: &IntelValue, b: &IntelValue) -> IntelValue;

    fn key(&self) -> IntelKey {
        IntelKey::new(self.name(), self.version())
    }
}

/// Annotates every node of `root` with the value of `spec`.
pub fn compute_intel(root: &mut Expr, spec: &dyn IntelSpec) -> Result<(), IntelError> {
    let key = spec.key();
    compute_node(root, spec, &key)
}

fn compute_node(node: &mut Expr, spec: &dyn IntelSpec, key: &IntelKey) -> Result<(), IntelError> {
    let mut merged = spec.neutral();
    for child in &mut node.children {
        compute_node(child, spec, key)?;
        let value = child.intel.get(key).expect("child annotated above");
        merged = spec.merge(&merged, value);
    }
    let value = spec
        .apply(node, merged)
        .map_err(|message| IntelError::Apply {
            key: key.clone(),
            node: node.id,
            decl: node.decl.clone(),
            message,
        })?;
    node.intel.insert(key.clone(), value);
    Ok(())
}

/// Annotates every assertion root of `script` that lacks the spec's key.
/// Returns whether anything was computed.
pub fn annotate(script: &mut Script, spec: &dyn IntelSpec) -> Result<bool, IntelError> {
    let key = spec.key();
    let mut changed = false;
    for a in &mut script.assertions {
        if !a.intel.contains(&key) {
            compute_intel(a, spec)?;
            changed = true;
        }
    }
    Ok(changed)
}

/// Merge of the root values of all assertions. Roots lacking the key are
/// computed on a copy.
pub fn script_value(script: &Script, spec: &dyn IntelSpec) -> Result<IntelValue, IntelError> {
    let key = spec.key();
    let mut acc = spec.neutral();
    for a in &script.assertions {
        match a.intel.get(&key) {
            Some(v) => acc = spec.merge(&acc, v),
            None => {
                let mut copy = a.clone();
                compute_intel(&mut copy, spec)?;
                acc = spec.merge(&acc, copy.intel.get(&key).expect("computed"));
            }
        }
    }
    Ok(acc)
}
