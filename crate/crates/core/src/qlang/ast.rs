// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use crate::extractors::Extractor;
use crate::predicates::Predicate;
use crate::store::DatasetAtom;
use crate::transforms::Transform;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputField {
    Name,
    Hash,
    Content,
}

impl fmt::Display for OutputField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputField::Name => "Name",
            OutputField::Hash => "Hash",
            OutputField::Content => "Content",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Condition {
    Pred(Predicate),
    And(Box<Condition>, Box<Condition>),
    Or(Box<Condition>, Box<Condition>),
    Not(Box<Condition>),
    True,
    False,
}

impl Condition {
    pub fn and(a: Condition, b: Condition) -> Condition {
        Condition::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Condition, b: Condition) -> Condition {
        Condition::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Condition) -> Condition {
        Condition::Not(Box::new(a))
    }

    /// Predicates in left-to-right order.
    pub fn predicates(&self) -> Vec<&Predicate> {
        let mut out = Vec::new();
        fn walk<'a>(c: &'a Condition, out: &mut Vec<&'a Predicate>) {
            match c {
                Condition::Pred(p) => out.push(p),
                Condition::And(a, b) | Condition::Or(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Condition::Not(a) => walk(a, out),
                Condition::True | Condition::False => {}
            }
        }
        walk(self, &mut out);
        out
    }
}

/// Prints in the concrete syntax, so the output parses back to an equal
/// condition.
impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Pred(p) => write!(f, "{p}"),
            Condition::And(a, b) => write!(f, "({a} And {b})"),
            Condition::Or(a, b) => write!(f, "({a} Or {b})"),
            Condition::Not(a) => write!(f, "(Not {a})"),
            Condition::True => f.write_str("True"),
            Condition::False => f.write_str("False"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Query {
    Select {
        output: OutputField,
        dataset: Vec<DatasetAtom>,
        condition: Condition,
    },
    Extract {
        extractor: Extractor,
        dataset: Vec<DatasetAtom>,
        condition: Condition,
        function: Transform,
    },
}

impl Query {
    pub fn dataset(&self) -> &[DatasetAtom] {
        match self {
            Query::Select { dataset, .. } | Query::Extract { dataset, .. } => dataset,
        }
    }

    pub fn condition(&self) -> &Condition {
        match self {
            Query::Select { condition, .. } | Query::Extract { condition, .. } => condition,
        }
    }
}

fn write_dataset(f: &mut fmt::Formatter<'_>, d: &[DatasetAtom]) -> fmt::Result {
    let parts: Vec<String> = d.iter().map(ToString::to_string).collect();
    f.write_str(&parts.join(", "))
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::Select {
                output,
                dataset,
                condition,
            } => {
                write!(f, "Select {output} From ")?;
                write_dataset(f, dataset)?;
                write!(f, " Where {condition}")
            }
            Query::Extract {
                extractor,
                dataset,
                condition,
                function,
            } => {
                write!(f, "Extract {extractor} From ")?;
                write_dataset(f, dataset)?;
                write!(f, " Where {condition} Apply {function}")
            }
        }
    }
}
