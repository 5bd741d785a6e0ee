// SPDX-License-Identifier: Apache-2.0

//! Query engine for SMT-LIB string benchmark collections.
//!
//! Instances are parsed into annotated syntax trees ([`smtlib`]), analysed
//! bottom-up ([`intel`]), filtered by [`predicates`], rewritten by
//! [`transforms`] and rendered by [`extractors`]. The [`qlang`] module ties
//! these together behind `Select`/`Extract` queries; [`store`] keeps the
//! corpus metadata and solver results, [`harness`] runs external solvers.

pub mod extractors;
pub mod harness;
pub mod intel;
pub mod pool;
pub mod predicates;
pub mod qlang;
pub mod smtlib;
pub mod store;
#[cfg(feature = "testkit")]
pub mod testkit;
pub mod transforms;

pub use extractors::{Extractor, QueryResult};
pub use harness::{SolverConfig, SolverOutcome};
pub use predicates::Predicate;
pub use qlang::{parse_query, Condition, Engine, Query};
pub use smtlib::{parse_script, print_script, Expr, Script, Sort};
pub use store::{AstCache, DatasetAtom, InstanceRec, SolverResult, Store, ValidationKind};
pub use transforms::Transform;
