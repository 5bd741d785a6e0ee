// SPDX-License-Identifier: Apache-2.0

//! Checks against the bundled corpus with hand-classified expectations.

use std::path::Path;

use smtquery::extractors::vardep_edges;
use smtquery::intel::variable_counts;
use smtquery::predicates::{eval_structural, Predicate, PredicateCall};
use smtquery::testkit::{fixture_files, flat_var_counts, FIXTURES};
use smtquery::{parse_script, print_script};

fn load(rel: &str) -> (String, smtquery::Script) {
    let text = std::fs::read_to_string(Path::new(FIXTURES).join(rel)).unwrap();
    let script = parse_script(&text).unwrap();
    (text, script)
}

fn pred(name: &str) -> Predicate {
    Predicate::resolve(&PredicateCall {
        name: name.into(),
        args: Vec::new(),
    })
    .unwrap()
}

fn rel(p: &Path) -> String {
    p.strip_prefix(FIXTURES)
        .unwrap()
        .to_string_lossy()
        .into_owned()
}

// Columns: hasWEQ, hasRegex, hasLinears, hasHigherOrder, isQuadratic.
const TABLE: &[(&str, [bool; 5])] = &[
    (
        "appendix/default/ghj.smt2",
        [true, false, false, false, false],
    ),
    ("kaluza/length/len.smt2", [false, false, true, false, true]),
    (
        "kaluza/mixed/branches.smt2",
        [true, true, true, false, false],
    ),
    (
        "kaluza/mixed/weq-regex.smt2",
        [true, true, true, false, true],
    ),
    (
        "kaluza/regex/bounded.smt2",
        [false, true, false, false, true],
    ),
    (
        "kaluza/regex/complement.smt2",
        [false, true, false, false, true],
    ),
    (
        "kaluza/regex/concat.smt2",
        [false, true, false, false, true],
    ),
    ("kaluza/regex/star.smt2", [false, true, false, false, true]),
    ("pisa/default/escape.smt2", [true, false, false, true, true]),
    (
        "pisa/default/listing1.smt2",
        [true, false, false, true, false],
    ),
    (
        "slog/default/empty.smt2",
        [false, false, false, false, true],
    ),
    (
        "slog/default/indexof.smt2",
        [false, false, false, true, true],
    ),
    (
        "slog/default/negations.smt2",
        [true, true, false, false, true],
    ),
    (
        "slog/default/quoted.smt2",
        [true, false, false, false, true],
    ),
    (
        "woorpje/track01/pattern.smt2",
        [true, false, false, false, true],
    ),
    (
        "woorpje/track01/swap.smt2",
        [true, false, false, false, true],
    ),
    (
        "woorpje/track01/xyz.smt2",
        [true, false, false, false, true],
    ),
    (
        "woorpje/track02/cubic.smt2",
        [true, false, false, false, false],
    ),
    (
        "woorpje/track02/five.smt2",
        [true, false, false, false, true],
    ),
    (
        "woorpje/track02/lengths.smt2",
        [true, false, true, false, false],
    ),
];

#[test]
fn corpus_has_twenty_parseable_instances() {
    let files = fixture_files();
    assert_eq!(files.len(), 20);
    let names: Vec<String> = files.iter().map(|f| rel(f)).collect();
    let expected: Vec<&str> = TABLE.iter().map(|(n, _)| *n).collect();
    assert_eq!(names, expected);
}

#[test]
fn structural_predicates_match_table() {
    let preds = [
        "hasWEQ",
        "hasRegex",
        "hasLinears",
        "hasHigherOrder",
        "isQuadratic",
    ]
    .map(pred);
    for (name, want) in TABLE {
        let (_, s) = load(name);
        let got = preds.clone().map(|p| eval_structural(&p, &s));
        assert_eq!(&got, want, "{name}");
    }
}

#[test]
fn other_predicates_on_selected_fixtures() {
    let check = |name: &str, p: &str, want: bool| {
        let (_, s) = load(name);
        assert_eq!(eval_structural(&pred(p), &s), want, "{p} on {name}");
    };
    check("woorpje/track01/pattern.smt2", "isPatternMatching", true);
    check("woorpje/track01/swap.smt2", "isPatternMatching", false);
    check("woorpje/track02/five.smt2", "hasAtLeast5Variables", true);
    check("pisa/default/listing1.smt2", "hasAtLeast5Variables", false);
    check("kaluza/regex/star.smt2", "isSimpleRegex", true);
    check("kaluza/regex/concat.smt2", "isSimpleRegex", false);
    check(
        "kaluza/regex/concat.smt2",
        "isSimpleRegexConcatenation",
        true,
    );
    check(
        "kaluza/regex/complement.smt2",
        "isSimpleRegexConcatenation",
        false,
    );
    check("kaluza/regex/bounded.smt2", "isUpperBounded", true);
    check("kaluza/regex/star.smt2", "isUpperBounded", false);
}

#[test]
fn intel_counts_equal_flat_scan() {
    for f in fixture_files() {
        let text = std::fs::read_to_string(&f).unwrap();
        let s = parse_script(&text).unwrap();
        let names: Vec<String> = s.declarations.iter().map(|d| d.name.clone()).collect();
        assert_eq!(
            variable_counts(&s).0,
            flat_var_counts(&text, &names),
            "{}",
            rel(&f)
        );
    }
}

#[test]
fn round_trip_on_fixtures() {
    for f in fixture_files() {
        let (_, s) = load(&rel(&f));
        let again = parse_script(&print_script(&s)).unwrap();
        assert!(s.same_shape(&again), "{}", rel(&f));
    }
}

#[test]
fn appendix_instance() {
    let (_, s) = load("appendix/default/ghj.smt2");
    assert_eq!(variable_counts(&s).get("J"), 5);
    let mut edges = vardep_edges(&s);
    edges.sort();
    let want: Vec<(String, String)> = [("G", "a1"), ("H", "a1"), ("J", "a2"), ("J", "a3")]
        .iter()
        .map(|(v, a)| (v.to_string(), a.to_string()))
        .collect();
    assert_eq!(edges, want);
}
