// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::smtlib::{print_expr, Expr, Script};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn label(e: &Expr) -> String {
    if e.is_variable() || e.is_literal() || e.children.is_empty() {
        return print_expr(e);
    }
    let head = e.symbol.clone().unwrap_or_else(|| e.decl.clone());
    if e.params.is_empty() {
        head
    } else {
        let params: Vec<String> = e.params.iter().map(i64::to_string).collect();
        format!("{head} {}", params.join(" "))
    }
}

/// Shape classes (printed text) occurring more than once, numbered in
/// first-occurrence order.
fn repeated_shapes(script: &Script) -> BTreeMap<String, usize> {
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    let mut order = Vec::new();
    for a in &script.assertions {
        for e in a.iter() {
            let key = print_expr(e);
            let n = seen.entry(key.clone()).or_insert(0);
            if *n == 0 {
                order.push(key);
            }
            *n += 1;
        }
    }
    order
        .into_iter()
        .filter(|k| seen[k] > 1)
        .enumerate()
        .map(|(i, k)| (k, i))
        .collect()
}

// Golden-ratio hue steps keep neighbouring classes apart.
fn color(class: usize) -> String {
    let hue = (class as f64 * 0.618_033_988_75).fract();
    format!("{hue:.3} 0.55 0.95")
}

/// Syntax tree of every assertion. Nodes whose subtrees print identically
/// share a fill color; child order is kept in edge order.
pub fn smt_plot_dot(script: &Script) -> String {
    let classes = repeated_shapes(script);
    let mut out = String::from("digraph smt {\n  node [shape=box, fontname=\"monospace\"];\n");
    let mut next = 0usize;
    fn walk(
        e: &Expr,
        out: &mut String,
        next: &mut usize,
        classes: &BTreeMap<String, usize>,
    ) -> usize {
        let id = *next;
        *next += 1;
        let mut attrs = format!("label=\"{}\"", escape(&label(e)));
        if let Some(c) = classes.get(&print_expr(e)) {
            write!(attrs, ", style=filled, fillcolor=\"{}\"", color(*c)).unwrap();
        }
        writeln!(out, "  n{id} [{attrs}];").unwrap();
        for child in &e.children {
            let c = walk(child, out, next, classes);
            writeln!(out, "  n{id} -> n{c};").unwrap();
        }
        id
    }
    for a in &script.assertions {
        walk(a, &mut out, &mut next, &classes);
    }
    out.push_str("}\n");
    out
}

/// (variable, assertion label) pairs; assertions are labelled a1, a2, ...
pub fn vardep_edges(script: &Script) -> Vec<(String, String)> {
    let mut edges = Vec::new();
    for d in &script.declarations {
        for (i, a) in script.assertions.iter().enumerate() {
            if a.variables().contains(d.name.as_str()) {
                edges.push((d.name.clone(), format!("a{}", i + 1)));
            }
        }
    }
    edges
}

/// Bipartite graph with the variables on top and the assertions below.
pub fn vardep_dot(script: &Script) -> String {
    let mut out = String::from("graph vardep {\n  rankdir=TB;\n");
    out.push_str("  { rank=source;\n");
    for d in &script.declarations {
        writeln!(
            out,
            "    \"v:{0}\" [label=\"{0}\", shape=ellipse];",
            escape(&d.name)
        )
        .unwrap();
    }
    out.push_str("  }\n  { rank=sink;\n");
    for (i, a) in script.assertions.iter().enumerate() {
        writeln!(
            out,
            "    \"a{}\" [label=\"a{}\", shape=box, tooltip=\"{}\"];",
            i + 1,
            i + 1,
            escape(&print_expr(a))
        )
        .unwrap();
    }
    out.push_str("  }\n");
    for (v, a) in vardep_edges(script) {
        writeln!(out, "  \"v:{}\" -- \"{a}\";", escape(&v)).unwrap();
    }
    out.push_str("}\n");
    out
}
