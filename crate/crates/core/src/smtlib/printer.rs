// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write;

use super::{Expr, Literal, Script, GENERIC};

/// Emits SMT-LIB 2.6 text. `set-option` commands come first, then the logic,
/// declarations, assertions, and the remaining trailing commands.
pub fn print_script(s: &Script) -> String {
    let mut out = String::new();
    let (options, rest): (Vec<&String>, Vec<&String>) = s
        .trailing
        .iter()
        .partition(|c| c.starts_with("(set-option"));
    for c in options {
        out.push_str(c);
        out.push('\n');
    }
    if let Some(logic) = &s.logic {
        writeln!(out, "(set-logic {})", quote_symbol(logic)).unwrap();
    }
    for d in &s.declarations {
        let sort = d
            .sort
            .smt_name()
            .expect("declarations never have sort Unknown");
        writeln!(out, "(declare-fun {} () {sort})", quote_symbol(&d.name)).unwrap();
    }
    for a in &s.assertions {
        writeln!(out, "(assert {})", print_expr(a)).unwrap();
    }
    for c in rest {
        out.push_str(c);
        out.push('\n');
    }
    out
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

fn write_expr(out: &mut String, e: &Expr) {
    if e.is_variable() {
        out.push_str(&quote_symbol(&e.decl));
        return;
    }
    match &e.literal {
        Some(Literal::Str(s)) => return out.push_str(&quote_string_literal(s)),
        Some(Literal::Int(n)) => return out.push_str(n),
        Some(Literal::Bool(b)) => return out.push_str(if *b { "true" } else { "false" }),
        None => {}
    }
    let head = if e.decl == GENERIC {
        e.symbol.clone().unwrap_or_default()
    } else if e.params.is_empty() {
        e.decl.clone()
    } else {
        let params: Vec<String> = e.params.iter().map(i64::to_string).collect();
        format!("(_ {} {})", e.decl, params.join(" "))
    };
    if e.children.is_empty() {
        out.push_str(&head);
        return;
    }
    out.push('(');
    out.push_str(&head);
    for c in &e.children {
        out.push(' ');
        write_expr(out, c);
    }
    out.push(')');
}

fn is_simple_symbol(s: &str) -> bool {
    let mut chars = s.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    let ok = |c: char| c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c);
    ok(first) && !first.is_ascii_digit() && chars.all(ok)
}

pub fn quote_symbol(s: &str) -> String {
    if is_simple_symbol(s) {
        s.to_string()
    } else {
        format!("|{s}|")
    }
}

/// Encodes a decoded string value as a 2.6 literal. Printable ASCII is kept
/// except `\`, which is escaped so the output never contains an accidental
/// escape sequence.
pub fn quote_string_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\"\""),
            '\\' => out.push_str("\\u{5c}"),
            ' '..='~' => out.push(c),
            _ => write!(out, "\\u{{{:x}}}", c as u32).unwrap(),
        }
    }
    out.push('"');
    out
}
