// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::lexer::{read_all, Atom, SExpr};
use super::ops::{is_builtin_constant, is_recognized, SignatureError};
use super::{translate_25_to_26, Declaration, Expr, Pos, Script, Sort};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("unsupported construct `{0}`")]
    Unsupported(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.pos.line, self.pos.column, self.kind
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Rewrite SMT-LIB 2.5 keywords and escapes before parsing.
    pub translate25: bool,
}

pub fn parse_script(text: &str) -> Result<Script, ParseError> {
    parse_script_with(text, ParseOptions::default())
}

pub fn parse_script_with(text: &str, options: ParseOptions) -> Result<Script, ParseError> {
    let translated;
    let text = if options.translate25 {
        translated = translate_25_to_26(text);
        translated.as_str()
    } else {
        text
    };
    let commands = read_all(text).map_err(|e| ParseError {
        pos: e.pos,
        kind: ParseErrorKind::Syntax(e.message),
    })?;
    let mut p = Parser::default();
    for cmd in &commands {
        p.command(cmd)?;
    }
    let mut script = p.script;
    script.renumber();
    Ok(script)
}

#[derive(Default)]
struct Parser {
    script: Script,
    sorts: HashMap<String, Sort>,
}

fn err(pos: Pos, kind: ParseErrorKind) -> ParseError {
    ParseError { pos, kind }
}

fn syntax(pos: Pos, msg: impl Into<String>) -> ParseError {
    err(pos, ParseErrorKind::Syntax(msg.into()))
}

type Scope = Vec<(String, Expr)>;

impl Parser {
    fn command(&mut self, sx: &SExpr) -> Result<(), ParseError> {
        let SExpr::List(items, pos) = sx else {
            return Err(syntax(sx.pos(), "expected a command"));
        };
        let pos = *pos;
        let head = items
            .first()
            .and_then(SExpr::symbol)
            .ok_or_else(|| syntax(pos, "expected a command name"))?;
        match head {
            "set-logic" => {
                let logic = items
                    .get(1)
                    .and_then(SExpr::symbol)
                    .ok_or_else(|| syntax(pos, "set-logic expects a logic name"))?;
                self.script.logic = Some(logic.to_string());
            }
            "declare-fun" => {
                if items.len() != 4 {
                    return Err(syntax(
                        pos,
                        "declare-fun expects a name, argument sorts and a sort",
                    ));
                }
                match &items[2] {
                    SExpr::List(args, _) if args.is_empty() => {}
                    other => {
                        return Err(err(
                            other.pos(),
                            ParseErrorKind::Unsupported("declare-fun with arguments".into()),
                        ))
                    }
                }
                self.declare(&items[1], &items[3])?;
            }
            "declare-const" => {
                if items.len() != 3 {
                    return Err(syntax(pos, "declare-const expects a name and a sort"));
                }
                self.declare(&items[1], &items[2])?;
            }
            "assert" => {
                if items.len() != 2 {
                    return Err(syntax(pos, "assert expects exactly one term"));
                }
                let term = self.term(&items[1], &mut Vec::new())?;
                if !term.sort.fits(Sort::Bool) {
                    return Err(err(
                        items[1].pos(),
                        ParseErrorKind::Signature(SignatureError::Sort {
                            op: "assert".into(),
                            index: 1,
                            expected: Sort::Bool,
                            got: term.sort,
                        }),
                    ));
                }
                self.script.assertions.push(term);
            }
            "set-info" => {}
            "define-fun" | "define-fun-rec" | "define-funs-rec" | "define-sort"
            | "declare-sort" | "declare-datatype" | "declare-datatypes" => {
                return Err(err(pos, ParseErrorKind::Unsupported(head.to_string())));
            }
            _ => self.script.trailing.push(sx.to_string()),
        }
        Ok(())
    }

    fn declare(&mut self, name: &SExpr, sort: &SExpr) -> Result<(), ParseError> {
        let name_str = name
            .symbol()
            .ok_or_else(|| syntax(name.pos(), "expected a symbol"))?;
        let sort_name = sort.symbol().unwrap_or_default();
        let sort_val = Sort::from_smt_name(sort_name).ok_or_else(|| {
            err(
                sort.pos(),
                ParseErrorKind::Unsupported(format!("sort {sort}")),
            )
        })?;
        if self.sorts.insert(name_str.to_string(), sort_val).is_some() {
            return Err(syntax(name.pos(), format!("`{name_str}` declared twice")));
        }
        self.script.declarations.push(Declaration {
            name: name_str.to_string(),
            sort: sort_val,
        });
        Ok(())
    }

    fn term(&self, sx: &SExpr, scope: &mut Scope) -> Result<Expr, ParseError> {
        match sx {
            SExpr::Atom(atom, pos) => self.atom(atom, *pos, scope),
            SExpr::List(items, pos) => self.application(items, *pos, scope),
        }
    }

    fn atom(&self, atom: &Atom, pos: Pos, scope: &Scope) -> Result<Expr, ParseError> {
        match atom {
            Atom::Str(raw) => Ok(Expr::str_lit(decode_string(raw))),
            Atom::Numeral(n) => Ok(Expr {
                literal: Some(super::Literal::Int(n.clone())),
                ..Expr::int_lit(0)
            }),
            Atom::Other(raw) => Ok(Expr::generic(raw.clone(), Vec::new())),
            Atom::Keyword(k) => Err(syntax(pos, format!("unexpected keyword `{k}`"))),
            Atom::Symbol(name) => {
                if let Some((_, bound)) = scope.iter().rev().find(|(n, _)| n == name) {
                    return Ok(bound.clone());
                }
                if let Some(&sort) = self.sorts.get(name) {
                    return Ok(Expr::var(name.clone(), sort));
                }
                match name.as_str() {
                    "true" => Ok(Expr::bool_lit(true)),
                    "false" => Ok(Expr::bool_lit(false)),
                    c if is_builtin_constant(c) => {
                        Expr::app(c, Vec::new()).map_err(|e| err(pos, e.into()))
                    }
                    _ => Err(err(pos, ParseErrorKind::UndeclaredSymbol(name.clone()))),
                }
            }
        }
    }

    fn application(
        &self,
        items: &[SExpr],
        pos: Pos,
        scope: &mut Scope,
    ) -> Result<Expr, ParseError> {
        let Some(head) = items.first() else {
            return Err(syntax(pos, "empty application"));
        };
        let args = &items[1..];
        match head {
            SExpr::Atom(Atom::Symbol(op), _) => match op.as_str() {
                "let" => self.let_term(args, pos, scope),
                "!" => match args.first() {
                    Some(inner) => self.term(inner, scope),
                    None => Err(syntax(pos, "`!` expects a term")),
                },
                "forall" | "exists" | "match" | "lambda" => {
                    Err(err(pos, ParseErrorKind::Unsupported(op.clone())))
                }
                "re.loop" => self.legacy_loop(args, pos, scope),
                _ if is_recognized(op) && !is_builtin_constant(op) => {
                    let children = self.terms(args, scope)?;
                    self.checked(op, Vec::new(), children, args, pos)
                }
                _ if self.sorts.contains_key(op) => Err(err(
                    pos,
                    ParseErrorKind::Signature(SignatureError::Arity {
                        op: op.clone(),
                        expected: "0",
                        got: args.len(),
                    }),
                )),
                _ => Ok(Expr::generic(op.clone(), self.terms(args, scope)?)),
            },
            SExpr::List(index, _) if index.first().and_then(SExpr::symbol) == Some("_") => {
                if index.get(1).and_then(SExpr::symbol) == Some("re.loop") {
                    let params = index[2..]
                        .iter()
                        .map(numeral)
                        .collect::<Result<Vec<_>, _>>()?;
                    let children = self.terms(args, scope)?;
                    self.checked("re.loop", params, children, args, pos)
                } else {
                    Ok(Expr::generic(head.to_string(), self.terms(args, scope)?))
                }
            }
            _ => Ok(Expr::generic(head.to_string(), self.terms(args, scope)?)),
        }
    }

    fn terms(&self, args: &[SExpr], scope: &mut Scope) -> Result<Vec<Expr>, ParseError> {
        args.iter().map(|a| self.term(a, scope)).collect()
    }

    fn checked(
        &self,
        op: &str,
        params: Vec<i64>,
        children: Vec<Expr>,
        args: &[SExpr],
        pos: Pos,
    ) -> Result<Expr, ParseError> {
        Expr::app_with_params(op, params, children).map_err(|e| {
            let at = match &e {
                SignatureError::Sort { index, .. } => args.get(index - 1).map_or(pos, SExpr::pos),
                _ => pos,
            };
            err(at, e.into())
        })
    }

    /// `(re.loop r lo hi)`, the pre-2.6 spelling of `((_ re.loop lo hi) r)`.
    fn legacy_loop(&self, args: &[SExpr], pos: Pos, scope: &mut Scope) -> Result<Expr, ParseError> {
        let Some((re, bounds)) = args.split_first() else {
            return Err(err(
                pos,
                ParseErrorKind::Signature(SignatureError::Params {
                    op: "re.loop".into(),
                    expected: "1 or 2",
                    got: 0,
                }),
            ));
        };
        let params = bounds.iter().map(numeral).collect::<Result<Vec<_>, _>>()?;
        let child = self.term(re, scope)?;
        self.checked("re.loop", params, vec![child], &args[..1], pos)
    }

    fn let_term(&self, args: &[SExpr], pos: Pos, scope: &mut Scope) -> Result<Expr, ParseError> {
        let [SExpr::List(bindings, _), body] = args else {
            return Err(syntax(pos, "let expects bindings and a body"));
        };
        // Bindings are parallel: all right-hand sides see the outer scope.
        let mut bound = Vec::with_capacity(bindings.len());
        for b in bindings {
            let SExpr::List(pair, bpos) = b else {
                return Err(syntax(b.pos(), "malformed let binding"));
            };
            let (Some(name), Some(value)) = (pair.first().and_then(SExpr::symbol), pair.get(1))
            else {
                return Err(syntax(*bpos, "malformed let binding"));
            };
            if pair.len() != 2 {
                return Err(syntax(*bpos, "malformed let binding"));
            }
            bound.push((name.to_string(), self.term(value, scope)?));
        }
        let depth = scope.len();
        scope.extend(bound);
        let result = self.term(body, scope);
        scope.truncate(depth);
        result
    }
}

fn numeral(sx: &SExpr) -> Result<i64, ParseError> {
    match sx {
        SExpr::Atom(Atom::Numeral(n), pos) => n
            .parse()
            .map_err(|_| syntax(*pos, format!("numeral `{n}` out of range"))),
        other => Err(syntax(other.pos(), "expected a numeral")),
    }
}

/// Resolves `\u{d..}` and `\udddd` escapes to code points.
fn decode_string(raw: &str) -> String {
    let chars: Vec<char> = raw.chars().collect();
    let mut out = String::with_capacity(raw.len());
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '\\' && chars.get(i + 1) == Some(&'u') {
            if let Some((c, len)) = unicode_escape(&chars[i + 2..]) {
                out.push(c);
                i += 2 + len;
                continue;
            }
        }
        out.push(chars[i]);
        i += 1;
    }
    out
}

fn unicode_escape(rest: &[char]) -> Option<(char, usize)> {
    let (digits, consumed) = if rest.first() == Some(&'{') {
        let close = rest.iter().position(|&c| c == '}')?;
        let digits: String = rest[1..close].iter().collect();
        if digits.is_empty() || digits.len() > 5 {
            return None;
        }
        (digits, close + 1)
    } else {
        if rest.len() < 4 {
            return None;
        }
        (rest[..4].iter().collect::<String>(), 4)
    };
    if !digits.chars().all(|c| c.is_ascii_hexdigit()) {
        return None;
    }
    let code = u32::from_str_radix(&digits, 16).ok()?;
    if code > 0x2FFFF {
        return None;
    }
    char::from_u32(code).map(|c| (c, consumed))
}
