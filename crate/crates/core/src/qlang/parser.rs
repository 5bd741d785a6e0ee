// SPDX-License-Identifier: Apache-2.0

//! Recursive-descent parser for queries.
//!
//! ```text
//! q   ::= Select f From d [Where c] | Extract e From d [Where c] [Apply fn]
//! d   ::= * | Set | Set:Track | d, d
//! c   ::= Pred | Pred(arg, ..) | (c And c) | (c Or c) | (Not c) | Not c
//!       | (c) | True | False
//! ```
//!
//! Keywords match case-insensitively. A missing `Where` means `True`, a
//! missing `Apply` means `Identity`.

use super::ast::{Condition, OutputField, Query};
use super::QlangError;
use crate::extractors::Extractor;
use crate::predicates::{Predicate, PredicateCall};
use crate::store::DatasetAtom;
use crate::transforms::Transform;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Star,
    Comma,
    Colon,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Star => "`*`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '+' | '@' | '/')
}

/// Tokens with their 1-based column.
fn lex(text: &str) -> Result<Vec<(Tok, usize)>, QlangError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        let single = match c {
            '*' => Some(Tok::Star),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, col));
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if is_ident_char(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else {
            return Err(QlangError::Syntax {
                column: col,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, c)| *c)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, QlangError> {
        Err(QlangError::Syntax {
            column: self.column(),
            message: message.into(),
        })
    }

    fn found(&self) -> String {
        self.peek().map_or("end of input".into(), Tok::describe)
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s.eq_ignore_ascii_case(kw))
    }

    fn keyword(&mut self, kw: &str) -> Result<(), QlangError> {
        if self.at_keyword(kw) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected `{kw}`, found {}", self.found()))
        }
    }

    fn punct(&mut self, t: Tok) -> Result<(), QlangError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected {}, found {}", t.describe(), self.found()))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, usize), QlangError> {
        match self.toks.get(self.pos) {
            Some((Tok::Ident(s), col)) => {
                let r = (s.clone(), *col);
                self.pos += 1;
                Ok(r)
            }
            _ => self.error(format!("expected {what}, found {}", self.found())),
        }
    }

    fn query(&mut self) -> Result<Query, QlangError> {
        let q = if self.at_keyword("select") {
            self.pos += 1;
            let (field, col) = self.ident("Name, Hash or Content")?;
            let output = match field.to_ascii_lowercase().as_str() {
                "name" => OutputField::Name,
                "hash" => OutputField::Hash,
                "content" => OutputField::Content,
                _ => {
                    return Err(QlangError::Syntax {
                        column: col,
                        message: format!(
                            "unknown output `{field}`, expected Name, Hash or Content"
                        ),
                    })
                }
            };
            let (dataset, condition) = self.source_and_filter()?;
            Query::Select {
                output,
                dataset,
                condition,
            }
        } else if self.at_keyword("extract") {
            self.pos += 1;
            let (name, column) = self.ident("an extractor")?;
            let extractor = Extractor::from_name(&name)
                .map_err(|source| QlangError::Extractor { column, source })?;
            let (dataset, condition) = self.source_and_filter()?;
            let function = if self.at_keyword("apply") {
                self.pos += 1;
                let (name, column) = self.ident("a function")?;
                Transform::from_name(&name)
                    .map_err(|source| QlangError::Transform { column, source })?
            } else {
                Transform::Identity
            };
            Query::Extract {
                extractor,
                dataset,
                condition,
                function,
            }
        } else {
            return self.error(format!(
                "expected `Select` or `Extract`, found {}",
                self.found()
            ));
        };
        if self.peek().is_some() {
            return self.error(format!("unexpected {} after the query", self.found()));
        }
        Ok(q)
    }

    fn source_and_filter(&mut self) -> Result<(Vec<DatasetAtom>, Condition), QlangError> {
        self.keyword("from")?;
        let dataset = self.dataset()?;
        let condition = if self.at_keyword("where") {
            self.pos += 1;
            self.condition()?
        } else {
            Condition::True
        };
        Ok((dataset, condition))
    }

    fn dataset(&mut self) -> Result<Vec<DatasetAtom>, QlangError> {
        let mut atoms = vec![self.atom()?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            atoms.push(self.atom()?);
        }
        Ok(atoms)
    }

    fn atom(&mut self) -> Result<DatasetAtom, QlangError> {
        if self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            return Ok(DatasetAtom::All);
        }
        let (set, _) = self.ident("a benchmark name or `*`")?;
        if self.peek() == Some(&Tok::Colon) {
            self.pos += 1;
            let (track, _) = self.ident("a track name")?;
            return Ok(DatasetAtom::SetTrack(set, track));
        }
        Ok(DatasetAtom::Set(set))
    }

    fn condition(&mut self) -> Result<Condition, QlangError> {
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let c = self.inner()?;
            self.punct(Tok::RParen)?;
            return Ok(c);
        }
        if self.at_keyword("true") {
            self.pos += 1;
            return Ok(Condition::True);
        }
        if self.at_keyword("false") {
            self.pos += 1;
            return Ok(Condition::False);
        }
        if self.at_keyword("not") {
            self.pos += 1;
            return Ok(Condition::not(self.condition()?));
        }
        for kw in ["and", "or", "apply", "where", "from"] {
            if self.at_keyword(kw) {
                return self.error(format!("expected a condition, found {}", self.found()));
            }
        }
        self.predicate()
    }

    // Contents of a parenthesized condition.
    fn inner(&mut self) -> Result<Condition, QlangError> {
        if self.at_keyword("not") {
            self.pos += 1;
            return Ok(Condition::not(self.condition()?));
        }
        let left = self.condition()?;
        if self.at_keyword("and") {
            self.pos += 1;
            return Ok(Condition::and(left, self.condition()?));
        }
        if self.at_keyword("or") {
            self.pos += 1;
            return Ok(Condition::or(left, self.condition()?));
        }
        Ok(left)
    }

    fn predicate(&mut self) -> Result<Condition, QlangError> {
        let (name, column) = self.ident("a predicate")?;
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            args.push(self.ident("a solver name")?.0);
            while self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
                args.push(self.ident("a solver name")?.0);
            }
            self.punct(Tok::RParen)?;
        }
        let call = PredicateCall { name, args };
        Predicate::resolve(&call)
            .map(Condition::Pred)
            .map_err(|source| QlangError::Predicate { column, source })
    }
}

pub fn parse_query(text: &str) -> Result<Query, QlangError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.chars().count() + 1,
    };
    p.query()
}

/// Parses a bare condition, as found after `Where`.
pub fn parse_condition(text: &str) -> Result<Condition, QlangError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.chars().count() + 1,
    };
    let c = p.condition()?;
    if p.peek().is_some() {
        return p.error(format!("unexpected {} after the condition", p.found()));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pred(name: &str, args: &[&str]) -> Condition {
        Condition::Pred(
            Predicate::resolve(&PredicateCall {
                name: name.into(),
                args: args.iter().map(|s| s.to_string()).collect(),
            })
            .unwrap(),
        )
    }

    #[test]
    fn paper_queries() {
        assert_eq!(
            parse_query("Select Name From * Where (hasWEQ and isSAT(CVC5))").unwrap(),
            Query::Select {
                output: OutputField::Name,
                dataset: vec![DatasetAtom::All],
                condition: Condition::and(pred("hasWEQ", &[]), pred("isSAT", &["CVC5"])),
            }
        );
        assert_eq!(
            parse_query("Extract SMTLib From * Where hasWEQ Apply Restrict2WEQ").unwrap(),
            Query::Extract {
                extractor: Extractor::SMTLib,
                dataset: vec![DatasetAtom::All],
                condition: pred("hasWEQ", &[]),
                function: Transform::Restrict2WEQ,
            }
        );
        let q = parse_query("Extract Count From joacosuite Where isQuadratic").unwrap();
        assert!(matches!(
            q,
            Query::Extract {
                function: Transform::Identity,
                ..
            }
        ));
        let q = parse_query("Extract ResultsTable From woorpje").unwrap();
        assert_eq!(q.condition(), &Condition::True);
        parse_query(
            "Select Name From * Where ((isCorrect(CVC5) and (not isCorrect(Z3Str3))) or \
             (isCorrect(Z3Str3) and isFaster(CVC5,Z3Str3)))",
        )
        .unwrap();
    }

    #[test]
    fn datasets() {
        let q = parse_query("Select Name From a:b, c Where hasRegex").unwrap();
        assert_eq!(
            q.dataset(),
            [
                DatasetAtom::SetTrack("a".into(), "b".into()),
                DatasetAtom::Set("c".into())
            ]
        );
    }

    #[test]
    fn keywords_ignore_case() {
        let a = parse_query("SELECT name FROM * WHERE (NOT false)").unwrap();
        let b = parse_query("select Name from * where (Not False)").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.condition(), &Condition::not(Condition::False));
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "Select Hash From x, y:z Where ((Not hasWEQ) Or (isQuadratic And True))",
            "Extract VarDepPlot From * Where isFaster(A, B) Apply RenameVariables",
        ] {
            let q = parse_query(text).unwrap();
            assert_eq!(parse_query(&q.to_string()).unwrap(), q);
        }
    }

    #[test]
    fn errors_carry_columns() {
        let col = |t: &str| match parse_query(t).unwrap_err() {
            QlangError::Syntax { column, .. }
            | QlangError::Predicate { column, .. }
            | QlangError::Extractor { column, .. }
            | QlangError::Transform { column, .. } => column,
            e => panic!("{e}"),
        };
        assert_eq!(col("Select Name Form *"), 13);
        assert_eq!(col("Select Name From * Where (a and b"), 27);
        assert_eq!(col("Select Name From * Where hasWEQ and"), 33);
        assert_eq!(col("Select Name From * Where (hasWEQ and hasRegex"), 46);
        assert_eq!(col("Select Name From * Where isNice"), 26);
        assert_eq!(col("Extract Histogram From *"), 9);
        assert_eq!(col("Extract Count From * Apply Nothing"), 28);
        assert_eq!(
            col("Select Name From * Where (hasWEQ and hasRegex and isQuadratic)"),
            47
        );
        assert_eq!(col("Select Name From * Where isSAT"), 26);
        assert_eq!(col("Select Name From * Where hasWEQ $"), 33);
    }
}
