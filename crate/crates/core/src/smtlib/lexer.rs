// SPDX-License-Identifier: Apache-2.0

//! Tokenizer and s-expression reader for SMT-LIB text.

use std::fmt;

/// 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Atom {
    /// Simple or `|quoted|` symbol, bars removed.
    Symbol(String),
    Keyword(String),
    Numeral(String),
    /// Decimals, `#x..` and `#b..` constants, kept verbatim.
    Other(String),
    /// Content between the quotes with `""` already collapsed; unicode
    /// escapes are still raw.
    Str(String),
}

#[derive(Clone, Debug)]
pub(crate) enum SExpr {
    Atom(Atom, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    pub(crate) fn pos(&self) -> Pos {
        match self {
            SExpr::Atom(_, p) | SExpr::List(_, p) => *p,
        }
    }

    pub(crate) fn symbol(&self) -> Option<&str> {
        match self {
            SExpr::Atom(Atom::Symbol(s), _) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Atom(a, _) => match a {
                Atom::Symbol(s) => f.write_str(&super::printer::quote_symbol(s)),
                Atom::Keyword(s) | Atom::Numeral(s) | Atom::Other(s) => f.write_str(s),
                Atom::Str(s) => write!(f, "\"{}\"", s.replace('"', "\"\"")),
            },
            SExpr::List(items, _) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct LexError {
    pub pos: Pos,
    pub message: String,
}

#[derive(Debug, PartialEq)]
enum Token {
    Open,
    Close,
    Atom(Atom),
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

fn is_symbol_char(c: char) -> bool {
    c.is_ascii_alphanumeric()
        || "~!@$%^&*_-+=<>.?/".contains(c)
        || (!c.is_ascii() && !c.is_whitespace())
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            pos: Pos { line: 1, column: 1 },
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.column = 1;
        } else {
            self.pos.column += 1;
        }
        Some(c)
    }

    fn err(&self, pos: Pos, message: impl Into<String>) -> LexError {
        LexError {
            pos,
            message: message.into(),
        }
    }

    fn next_token(&mut self) -> Result<Option<(Token, Pos)>, LexError> {
        loop {
            match self.chars.peek() {
                None => return Ok(None),
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some(';') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                Some(_) => break,
            }
        }
        let start = self.pos;
        let c = self.bump().expect("peeked");
        let tok = match c {
            '(' => Token::Open,
            ')' => Token::Close,
            '"' => {
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(self.err(start, "unterminated string literal")),
                        Some('"') => {
                            if self.chars.peek() == Some(&'"') {
                                self.bump();
                                s.push('"');
                            } else {
                                break;
                            }
                        }
                        Some(c) => s.push(c),
                    }
                }
                Token::Atom(Atom::Str(s))
            }
            '|' => {
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(self.err(start, "unterminated quoted symbol")),
                        Some('|') => break,
                        Some(c) => s.push(c),
                    }
                }
                Token::Atom(Atom::Symbol(s))
            }
            ':' => {
                let mut s = String::from(":");
                while let Some(&c) = self.chars.peek() {
                    if !is_symbol_char(c) {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Token::Atom(Atom::Keyword(s))
            }
            '#' => {
                let mut s = String::from("#");
                while let Some(&c) = self.chars.peek() {
                    if !c.is_ascii_alphanumeric() {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Token::Atom(Atom::Other(s))
            }
            c if c.is_ascii_digit() => {
                let mut s = String::from(c);
                let mut decimal = false;
                while let Some(&c) = self.chars.peek() {
                    if c.is_ascii_digit() || (c == '.' && !decimal) {
                        decimal |= c == '.';
                        s.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                if decimal {
                    Token::Atom(Atom::Other(s))
                } else {
                    Token::Atom(Atom::Numeral(s))
                }
            }
            c if is_symbol_char(c) => {
                let mut s = String::from(c);
                while let Some(&c) = self.chars.peek() {
                    if !is_symbol_char(c) {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Token::Atom(Atom::Symbol(s))
            }
            other => return Err(self.err(start, format!("unexpected character `{other}`"))),
        };
        Ok(Some((tok, start)))
    }
}

/// Reads all top-level s-expressions of `text`.
pub(crate) fn read_all(text: &str) -> Result<Vec<SExpr>, LexError> {
    let mut lexer = Lexer::new(text);
    let mut stack: Vec<(Vec<SExpr>, Pos)> = Vec::new();
    let mut top = Vec::new();
    while let Some((tok, pos)) = lexer.next_token()? {
        match tok {
            Token::Open => stack.push((Vec::new(), pos)),
            Token::Close => {
                let (items, open) = stack
                    .pop()
                    .ok_or_else(|| lexer.err(pos, "unbalanced `)`"))?;
                let list = SExpr::List(items, open);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(list),
                    None => top.push(list),
                }
            }
            Token::Atom(a) => {
                let atom = SExpr::Atom(a, pos);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(atom),
                    None => top.push(atom),
                }
            }
        }
    }
    if let Some((_, open)) = stack.pop() {
        return Err(lexer.err(open, "unbalanced `(`: missing `)`"));
    }
    Ok(top)
}
