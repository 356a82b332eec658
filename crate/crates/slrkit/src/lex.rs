//! Tokens shared by the `.sid` and `.mso` readers.

use std::fmt;

use crate::{ParseError, ParseErrorKind, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Num(usize),
    LParen,
    RParen,
    Comma,
    Semi,
    Dot,
    Star,
    Slash,
    Eq,
    Neq,
    /// `<=`
    Le,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Iff,
    /// `:=`
    Define,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Num(n) => return write!(f, "`{n}`"),
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Dot => ".",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Eq => "=",
            Tok::Neq => "!=",
            Tok::Le => "<=",
            Tok::Bang => "!",
            Tok::Amp => "&",
            Tok::Pipe => "|",
            Tok::Arrow => "->",
            Tok::Iff => "<->",
            Tok::Define => ":=",
            Tok::Eof => return f.write_str("end of input"),
        };
        write!(f, "`{s}`")
    }
}

fn ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    let bump = |c: char, line: &mut usize, column: &mut usize| {
        if c == '\n' {
            *line += 1;
            *column = 1;
        } else {
            *column += 1;
        }
    };
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                bump(c, &mut line, &mut column);
            }
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            bump(c, &mut line, &mut column);
            continue;
        }
        if ident_start(c) || c.is_ascii_digit() {
            let mut word = String::new();
            while let Some(&d) = chars.peek() {
                if !ident_char(d) {
                    break;
                }
                word.push(d);
                chars.next();
                bump(d, &mut line, &mut column);
            }
            let tok = if word.chars().all(|d| d.is_ascii_digit()) {
                Tok::Num(word.parse().map_err(|_| {
                    pos.error(ParseErrorKind::Syntax(format!(
                        "number `{word}` is too large"
                    )))
                })?)
            } else if ident_start(c) {
                Tok::Ident(word)
            } else {
                return Err(pos.error(ParseErrorKind::Syntax(format!("malformed name `{word}`"))));
            };
            out.push((tok, pos));
            continue;
        }
        chars.next();
        bump(c, &mut line, &mut column);
        let mut follow = |want: char, line: &mut usize, column: &mut usize| {
            if chars.peek() == Some(&want) {
                chars.next();
                bump(want, line, column);
                true
            } else {
                false
            }
        };
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '.' => Tok::Dot,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '=' => Tok::Eq,
            '&' => Tok::Amp,
            '|' => Tok::Pipe,
            '!' if follow('=', &mut line, &mut column) => Tok::Neq,
            '!' => Tok::Bang,
            '-' if follow('>', &mut line, &mut column) => Tok::Arrow,
            ':' if follow('=', &mut line, &mut column) => Tok::Define,
            '<' if follow('=', &mut line, &mut column) => Tok::Le,
            '<' if follow('-', &mut line, &mut column) => {
                if !follow('>', &mut line, &mut column) {
                    return Err(pos.error(ParseErrorKind::Syntax("expected `<->`".into())));
                }
                Tok::Iff
            }
            other => {
                return Err(pos.error(ParseErrorKind::Syntax(format!(
                    "unexpected character `{other}`"
                ))))
            }
        };
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, column }));
    Ok(out)
}

/// A cursor over a token list.
pub(crate) struct Tokens {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Tokens {
    pub(crate) fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Tokens {
            toks: tokenize(text)?,
            at: 0,
        })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    pub(crate) fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    pub(crate) fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    pub(crate) fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub(crate) fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.next();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, t: &Tok) -> Result<Pos, ParseError> {
        let (got, pos) = self.next();
        if &got == t {
            Ok(pos)
        } else {
            Err(pos.error(ParseErrorKind::Syntax(format!("expected {t}, found {got}"))))
        }
    }

    pub(crate) fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        match self.next() {
            (Tok::Ident(s), pos) => Ok((s, pos)),
            (got, pos) => Err(pos.error(ParseErrorKind::Syntax(format!(
                "expected a name, found {got}"
            )))),
        }
    }

    pub(crate) fn number(&mut self) -> Result<usize, ParseError> {
        match self.next() {
            (Tok::Num(n), _) => Ok(n),
            (got, pos) => Err(pos.error(ParseErrorKind::Syntax(format!(
                "expected a number, found {got}"
            )))),
        }
    }

    /// `name, name, ..` up to the closing parenthesis, which is consumed.
    pub(crate) fn names_until_rparen(&mut self) -> Result<Vec<(String, Pos)>, ParseError> {
        let mut out = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(out);
        }
        loop {
            out.push(self.ident()?);
            if self.eat(&Tok::RParen) {
                return Ok(out);
            }
            self.expect(&Tok::Comma)?;
        }
    }
}
