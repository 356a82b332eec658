//! The `.sid` surface syntax.
//!
//! ```text
//! # comments run to the end of the line
//! alphabet b/2, c/2 ;
//! A() <= exists y1 y2 y3 . b(y1,y2) * c(y3,y2) * B(y1,y3) ;
//! B(x1,x2) <= exists y . b(x1,x2) * c(y,x2) * B(x1,y) ;
//! B(x1,x2) <= b(x1,x2) * x1 != x2 ;
//! ```
//!
//! A name applied to arguments is a relation atom when it is a declared
//! label and a predicate atom otherwise; predicates are the rule heads. A
//! nullary predicate may be written without parentheses.

use std::collections::BTreeMap;
use std::fmt::Write;

use slrkit_core::graph::{Alphabet, Label, DISEQ};
use slrkit_core::slr::{Rule, Sid, SlrError, SlrFormula};

use crate::lex::{Tok, Tokens};
use crate::{ParseError, ParseErrorKind, Pos};

type Name = (String, Pos);

enum Surface {
    Emp,
    Eq(Name, Name, bool),
    Call { name: Name, args: Vec<Name> },
    Sep(Vec<Surface>),
    Exists(Vec<Name>, Box<Surface>),
}

struct SurfaceRule {
    head: Name,
    params: Vec<Name>,
    body: Surface,
}

fn formula(ts: &mut Tokens) -> Result<Surface, ParseError> {
    let mut parts = vec![atom(ts)?];
    while ts.eat(&Tok::Star) {
        parts.push(atom(ts)?);
    }
    Ok(if parts.len() == 1 {
        parts.pop().expect("one part")
    } else {
        Surface::Sep(parts)
    })
}

fn atom(ts: &mut Tokens) -> Result<Surface, ParseError> {
    if ts.eat(&Tok::LParen) {
        let f = formula(ts)?;
        ts.expect(&Tok::RParen)?;
        return Ok(f);
    }
    let name = ts.ident()?;
    match name.0.as_str() {
        "emp" => return Ok(Surface::Emp),
        "exists" => {
            let mut vars = vec![ts.ident()?];
            while let Tok::Ident(_) = ts.peek() {
                vars.push(ts.ident()?);
            }
            ts.expect(&Tok::Dot)?;
            return Ok(Surface::Exists(vars, Box::new(formula(ts)?)));
        }
        _ => {}
    }
    match ts.peek() {
        Tok::Eq | Tok::Neq => {
            let neq = ts.next().0 == Tok::Neq;
            Ok(Surface::Eq(name, ts.ident()?, neq))
        }
        Tok::LParen => {
            ts.next();
            Ok(Surface::Call {
                name,
                args: ts.names_until_rparen()?,
            })
        }
        _ => Ok(Surface::Call {
            name,
            args: Vec::new(),
        }),
    }
}

fn label(ts: &mut Tokens, alphabet: &mut Alphabet) -> Result<(), ParseError> {
    let (name, pos) = ts.ident()?;
    ts.expect(&Tok::Slash)?;
    let arity = ts.number()?;
    if name == DISEQ {
        return Err(pos.error(ParseErrorKind::ReservedLabel));
    }
    if arity == 0 {
        return Err(pos.error(ParseErrorKind::Syntax(format!(
            "label `{name}` needs a positive arity"
        ))));
    }
    match alphabet.arity(&name) {
        Some(a) if a != arity => Err(pos.error(ParseErrorKind::Arity {
            symbol: name,
            expected: a,
            found: arity,
        })),
        Some(_) => Ok(()),
        None => alphabet
            .insert(Label::new(name, arity))
            .map_err(|e| pos.error(ParseErrorKind::Syntax(e.to_string()))),
    }
}

struct Lower<'a> {
    alphabet: &'a Alphabet,
    predicates: &'a BTreeMap<String, usize>,
    scope: Vec<String>,
}

impl Lower<'_> {
    fn var(&self, (v, pos): &Name) -> Result<String, ParseError> {
        if self.scope.contains(v) {
            Ok(v.clone())
        } else {
            Err(pos.error(ParseErrorKind::UndeclaredSymbol(v.clone())))
        }
    }

    fn lower(&mut self, s: &Surface) -> Result<SlrFormula, ParseError> {
        Ok(match s {
            Surface::Emp => SlrFormula::Emp,
            Surface::Eq(x, y, neq) => {
                let (x, y) = (self.var(x)?, self.var(y)?);
                if *neq {
                    SlrFormula::Neq(x, y)
                } else {
                    SlrFormula::Eq(x, y)
                }
            }
            Surface::Call {
                name: (name, pos),
                args,
            } => {
                let (arity, rel) = match (self.alphabet.arity(name), self.predicates.get(name)) {
                    (Some(a), _) => (a, true),
                    (None, Some(&a)) => (a, false),
                    (None, None) if name == DISEQ => {
                        return Err(pos.error(ParseErrorKind::ReservedLabel))
                    }
                    (None, None) => {
                        return Err(pos.error(ParseErrorKind::UndeclaredSymbol(name.clone())))
                    }
                };
                if arity != args.len() {
                    return Err(pos.error(ParseErrorKind::Arity {
                        symbol: name.clone(),
                        expected: arity,
                        found: args.len(),
                    }));
                }
                let args = args
                    .iter()
                    .map(|a| self.var(a))
                    .collect::<Result<Vec<_>, _>>()?;
                if rel {
                    SlrFormula::Rel {
                        label: name.clone(),
                        args,
                    }
                } else {
                    SlrFormula::Pred {
                        name: name.clone(),
                        args,
                    }
                }
            }
            Surface::Sep(parts) => SlrFormula::Sep(
                parts
                    .iter()
                    .map(|p| self.lower(p))
                    .collect::<Result<_, _>>()?,
            ),
            Surface::Exists(vars, body) => {
                let depth = self.scope.len();
                self.scope.extend(vars.iter().map(|(v, _)| v.clone()));
                let body = self.lower(body)?;
                self.scope.truncate(depth);
                vars.iter().rev().fold(body, |acc, (v, _)| {
                    SlrFormula::Exists(v.clone(), Box::new(acc))
                })
            }
        })
    }
}

/// Reads a SID. Diagnostics carry the line and column of the offending token.
pub fn parse_sid(text: &str) -> Result<Sid, ParseError> {
    let mut ts = Tokens::new(text)?;
    let mut alphabet = Alphabet::new();
    let mut rules = Vec::new();
    while *ts.peek() != Tok::Eof {
        if *ts.peek() == Tok::Ident("alphabet".into())
            && *ts.peek_at(1) != Tok::Le
            && *ts.peek_at(1) != Tok::LParen
        {
            ts.next();
            label(&mut ts, &mut alphabet)?;
            while ts.eat(&Tok::Comma) {
                label(&mut ts, &mut alphabet)?;
            }
            ts.expect(&Tok::Semi)?;
            continue;
        }
        let head = ts.ident()?;
        let params = if ts.eat(&Tok::LParen) {
            ts.names_until_rparen()?
        } else {
            Vec::new()
        };
        ts.expect(&Tok::Le)?;
        let body = formula(&mut ts)?;
        ts.expect(&Tok::Semi)?;
        rules.push(SurfaceRule { head, params, body });
    }

    let mut predicates: BTreeMap<String, usize> = BTreeMap::new();
    for r in &rules {
        let (name, pos) = &r.head;
        if name == DISEQ {
            return Err(pos.error(ParseErrorKind::ReservedLabel));
        }
        if alphabet.contains(name) {
            return Err(pos.error(ParseErrorKind::Invalid(SlrError::NameClash(name.clone()))));
        }
        let expected = *predicates.entry(name.clone()).or_insert(r.params.len());
        if expected != r.params.len() {
            return Err(pos.error(ParseErrorKind::Arity {
                symbol: name.clone(),
                expected,
                found: r.params.len(),
            }));
        }
        for (i, (p, ppos)) in r.params.iter().enumerate() {
            if r.params[..i].iter().any(|(q, _)| q == p) {
                return Err(ppos.error(ParseErrorKind::Syntax(format!(
                    "parameter `{p}` is repeated"
                ))));
            }
        }
    }

    let mut out = Vec::new();
    for r in &rules {
        let mut lower = Lower {
            alphabet: &alphabet,
            predicates: &predicates,
            scope: r.params.iter().map(|(p, _)| p.clone()).collect(),
        };
        out.push(Rule {
            head: r.head.0.clone(),
            params: r.params.iter().map(|(p, _)| p.clone()).collect(),
            body: lower.lower(&r.body)?,
        });
    }
    Sid::new(alphabet, out).map_err(|e| {
        let pos = match &e {
            SlrError::DuplicateParameter { rule } | SlrError::FreeVariable { rule, .. } => {
                rules[*rule].head.1
            }
            _ => Pos { line: 1, column: 1 },
        };
        pos.error(ParseErrorKind::Invalid(e))
    })
}

/// Prints a SID in the syntax read by [`parse_sid`].
pub fn write_sid(sid: &Sid) -> String {
    let mut out = String::new();
    let labels: Vec<String> = sid
        .alphabet()
        .labels()
        .map(|l| format!("{}/{}", l.name, l.arity))
        .collect();
    if !labels.is_empty() {
        writeln!(out, "alphabet {} ;", labels.join(", ")).expect("writing to a string");
    }
    for r in sid.rules() {
        writeln!(out, "{r} ;").expect("writing to a string");
    }
    out
}
