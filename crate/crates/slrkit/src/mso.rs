//! The `.mso` surface syntax.
//!
//! ```text
//! alphabet e/2, c/1 ;                      # optional
//! macro reach(x, y) := forallS R . R(x) & (forall u v . R(u) & e(u, v) -> R(v)) -> R(y) ;
//! exists x . forall y . reach(x, y)
//! ```
//!
//! Set variables start with an uppercase letter; element variables and
//! labels with a lowercase one. `X(x)` is membership, `a(x1, ..)` the
//! relation atom of label `a` and `edg_a(e, x1, ..)` the edge atom. Binding
//! strength, loosest first: quantifiers, `<->`, `->` (to the right), `|`,
//! `&`, `!`. Quantifiers are `exists`, `forall`, `exists!`, the set
//! quantifiers `existsS` and `forallS`, and the vertex-only forms
//! `existsV`, `forallV`, `existsSV`, `forallSV`.
//!
//! Built-in shorthands: `single(X)`, `vert(x)` and `incid_a_i(e, x)` (the
//! `i`-th attachment of the `a`-edge `e` is `x`).

use std::collections::BTreeMap;

use slrkit_core::graph::{Alphabet, Label, DISEQ};
use slrkit_core::mso::{MsoFormula, Sort};

use crate::lex::{Tok, Tokens};
use crate::{ParseError, ParseErrorKind, Pos};

type Name = (String, Pos);

#[derive(Clone, Copy)]
enum Quant {
    Exists,
    Forall,
    Unique,
}

enum Surface {
    Bool(bool),
    Eq(Name, Name, bool),
    Call {
        name: Name,
        args: Vec<Name>,
    },
    Not(Box<Surface>),
    And(Vec<Surface>),
    Or(Vec<Surface>),
    Implies(Box<Surface>, Box<Surface>),
    Iff(Box<Surface>, Box<Surface>),
    Quant {
        quant: Quant,
        set: bool,
        sort: Sort,
        vars: Vec<Name>,
        body: Box<Surface>,
    },
}

struct Macro {
    name: Name,
    params: Vec<Name>,
    body: Surface,
}

fn is_set_name(v: &str) -> bool {
    v.starts_with(|c: char| c.is_ascii_uppercase())
}

fn quantifier(word: &str) -> Option<(Quant, bool, Sort)> {
    let (quant, rest) = if let Some(r) = word.strip_prefix("exists") {
        (Quant::Exists, r)
    } else {
        (Quant::Forall, word.strip_prefix("forall")?)
    };
    match rest {
        "" => Some((quant, false, Sort::Any)),
        "V" => Some((quant, false, Sort::Vertex)),
        "S" => Some((quant, true, Sort::Any)),
        "SV" => Some((quant, true, Sort::Vertex)),
        _ => None,
    }
}

fn syntax(pos: Pos, msg: impl Into<String>) -> ParseError {
    pos.error(ParseErrorKind::Syntax(msg.into()))
}

fn formula(ts: &mut Tokens) -> Result<Surface, ParseError> {
    if let Tok::Ident(w) = ts.peek() {
        if let Some((mut quant, set, sort)) = quantifier(w) {
            let pos = ts.pos();
            ts.next();
            if ts.eat(&Tok::Bang) {
                if !matches!(quant, Quant::Exists) || set || sort != Sort::Any {
                    return Err(syntax(pos, "`!` only follows an element `exists`"));
                }
                quant = Quant::Unique;
            }
            let mut vars = vec![ts.ident()?];
            while let Tok::Ident(_) = ts.peek() {
                vars.push(ts.ident()?);
            }
            for (v, p) in &vars {
                if is_set_name(v) != set {
                    let msg = if set {
                        format!("set variable `{v}` must start with an uppercase letter")
                    } else {
                        format!("element variable `{v}` must not start with an uppercase letter")
                    };
                    return Err(syntax(*p, msg));
                }
            }
            ts.expect(&Tok::Dot)?;
            let body = Box::new(formula(ts)?);
            return Ok(Surface::Quant {
                quant,
                set,
                sort,
                vars,
                body,
            });
        }
    }
    iff(ts)
}

fn iff(ts: &mut Tokens) -> Result<Surface, ParseError> {
    let mut left = implication(ts)?;
    while ts.eat(&Tok::Iff) {
        let right = implication(ts)?;
        left = Surface::Iff(Box::new(left), Box::new(right));
    }
    Ok(left)
}

fn implication(ts: &mut Tokens) -> Result<Surface, ParseError> {
    let left = disjunction(ts)?;
    if ts.eat(&Tok::Arrow) {
        let right = operand(ts, implication)?;
        return Ok(Surface::Implies(Box::new(left), Box::new(right)));
    }
    Ok(left)
}

/// A quantifier may open any operand and then extends to the right.
fn operand(
    ts: &mut Tokens,
    next: fn(&mut Tokens) -> Result<Surface, ParseError>,
) -> Result<Surface, ParseError> {
    match ts.peek() {
        Tok::Ident(w) if quantifier(w).is_some() => formula(ts),
        _ => next(ts),
    }
}

fn disjunction(ts: &mut Tokens) -> Result<Surface, ParseError> {
    let mut parts = vec![conjunction(ts)?];
    while ts.eat(&Tok::Pipe) {
        parts.push(operand(ts, conjunction)?);
    }
    Ok(if parts.len() == 1 {
        parts.pop().expect("one part")
    } else {
        Surface::Or(parts)
    })
}

fn conjunction(ts: &mut Tokens) -> Result<Surface, ParseError> {
    let mut parts = vec![unary(ts)?];
    while ts.eat(&Tok::Amp) {
        parts.push(operand(ts, unary)?);
    }
    Ok(if parts.len() == 1 {
        parts.pop().expect("one part")
    } else {
        Surface::And(parts)
    })
}

fn unary(ts: &mut Tokens) -> Result<Surface, ParseError> {
    if ts.eat(&Tok::Bang) {
        return Ok(Surface::Not(Box::new(operand(ts, unary)?)));
    }
    if ts.eat(&Tok::LParen) {
        let f = formula(ts)?;
        ts.expect(&Tok::RParen)?;
        return Ok(f);
    }
    if let Tok::Ident(w) = ts.peek() {
        if quantifier(w).is_some() {
            return formula(ts);
        }
    }
    let name = ts.ident()?;
    match name.0.as_str() {
        "true" => return Ok(Surface::Bool(true)),
        "false" => return Ok(Surface::Bool(false)),
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
        got => Err(syntax(
            ts.pos(),
            format!("expected `(`, `=` or `!=` after `{}`, found {got}", name.0),
        )),
    }
}

fn labels(ts: &mut Tokens, alphabet: &mut Alphabet) -> Result<(), ParseError> {
    loop {
        let (name, pos) = ts.ident()?;
        ts.expect(&Tok::Slash)?;
        let arity = ts.number()?;
        declare(alphabet, &name, arity, pos)?;
        if !ts.eat(&Tok::Comma) {
            return ts.expect(&Tok::Semi).map(|_| ());
        }
    }
}

fn declare(alphabet: &mut Alphabet, name: &str, arity: usize, pos: Pos) -> Result<(), ParseError> {
    if name == DISEQ {
        return Err(pos.error(ParseErrorKind::ReservedLabel));
    }
    if arity == 0 {
        return Err(syntax(
            pos,
            format!("label `{name}` needs a positive arity"),
        ));
    }
    match alphabet.arity(name) {
        Some(a) if a != arity => Err(pos.error(ParseErrorKind::Arity {
            symbol: name.into(),
            expected: a,
            found: arity,
        })),
        Some(_) => Ok(()),
        None => alphabet
            .insert(Label::new(name, arity))
            .map_err(|e| syntax(pos, e.to_string())),
    }
}

/// `incid_a_i` split into `a` and `i`.
fn incid_parts(name: &str) -> Option<(&str, &str)> {
    name.strip_prefix("incid_")?.rsplit_once('_')
}

const BUILTINS: [&str; 2] = ["single", "vert"];

/// Collects the arities of labels used in `s`, checking them against the
/// labels seen so far.
fn collect_labels(
    s: &Surface,
    macros: &BTreeMap<String, usize>,
    alphabet: &mut Alphabet,
    fixed: bool,
) -> Result<(), ParseError> {
    match s {
        Surface::Bool(_) | Surface::Eq(..) => Ok(()),
        Surface::Call {
            name: (name, pos),
            args,
        } => {
            if is_set_name(name)
                || BUILTINS.contains(&name.as_str())
                || macros.contains_key(name)
                || name.starts_with("incid_")
            {
                return Ok(());
            }
            let (label, arity) = match name.strip_prefix("edg_") {
                Some(l) if args.is_empty() => {
                    return Err(pos.error(ParseErrorKind::Arity {
                        symbol: name.clone(),
                        expected: alphabet.arity(l).map_or(2, |a| a + 1),
                        found: 0,
                    }))
                }
                Some(l) => (l, args.len() - 1),
                None => (name.as_str(), args.len()),
            };
            if fixed && !alphabet.contains(label) {
                return Err(pos.error(ParseErrorKind::UndeclaredSymbol(label.into())));
            }
            if let Some(expected) = alphabet.arity(label) {
                if expected != arity {
                    let shift = name.len() - label.len();
                    return Err(pos.error(ParseErrorKind::Arity {
                        symbol: name.clone(),
                        expected: expected + usize::from(shift > 0),
                        found: args.len(),
                    }));
                }
            }
            declare(alphabet, label, arity, *pos)
        }
        Surface::Not(p) => collect_labels(p, macros, alphabet, fixed),
        Surface::And(ps) | Surface::Or(ps) => ps
            .iter()
            .try_for_each(|p| collect_labels(p, macros, alphabet, fixed)),
        Surface::Implies(a, b) | Surface::Iff(a, b) => {
            collect_labels(a, macros, alphabet, fixed)?;
            collect_labels(b, macros, alphabet, fixed)
        }
        Surface::Quant { body, .. } => collect_labels(body, macros, alphabet, fixed),
    }
}

struct Lower<'a> {
    alphabet: &'a Alphabet,
    /// Lowered macros: parameters and body.
    macros: BTreeMap<String, (Vec<String>, MsoFormula)>,
    sets: Vec<String>,
}

impl Lower<'_> {
    fn set(&self, (v, pos): &Name) -> Result<String, ParseError> {
        if self.sets.contains(v) {
            Ok(v.clone())
        } else {
            Err(pos.error(ParseErrorKind::UnboundSetVariable(v.clone())))
        }
    }

    fn element(&self, (v, pos): &Name) -> Result<String, ParseError> {
        if is_set_name(v) {
            Err(syntax(
                *pos,
                format!("`{v}` is a set variable, an element is expected here"),
            ))
        } else {
            Ok(v.clone())
        }
    }

    fn arity_error(name: &Name, expected: usize, found: usize) -> ParseError {
        name.1.error(ParseErrorKind::Arity {
            symbol: name.0.clone(),
            expected,
            found,
        })
    }

    fn call(&self, name: &Name, args: &[Name]) -> Result<MsoFormula, ParseError> {
        let n = name.0.as_str();
        let elems = || {
            args.iter()
                .map(|a| self.element(a))
                .collect::<Result<Vec<_>, _>>()
        };
        if is_set_name(n) {
            let set = self.set(name)?;
            if args.len() != 1 {
                return Err(Self::arity_error(name, 1, args.len()));
            }
            return Ok(MsoFormula::member(&set, &self.element(&args[0])?));
        }
        if let Some((params, body)) = self.macros.get(n) {
            if params.len() != args.len() {
                return Err(Self::arity_error(name, params.len(), args.len()));
            }
            let mut map = BTreeMap::new();
            for (p, a) in params.iter().zip(args) {
                let value = if is_set_name(p) {
                    self.set(a)?
                } else {
                    self.element(a)?
                };
                map.insert(p.clone(), value);
            }
            return Ok(body.substitute(&map));
        }
        match n {
            "single" => {
                if args.len() != 1 {
                    return Err(Self::arity_error(name, 1, args.len()));
                }
                return Ok(MsoFormula::single(&self.set(&args[0])?));
            }
            "vert" => {
                if args.len() != 1 {
                    return Err(Self::arity_error(name, 1, args.len()));
                }
                return Ok(MsoFormula::vert(self.alphabet, &self.element(&args[0])?));
            }
            _ => {}
        }
        if let Some(rest) = n.strip_prefix("incid_") {
            let Some((label, i)) = incid_parts(n) else {
                return Err(syntax(
                    name.1,
                    format!("`{n}` should read incid_<label>_<position>"),
                ));
            };
            let arity = self
                .alphabet
                .arity(label)
                .ok_or_else(|| name.1.error(ParseErrorKind::UndeclaredSymbol(label.into())))?;
            let i: usize = i
                .parse()
                .ok()
                .filter(|i| (1..=arity).contains(i))
                .ok_or_else(|| {
                    syntax(name.1, format!("`{rest}` names no attachment of `{label}`"))
                })?;
            if args.len() != 2 {
                return Err(Self::arity_error(name, 2, args.len()));
            }
            let v = elems()?;
            return Ok(MsoFormula::incid(label, arity, i, &v[0], &v[1]));
        }
        let v = elems()?;
        let refs: Vec<&str> = v.iter().map(String::as_str).collect();
        Ok(match n.strip_prefix("edg_") {
            Some(label) => MsoFormula::edg(label, &refs),
            None => MsoFormula::rel(n, &refs),
        })
    }

    fn lower(&mut self, s: &Surface) -> Result<MsoFormula, ParseError> {
        Ok(match s {
            Surface::Bool(b) => MsoFormula::Bool(*b),
            Surface::Eq(x, y, neq) => {
                let eq = MsoFormula::eq(&self.element(x)?, &self.element(y)?);
                if *neq {
                    MsoFormula::not(eq)
                } else {
                    eq
                }
            }
            Surface::Call { name, args } => self.call(name, args)?,
            Surface::Not(p) => MsoFormula::not(self.lower(p)?),
            Surface::And(ps) => MsoFormula::and(
                ps.iter()
                    .map(|p| self.lower(p))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            Surface::Or(ps) => MsoFormula::or(
                ps.iter()
                    .map(|p| self.lower(p))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            Surface::Implies(a, b) => MsoFormula::implies(self.lower(a)?, self.lower(b)?),
            Surface::Iff(a, b) => MsoFormula::iff(self.lower(a)?, self.lower(b)?),
            Surface::Quant {
                quant,
                set,
                sort,
                vars,
                body,
            } => {
                let depth = self.sets.len();
                if *set {
                    self.sets.extend(vars.iter().map(|(v, _)| v.clone()));
                }
                let body = self.lower(body);
                self.sets.truncate(depth);
                let mut out = body?;
                for (v, _) in vars.iter().rev() {
                    out = quantify(*quant, *set, *sort, v, out);
                }
                out
            }
        })
    }
}

fn quantify(quant: Quant, set: bool, sort: Sort, var: &str, body: MsoFormula) -> MsoFormula {
    let exists = |body: MsoFormula| {
        let var = var.to_string();
        let body = Box::new(body);
        if set {
            MsoFormula::ExistsSet { var, sort, body }
        } else {
            MsoFormula::Exists { var, sort, body }
        }
    };
    match quant {
        Quant::Exists => exists(body),
        Quant::Forall => MsoFormula::not(exists(MsoFormula::not(body))),
        Quant::Unique => MsoFormula::exists_unique(var, body),
    }
}

/// A parsed `.mso` file: the formula with its macros expanded, and the
/// labels it is read against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MsoDocument {
    pub alphabet: Alphabet,
    pub formula: MsoFormula,
}

/// Reads a formula. Labels take the arities of their first use unless the
/// file declares an alphabet.
pub fn parse_mso(text: &str) -> Result<MsoFormula, ParseError> {
    parse_mso_in(text, &Alphabet::new()).map(|d| d.formula)
}

/// As [`parse_mso`], with `context` labels known in advance; `vert(x)`
/// ranges over the context labels together with the ones declared or used.
pub fn parse_mso_in(text: &str, context: &Alphabet) -> Result<MsoDocument, ParseError> {
    let mut ts = Tokens::new(text)?;
    let mut alphabet = context.clone();
    let mut fixed = false;
    if *ts.peek() == Tok::Ident("alphabet".into())
        && !matches!(ts.peek_at(1), Tok::LParen | Tok::Eq | Tok::Neq)
    {
        ts.next();
        labels(&mut ts, &mut alphabet)?;
        fixed = true;
    }
    let mut macros = Vec::new();
    while *ts.peek() == Tok::Ident("macro".into()) && matches!(ts.peek_at(1), Tok::Ident(_)) {
        ts.next();
        let name = ts.ident()?;
        if is_set_name(&name.0)
            || BUILTINS.contains(&name.0.as_str())
            || name.0.starts_with("edg_")
            || name.0.starts_with("incid_")
            || quantifier(&name.0).is_some()
        {
            return Err(syntax(name.1, format!("`{}` cannot name a macro", name.0)));
        }
        if macros.iter().any(|m: &Macro| m.name.0 == name.0) {
            return Err(syntax(
                name.1,
                format!("macro `{}` is defined twice", name.0),
            ));
        }
        ts.expect(&Tok::LParen)?;
        let params = ts.names_until_rparen()?;
        for (i, (p, pos)) in params.iter().enumerate() {
            if params[..i].iter().any(|(q, _)| q == p) {
                return Err(syntax(*pos, format!("parameter `{p}` is repeated")));
            }
        }
        ts.expect(&Tok::Define)?;
        let body = formula(&mut ts)?;
        ts.expect(&Tok::Semi)?;
        macros.push(Macro { name, params, body });
    }
    let main = formula(&mut ts)?;
    ts.eat(&Tok::Semi);
    if *ts.peek() != Tok::Eof {
        return Err(syntax(
            ts.pos(),
            format!("expected end of input, found {}", ts.peek()),
        ));
    }

    let mut names = BTreeMap::new();
    for m in &macros {
        collect_labels(&m.body, &names, &mut alphabet, fixed)?;
        names.insert(m.name.0.clone(), m.params.len());
    }
    collect_labels(&main, &names, &mut alphabet, fixed)?;

    let mut lower = Lower {
        alphabet: &alphabet,
        macros: BTreeMap::new(),
        sets: Vec::new(),
    };
    for m in &macros {
        lower.sets = m
            .params
            .iter()
            .filter(|(p, _)| is_set_name(p))
            .map(|(p, _)| p.clone())
            .collect();
        let body = lower.lower(&m.body)?;
        let params: Vec<String> = m.params.iter().map(|(p, _)| p.clone()).collect();
        if let Some(v) = body.free_vars().into_keys().find(|v| !params.contains(v)) {
            return Err(syntax(
                m.name.1,
                format!("macro `{}` mentions `{v}`, which is no parameter", m.name.0),
            ));
        }
        lower.macros.insert(m.name.0.clone(), (params, body));
    }
    lower.sets.clear();
    let formula = lower.lower(&main)?;
    Ok(MsoDocument { alphabet, formula })
}
