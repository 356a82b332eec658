use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::{FlatBody, SlrError, SlrFormula, Var};
use crate::graph::{Alphabet, DISEQ};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub head: String,
    pub params: Vec<Var>,
    pub body: SlrFormula,
}

impl Rule {
    pub fn new(head: &str, params: &[&str], body: SlrFormula) -> Self {
        Rule {
            head: head.into(),
            params: params.iter().map(|&p| p.into()).collect(),
            body,
        }
    }

    pub fn flat(&self) -> FlatBody {
        FlatBody::of(&self.body, &self.params)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}({}) <= {}",
            self.head,
            self.params.join(","),
            self.body
        )
    }
}

/// A system of inductive definitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sid {
    alphabet: Alphabet,
    predicates: BTreeMap<String, usize>,
    rules: Vec<Rule>,
}

impl Sid {
    /// Validates and builds a SID; predicates are the rule heads plus `extra`.
    pub fn new(alphabet: Alphabet, rules: Vec<Rule>) -> Result<Sid, SlrError> {
        Self::with_predicates(alphabet, &[], rules)
    }

    pub fn with_predicates(
        alphabet: Alphabet,
        extra: &[(&str, usize)],
        rules: Vec<Rule>,
    ) -> Result<Sid, SlrError> {
        if alphabet.contains(DISEQ) {
            return Err(SlrError::ReservedLabel);
        }
        let mut predicates: BTreeMap<String, usize> = BTreeMap::new();
        for (name, ar) in extra
            .iter()
            .map(|&(n, a)| (String::from(n), a))
            .chain(rules.iter().map(|r| (r.head.clone(), r.params.len())))
        {
            if alphabet.contains(&name) {
                return Err(SlrError::NameClash(name));
            }
            match predicates.get(&name) {
                Some(&a) if a != ar => {
                    return Err(SlrError::Arity {
                        symbol: name,
                        expected: a,
                        found: ar,
                    })
                }
                _ => {
                    predicates.insert(name, ar);
                }
            }
        }
        let sid = Sid {
            alphabet,
            predicates,
            rules,
        };
        for (i, r) in sid.rules.iter().enumerate() {
            let distinct: BTreeSet<&Var> = r.params.iter().collect();
            if distinct.len() != r.params.len() {
                return Err(SlrError::DuplicateParameter { rule: i });
            }
            if let Some(v) = r
                .body
                .free_vars()
                .into_iter()
                .find(|v| !r.params.contains(v))
            {
                return Err(SlrError::FreeVariable { rule: i, var: v });
            }
            sid.check_formula(&r.body)?;
        }
        Ok(sid)
    }

    /// Checks relation and predicate atoms against the alphabet and predicates.
    pub fn check_formula(&self, phi: &SlrFormula) -> Result<(), SlrError> {
        match phi {
            SlrFormula::Rel { label, args } => match self.alphabet.arity(label) {
                None => Err(SlrError::UndeclaredSymbol(label.clone())),
                Some(a) if a != args.len() => Err(SlrError::Arity {
                    symbol: label.clone(),
                    expected: a,
                    found: args.len(),
                }),
                _ => Ok(()),
            },
            SlrFormula::Pred { name, args } => match self.predicates.get(name) {
                None => Err(SlrError::UndeclaredSymbol(name.clone())),
                Some(&a) if a != args.len() => Err(SlrError::Arity {
                    symbol: name.clone(),
                    expected: a,
                    found: args.len(),
                }),
                _ => Ok(()),
            },
            SlrFormula::Sep(parts) => parts.iter().try_for_each(|p| self.check_formula(p)),
            SlrFormula::Exists(_, body) => self.check_formula(body),
            _ => Ok(()),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn predicates(&self) -> &BTreeMap<String, usize> {
        &self.predicates
    }

    pub fn arity(&self, pred: &str) -> Option<usize> {
        self.predicates.get(pred).copied()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Indices of the rules defining `pred`.
    pub fn rules_of<'a>(&'a self, pred: &'a str) -> impl Iterator<Item = usize> + 'a {
        self.rules
            .iter()
            .enumerate()
            .filter(move |(_, r)| r.head == pred)
            .map(|(i, _)| i)
    }

    /// Predicates reachable from `root` through rule bodies, including `root`.
    pub fn reachable(&self, root: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut stack = alloc::vec![String::from(root)];
        while let Some(p) = stack.pop() {
            if !seen.insert(p.clone()) {
                continue;
            }
            for i in self.rules_of(&p) {
                for a in self.rules[i].flat().preds {
                    stack.push(a.name);
                }
            }
        }
        seen
    }

    /// The SID restricted to the given predicates' rules.
    pub fn restricted(&self, preds: &BTreeSet<String>) -> Sid {
        Sid {
            alphabet: self.alphabet.clone(),
            predicates: self
                .predicates
                .iter()
                .filter(|(p, _)| preds.contains(*p))
                .map(|(p, &a)| (p.clone(), a))
                .collect(),
            rules: self
                .rules
                .iter()
                .filter(|r| preds.contains(&r.head))
                .cloned()
                .collect(),
        }
    }
}

impl fmt::Display for Sid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self
            .alphabet
            .labels()
            .map(|l| alloc::format!("{}/{}", l.name, l.arity))
            .collect();
        if !labels.is_empty() {
            writeln!(f, "alphabet {} ;", labels.join(", "))?;
        }
        for r in &self.rules {
            writeln!(f, "{r} ;")?;
        }
        Ok(())
    }
}
