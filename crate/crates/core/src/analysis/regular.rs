//! Recognition of regular SIDs.
//!
//! A rule's shape decides the form it is checked against: a lone relation
//! atom over parameters is form 1, a body made only of predicate atoms over
//! exactly the head parameters (or `emp`) is form 3 or 4, anything else is
//! form 2. Productive predicates are those all of whose rules are of form 1
//! or 2.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::slr::{FlatBody, Rule, Sid, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    /// Form 1 rule whose head is not productive.
    Form1,
    /// Form 2 rule whose head is not productive.
    Form2,
    /// A predicate atom of a form 2 rule takes no existential.
    Form2a,
    /// Two variables of a form 2 rule are not linked by relation atoms.
    Form2b,
    Form3,
    Form4,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Form1 => "1",
            Condition::Form2 => "2",
            Condition::Form2a => "2(a)",
            Condition::Form2b => "2(b)",
            Condition::Form3 => "3",
            Condition::Form4 => "4",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: usize,
    pub condition: Condition,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rule {} violates condition {}: {}",
            self.rule, self.condition, self.detail
        )
    }
}

/// The form a rule of a regular SID takes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleForm {
    /// `Q(x̄) <= a(z̄)`.
    Atom,
    /// `Q(x̄) <= exists ȳ . ψ * P1(..) * .. * Pk(..)`.
    Productive,
    /// `P(x̄) <= P(x̄) * Q(x̄)`.
    Recursive { q: String },
    /// `P(x̄) <= Q1(x̄) * .. * Qℓ(x̄)`.
    Union { qs: Vec<String> },
}

impl RuleForm {
    pub fn is_productive(&self) -> bool {
        matches!(self, RuleForm::Atom | RuleForm::Productive)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularSid {
    pub productive: BTreeSet<String>,
    /// Form of every rule, by rule index.
    pub forms: Vec<RuleForm>,
}

impl RegularSid {
    pub fn is_productive_rule(&self, rule: usize) -> bool {
        self.forms[rule].is_productive()
    }

    /// Indices of the productive rules, ascending.
    pub fn productive_rules(&self) -> Vec<usize> {
        (0..self.forms.len())
            .filter(|&i| self.is_productive_rule(i))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Regularity {
    Regular(RegularSid),
    /// Violations sorted by rule index.
    NotRegular(Vec<Violation>),
}

impl Regularity {
    pub fn is_regular(&self) -> bool {
        matches!(self, Regularity::Regular(_))
    }
}

enum Shape {
    Atom,
    Preds,
    General,
}

fn shape(rule: &Rule, body: &FlatBody) -> Shape {
    let no_quant = body.existentials.is_empty() && body.pure.is_empty();
    if no_quant && body.rels.len() == 1 && body.preds.is_empty() {
        Shape::Atom
    } else if no_quant && body.rels.is_empty() && body.preds.iter().all(|a| a.args == rule.params) {
        Shape::Preds
    } else {
        Shape::General
    }
}

/// Variables of a form 2 rule not linked to the first one through relation
/// atoms that pairwise share a variable.
fn disconnected(rule: &Rule, body: &FlatBody) -> Option<(Var, Var)> {
    let vars: Vec<&Var> = rule.params.iter().chain(&body.existentials).collect();
    if vars.len() < 2 {
        return None;
    }
    let mut reached: BTreeSet<&Var> = BTreeSet::new();
    let mut used = alloc::vec![false; body.rels.len()];
    if let Some(first) = body.rels.iter().position(|a| a.args.contains(vars[0])) {
        used[first] = true;
        reached.extend(body.rels[first].args.iter());
        loop {
            let next = (0..body.rels.len())
                .find(|&i| !used[i] && body.rels[i].args.iter().any(|v| reached.contains(v)));
            let Some(i) = next else { break };
            used[i] = true;
            reached.extend(body.rels[i].args.iter());
        }
    }
    vars.iter()
        .find(|v| !reached.contains(**v))
        .map(|v| (vars[0].clone(), (*v).clone()))
}

/// Decides whether `sid` is regular, inferring its productive predicates.
pub fn check_regular(sid: &Sid) -> Regularity {
    let bodies: Vec<FlatBody> = sid.rules().iter().map(Rule::flat).collect();
    let shapes: Vec<Shape> = sid
        .rules()
        .iter()
        .zip(&bodies)
        .map(|(r, b)| shape(r, b))
        .collect();
    let mut kinds: BTreeMap<&str, (bool, bool)> = BTreeMap::new();
    for (r, s) in sid.rules().iter().zip(&shapes) {
        let k = kinds.entry(r.head.as_str()).or_default();
        match s {
            Shape::Preds => k.1 = true,
            _ => k.0 = true,
        }
    }
    let productive: BTreeSet<String> = kinds
        .iter()
        .filter(|(_, &(p, u))| p && !u)
        .map(|(n, _)| String::from(*n))
        .collect();

    let mut violations = Vec::new();
    let mut forms = Vec::new();
    let mut flag = |rule: usize, condition: Condition, detail: String| {
        violations.push(Violation {
            rule,
            condition,
            detail,
        })
    };
    for (i, ((rule, body), s)) in sid.rules().iter().zip(&bodies).zip(&shapes).enumerate() {
        let head_productive = productive.contains(&rule.head);
        match s {
            Shape::Atom => {
                if !head_productive {
                    flag(
                        i,
                        Condition::Form1,
                        alloc::format!("{} also has unproductive rules", rule.head),
                    );
                }
                forms.push(RuleForm::Atom);
            }
            Shape::General => {
                if !head_productive {
                    flag(
                        i,
                        Condition::Form2,
                        alloc::format!("{} also has unproductive rules", rule.head),
                    );
                }
                for a in &body.preds {
                    if !a.args.iter().any(|z| body.existentials.contains(z)) {
                        flag(
                            i,
                            Condition::Form2a,
                            alloc::format!("{} takes no existential", a.name),
                        );
                    }
                }
                if let Some((x, y)) = disconnected(rule, body) {
                    flag(
                        i,
                        Condition::Form2b,
                        alloc::format!("no relation atoms link {x} and {y}"),
                    );
                }
                forms.push(RuleForm::Productive);
            }
            Shape::Preds => {
                let names: Vec<&String> = body.preds.iter().map(|a| &a.name).collect();
                if names.contains(&&rule.head) {
                    let others: Vec<&String> =
                        names.iter().copied().filter(|n| **n != rule.head).collect();
                    if names.len() != 2 || others.len() != 1 {
                        flag(
                            i,
                            Condition::Form3,
                            "expected exactly one recursive and one productive atom".into(),
                        );
                    } else if !productive.contains(others[0]) {
                        flag(
                            i,
                            Condition::Form3,
                            alloc::format!("{} is not productive", others[0]),
                        );
                    }
                    forms.push(RuleForm::Recursive {
                        q: others.first().map(|s| (*s).clone()).unwrap_or_default(),
                    });
                } else {
                    if let Some(q) = names.iter().find(|n| !productive.contains(**n)) {
                        flag(i, Condition::Form4, alloc::format!("{q} is not productive"));
                    }
                    forms.push(RuleForm::Union {
                        qs: names.into_iter().cloned().collect(),
                    });
                }
            }
        }
    }
    if violations.is_empty() {
        Regularity::Regular(RegularSid { productive, forms })
    } else {
        Regularity::NotRegular(violations)
    }
}
