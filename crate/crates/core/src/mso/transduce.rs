use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::eval::{Compiled, Evaluator, MSO_SET_LIMIT};
use super::formula::{MsoFormula, Sort, VarKind};
use super::MsoError;
use crate::graph::{Alphabet, CGraph, IsoSet, Label};

/// Index of an edge formula: output label, layer of the edge, then the layer
/// of each attached vertex. Layers count from 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeSlot {
    pub label: String,
    pub layers: Vec<usize>,
}

impl EdgeSlot {
    pub fn new(label: &str, layers: &[usize]) -> Self {
        EdgeSlot {
            label: label.into(),
            layers: layers.to_vec(),
        }
    }
}

/// A `k`-copying transduction with set parameters.
///
/// Layer formulas have the free variable `x1`; the formula of an edge slot
/// for a label of arity `n` has `x1` (the edge) and `x2..x{n+1}` (the
/// attached vertices). All may use the parameters. Slots without a formula
/// are false.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransductionScheme {
    pub input: Alphabet,
    pub output: Alphabet,
    pub copies: usize,
    pub parameters: Vec<String>,
    pub domain: MsoFormula,
    pub layers: Vec<MsoFormula>,
    pub edges: BTreeMap<EdgeSlot, MsoFormula>,
}

fn xs(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

impl TransductionScheme {
    /// Copies every element once and every edge with its label.
    pub fn identity(alphabet: &Alphabet) -> Self {
        let edges = alphabet
            .labels()
            .map(|l| {
                let args = xs(l.arity + 1);
                let refs: Vec<&str> = args.iter().map(String::as_str).collect();
                (
                    EdgeSlot::new(&l.name, &vec![1; l.arity + 1]),
                    MsoFormula::edg(&l.name, &refs),
                )
            })
            .collect();
        TransductionScheme {
            input: alphabet.clone(),
            output: alphabet.clone(),
            copies: 1,
            parameters: Vec::new(),
            domain: MsoFormula::tt(),
            layers: vec![MsoFormula::tt()],
            edges,
        }
    }

    pub fn validate(&self) -> Result<(), MsoError> {
        let bad = |m: String| Err(MsoError::InvalidScheme(m));
        if self.copies == 0 || self.layers.len() != self.copies {
            return bad(format!(
                "{} layer formulas for {} copies",
                self.layers.len(),
                self.copies
            ));
        }
        let check = |phi: &MsoFormula, firsts: &[String], what: &str| -> Result<(), MsoError> {
            phi.check(&self.input)?;
            for (v, kind) in phi.free_vars() {
                let ok = match kind {
                    VarKind::First => firsts.contains(&v),
                    VarKind::Second => self.parameters.contains(&v),
                };
                if !ok {
                    return bad(format!("{what} has free variable `{v}`"));
                }
            }
            Ok(())
        };
        check(&self.domain, &[], "the domain formula")?;
        for (i, psi) in self.layers.iter().enumerate() {
            check(psi, &xs(1), &format!("layer {}", i + 1))?;
        }
        for (slot, theta) in &self.edges {
            let Some(ar) = self.output.arity(&slot.label) else {
                return Err(MsoError::UnknownLabel(slot.label.clone()));
            };
            if slot.layers.len() != ar + 1 || slot.layers.iter().any(|&l| l == 0 || l > self.copies)
            {
                return bad(format!(
                    "edge slot {} {:?} does not fit",
                    slot.label, slot.layers
                ));
            }
            check(
                theta,
                &xs(ar + 1),
                &format!("edge slot {} {:?}", slot.label, slot.layers),
            )?;
        }
        Ok(())
    }
}

/// Splits a formula into conjuncts, pushing universal quantifiers inside
/// conjunctions.
fn conjuncts(phi: &MsoFormula) -> Vec<MsoFormula> {
    match phi {
        MsoFormula::And(ps) => ps.iter().flat_map(conjuncts).collect(),
        MsoFormula::Not(inner) => match &**inner {
            MsoFormula::Exists { var, sort, body } => match &**body {
                MsoFormula::Not(b) => conjuncts(b)
                    .into_iter()
                    .map(|c| forall_sorted(var, *sort, c))
                    .collect(),
                _ => vec![phi.clone()],
            },
            _ => vec![phi.clone()],
        },
        other => vec![other.clone()],
    }
}

fn forall_sorted(var: &str, sort: Sort, body: MsoFormula) -> MsoFormula {
    MsoFormula::not(MsoFormula::Exists {
        var: var.into(),
        sort,
        body: alloc::boxed::Box::new(MsoFormula::not(body)),
    })
}

struct Application<'g> {
    ev: Evaluator<'g>,
    g: &'g CGraph,
    nparams: usize,
    /// Domain conjuncts, grouped by the last parameter they mention.
    checks: Vec<Vec<Compiled>>,
    layers: Vec<Compiled>,
    edges: Vec<(EdgeSlot, Compiled)>,
    output: &'g Alphabet,
}

impl Application<'_> {
    fn holds(&mut self, c: &Compiled, env: &mut [u64]) -> bool {
        self.ev.run(c, env)
    }

    /// Every parameter valuation satisfying the domain formula, one
    /// parameter at a time.
    fn valuations(&mut self, i: usize, env: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if i == self.nparams {
            out.push(env[..self.nparams].to_vec());
            return;
        }
        let n = self.g.vertex_count() + self.g.edge_count();
        let checks = core::mem::take(&mut self.checks[i + 1]);
        for set in 0u64..1 << n {
            env[i] = set;
            if checks.iter().all(|c| {
                let mut local = self.ev.env(c);
                local[..=i].copy_from_slice(&env[..=i]);
                self.holds(c, &mut local)
            }) {
                self.valuations(i + 1, env, out);
            }
        }
        self.checks[i + 1] = checks;
    }

    fn element_name(&self, id: usize) -> &str {
        let nv = self.g.vertex_count();
        if id < nv {
            &self.g.vertices()[id]
        } else {
            &self.g.edges()[id - nv].id
        }
    }

    fn output(&mut self, params: &[u64]) -> Result<CGraph, MsoError> {
        let nv = self.g.vertex_count();
        let ne = self.g.edge_count();
        let k = self.layers.len();
        // in_layer[i][id]
        let mut in_layer = vec![vec![false; nv + ne]; k];
        let layers = core::mem::take(&mut self.layers);
        for (row, psi) in in_layer.iter_mut().zip(&layers) {
            for (id, slot) in row.iter_mut().enumerate() {
                let mut env = self.ev.env(psi);
                env[..self.nparams].copy_from_slice(params);
                env[self.nparams] = id as u64;
                *slot = self.holds(psi, &mut env);
            }
        }
        self.layers = layers;
        let mut h = CGraph::new();
        let mut index = BTreeMap::new();
        for (i, row) in in_layer.iter().enumerate() {
            for v in (0..nv).filter(|&v| row[v]) {
                let name = format!("{}/{}", self.element_name(v), i + 1);
                index.insert((v, i + 1), h.add_vertex(name)?);
            }
        }
        let edges = core::mem::take(&mut self.edges);
        let result = (|| {
            for (i, row) in in_layer.iter().enumerate() {
                for e in (0..ne).filter(|&e| row[nv + e]) {
                    let id = format!("{}/{}", self.element_name(nv + e), i + 1);
                    let mut found: Vec<(&EdgeSlot, Vec<usize>)> = Vec::new();
                    for (slot, theta) in edges.iter().filter(|(s, _)| s.layers[0] == i + 1) {
                        let ar = slot.layers.len() - 1;
                        let mut tuple = vec![0usize; ar];
                        loop {
                            let mut env = self.ev.env(theta);
                            env[..self.nparams].copy_from_slice(params);
                            env[self.nparams] = (nv + e) as u64;
                            for (j, &v) in tuple.iter().enumerate() {
                                env[self.nparams + 1 + j] = v as u64;
                            }
                            if self.holds(theta, &mut env) {
                                found.push((slot, tuple.clone()));
                            }
                            if !next_tuple(&mut tuple, nv) {
                                break;
                            }
                        }
                    }
                    let (slot, tuple) = match found.len() {
                        1 => found.pop().expect("one"),
                        0 => {
                            return Err(MsoError::NonFunctionalScheme {
                                edge: id,
                                reason: "no edge formula holds".into(),
                            })
                        }
                        _ => {
                            return Err(MsoError::NonFunctionalScheme {
                                edge: id,
                                reason: format!("{} edge formulas hold", found.len()),
                            })
                        }
                    };
                    let attach = tuple
                        .iter()
                        .zip(&slot.layers[1..])
                        .map(|(&v, &l)| {
                            index.get(&(v, l)).copied().ok_or_else(|| {
                                MsoError::NonFunctionalScheme {
                                    edge: id.clone(),
                                    reason: format!(
                                        "vertex {}/{l} is not in the output",
                                        self.element_name(v)
                                    ),
                                }
                            })
                        })
                        .collect::<Result<Vec<usize>, _>>()?;
                    let arity = self.output.arity(&slot.label).expect("validated");
                    h.add_edge(id, Label::new(slot.label.clone(), arity), attach)?;
                }
            }
            Ok(())
        })();
        self.edges = edges;
        result?;
        let sources = self
            .g
            .sources()
            .iter()
            .map(|&s| {
                index
                    .get(&(s, 1))
                    .copied()
                    .ok_or_else(|| MsoError::SourceNotCopied(self.g.vertices()[s].clone()))
            })
            .collect::<Result<Vec<usize>, _>>()?;
        h.set_sources(sources)?;
        Ok(h)
    }
}

fn next_tuple(t: &mut [usize], n: usize) -> bool {
    for x in t.iter_mut().rev() {
        *x += 1;
        if *x < n {
            return true;
        }
        *x = 0;
    }
    false
}

/// The outputs of `theta` on `g`, one per parameter valuation satisfying
/// the domain formula, up to isomorphism.
pub fn apply_transduction(theta: &TransductionScheme, g: &CGraph) -> Result<IsoSet, MsoError> {
    theta.validate()?;
    for e in g.edges() {
        if theta.input.arity(&e.label.name) != Some(e.label.arity) {
            return Err(MsoError::AlphabetMismatch(e.label.name.clone()));
        }
    }
    let n = g.vertex_count() + g.edge_count();
    if !theta.parameters.is_empty() && n > MSO_SET_LIMIT {
        return Err(MsoError::TooLarge {
            size: n,
            limit: MSO_SET_LIMIT,
        });
    }
    let ev = Evaluator::new(g);
    let params = &theta.parameters;
    let np = params.len();
    let mut checks: Vec<Vec<Compiled>> = (0..=np).map(|_| Vec::new()).collect();
    for c in conjuncts(&theta.domain) {
        let free = c.free_vars();
        let last = params
            .iter()
            .rposition(|p| free.contains_key(p))
            .map_or(0, |i| i + 1);
        checks[last].push(ev.compile(&c, params)?);
    }
    let with =
        |extra: Vec<String>| -> Vec<String> { params.iter().cloned().chain(extra).collect() };
    let layers = theta
        .layers
        .iter()
        .map(|psi| ev.compile(psi, &with(xs(1))))
        .collect::<Result<Vec<_>, _>>()?;
    let edges = theta
        .edges
        .iter()
        .map(|(slot, f)| Ok((slot.clone(), ev.compile(f, &with(xs(slot.layers.len())))?)))
        .collect::<Result<Vec<_>, MsoError>>()?;
    let mut app = Application {
        ev,
        g,
        nparams: np,
        checks,
        layers,
        edges,
        output: &theta.output,
    };
    let closed = core::mem::take(&mut app.checks[0]);
    let mut out = IsoSet::new();
    for c in &closed {
        let mut env = app.ev.env(c);
        if !app.holds(c, &mut env) {
            return Ok(out);
        }
    }
    let mut valuations = Vec::new();
    let mut env = vec![0u64; np];
    app.valuations(0, &mut env, &mut valuations);
    for v in valuations {
        out.insert(app.output(&v)?);
    }
    Ok(out)
}

/// Name of the parameter holding the `a`-edges whose `i`-th attachment is
/// redirected to the first copy.
pub fn fission_parameter(label: &str, i: usize) -> String {
    format!("X_{label}_{i}")
}

/// The 2-copying scheme splitting one vertex `u` (parameter `X1`) in two:
/// `a`-edges in `X_a_i` keep their `i`-th attachment at the first copy of
/// `u`, the others move it to the second.
pub fn fission_scheme(alphabet: &Alphabet) -> TransductionScheme {
    let labels: Vec<Label> = alphabet.labels().collect();
    let mut parameters = vec!["X1".to_string()];
    let mut guards = Vec::new();
    for l in &labels {
        for i in 1..=l.arity {
            let p = fission_parameter(&l.name, i);
            guards.push(MsoFormula::implies(
                MsoFormula::member(&p, "x"),
                MsoFormula::exists(
                    "y",
                    MsoFormula::and([
                        MsoFormula::member("X1", "y"),
                        MsoFormula::incid(&l.name, l.arity, i, "x", "y"),
                    ]),
                ),
            ));
            parameters.push(p);
        }
    }
    let domain = MsoFormula::and([
        MsoFormula::single("X1"),
        MsoFormula::forall(
            "x",
            MsoFormula::implies(
                MsoFormula::member("X1", "x"),
                MsoFormula::vert(alphabet, "x"),
            ),
        ),
        MsoFormula::forall("x", MsoFormula::and(guards)),
    ]);
    let mut edges = BTreeMap::new();
    for l in &labels {
        let args = xs(l.arity + 1);
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        for choice in 0u32..1 << l.arity {
            let mut layers = vec![1];
            let mut parts = vec![MsoFormula::edg(&l.name, &refs)];
            for k in 2..=l.arity + 1 {
                let x = &args[k - 1];
                let moved = MsoFormula::member(&fission_parameter(&l.name, k - 1), "x1");
                if choice >> (k - 2) & 1 == 0 {
                    layers.push(1);
                    parts.push(MsoFormula::implies(MsoFormula::member("X1", x), moved));
                } else {
                    layers.push(2);
                    parts.push(MsoFormula::and([
                        MsoFormula::member("X1", x),
                        MsoFormula::not(moved),
                    ]));
                }
            }
            edges.insert(EdgeSlot::new(&l.name, &layers), MsoFormula::and(parts));
        }
    }
    TransductionScheme {
        input: alphabet.clone(),
        output: alphabet.clone(),
        copies: 2,
        parameters,
        domain,
        layers: vec![MsoFormula::tt(), MsoFormula::member("X1", "x1")],
        edges,
    }
}
