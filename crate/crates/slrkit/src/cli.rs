//! The `slrkit` command line. Exit code 0 is a positive verdict or success,
//! 1 a negative verdict, 2 a usage or input error.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use slrkit_core::analysis::{
    check_regular, check_rigid, entails_between, model_cutoff, models_in_order, treewidth_bound,
    AnalysisError, Entailment, Regularity, RuleForm, MODEL_VERTEX_LIMIT,
};
use slrkit_core::grammar::{
    enumerate_parse_trees, enumerate_parse_trees_within, rich_canonical_model, GrammarError,
    ParseTree,
};
use slrkit_core::graph::{fission_k, fusion_k, project, CGraph, IsoSet};
use slrkit_core::mso::{mso_eval, MsoError, MsoStore};
use slrkit_core::slr::{equality_eliminate, is_equality_free, Sid};

use crate::dot::graph_to_dot;
use crate::json::{GraphJson, JsonError, TreeJson};
use crate::{parse_mso_in, parse_sid, write_sid, ParseError};

/// Largest tree size `parse-trees` searches when fewer trees exist.
pub const PARSE_TREE_EDGE_CAP: usize = 24;

pub const DEFAULT_MAX_VERTICES: usize = 4;
pub const DEFAULT_MAX_TREES: usize = 20;

#[derive(Parser, Debug)]
#[command(
    name = "slrkit",
    version,
    about = "Analyses of inductive definitions in the separation logic of relations"
)]
pub struct Cli {
    /// Output format; `dot` applies to commands that print graphs.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Projected canonical models of parse trees.
    Canonical,
    /// Every model, canonical models with their fusions.
    Full,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether the SID is regular and list its productive predicates.
    CheckRegular {
        sid: PathBuf,
        /// Restrict to the rules reachable from this predicate.
        #[arg(long)]
        pred: Option<String>,
    },
    /// Decide whether the SID is rigid for a nullary predicate.
    CheckRigid {
        sid: PathBuf,
        #[arg(long)]
        pred: Option<String>,
    },
    /// Tree-width bound of the models of a rigid SID.
    Bounds {
        sid: PathBuf,
        #[arg(long)]
        pred: Option<String>,
    },
    /// Enumerate models of a nullary predicate.
    Models {
        sid: PathBuf,
        #[arg(value_enum, default_value_t = Mode::Canonical)]
        mode: Mode,
        #[arg(long)]
        pred: Option<String>,
        #[arg(long, default_value_t = DEFAULT_MAX_VERTICES)]
        max_vertices: usize,
        /// Most parse trees listed in canonical mode.
        #[arg(long, default_value_t = DEFAULT_MAX_TREES)]
        max_trees: usize,
    },
    /// Search for a model of `--lhs` that is no model of `--rhs`.
    Entail {
        sid: PathBuf,
        /// SID defining `--rhs`, when it differs from the first.
        rhs_sid: Option<PathBuf>,
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
        #[arg(long, default_value_t = DEFAULT_MAX_VERTICES)]
        max_vertices: usize,
        /// Unfolding budget of the model checker; defaults to a complete one.
        #[arg(long)]
        fuel: Option<u32>,
    },
    /// Evaluate an MSO sentence on a graph.
    MsoEval {
        graph: PathBuf,
        formula: PathBuf,
        /// Read the sentence over vertices only, as an MSO1 sentence.
        #[arg(long)]
        mso1: bool,
    },
    /// Graphs whose `k`-generated fusions include the input.
    Fission {
        graph: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// The `k`-generated fusions of a graph.
    Fusion {
        graph: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// List the smallest parse trees of a predicate.
    ParseTrees {
        sid: PathBuf,
        #[arg(long)]
        pred: Option<String>,
        #[arg(long, default_value_t = DEFAULT_MAX_TREES)]
        max_trees: usize,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}: {source}")]
    Json { path: String, source: JsonError },
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Mso(#[from] MsoError),
    #[error("{0}")]
    Usage(String),
}

/// What a run prints and how it exits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Serialize)]
struct Header {
    command: &'static str,
    inputs: Vec<String>,
    options: Options,
}

#[derive(Default, Serialize)]
struct Options {
    #[serde(skip_serializing_if = "Option::is_none")]
    pred: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_vertices: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_trees: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_edges: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fuel: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mso1: Option<bool>,
}

impl Options {
    fn text(&self) -> String {
        let mut parts = Vec::new();
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                parts.push(format!("{k}={v}"));
            }
        };
        push("pred", self.pred.clone());
        push("lhs", self.lhs.clone());
        push("rhs", self.rhs.clone());
        push("mode", self.mode.map(|m| format!("{m:?}").to_lowercase()));
        push("max-vertices", self.max_vertices.map(|n| n.to_string()));
        push("max-trees", self.max_trees.map(|n| n.to_string()));
        push("max-edges", self.max_edges.map(|n| n.to_string()));
        push("k", self.k.map(|n| n.to_string()));
        push("fuel", self.fuel.clone());
        push("mso1", self.mso1.map(|b| b.to_string()));
        parts.join(" ")
    }
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    #[serde(flatten)]
    header: &'a Header,
    verdict: &'static str,
    result: T,
}

/// A finished command: its verdict and its renderings.
struct Done {
    positive: bool,
    json: String,
    text: String,
    dot: Option<String>,
}

fn done<T: Serialize>(
    header: &Header,
    positive: bool,
    verdict: &'static str,
    result: T,
    body: String,
) -> Done {
    let json = serde_json::to_string_pretty(&Report {
        header,
        verdict,
        result,
    })
    .expect("reports serialize")
        + "\n";
    let mut text = format!(
        "# slrkit {}\n# inputs: {}\n",
        header.command,
        header.inputs.join(" ")
    );
    let opts = header.options.text();
    if !opts.is_empty() {
        writeln!(text, "# options: {opts}").expect("writing to a string");
    }
    text.push_str(&body);
    Done {
        positive,
        json,
        text,
        dot: None,
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_sid(path: &Path) -> Result<Sid, CliError> {
    parse_sid(&read(path)?).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

fn load_graph(path: &Path) -> Result<CGraph, CliError> {
    crate::json::graph_from_json(&read(path)?).map_err(|source| CliError::Json {
        path: path.display().to_string(),
        source,
    })
}

/// The given predicate, or the only nullary predicate of the SID.
fn root(sid: &Sid, pred: Option<String>) -> Result<String, CliError> {
    if let Some(p) = pred {
        return match sid.arity(&p) {
            Some(_) => Ok(p),
            None => Err(CliError::Usage(format!("unknown predicate `{p}`"))),
        };
    }
    let nullary: Vec<&String> = sid
        .predicates()
        .iter()
        .filter(|(_, &a)| a == 0)
        .map(|(p, _)| p)
        .collect();
    match nullary.as_slice() {
        [p] => Ok((*p).clone()),
        _ => Err(CliError::Usage(
            "the SID has no single nullary predicate; pass --pred".into(),
        )),
    }
}

/// `sid` without equalities, and whether they had to be removed.
fn equality_free(sid: &Sid) -> (Sid, bool) {
    if is_equality_free(sid) {
        (sid.clone(), false)
    } else {
        (equality_eliminate(sid), true)
    }
}

fn graph_text(g: &CGraph) -> String {
    let name = |v: &usize| g.vertices()[*v].as_str();
    let edges: Vec<String> = g
        .edges()
        .iter()
        .map(|e| {
            format!(
                "{}({})",
                e.label.name,
                e.attach.iter().map(name).collect::<Vec<_>>().join(",")
            )
        })
        .collect();
    let mut out = format!("{} vertices: {}", g.vertex_count(), g.vertices().join(" "));
    if !edges.is_empty() {
        write!(out, " | {}", edges.join(" * ")).expect("writing to a string");
    }
    if g.type_n() > 0 {
        let sources: Vec<&str> = g.sources().iter().map(name).collect();
        write!(out, " | sources {}", sources.join(" ")).expect("writing to a string");
    }
    out
}

fn graphs_dot(graphs: &[CGraph]) -> String {
    graphs
        .iter()
        .enumerate()
        .map(|(i, g)| graph_to_dot(g, &format!("g{i}")))
        .collect()
}

fn rules_text(sid: &Sid) -> String {
    sid.rules()
        .iter()
        .enumerate()
        .map(|(i, r)| format!("  {i}: {r}\n"))
        .collect()
}

#[derive(Serialize)]
struct RuleReport {
    rule: usize,
    text: String,
    form: String,
}

#[derive(Serialize)]
struct ViolationReport {
    rule: usize,
    condition: String,
    detail: String,
}

#[derive(Serialize)]
struct RegularReport {
    regular: bool,
    productive: Vec<String>,
    rules: Vec<RuleReport>,
    violations: Vec<ViolationReport>,
}

fn form_text(f: &RuleForm) -> String {
    match f {
        RuleForm::Atom => "atom".into(),
        RuleForm::Productive => "productive".into(),
        RuleForm::Recursive { q } => format!("unproductive, calls {q}"),
        RuleForm::Union { qs } => format!("unproductive, union of {}", qs.join(", ")),
    }
}

fn check_regular_cmd(
    header: &mut Header,
    sid: PathBuf,
    pred: Option<String>,
) -> Result<Done, CliError> {
    let full = load_sid(&sid)?;
    let (sid, numbers): (Sid, Vec<usize>) = match &pred {
        Some(p) => {
            root(&full, Some(p.clone()))?;
            let preds = full.reachable(p);
            let numbers = (0..full.rules().len())
                .filter(|&i| preds.contains(&full.rules()[i].head))
                .collect();
            (full.restricted(&preds), numbers)
        }
        None => (full.clone(), (0..full.rules().len()).collect()),
    };
    header.options.pred = pred;
    let mut body = String::new();
    let report = match check_regular(&sid) {
        Regularity::Regular(reg) => {
            let productive: Vec<String> = reg.productive.iter().cloned().collect();
            writeln!(body, "regular\nQ = {{{}}}", productive.join(", "))
                .expect("writing to a string");
            let rules: Vec<RuleReport> = reg
                .forms
                .iter()
                .enumerate()
                .map(|(i, f)| RuleReport {
                    rule: numbers[i],
                    text: sid.rules()[i].to_string(),
                    form: form_text(f),
                })
                .collect();
            for r in &rules {
                writeln!(body, "  {}: {}  [{}]", r.rule, r.text, r.form)
                    .expect("writing to a string");
            }
            RegularReport {
                regular: true,
                productive,
                rules,
                violations: Vec::new(),
            }
        }
        Regularity::NotRegular(vs) => {
            body.push_str("not regular\n");
            let violations: Vec<ViolationReport> = vs
                .iter()
                .map(|v| ViolationReport {
                    rule: numbers[v.rule],
                    condition: v.condition.to_string(),
                    detail: v.detail.clone(),
                })
                .collect();
            for v in &violations {
                writeln!(
                    body,
                    "  rule {} violates condition {}: {}",
                    v.rule, v.condition, v.detail
                )
                .expect("writing to a string");
            }
            RegularReport {
                regular: false,
                productive: Vec::new(),
                rules: Vec::new(),
                violations,
            }
        }
    };
    let positive = report.regular;
    Ok(done(
        header,
        positive,
        if positive { "regular" } else { "not-regular" },
        report,
        body,
    ))
}

#[derive(Serialize)]
struct RigidReport {
    rigid: bool,
    /// Set when the rules below are those of the equality-free SID.
    equality_eliminated: Option<String>,
    pumping_pairs: Vec<(usize, usize)>,
    violations: Vec<RigidViolationReport>,
    colorings: BTreeMap<usize, BTreeMap<String, BTreeSet<String>>>,
}

#[derive(Serialize)]
struct RigidViolationReport {
    rule1: usize,
    rule2: usize,
    y1: String,
    y2: String,
}

fn eliminated_note(sid: &Sid, body: &mut String) -> Option<String> {
    body.push_str("equalities eliminated; rule numbers refer to\n");
    body.push_str(&rules_text(sid));
    Some(write_sid(sid))
}

fn check_rigid_cmd(
    header: &mut Header,
    path: PathBuf,
    pred: Option<String>,
) -> Result<Done, CliError> {
    let sid = load_sid(&path)?;
    let pred = root(&sid, pred)?;
    header.options.pred = Some(pred.clone());
    let (sid, eliminated) = equality_free(&sid);
    let r = check_rigid(&sid, &pred)?;
    let mut body = String::new();
    body.push_str(if r.rigid { "rigid\n" } else { "not rigid\n" });
    let equality_eliminated = if eliminated {
        eliminated_note(&sid, &mut body)
    } else {
        None
    };
    let pairs: Vec<String> = r
        .pumping_pairs
        .iter()
        .map(|(a, b)| {
            if a == b {
                format!("{{{a}}}")
            } else {
                format!("{{{a},{b}}}")
            }
        })
        .collect();
    writeln!(
        body,
        "pumping sets: {}",
        if pairs.is_empty() {
            "none".into()
        } else {
            pairs.join(" ")
        }
    )
    .expect("writing to a string");
    for v in &r.violations {
        writeln!(
            body,
            "  {} of rule {} and {} of rule {} share no color",
            v.y1, v.rule1, v.y2, v.rule2
        )
        .expect("writing to a string");
    }
    let report = RigidReport {
        rigid: r.rigid,
        equality_eliminated,
        pumping_pairs: r.pumping_pairs.clone(),
        violations: r
            .violations
            .iter()
            .map(|v| RigidViolationReport {
                rule1: v.rule1,
                rule2: v.rule2,
                y1: v.y1.clone(),
                y2: v.y2.clone(),
            })
            .collect(),
        colorings: r.colorings.clone(),
    };
    Ok(done(
        header,
        r.rigid,
        if r.rigid { "rigid" } else { "not-rigid" },
        report,
        body,
    ))
}

#[derive(Serialize)]
struct BoundsJson {
    k: usize,
    b: usize,
    tw_bound: usize,
    bases: Vec<Vec<usize>>,
    max_base: usize,
    sizes: Vec<usize>,
    max_size: usize,
    equality_eliminated: Option<String>,
}

fn bounds_cmd(header: &mut Header, path: PathBuf, pred: Option<String>) -> Result<Done, CliError> {
    let sid = load_sid(&path)?;
    let pred = root(&sid, pred)?;
    header.options.pred = Some(pred.clone());
    match treewidth_bound(&sid, &pred) {
        Ok(r) => {
            let mut body = format!(
                "K = {}\nB = {}\ntree-width bound K + B = {}\n",
                r.k, r.b, r.tw_bound
            );
            writeln!(
                body,
                "Parikh bases: {:?} (max norm {})",
                r.bases, r.max_base
            )
            .expect("writing to a string");
            writeln!(
                body,
                "existentials per rule: {:?} (max {})",
                r.sizes, r.max_size
            )
            .expect("writing to a string");
            let equality_eliminated = if is_equality_free(&sid) {
                None
            } else {
                Some(write_sid(&r.sid))
            };
            let report = BoundsJson {
                k: r.k,
                b: r.b,
                tw_bound: r.tw_bound,
                bases: r.bases,
                max_base: r.max_base,
                sizes: r.sizes,
                max_size: r.max_size,
                equality_eliminated,
            };
            Ok(done(header, true, "bounded", report, body))
        }
        Err(AnalysisError::NotRigid(vs)) => {
            let body = format!("not rigid ({} violations); no bound\n", vs.len());
            Ok(done(header, false, "not-rigid", (), body))
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct ModelEntry {
    #[serde(skip_serializing_if = "Option::is_none")]
    tree: Option<TreeJson>,
    graph: GraphJson,
}

#[derive(Serialize)]
struct ModelsReport {
    count: usize,
    equality_eliminated: Option<String>,
    models: Vec<ModelEntry>,
}

fn check_bound(max_vertices: usize) -> Result<(), CliError> {
    if max_vertices > MODEL_VERTEX_LIMIT {
        return Err(CliError::Usage(format!(
            "--max-vertices {max_vertices} exceeds the limit {MODEL_VERTEX_LIMIT}"
        )));
    }
    Ok(())
}

fn models_cmd(
    header: &mut Header,
    path: PathBuf,
    mode: Mode,
    pred: Option<String>,
    max_vertices: usize,
    max_trees: usize,
) -> Result<(Done, Vec<CGraph>), CliError> {
    check_bound(max_vertices)?;
    let original = load_sid(&path)?;
    let pred = root(&original, pred)?;
    header.options.pred = Some(pred.clone());
    header.options.mode = Some(mode);
    header.options.max_vertices = Some(max_vertices);
    let (sid, eliminated) = equality_free(&original);
    let mut body = String::new();
    let equality_eliminated = if eliminated {
        eliminated_note(&sid, &mut body)
    } else {
        None
    };
    let mut entries = Vec::new();
    let mut graphs = Vec::new();
    match mode {
        Mode::Full => {
            for g in models_in_order(&sid, &pred, max_vertices)? {
                writeln!(body, "{}", graph_text(&g)).expect("writing to a string");
                entries.push(ModelEntry {
                    tree: None,
                    graph: (&g).into(),
                });
                graphs.push(g);
            }
        }
        Mode::Canonical => {
            header.options.max_trees = Some(max_trees);
            if sid.arity(&pred) != Some(0) {
                return Err(AnalysisError::NotNullary(pred).into());
            }
            let (edges, limits) = model_cutoff(&sid, max_vertices);
            let mut seen = IsoSet::new();
            for t in enumerate_parse_trees_within(&sid, &pred, edges, &limits)? {
                if entries.len() == max_trees {
                    break;
                }
                let Some(m) = rich_canonical_model(&sid, &t)? else {
                    continue;
                };
                let g = project(&m.graph, sid.alphabet());
                if g.vertex_count() > max_vertices {
                    continue;
                }
                seen.insert(g.clone());
                writeln!(body, "{t}\n  {}", graph_text(&g)).expect("writing to a string");
                entries.push(ModelEntry {
                    tree: Some((&t).into()),
                    graph: (&g).into(),
                });
                graphs.push(g);
            }
            writeln!(body, "{} isomorphism classes", seen.len()).expect("writing to a string");
        }
    }
    writeln!(body, "{} models", entries.len()).expect("writing to a string");
    let report = ModelsReport {
        count: entries.len(),
        equality_eliminated,
        models: entries,
    };
    Ok((done(header, true, "ok", report, body), graphs))
}

#[derive(Serialize)]
struct EntailReport {
    counterexample: Option<GraphJson>,
}

#[allow(clippy::too_many_arguments)]
fn entail_cmd(
    header: &mut Header,
    path: PathBuf,
    rhs_path: Option<PathBuf>,
    lhs: String,
    rhs: String,
    max_vertices: usize,
    fuel: Option<u32>,
) -> Result<(Done, Vec<CGraph>), CliError> {
    check_bound(max_vertices)?;
    let lhs_sid = load_sid(&path)?;
    let rhs_sid = match &rhs_path {
        Some(p) => {
            header.inputs.push(p.display().to_string());
            load_sid(p)?
        }
        None => lhs_sid.clone(),
    };
    root(&lhs_sid, Some(lhs.clone()))?;
    root(&rhs_sid, Some(rhs.clone()))?;
    header.options.lhs = Some(lhs.clone());
    header.options.rhs = Some(rhs.clone());
    header.options.max_vertices = Some(max_vertices);
    header.options.fuel = Some(fuel.map_or_else(|| "complete".into(), |f| f.to_string()));
    Ok(
        match entails_between(&lhs_sid, &lhs, &rhs_sid, &rhs, max_vertices, fuel)? {
            Entailment::NoCounterexampleUpTo(n) => (
                done(
                    header,
                    true,
                    "no-counterexample",
                    EntailReport {
                        counterexample: None,
                    },
                    format!("no counterexample up to {n}\n"),
                ),
                Vec::new(),
            ),
            Entailment::Counterexample(g) => {
                let body = format!("counterexample\n{}\n", graph_text(&g));
                let report = EntailReport {
                    counterexample: Some((&g).into()),
                };
                (done(header, false, "counterexample", report, body), vec![g])
            }
        },
    )
}

#[derive(Serialize)]
struct EvalReport {
    value: bool,
    formula: String,
}

fn mso_eval_cmd(
    header: &mut Header,
    graph: PathBuf,
    formula: PathBuf,
    mso1: bool,
) -> Result<Done, CliError> {
    let g = load_graph(&graph)?;
    let context = slrkit_core::graph::Alphabet::from_labels(g.labels()).map_err(MsoError::from)?;
    let doc = parse_mso_in(&read(&formula)?, &context).map_err(|source| CliError::Parse {
        path: formula.display().to_string(),
        source,
    })?;
    header.options.mso1 = Some(mso1);
    let free: Vec<String> = doc.formula.free_vars().into_keys().collect();
    if !free.is_empty() {
        return Err(CliError::Usage(format!(
            "the formula has free variables: {}",
            free.join(", ")
        )));
    }
    let phi = if mso1 {
        doc.formula.over_vertices()
    } else {
        doc.formula
    };
    let value = mso_eval(&g, &MsoStore::new(), &phi)?;
    let report = EvalReport {
        value,
        formula: phi.to_string(),
    };
    Ok(done(
        header,
        value,
        if value { "true" } else { "false" },
        report,
        format!("{value}\n"),
    ))
}

#[derive(Serialize)]
struct GraphsReport {
    count: usize,
    graphs: Vec<GraphJson>,
}

fn graphs_cmd(
    header: &mut Header,
    graph: PathBuf,
    k: usize,
    fission: bool,
) -> Result<(Done, Vec<CGraph>), CliError> {
    let g = load_graph(&graph)?;
    header.options.k = Some(k);
    let set = if fission {
        fission_k(&g, k)
    } else {
        fusion_k(&g, k)
    };
    let graphs = slrkit_core::analysis::sorted_models(&set);
    let body: String = graphs
        .iter()
        .map(|h| format!("{}\n", graph_text(h)))
        .collect::<String>()
        + &format!("{} graphs\n", graphs.len());
    let report = GraphsReport {
        count: graphs.len(),
        graphs: graphs.iter().map(GraphJson::from).collect(),
    };
    Ok((done(header, true, "ok", report, body), graphs))
}

#[derive(Serialize)]
struct TreesReport {
    count: usize,
    trees: Vec<TreeJson>,
}

/// The `max_trees` smallest trees, searching sizes up to
/// [`PARSE_TREE_EDGE_CAP`].
fn smallest_trees(sid: &Sid, pred: &str, max_trees: usize) -> Result<Vec<ParseTree>, CliError> {
    let mut trees = Vec::new();
    for edges in 0..=PARSE_TREE_EDGE_CAP {
        trees = enumerate_parse_trees(sid, pred, edges)?;
        if trees.len() >= max_trees {
            break;
        }
    }
    trees.truncate(max_trees);
    Ok(trees)
}

fn parse_trees_cmd(
    header: &mut Header,
    path: PathBuf,
    pred: Option<String>,
    max_trees: usize,
) -> Result<Done, CliError> {
    let sid = load_sid(&path)?;
    let pred = root(&sid, pred)?;
    header.options.pred = Some(pred.clone());
    header.options.max_trees = Some(max_trees);
    header.options.max_edges = Some(PARSE_TREE_EDGE_CAP);
    let trees = smallest_trees(&sid, &pred, max_trees)?;
    let mut body: String = trees
        .iter()
        .map(|t| format!("{} edges  {t}\n", t.size()))
        .collect();
    writeln!(body, "{} trees", trees.len()).expect("writing to a string");
    let report = TreesReport {
        count: trees.len(),
        trees: trees.iter().map(TreeJson::from).collect(),
    };
    Ok(done(header, true, "ok", report, body))
}

fn dispatch(cli: Cli) -> Result<Done, CliError> {
    let input = |p: &Path| p.display().to_string();
    let header = |command, inputs: Vec<String>| Header {
        command,
        inputs,
        options: Options::default(),
    };
    let with_graphs = |(mut d, graphs): (Done, Vec<CGraph>)| {
        d.dot = Some(graphs_dot(&graphs));
        d
    };
    match cli.command {
        Command::CheckRegular { sid, pred } => {
            check_regular_cmd(&mut header("check-regular", vec![input(&sid)]), sid, pred)
        }
        Command::CheckRigid { sid, pred } => {
            check_rigid_cmd(&mut header("check-rigid", vec![input(&sid)]), sid, pred)
        }
        Command::Bounds { sid, pred } => {
            bounds_cmd(&mut header("bounds", vec![input(&sid)]), sid, pred)
        }
        Command::Models {
            sid,
            mode,
            pred,
            max_vertices,
            max_trees,
        } => models_cmd(
            &mut header("models", vec![input(&sid)]),
            sid,
            mode,
            pred,
            max_vertices,
            max_trees,
        )
        .map(with_graphs),
        Command::Entail {
            sid,
            rhs_sid,
            lhs,
            rhs,
            max_vertices,
            fuel,
        } => entail_cmd(
            &mut header("entail", vec![input(&sid)]),
            sid,
            rhs_sid,
            lhs,
            rhs,
            max_vertices,
            fuel,
        )
        .map(with_graphs),
        Command::MsoEval {
            graph,
            formula,
            mso1,
        } => mso_eval_cmd(
            &mut header("mso-eval", vec![input(&graph), input(&formula)]),
            graph,
            formula,
            mso1,
        ),
        Command::Fission { graph, k } => {
            graphs_cmd(&mut header("fission", vec![input(&graph)]), graph, k, true).map(with_graphs)
        }
        Command::Fusion { graph, k } => {
            graphs_cmd(&mut header("fusion", vec![input(&graph)]), graph, k, false).map(with_graphs)
        }
        Command::ParseTrees {
            sid,
            pred,
            max_trees,
        } => parse_trees_cmd(
            &mut header("parse-trees", vec![input(&sid)]),
            sid,
            pred,
            max_trees,
        ),
    }
}

/// Runs the command line `args`, the program name first.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: rendered,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: rendered,
                }
            };
        }
    };
    let format = cli.format;
    match dispatch(cli) {
        Ok(d) => {
            let stdout = match format {
                Format::Text => Ok(d.text),
                Format::Json => Ok(d.json),
                Format::Dot => d
                    .dot
                    .ok_or("this command prints no graphs; use --format text or json"),
            };
            match stdout {
                Ok(stdout) => Outcome {
                    code: if d.positive { 0 } else { 1 },
                    stdout,
                    stderr: String::new(),
                },
                Err(msg) => Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: format!("error: {msg}\n"),
                },
            }
        }
        Err(e) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
