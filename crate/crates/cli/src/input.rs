//! Locating and parsing inputs. A name that is not an existing file is looked
//! up in the built-in corpus by its file stem, so `fixtures/g_line.json` and
//! `g_line` both work without the file on disk.

use std::path::Path as FsPath;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use exelkit::corpus::{graph_fixture, matrix_fixture};
use exelkit::cp::PositiveMapMatrix;
use exelkit::graph::{GraphDocument, LambdaRule, LazyFamily, LazyGraph};
use exelkit::rational::{parse_q, FloatPolicy};
use exelkit::{Graph, WeightSystem};

pub struct GraphInput {
    pub name: String,
    pub graph: Arc<Graph>,
    pub weights: Option<WeightSystem>,
}

pub enum Input {
    Graph(GraphInput),
    Matrix { name: String, matrix: PositiveMapMatrix },
    Lazy(LazyGraph),
}

fn stem(name: &str) -> String {
    FsPath::new(name).file_stem().map_or_else(|| name.to_string(), |s| s.to_string_lossy().into_owned())
}

pub fn load(name: &str, policy: FloatPolicy) -> Result<Input> {
    if let Some(rest) = name.strip_prefix("lazy:") {
        return lazy(rest, policy).map(Input::Lazy);
    }
    let path = FsPath::new(name);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {name}"))?;
        return parse(name, &text, policy);
    }
    let key = stem(name);
    if let Some(f) = graph_fixture(&key) {
        return Ok(Input::Graph(GraphInput { name: f.name, graph: f.graph, weights: Some(f.weights) }));
    }
    if let Some(f) = matrix_fixture(&key) {
        return Ok(Input::Matrix { name: f.name, matrix: f.matrix });
    }
    bail!("{name}: file not found")
}

fn parse(name: &str, text: &str, policy: FloatPolicy) -> Result<Input> {
    let label = stem(name);
    if name.ends_with(".csv") {
        let matrix = PositiveMapMatrix::from_csv(text, policy)?;
        return Ok(Input::Matrix { name: label, matrix });
    }
    let value: serde_json::Value = serde_json::from_str(text).with_context(|| format!("{name}: malformed JSON"))?;
    if value.is_array() {
        let matrix = PositiveMapMatrix::from_json(text, policy)?;
        return Ok(Input::Matrix { name: label, matrix });
    }
    let doc = GraphDocument::from_json(text)?;
    let (g, w) = doc.load(policy)?;
    Ok(Input::Graph(GraphInput { name: label, graph: Arc::new(g), weights: w }))
}

/// `lazy:<rose|star>:<harmonic|geometric:R|C>`.
fn lazy(arg: &str, policy: FloatPolicy) -> Result<LazyGraph> {
    let (family, rule) = arg.split_once(':').unwrap_or((arg, "1"));
    let family = match family {
        "rose" => LazyFamily::Rose,
        "star" => LazyFamily::Star,
        other => bail!("unknown lazy family {other:?}; expected rose or star"),
    };
    let rule = match rule.split_once(':') {
        _ if rule == "harmonic" => LambdaRule::Harmonic,
        Some(("geometric", r)) => LambdaRule::Geometric(parse_q(r, policy)?),
        None => LambdaRule::Constant(parse_q(rule, policy)?),
        Some(_) => bail!("unknown weight rule {rule:?}"),
    };
    Ok(LazyGraph::family(family, rule))
}

impl Input {
    pub fn graph(self) -> Result<GraphInput> {
        match self {
            Input::Graph(g) => Ok(g),
            Input::Matrix { name, .. } => bail!("{name} is a matrix, expected a graph document"),
            Input::Lazy(g) => bail!("lazy graph {} is only accepted by graph check-lambda", g.name()),
        }
    }

    pub fn matrix(self) -> Result<(String, PositiveMapMatrix)> {
        match self {
            Input::Matrix { name, matrix } => Ok((name, matrix)),
            Input::Graph(g) => bail!("{} is a graph, expected a matrix", g.name),
            Input::Lazy(g) => bail!("{} is a lazy graph, expected a matrix", g.name()),
        }
    }
}

/// `file` uses the document's weights, `uniform` gives `1/|s⁻¹(s(e))|`, a
/// rational is a constant, anything else is a JSON file `{"edge": "p/q"}`.
pub fn weights(g: &GraphInput, arg: &str, policy: FloatPolicy) -> Result<WeightSystem> {
    match arg {
        "file" => g.weights.clone().ok_or_else(|| anyhow!("{} carries no weights; pass --lambda", g.name)),
        "uniform" => Ok(WeightSystem::uniform(&g.graph)),
        _ => {
            if let Ok(c) = parse_q(arg, policy) {
                return Ok(WeightSystem::constant(&g.graph, c)?);
            }
            if !FsPath::new(arg).is_file() {
                bail!("{arg}: file not found");
            }
            let text = std::fs::read_to_string(arg)?;
            let raw: std::collections::BTreeMap<String, serde_json::Value> =
                serde_json::from_str(&text).with_context(|| format!("{arg}: expected an object of edge weights"))?;
            let mut named = std::collections::BTreeMap::new();
            for (k, v) in raw {
                let t = match v {
                    serde_json::Value::String(s) => s,
                    other => other.to_string(),
                };
                named.insert(k, parse_q(&t, policy)?);
            }
            Ok(WeightSystem::from_named(&g.graph, &named)?)
        }
    }
}
