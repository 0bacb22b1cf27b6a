//! Directed multigraphs, paths, and edge weights.
//!
//! An edge `e` runs from its source `s(e)` to its range `r(e)`. Paths are
//! written `μ = μ1 μ2 … μn` with `s(μi) = r(μi+1)`, so the first edge carries
//! the range of the path and the last edge its source.

mod boundary;
mod document;
mod lambda;
mod lazy;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::rational::{RationalError, Q};

pub use boundary::{atoms, basis_paths, enumerate_boundary, BoundaryAtlas};
pub use document::{EdgeDoc, GraphDocument};
pub use lambda::{check_lambda_conditions, ConditionReport, Verdict};
pub use lazy::{check_lambda_lazy, classify_lazy, LambdaRule, LazyEdge, LazyFamily, LazyGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct VertexId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct EdgeId(pub u32);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("dangling endpoint: edge {edge:?} references unknown vertex {vertex:?}")]
    DanglingEndpoint { edge: String, vertex: String },
    #[error("duplicate edge id {0:?}")]
    DuplicateEdge(String),
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertex(String),
    #[error("non-positive weight {value} on edge {edge:?}")]
    NonPositiveWeight { edge: String, value: String },
    #[error("weights given on some edges but not on {0:?}")]
    PartialWeights(String),
    #[error("weight vector has {got} entries for {expected} edges")]
    WeightCount { expected: usize, got: usize },
    #[error("unknown edge {0:?}")]
    UnknownEdge(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("edges {0:?} and {1:?} do not compose (s({0}) != r({1}))")]
    NotComposable(String, String),
    #[error("shift undefined on length-0 path")]
    ShiftOfVertex,
    #[error("bad weight on edge {edge:?}: {source}")]
    BadWeight { edge: String, source: RationalError },
    #[error("malformed graph document: {0}")]
    Malformed(String),
}

/// A finite directed multigraph with identifiers kept in sorted order.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_names: Vec<String>,
    edge_names: Vec<String>,
    src: Vec<VertexId>,
    rng: Vec<VertexId>,
    receives: Vec<Vec<EdgeId>>,
    emits: Vec<Vec<EdgeId>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .edges()
            .map(|e| {
                format!(
                    "{}: {}->{}",
                    self.edge_name(e),
                    self.vertex_name(self.source(e)),
                    self.vertex_name(self.range(e))
                )
            })
            .collect();
        f.debug_struct("Graph").field("vertices", &self.vertex_names).field("edges", &edges).finish()
    }
}

impl Graph {
    /// Builds a graph from vertex names and `(edge, source, range)` triples.
    pub fn new<V: AsRef<str>, E: AsRef<str>>(vertices: &[V], edges: &[(E, E, E)]) -> Result<Graph, GraphError> {
        let mut vertex_names: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
        vertex_names.sort();
        if let Some(w) = vertex_names.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateVertex(w[0].clone()));
        }
        let mut sorted: Vec<(&str, &str, &str)> =
            edges.iter().map(|(e, s, r)| (e.as_ref(), s.as_ref(), r.as_ref())).collect();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(GraphError::DuplicateEdge(w[0].0.to_string()));
        }
        let lookup = |edge: &str, v: &str| {
            vertex_names
                .binary_search_by(|x| x.as_str().cmp(v))
                .map(|i| VertexId(i as u32))
                .map_err(|_| GraphError::DanglingEndpoint { edge: edge.into(), vertex: v.into() })
        };
        let n = vertex_names.len();
        let mut g = Graph {
            edge_names: Vec::with_capacity(sorted.len()),
            src: Vec::with_capacity(sorted.len()),
            rng: Vec::with_capacity(sorted.len()),
            receives: vec![Vec::new(); n],
            emits: vec![Vec::new(); n],
            vertex_names: Vec::new(),
        };
        for (i, (e, s, r)) in sorted.iter().enumerate() {
            let s = lookup(e, s)?;
            let r = lookup(e, r)?;
            g.edge_names.push(e.to_string());
            g.src.push(s);
            g.rng.push(r);
            g.emits[s.0 as usize].push(EdgeId(i as u32));
            g.receives[r.0 as usize].push(EdgeId(i as u32));
        }
        g.vertex_names = vertex_names;
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_names.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_names.len() as u32).map(VertexId)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edge_names.len() as u32).map(EdgeId)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.0 as usize]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edge_names[e.0 as usize]
    }

    pub fn vertex(&self, name: &str) -> Result<VertexId, GraphError> {
        self.vertex_names
            .binary_search_by(|x| x.as_str().cmp(name))
            .map(|i| VertexId(i as u32))
            .map_err(|_| GraphError::UnknownVertex(name.into()))
    }

    pub fn edge(&self, name: &str) -> Result<EdgeId, GraphError> {
        self.edge_names
            .binary_search_by(|x| x.as_str().cmp(name))
            .map(|i| EdgeId(i as u32))
            .map_err(|_| GraphError::UnknownEdge(name.into()))
    }

    pub fn source(&self, e: EdgeId) -> VertexId {
        self.src[e.0 as usize]
    }

    pub fn range(&self, e: EdgeId) -> VertexId {
        self.rng[e.0 as usize]
    }

    /// `r⁻¹(v)`
    pub fn receives(&self, v: VertexId) -> &[EdgeId] {
        &self.receives[v.0 as usize]
    }

    /// `s⁻¹(v)`
    pub fn emits(&self, v: VertexId) -> &[EdgeId] {
        &self.emits[v.0 as usize]
    }

    pub fn is_source(&self, v: VertexId) -> bool {
        self.receives(v).is_empty()
    }

    pub fn is_sink(&self, v: VertexId) -> bool {
        self.emits(v).is_empty()
    }

    pub fn classify_vertices(&self) -> VertexClassification {
        let names = |pred: &dyn Fn(VertexId) -> bool| -> BTreeSet<String> {
            self.vertices().filter(|&v| pred(v)).map(|v| self.vertex_name(v).to_string()).collect()
        };
        VertexClassification {
            sources: names(&|v| self.is_source(v)),
            sinks: names(&|v| self.is_sink(v)),
            regular_receivers: names(&|v| !self.is_source(v)),
            infinite_receivers: BTreeSet::new(),
            infinite_emitters: BTreeSet::new(),
            suspected: false,
            budget: None,
        }
    }

    /// True when some vertex lies on a cycle.
    pub fn has_cycle(&self) -> bool {
        // Kahn's algorithm on the edge relation.
        let mut indeg: Vec<usize> = self.vertices().map(|v| self.receives(v).len()).collect();
        let mut stack: Vec<VertexId> = self.vertices().filter(|&v| indeg[v.0 as usize] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for &e in self.emits(v) {
                let r = self.range(e).0 as usize;
                indeg[r] -= 1;
                if indeg[r] == 0 {
                    stack.push(VertexId(r as u32));
                }
            }
        }
        seen < self.vertex_count()
    }

    /// Same graph with vertices and edges renamed; order is re-sorted.
    pub fn relabel(&self, vertex: impl Fn(&str) -> String, edge: impl Fn(&str) -> String) -> Result<Graph, GraphError> {
        let vs: Vec<String> = self.vertex_names.iter().map(|v| vertex(v)).collect();
        let es: Vec<(String, String, String)> = self
            .edges()
            .map(|e| {
                (
                    edge(self.edge_name(e)),
                    vertex(self.vertex_name(self.source(e))),
                    vertex(self.vertex_name(self.range(e))),
                )
            })
            .collect();
        Graph::new(&vs, &es)
    }
}

/// Partition of the vertex set by reception, plus sinks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexClassification {
    pub sources: BTreeSet<String>,
    pub sinks: BTreeSet<String>,
    pub regular_receivers: BTreeSet<String>,
    pub infinite_receivers: BTreeSet<String>,
    pub infinite_emitters: BTreeSet<String>,
    /// Set when the infinite sets were inferred from a truncation budget.
    pub suspected: bool,
    pub budget: Option<usize>,
}

/// A finite path; a length-0 path is a vertex.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    range: VertexId,
    edges: Vec<EdgeId>,
}

impl Path {
    pub fn vertex(v: VertexId) -> Path {
        Path { range: v, edges: Vec::new() }
    }

    pub fn edge(g: &Graph, e: EdgeId) -> Path {
        Path { range: g.range(e), edges: vec![e] }
    }

    pub fn from_edges(g: &Graph, edges: Vec<EdgeId>) -> Result<Path, GraphError> {
        let Some(&first) = edges.first() else {
            return Err(GraphError::Malformed("empty edge list needs a vertex".into()));
        };
        for w in edges.windows(2) {
            if g.source(w[0]) != g.range(w[1]) {
                return Err(GraphError::NotComposable(g.edge_name(w[0]).into(), g.edge_name(w[1]).into()));
            }
        }
        Ok(Path { range: g.range(first), edges })
    }

    /// Parses edge names; `vertex` is used for the empty path.
    pub fn parse(g: &Graph, edges: &[&str]) -> Result<Path, GraphError> {
        let ids = edges.iter().map(|e| g.edge(e)).collect::<Result<Vec<_>, _>>()?;
        Path::from_edges(g, ids)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_vertex(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn first_edge(&self) -> Option<EdgeId> {
        self.edges.first().copied()
    }

    pub fn range(&self) -> VertexId {
        self.range
    }

    pub fn source(&self, g: &Graph) -> VertexId {
        self.edges.last().map_or(self.range, |&e| g.source(e))
    }

    /// `σ(μ) = μ2…μn`, with `σ(μ1) = s(μ1)`.
    pub fn shift(&self, g: &Graph) -> Result<Path, GraphError> {
        match self.edges.len() {
            0 => Err(GraphError::ShiftOfVertex),
            1 => Ok(Path::vertex(g.source(self.edges[0]))),
            _ => Ok(Path { range: g.source(self.edges[0]), edges: self.edges[1..].to_vec() }),
        }
    }

    /// `eμ`, requiring `s(e) = r(μ)`.
    pub fn prepend(&self, g: &Graph, e: EdgeId) -> Path {
        debug_assert_eq!(g.source(e), self.range);
        let mut edges = Vec::with_capacity(self.edges.len() + 1);
        edges.push(e);
        edges.extend_from_slice(&self.edges);
        Path { range: g.range(e), edges }
    }

    /// `μe`, requiring `r(e) = s(μ)`.
    pub fn append(&self, g: &Graph, e: EdgeId) -> Path {
        debug_assert_eq!(g.range(e), self.source(g));
        let mut edges = self.edges.clone();
        edges.push(e);
        Path { range: self.range, edges }
    }

    /// Drops the last edge; `None` on vertices.
    pub fn parent(&self) -> Option<Path> {
        (!self.edges.is_empty()).then(|| Path { range: self.range, edges: self.edges[..self.edges.len() - 1].to_vec() })
    }

    /// Whether `self` is an initial segment of `other` (vertex `v` is a prefix
    /// of every path with range `v`).
    pub fn is_prefix_of(&self, other: &Path) -> bool {
        self.range == other.range && other.edges.starts_with(&self.edges)
    }

    /// The one-step extensions `μe`, `e ∈ r⁻¹(s(μ))`.
    pub fn children<'g>(&'g self, g: &'g Graph) -> impl Iterator<Item = Path> + 'g {
        g.receives(self.source(g)).iter().map(move |&e| self.append(g, e))
    }

    pub fn names(&self, g: &Graph) -> Vec<String> {
        self.edges.iter().map(|&e| g.edge_name(e).to_string()).collect()
    }

    pub fn display(&self, g: &Graph) -> String {
        if self.edges.is_empty() {
            g.vertex_name(self.range).to_string()
        } else {
            self.names(g).join("")
        }
    }
}

/// Strictly positive rational weights, one per edge, in edge order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSystem {
    weights: Vec<Q>,
}

impl WeightSystem {
    pub fn new(g: &Graph, weights: Vec<Q>) -> Result<WeightSystem, GraphError> {
        if weights.len() != g.edge_count() {
            return Err(GraphError::WeightCount { expected: g.edge_count(), got: weights.len() });
        }
        for (e, w) in g.edges().zip(&weights) {
            if !w.is_positive() {
                return Err(GraphError::NonPositiveWeight {
                    edge: g.edge_name(e).into(),
                    value: crate::rational::fmt_q(w),
                });
            }
        }
        Ok(WeightSystem { weights })
    }

    pub fn from_named(g: &Graph, named: &BTreeMap<String, Q>) -> Result<WeightSystem, GraphError> {
        let mut w = Vec::with_capacity(g.edge_count());
        for e in g.edges() {
            let name = g.edge_name(e);
            w.push(named.get(name).cloned().ok_or_else(|| GraphError::PartialWeights(name.into()))?);
        }
        for k in named.keys() {
            g.edge(k)?;
        }
        WeightSystem::new(g, w)
    }

    pub fn constant(g: &Graph, c: Q) -> Result<WeightSystem, GraphError> {
        WeightSystem::new(g, vec![c; g.edge_count()])
    }

    /// `λ_e = 1/|s⁻¹(s(e))|`.
    pub fn uniform(g: &Graph) -> WeightSystem {
        let weights = g.edges().map(|e| Q::new(One::one(), (g.emits(g.source(e)).len() as i64).into())).collect();
        WeightSystem { weights }
    }

    pub fn get(&self, e: EdgeId) -> &Q {
        &self.weights[e.0 as usize]
    }

    pub fn as_slice(&self) -> &[Q] {
        &self.weights
    }

    /// `Σ_{e ∈ s⁻¹(v)} λ_e`
    pub fn emitted_sum(&self, g: &Graph, v: VertexId) -> Q {
        g.emits(v).iter().map(|&e| self.get(e)).fold(Q::zero(), |a, b| a + b)
    }

    pub fn named(&self, g: &Graph) -> BTreeMap<String, Q> {
        g.edges().map(|e| (g.edge_name(e).to_string(), self.get(e).clone())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn line() -> Graph {
        Graph::new(&["w", "v"], &[("e", "w", "v")]).unwrap()
    }

    fn two_loop() -> Graph {
        Graph::new(&["v"], &[("e", "v", "v"), ("f", "v", "v")]).unwrap()
    }

    #[test]
    fn construction_and_lookup() {
        let g = line();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
        let e = g.edge("e").unwrap();
        assert_eq!(g.vertex_name(g.source(e)), "w");
        assert_eq!(g.vertex_name(g.range(e)), "v");
        let h = two_loop();
        assert_eq!((h.vertex_count(), h.edge_count()), (1, 2));
    }

    #[test]
    fn validation_errors() {
        let err = Graph::new(&["v"], &[("e", "x", "v")]).unwrap_err();
        assert!(err.to_string().contains("dangling endpoint"));
        assert!(matches!(Graph::new(&["v"], &[("e", "v", "v"), ("e", "v", "v")]), Err(GraphError::DuplicateEdge(_))));
        let g = line();
        assert!(matches!(WeightSystem::new(&g, vec![Q::zero()]), Err(GraphError::NonPositiveWeight { .. })));
    }

    #[test]
    fn classification() {
        let c = line().classify_vertices();
        assert_eq!(c.sources, BTreeSet::from(["w".to_string()]));
        assert_eq!(c.sinks, BTreeSet::from(["v".to_string()]));
        let c = two_loop().classify_vertices();
        assert!(c.sources.is_empty() && c.sinks.is_empty());
    }

    #[test]
    fn shifts() {
        let g = two_loop();
        let ef = Path::parse(&g, &["e", "f"]).unwrap();
        assert_eq!(ef.shift(&g).unwrap(), Path::parse(&g, &["f"]).unwrap());
        let l = line();
        let e = Path::parse(&l, &["e"]).unwrap();
        assert_eq!(e.shift(&l).unwrap(), Path::vertex(l.vertex("w").unwrap()));
        assert_eq!(Path::vertex(l.vertex("v").unwrap()).shift(&l), Err(GraphError::ShiftOfVertex));
    }

    #[test]
    fn composability_is_checked() {
        let g = Graph::new(&["a", "b", "c"], &[("e", "b", "a"), ("f", "c", "b")]).unwrap();
        assert!(Path::parse(&g, &["e", "f"]).is_ok());
        assert!(matches!(Path::parse(&g, &["f", "e"]), Err(GraphError::NotComposable(..))));
    }

    #[test]
    fn prefix_order() {
        let g = two_loop();
        let v = Path::vertex(g.vertex("v").unwrap());
        let e = Path::parse(&g, &["e"]).unwrap();
        let ef = Path::parse(&g, &["e", "f"]).unwrap();
        assert!(v.is_prefix_of(&ef) && e.is_prefix_of(&ef) && !ef.is_prefix_of(&e));
        assert!(!Path::parse(&g, &["f"]).unwrap().is_prefix_of(&ef));
    }

    #[test]
    fn uniform_weights() {
        let g = Graph::new(&["v", "w"], &[("e", "v", "v"), ("f", "v", "w"), ("g", "w", "v")]).unwrap();
        let u = WeightSystem::uniform(&g);
        for v in g.vertices() {
            assert!(u.emitted_sum(&g, v).is_one());
        }
    }
}
