//! Exact calculus on the diagonal algebra of a finite graph.
//!
//! Elements are finite rational combinations of cylinder projections
//! `q_μ = s_μ s_μ*`, i.e. of indicator functions of cylinders on `∂E`. Every
//! operation returns the coarsest form: the support is a prefix antichain and
//! no complete set of siblings `{μe : r(e) = s(μ)}` carries a common value.
//! Two elements are equal exactly when their coarsest forms agree.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, Path, WeightSystem};
use crate::rational::{fmt_q, parse_q, FloatPolicy, RationalError, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagError {
    #[error("operands live on different graphs")]
    GraphMismatch,
    #[error("normalisation depth {requested} is below the support depth {support}")]
    DepthTooSmall { requested: usize, support: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Rational(#[from] RationalError),
    #[error("malformed element: {0}")]
    Malformed(String),
}

pub type Terms = BTreeMap<Path, Q>;

#[derive(Clone)]
pub struct DiagElement {
    graph: Arc<Graph>,
    terms: Terms,
}

impl fmt::Debug for DiagElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display())
    }
}

impl PartialEq for DiagElement {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.graph, &other.graph) || *self.graph == *other.graph) && self.terms == other.terms
    }
}

impl Eq for DiagElement {}

impl DiagElement {
    pub fn zero(g: &Arc<Graph>) -> Self {
        DiagElement { graph: g.clone(), terms: Terms::new() }
    }

    /// `q_μ`
    pub fn projection(g: &Arc<Graph>, path: Path) -> Self {
        Self::from_terms(g, [(path, Q::from_integer(1.into()))])
    }

    pub fn from_terms(g: &Arc<Graph>, terms: impl IntoIterator<Item = (Path, Q)>) -> Self {
        let mut raw = Terms::new();
        for (p, c) in terms {
            *raw.entry(p).or_insert_with(Q::zero) += c;
        }
        DiagElement { graph: g.clone(), terms: coarsest(g, &raw) }
    }

    /// The unit `Σ_v q_v`.
    pub fn one(g: &Arc<Graph>) -> Self {
        Self::from_terms(g, g.vertices().map(|v| (Path::vertex(v), Q::from_integer(1.into()))))
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn terms(&self) -> &Terms {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Length of the longest support path.
    pub fn depth(&self) -> usize {
        self.terms.keys().map(Path::len).max().unwrap_or(0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// Largest absolute coefficient, i.e. the sup norm.
    pub fn norm(&self) -> Q {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Q::zero)
    }

    fn check(&self, other: &Self) -> Result<(), DiagError> {
        if Arc::ptr_eq(&self.graph, &other.graph) || *self.graph == *other.graph {
            Ok(())
        } else {
            Err(DiagError::GraphMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, DiagError> {
        self.check(other)?;
        Ok(self.combine(other, Q::from_integer(1.into())))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, DiagError> {
        self.check(other)?;
        Ok(self.combine(other, Q::from_integer((-1).into())))
    }

    fn combine(&self, other: &Self, sign: Q) -> Self {
        let mut raw = self.terms.clone();
        for (p, c) in &other.terms {
            *raw.entry(p.clone()).or_insert_with(Q::zero) += c * &sign;
        }
        DiagElement { graph: self.graph.clone(), terms: coarsest(&self.graph, &raw) }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(&self.graph);
        }
        DiagElement { graph: self.graph.clone(), terms: self.terms.iter().map(|(p, x)| (p.clone(), x * c)).collect() }
    }

    pub fn multiply(&self, other: &Self) -> Result<Self, DiagError> {
        self.check(other)?;
        Ok(DiagElement {
            graph: self.graph.clone(),
            terms: coarsest(&self.graph, &raw_product(&self.terms, &other.terms)),
        })
    }

    /// `α(q_η) = Σ_{s(e) = r(η)} q_{eη}`
    pub fn alpha(&self) -> Self {
        DiagElement { graph: self.graph.clone(), terms: coarsest(&self.graph, &raw_alpha(&self.graph, &self.terms)) }
    }

    /// `L(q_η) = λ_{η1} q_{σ(η)}`, `L(q_v) = Σ_{r(e) = v} λ_e q_{s(e)}`
    pub fn transfer(&self, w: &WeightSystem) -> Self {
        DiagElement {
            graph: self.graph.clone(),
            terms: coarsest(&self.graph, &raw_transfer(&self.graph, w, &self.terms)),
        }
    }

    pub fn equals(&self, other: &Self) -> Result<bool, DiagError> {
        self.check(other)?;
        Ok(self.terms == other.terms)
    }

    /// Refines every term to length `depth` (or until it ends at a source),
    /// merging coefficients; `None` uses the current support depth.
    pub fn normalize(&self, depth: Option<usize>) -> Result<Terms, DiagError> {
        let support = self.depth();
        let d = depth.unwrap_or(support);
        if d < support {
            return Err(DiagError::DepthTooSmall { requested: d, support });
        }
        Ok(refine_to(&self.graph, &self.terms, d))
    }

    /// Value at a boundary point (or truncation atom) `x`.
    pub fn evaluate(&self, x: &Path) -> Q {
        self.terms.iter().filter(|(p, _)| p.is_prefix_of(x)).map(|(_, c)| c.clone()).sum()
    }

    pub fn display(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(p, c)| format!("{}*q[{}]", fmt_q(c), p.display(&self.graph)))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn to_doc(&self) -> DiagDoc {
        DiagDoc {
            terms: self
                .terms
                .iter()
                .map(|(p, c)| TermDoc {
                    path: p.names(&self.graph),
                    vertex: p.is_vertex().then(|| self.graph.vertex_name(p.range()).to_string()),
                    coeff: fmt_q(c),
                })
                .collect(),
        }
    }

    pub fn from_doc(g: &Arc<Graph>, doc: &DiagDoc) -> Result<Self, DiagError> {
        let mut terms = Vec::new();
        for t in &doc.terms {
            let path = if t.path.is_empty() {
                let v = t.vertex.as_deref().ok_or_else(|| DiagError::Malformed("vertex term without vertex".into()))?;
                Path::vertex(g.vertex(v)?)
            } else {
                let names: Vec<&str> = t.path.iter().map(String::as_str).collect();
                Path::parse(g, &names)?
            };
            terms.push((path, parse_q(&t.coeff, FloatPolicy::Reject)?));
        }
        Ok(Self::from_terms(g, terms))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagDoc {
    pub terms: Vec<TermDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub path: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<String>,
    pub coeff: String,
}

/// Prefix-rule product without simplification.
pub(crate) fn raw_product(a: &Terms, b: &Terms) -> Terms {
    let mut out = Terms::new();
    for (p, c) in a {
        for (q, d) in b {
            let longer = if p.is_prefix_of(q) {
                q
            } else if q.is_prefix_of(p) {
                p
            } else {
                continue;
            };
            *out.entry(longer.clone()).or_insert_with(Q::zero) += c * d;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

pub(crate) fn raw_alpha(g: &Graph, a: &Terms) -> Terms {
    let mut out = Terms::new();
    for (p, c) in a {
        for &e in g.emits(p.range()) {
            *out.entry(p.prepend(g, e)).or_insert_with(Q::zero) += c;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

pub(crate) fn raw_transfer(g: &Graph, w: &WeightSystem, a: &Terms) -> Terms {
    let mut out = Terms::new();
    for (p, c) in a {
        match p.first_edge() {
            Some(e) => {
                let shifted = p.shift(g).expect("non-vertex path");
                *out.entry(shifted).or_insert_with(Q::zero) += w.get(e) * c;
            }
            None => {
                for &e in g.receives(p.range()) {
                    *out.entry(Path::vertex(g.source(e))).or_insert_with(Q::zero) += w.get(e) * c;
                }
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn refine_to(g: &Graph, a: &Terms, depth: usize) -> Terms {
    let mut out = Terms::new();
    let mut stack: Vec<(Path, Q)> = a.iter().map(|(p, c)| (p.clone(), c.clone())).collect();
    while let Some((p, c)) = stack.pop() {
        if p.len() >= depth || g.is_source(p.source(g)) {
            *out.entry(p).or_insert_with(Q::zero) += c;
        } else {
            for child in p.children(g) {
                stack.push((child, c.clone()));
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Coarsest antichain form of a possibly overlapping combination.
pub(crate) fn coarsest(g: &Graph, raw: &Terms) -> Terms {
    if raw.is_empty() {
        return Terms::new();
    }
    // Trie of supports and all their prefixes.
    let mut nodes: BTreeMap<Path, Q> = BTreeMap::new();
    for (p, c) in raw {
        let mut cur = Some(p.clone());
        while let Some(x) = cur {
            cur = x.parent();
            let fresh = !nodes.contains_key(&x);
            nodes.entry(x).or_insert_with(Q::zero);
            if !fresh {
                break;
            }
        }
        // Vertex ancestor of an edge path.
        if !p.is_vertex() {
            nodes.entry(Path::vertex(p.range())).or_insert_with(Q::zero);
        }
        *nodes.get_mut(p).unwrap() += c;
    }
    // Expand to leaves carrying accumulated values.
    let mut leaves = Terms::new();
    let roots: Vec<Path> = nodes.keys().filter(|p| p.is_vertex()).cloned().collect();
    let mut stack: Vec<(Path, Q)> = roots.into_iter().map(|r| (r, Q::zero())).collect();
    while let Some((p, above)) = stack.pop() {
        let acc = above + &nodes[&p];
        let kids: Vec<Path> = p.children(g).collect();
        if kids.iter().any(|k| nodes.contains_key(k)) {
            for k in kids {
                if nodes.contains_key(&k) {
                    stack.push((k, acc.clone()));
                } else {
                    leaves.insert(k, acc.clone());
                }
            }
        } else {
            leaves.insert(p, acc);
        }
    }
    // Collapse complete sibling sets with equal values, deepest first.
    let max = leaves.keys().map(Path::len).max().unwrap_or(0);
    for len in (1..=max).rev() {
        let parents: Vec<Path> = leaves.keys().filter(|p| p.len() == len).filter_map(Path::parent).collect();
        let mut seen = std::collections::BTreeSet::new();
        for parent in parents {
            if !seen.insert(parent.clone()) {
                continue;
            }
            let kids: Vec<Path> = parent.children(g).collect();
            let first = leaves.get(&kids[0]).cloned();
            let Some(value) = first else { continue };
            if kids.iter().all(|k| leaves.get(k) == Some(&value)) {
                for k in &kids {
                    leaves.remove(k);
                }
                leaves.insert(parent, value);
            }
        }
    }
    leaves.retain(|_, c| !c.is_zero());
    leaves
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn arc(g: Graph) -> Arc<Graph> {
        Arc::new(g)
    }

    fn fork() -> Arc<Graph> {
        arc(Graph::new(&["w1", "w2", "v"], &[("e", "w1", "v"), ("f", "w2", "v")]).unwrap())
    }

    fn two_loop() -> Arc<Graph> {
        arc(Graph::new(&["v"], &[("e", "v", "v"), ("f", "v", "v")]).unwrap())
    }

    fn qp(g: &Arc<Graph>, edges: &[&str]) -> DiagElement {
        DiagElement::projection(g, Path::parse(g, edges).unwrap())
    }

    fn qv(g: &Arc<Graph>, v: &str) -> DiagElement {
        DiagElement::projection(g, Path::vertex(g.vertex(v).unwrap()))
    }

    #[test]
    fn refinement_of_a_vertex() {
        let g = fork();
        let terms = qv(&g, "v").normalize(Some(1)).unwrap();
        let expected: Terms =
            [(Path::parse(&g, &["e"]).unwrap(), qi(1)), (Path::parse(&g, &["f"]).unwrap(), qi(1))].into();
        assert_eq!(terms, expected);
        let diff = qv(&g, "v").sub(&qp(&g, &["e"])).unwrap().sub(&qp(&g, &["f"])).unwrap();
        assert!(diff.is_zero());
        assert!(qp(&g, &["e"]).normalize(Some(0)).is_err());
    }

    #[test]
    fn sources_never_refine() {
        let g = arc(Graph::new(&["w", "v"], &[("e", "w", "v")]).unwrap());
        let t = qv(&g, "w").normalize(Some(5)).unwrap();
        assert_eq!(t.keys().cloned().collect::<Vec<_>>(), vec![Path::vertex(g.vertex("w").unwrap())]);
        // q_v = q_e as functions on the boundary.
        assert!(qv(&g, "v").equals(&qp(&g, &["e"])).unwrap());
    }

    #[test]
    fn products() {
        let l = arc(Graph::new(&["v"], &[("e", "v", "v")]).unwrap());
        assert_eq!(qp(&l, &["e"]).multiply(&qp(&l, &["e", "e"])).unwrap(), qp(&l, &["e", "e"]));
        let g = two_loop();
        assert!(qp(&g, &["e"]).multiply(&qp(&g, &["f"])).unwrap().is_zero());
        let p = qp(&g, &["e"]).add(&qp(&g, &["f"])).unwrap();
        assert_eq!(p.multiply(&p).unwrap(), p);
        assert_eq!(p, qv(&g, "v"));
    }

    #[test]
    fn alpha_rules() {
        let l = arc(Graph::new(&["w", "v"], &[("e", "w", "v")]).unwrap());
        assert_eq!(qv(&l, "w").alpha(), qp(&l, &["e"]));
        assert!(qv(&l, "v").alpha().is_zero());
        let g = two_loop();
        assert_eq!(qv(&g, "v").alpha(), qp(&g, &["e"]).add(&qp(&g, &["f"])).unwrap());
    }

    #[test]
    fn transfer_rules() {
        let l = arc(Graph::new(&["w", "v"], &[("e", "w", "v")]).unwrap());
        let one = WeightSystem::constant(&l, qi(1)).unwrap();
        assert_eq!(qp(&l, &["e"]).transfer(&one), qv(&l, "w"));
        assert!(qv(&l, "w").transfer(&one).is_zero());
        let g = fork();
        let w = WeightSystem::new(&g, vec![q(1, 3), q(2, 3)]).unwrap();
        let expected = qv(&g, "w1").scale(&q(1, 3)).add(&qv(&g, "w2").scale(&q(2, 3))).unwrap();
        assert_eq!(qv(&g, "v").transfer(&w), expected);
    }

    #[test]
    fn equality_and_json() {
        let g = two_loop();
        assert!(!qp(&g, &["e"]).equals(&qp(&g, &["f"])).unwrap());
        assert!(DiagElement::zero(&g).equals(&DiagElement::from_terms(&g, [])).unwrap());
        let a = qp(&g, &["e", "f"]).scale(&q(1, 2)).add(&qv(&g, "v")).unwrap();
        let back = DiagElement::from_doc(&g, &a.to_doc()).unwrap();
        assert_eq!(a, back);
        let vdoc = qv(&g, "v").to_doc();
        assert_eq!(vdoc.terms[0].vertex.as_deref(), Some("v"));
        let other = fork();
        assert_eq!(qv(&g, "v").multiply(&qv(&other, "v")), Err(DiagError::GraphMismatch));
    }

    #[test]
    fn coarsest_form_is_an_antichain() {
        let g = two_loop();
        let a = DiagElement::from_terms(
            &g,
            [
                (Path::parse(&g, &["e"]).unwrap(), qi(2)),
                (Path::parse(&g, &["e", "e"]).unwrap(), qi(1)),
                (Path::vertex(g.vertex("v").unwrap()), qi(1)),
            ],
        );
        // 1 + 2 q_e + q_ee = 4 q_ee + 3 q_ef + q_f
        let keys: Vec<String> = a.terms().keys().map(|p| p.display(&g)).collect();
        assert_eq!(keys, ["ee", "ef", "f"]);
        assert_eq!(a.terms().values().cloned().collect::<Vec<_>>(), vec![qi(4), qi(3), qi(1)]);
    }
}
