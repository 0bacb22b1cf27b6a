//! Concrete Cuntz-Krieger families on finite windows of the path space.
//!
//! The Hilbert space has one basis vector `δ_μ` per path in the window.
//! `S_e δ_μ = δ_{eμ}` when `eμ` is in the window. `P_v` projects onto the
//! paths with range `v`. The diagonal acts by `π(q_η) δ_μ = δ_μ` exactly when
//! `η` is a prefix of `μ`.
//!
//! For an acyclic graph the boundary window with a large enough depth is all
//! of `∂E`, and every relation holds exactly. Otherwise the relations fail on
//! the edges of the window, and the failures are reported as defects.

mod redundancy;
mod scalar;
mod u;
mod verify;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::diag::DiagElement;
use crate::graph::{atoms, basis_paths, Graph, Path};
use crate::rational::{fmt_q, Q};

pub use redundancy::{endo_covariance_ideal, redundancy_test, EndoCovarianceIdeal, RedundancyResult};
pub use scalar::{flatten, q_to_twofloat, Scalar, SparseMat};
pub use u::{build_u, ScaledOperator, UMatrix, UMode};
pub use verify::{
    gauge_grading, verify_representation, verify_with_transfer_weights, IdentityCheck, VerificationReport,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepError {
    #[error("graph has a cycle; use a truncated representation")]
    Cyclic,
    #[error("relation {relation} fails exactly: {detail}")]
    Falsified { relation: String, detail: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("graph mismatch between representation and input")]
    GraphMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    /// Paths of length exactly `N`, and shorter paths ending at a source.
    Boundary,
    /// Every path of length at most `N`.
    Fock,
}

#[derive(Debug, Clone)]
pub struct MatrixRep {
    graph: Arc<Graph>,
    basis: Vec<Path>,
    index: BTreeMap<Path, usize>,
    s: Vec<SparseMat<Q>>,
    p: Vec<SparseMat<Q>>,
    window: Option<(Window, usize)>,
}

impl MatrixRep {
    fn build(g: &Arc<Graph>, basis: Vec<Path>, window: Option<(Window, usize)>) -> MatrixRep {
        let index: BTreeMap<Path, usize> = basis.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let n = basis.len();
        let one = Q::from_integer(1.into());
        let s = g
            .edges()
            .map(|e| {
                let mut m = SparseMat::zeros(n);
                for (i, mu) in basis.iter().enumerate() {
                    if g.source(e) == mu.range() {
                        if let Some(&j) = index.get(&mu.prepend(g, e)) {
                            m.set(j, i, one.clone());
                        }
                    }
                }
                m
            })
            .collect();
        let p = g
            .vertices()
            .map(|v| {
                let d: Vec<Q> = basis
                    .iter()
                    .map(|mu| if mu.range() == v { one.clone() } else { Q::from_integer(0.into()) })
                    .collect();
                SparseMat::diagonal(&d)
            })
            .collect();
        MatrixRep { graph: g.clone(), basis, index, s, p, window }
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Path] {
        &self.basis
    }

    pub fn index_of(&self, p: &Path) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn s(&self, e: crate::graph::EdgeId) -> &SparseMat<Q> {
        &self.s[e.0 as usize]
    }

    pub fn p(&self, v: crate::graph::VertexId) -> &SparseMat<Q> {
        &self.p[v.0 as usize]
    }

    pub fn window(&self) -> Option<(Window, usize)> {
        self.window
    }

    /// True when this is the full boundary representation of an acyclic graph.
    pub fn is_exact(&self) -> bool {
        self.window.is_none()
    }

    pub fn pi_diagonal(&self, a: &DiagElement) -> Vec<Q> {
        self.basis.iter().map(|mu| a.evaluate(mu)).collect()
    }

    pub fn pi(&self, a: &DiagElement) -> SparseMat<Q> {
        SparseMat::diagonal(&self.pi_diagonal(a))
    }

    /// `U' = Σ_e S_e`.
    pub fn unweighted_shift(&self) -> SparseMat<Q> {
        self.s.iter().fold(SparseMat::zeros(self.dim()), |acc, m| acc.add(m))
    }

    /// Indices of the outer layer of the window, where truncation defects live.
    /// For the Fock window this also includes vertex paths at receiving
    /// vertices, since the vacuum is never in the range of any `S_e`.
    pub fn frontier(&self) -> Vec<usize> {
        let Some((kind, depth)) = self.window else {
            return Vec::new();
        };
        let g = &self.graph;
        (0..self.dim())
            .filter(|&i| {
                let mu = &self.basis[i];
                mu.len() == depth || (kind == Window::Fock && mu.is_vertex() && !g.is_source(mu.range()))
            })
            .collect()
    }

    /// Each Cuntz-Krieger relation, as a defect matrix.
    pub fn relation_defects(&self) -> Vec<Defect> {
        let g = &self.graph;
        let frontier = self.frontier();
        let mut out = Vec::new();
        for e in g.edges() {
            let s = self.s(e);
            let sts = s.transpose().mul(s);
            out.push(Defect::new(
                format!("s_{0}* s_{0} = p_{1}", g.edge_name(e), g.vertex_name(g.source(e))),
                sts.sub(self.p(g.source(e))),
                &frontier,
            ));
            let sst = s.mul(&s.transpose());
            let pr = self.p(g.range(e));
            out.push(Defect::new(
                format!("s_{0} s_{0}* <= p_{1}", g.edge_name(e), g.vertex_name(g.range(e))),
                pr.mul(&sst).sub(&sst),
                &frontier,
            ));
        }
        for v in g.vertices() {
            let pv = self.p(v);
            out.push(Defect::new(format!("p_{0}^2 = p_{0}", g.vertex_name(v)), pv.mul(pv).sub(pv), &frontier));
            if g.receives(v).is_empty() {
                continue;
            }
            let sum = g
                .receives(v)
                .iter()
                .fold(SparseMat::zeros(self.dim()), |acc, &e| acc.add(&self.s(e).mul(&self.s(e).transpose())));
            out.push(Defect::new(format!("p_{} = sum s_e s_e*", g.vertex_name(v)), pv.sub(&sum), &frontier));
        }
        out
    }

    pub fn basis_names(&self) -> Vec<String> {
        self.basis.iter().map(|p| p.display(&self.graph)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Defect {
    pub relation: String,
    pub max_entry: f64,
    /// Exact operator norm, available when the defect is diagonal.
    pub operator_norm: Option<String>,
    /// `‖D‖²_HS / dim`: shrinks as the window grows even when the operator
    /// norm of a truncation defect stays at 1.
    pub normalized_hs: String,
    pub support: Vec<usize>,
    pub on_frontier: bool,
    #[serde(skip)]
    pub matrix: SparseMat<Q>,
}

impl Defect {
    fn new(relation: String, matrix: SparseMat<Q>, frontier: &[usize]) -> Defect {
        let support = matrix.support();
        let operator_norm = matrix.is_diagonal().then(|| {
            let m = matrix.entries().map(|(_, _, v)| num_traits::Signed::abs(v)).max().unwrap_or_default();
            fmt_q(&m)
        });
        let dim = matrix.dim().max(1);
        Defect {
            relation,
            max_entry: matrix.max_entry(),
            operator_norm,
            normalized_hs: fmt_q(&(matrix.frobenius_sq() / Q::from_integer(dim.into()))),
            on_frontier: support.iter().all(|i| frontier.contains(i)),
            support,
            matrix,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }
}

/// Exact representation on `ℓ²(∂E)` for an acyclic graph. Every relation is
/// checked and a failure is an error.
pub fn boundary_representation(g: &Arc<Graph>) -> Result<MatrixRep, RepError> {
    if g.has_cycle() {
        return Err(RepError::Cyclic);
    }
    let atlas = crate::graph::enumerate_boundary(g, g.vertex_count());
    let rep = MatrixRep::build(g, atlas.boundary_paths, None);
    if let Some(d) = rep.relation_defects().into_iter().find(|d| !d.is_zero()) {
        return Err(RepError::Falsified { relation: d.relation, detail: format!("nonzero on basis {:?}", d.support) });
    }
    Ok(rep)
}

pub fn truncated_representation(g: &Arc<Graph>, depth: usize, window: Window) -> MatrixRep {
    let basis = match window {
        Window::Boundary => atoms(g, depth),
        Window::Fock => basis_paths(g, depth),
    };
    MatrixRep::build(g, basis, Some((window, depth)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepresentationDoc {
    pub basis: Vec<String>,
    pub window: Option<(Window, usize)>,
    pub s: BTreeMap<String, Vec<Vec<String>>>,
    pub p: BTreeMap<String, Vec<Vec<String>>>,
    pub defects: Vec<Defect>,
}

impl MatrixRep {
    pub fn to_doc(&self) -> RepresentationDoc {
        let g = &self.graph;
        RepresentationDoc {
            basis: self.basis_names(),
            window: self.window,
            s: g.edges().map(|e| (g.edge_name(e).to_string(), self.s(e).to_dense_strings())).collect(),
            p: g.vertices().map(|v| (g.vertex_name(v).to_string(), self.p(v).to_dense_strings())).collect(),
            defects: self.relation_defects(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{g_2loop, g_fork, g_line, g_loop};
    use crate::rational::{q, qi};

    #[test]
    fn line_is_two_dimensional() {
        let f = g_line();
        let rep = boundary_representation(&f.graph).unwrap();
        assert_eq!(rep.basis_names(), ["e", "w"]);
        let e = f.graph.edge("e").unwrap();
        // S_e δ_w = δ_e
        assert_eq!(rep.s(e).get(0, 1), qi(1));
        assert_eq!(rep.s(e).nnz(), 1);
    }

    #[test]
    fn fork_sum_relation() {
        let f = g_fork();
        let rep = boundary_representation(&f.graph).unwrap();
        assert_eq!(rep.dim(), 4);
        let g = &f.graph;
        let (e, ff) = (g.edge("e").unwrap(), g.edge("f").unwrap());
        let sum = rep.s(e).mul(&rep.s(e).transpose()).add(&rep.s(ff).mul(&rep.s(ff).transpose()));
        assert_eq!(&sum, rep.p(g.vertex("v").unwrap()));
    }

    #[test]
    fn isolated_vertex() {
        let g = Arc::new(Graph::new(&["v"], &[] as &[(&str, &str, &str)]).unwrap());
        let rep = boundary_representation(&g).unwrap();
        assert_eq!(rep.dim(), 1);
        assert_eq!(rep.p(g.vertex("v").unwrap()), &SparseMat::identity(1));
    }

    #[test]
    fn cyclic_graph_is_redirected() {
        assert_eq!(boundary_representation(&g_loop().graph).unwrap_err(), RepError::Cyclic);
    }

    #[test]
    fn loop_fock_window() {
        let f = g_loop();
        let rep = truncated_representation(&f.graph, 5, Window::Fock);
        assert_eq!(rep.dim(), 6);
        let d = rep.relation_defects();
        let sts = d.iter().find(|d| d.relation.starts_with("s_e* s_e")).unwrap();
        assert_eq!(sts.support, [5]);
        assert_eq!(sts.operator_norm.as_deref(), Some("1"));
        assert!(d.iter().all(|d| d.on_frontier));
        // Normalized size 1/(N+1).
        assert_eq!(sts.normalized_hs, "1/6");
        let _ = q(1, 6);
    }

    #[test]
    fn two_loop_defects_on_frontier() {
        let f = g_2loop();
        for window in [Window::Boundary, Window::Fock] {
            let rep = truncated_representation(&f.graph, 3, window);
            for d in rep.relation_defects() {
                assert!(d.on_frontier, "{window:?} {}", d.relation);
                assert!(d.support.iter().all(|&i| rep.basis()[i].len() == 3 || rep.basis()[i].is_vertex()));
            }
        }
        let b = truncated_representation(&f.graph, 3, Window::Boundary);
        assert!(b.relation_defects().iter().flat_map(|d| d.support.clone()).all(|i| b.basis()[i].len() == 3));
    }

    #[test]
    fn acyclic_truncation_agrees_with_exact() {
        let f = g_fork();
        let exact = boundary_representation(&f.graph).unwrap();
        let t = truncated_representation(&f.graph, 3, Window::Boundary);
        assert_eq!(exact.basis(), t.basis());
        assert!(t.relation_defects().iter().all(Defect::is_zero));
    }
}
