//! Analysis of the triple `(D_E, α, L_λ)`: the transfer identity, regularity,
//! the corner property, ideals, and regular endomorphisms of finite systems.
//!
//! Cyclic graphs have infinite-dimensional diagonal algebras, so every check
//! here runs on basis projections up to a stated depth and reports it.

mod endomorphisms;
mod ideals;

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::diag::{raw_product, DiagDoc, DiagElement};
use crate::graph::{atoms, basis_paths, Graph, Path, WeightSystem};
use crate::linalg::{SpanBasis, SparseVec};
use crate::rational::{fmt_q, Q};

pub use endomorphisms::{enumerate_regular_endomorphisms, PointMap, RegularEndomorphisms};
pub use ideals::{
    compute_ideals, covariance_span_check, multiplicative_domain_truncated, BruteForceIdeals, CovarianceSpanReport,
    IdealReport, TruncatedMultiplicativeDomain,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExelError {
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("brute-force ideal disagrees with the closed form: {0}")]
    IdealMismatch(String),
    #[error("solution space is not closed under multiplication")]
    NotASubalgebra,
    #[error(transparent)]
    Cp(#[from] crate::cp::CpError),
}

/// A failing instance of an identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub identity: String,
    pub elements: Vec<String>,
    pub lhs: DiagDoc,
    pub rhs: DiagDoc,
    /// Set when `lhs = factor · rhs`.
    pub factor: Option<String>,
}

impl Witness {
    fn new(identity: &str, elements: Vec<String>, lhs: &DiagElement, rhs: &DiagElement) -> Self {
        Witness {
            identity: identity.into(),
            elements,
            lhs: lhs.to_doc(),
            rhs: rhs.to_doc(),
            factor: ratio(lhs, rhs).map(|c| fmt_q(&c)),
        }
    }
}

/// `c` with `a = c·b`, when `b ≠ 0` and such a scalar exists.
pub fn ratio(a: &DiagElement, b: &DiagElement) -> Option<Q> {
    let (_, c0) = b.terms().iter().next()?;
    let (p0, _) = b.terms().iter().next()?;
    let c = a.terms().get(p0).cloned().unwrap_or_else(Q::zero) / c0;
    (a.terms().len() == b.terms().len() && b.scale(&c) == *a).then_some(c)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferIdentityReport {
    pub depth: usize,
    pub basis_size: usize,
    pub pairs_checked: usize,
    pub holds: bool,
    pub witness: Option<Witness>,
}

/// Checks `L(q_μ α(q_ν)) = L(q_μ) q_ν` for all paths `μ, ν` up to `depth`.
pub fn verify_transfer_identity(g: &Arc<Graph>, w: &WeightSystem, depth: usize) -> TransferIdentityReport {
    verify_transfer_identity_with(g, depth, &|a| a.alpha(), &|a| a.transfer(w))
}

/// Same check with arbitrary maps standing in for `α` and `L`.
pub fn verify_transfer_identity_with(
    g: &Arc<Graph>,
    depth: usize,
    alpha: &dyn Fn(&DiagElement) -> DiagElement,
    transfer: &dyn Fn(&DiagElement) -> DiagElement,
) -> TransferIdentityReport {
    let basis = basis_paths(g, depth);
    let proj: Vec<DiagElement> = basis.iter().map(|p| DiagElement::projection(g, p.clone())).collect();
    let alphas: Vec<DiagElement> = proj.iter().map(alpha).collect();
    let transfers: Vec<DiagElement> = proj.iter().map(transfer).collect();
    let mut pairs = 0;
    for (i, qm) in proj.iter().enumerate() {
        for (j, qn) in proj.iter().enumerate() {
            pairs += 1;
            let prod = raw_product(qm.terms(), alphas[j].terms());
            let lhs = if prod.is_empty() { DiagElement::zero(g) } else { transfer(&DiagElement::from_terms(g, prod)) };
            let rprod = raw_product(transfers[i].terms(), qn.terms());
            if lhs.is_zero() && rprod.is_empty() {
                continue;
            }
            let rhs = DiagElement::from_terms(g, rprod);
            if lhs != rhs {
                let names = vec![basis[i].display(g), basis[j].display(g)];
                return TransferIdentityReport {
                    depth,
                    basis_size: basis.len(),
                    pairs_checked: pairs,
                    holds: false,
                    witness: Some(Witness::new("L(q_mu alpha(q_nu)) = L(q_mu) q_nu", names, &lhs, &rhs)),
                };
            }
        }
    }
    TransferIdentityReport { depth, basis_size: basis.len(), pairs_checked: pairs, holds: true, witness: None }
}

/// Per-vertex sums `Σ_{e ∈ s⁻¹(v)} λ_e` against 1, read two ways.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizationReport {
    /// Over emitting vertices only; this reading decides regularity.
    pub emitting_vertices: bool,
    /// Over all vertices, where sinks contribute an empty sum.
    pub all_vertices: bool,
    pub offending: Vec<(String, String)>,
}

pub fn normalization(g: &Graph, w: &WeightSystem) -> NormalizationReport {
    let offending: Vec<(String, String)> = g
        .vertices()
        .filter(|&v| !g.is_sink(v) && !w.emitted_sum(g, v).is_one())
        .map(|v| (g.vertex_name(v).to_string(), fmt_q(&w.emitted_sum(g, v))))
        .collect();
    let emitting_vertices = offending.is_empty();
    NormalizationReport {
        emitting_vertices,
        all_vertices: emitting_vertices && !g.vertices().any(|v| g.is_sink(v)),
        offending,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemClassification {
    pub is_exel: bool,
    pub is_regular: bool,
    pub is_corner: bool,
    pub depth: usize,
    pub normalization: NormalizationReport,
    /// `α(L(α(q_μ))) = α(q_μ)` on the basis.
    pub idempotence_identity: bool,
    pub hereditary_range: bool,
    pub witness: Option<Witness>,
    pub depth_relative: bool,
}

/// Decides the Exel, regular and corner properties on the basis up to `depth`.
///
/// Regularity is decided both by the per-vertex normalisation and by the
/// identity `α∘L∘α = α`; a disagreement is an error.
pub fn classify_system(g: &Arc<Graph>, w: &WeightSystem, depth: usize) -> Result<SystemClassification, ExelError> {
    let exel = verify_transfer_identity(g, w, depth);
    let norm = normalization(g, w);
    let basis = basis_paths(g, depth);
    let mut witness = exel.witness.clone();

    let mut idempotence_identity = true;
    for p in &basis {
        let a = DiagElement::projection(g, p.clone()).alpha();
        let lhs = a.transfer(w).alpha();
        if lhs != a {
            idempotence_identity = false;
            if witness.is_none() {
                witness = Some(Witness::new("alpha(L(alpha(q_mu))) = alpha(q_mu)", vec![p.display(g)], &lhs, &a));
            }
            break;
        }
    }
    if idempotence_identity != norm.emitting_vertices {
        return Err(ExelError::Inconsistent(format!(
            "normalisation says {} but alpha L alpha = alpha says {}",
            norm.emitting_vertices, idempotence_identity
        )));
    }
    let is_regular = exel.holds && idempotence_identity;

    let p = DiagElement::one(g).alpha();
    let mut corner_identity = true;
    for path in &basis {
        let q = DiagElement::projection(g, path.clone());
        let lhs = q.transfer(w).alpha();
        let rhs = p.multiply(&q).expect("same graph");
        if lhs != rhs {
            corner_identity = false;
            if witness.is_none() {
                witness = Some(Witness::new("alpha(L(q_mu)) = p q_mu p", vec![path.display(g)], &lhs, &rhs));
            }
            break;
        }
    }
    let hereditary_range = alpha_range_is_hereditary(g, depth);
    Ok(SystemClassification {
        is_exel: exel.holds,
        is_regular,
        is_corner: is_regular && corner_identity && hereditary_range,
        depth,
        normalization: norm,
        idempotence_identity,
        hereditary_range,
        witness,
        depth_relative: g.has_cycle(),
    })
}

/// Coordinates of `a` on the depth-`d` atoms.
pub(crate) fn atom_vector(a: &DiagElement, index: &std::collections::BTreeMap<Path, usize>) -> SparseVec {
    index.iter().map(|(x, &i)| (i, a.evaluate(x))).filter(|(_, c)| !c.is_zero()).collect()
}

pub(crate) fn atom_index(g: &Graph, d: usize) -> std::collections::BTreeMap<Path, usize> {
    atoms(g, d).into_iter().enumerate().map(|(i, p)| (p, i)).collect()
}

/// In the depth-`d` truncation, the span of `α(q_μ)`, `|μ| < d`, equals
/// `χ_S · D_d` for its support `S`.
fn alpha_range_is_hereditary(g: &Arc<Graph>, d: usize) -> bool {
    if d == 0 {
        return true;
    }
    let index = atom_index(g, d);
    let mut span = SpanBasis::new();
    let mut support = std::collections::BTreeSet::new();
    for p in basis_paths(g, d - 1) {
        let v = atom_vector(&DiagElement::projection(g, p).alpha(), &index);
        support.extend(v.keys().copied());
        span.insert(&v);
    }
    span.dim() == support.len()
}

/// `L` restricted to the depth-`d` truncation, as a matrix on its atoms:
/// `M[z, x] = L(q_x)(z)`.
pub fn truncated_transfer_matrix(
    g: &Arc<Graph>,
    w: &WeightSystem,
    d: usize,
) -> Result<(Vec<Path>, crate::cp::PositiveMapMatrix), ExelError> {
    let pts = atoms(g, d);
    let images: Vec<DiagElement> = pts.iter().map(|x| DiagElement::projection(g, x.clone()).transfer(w)).collect();
    let rows = pts.iter().map(|z| images.iter().map(|l| l.evaluate(z)).collect()).collect();
    Ok((pts, crate::cp::PositiveMapMatrix::from_rows(rows)?))
}

/// The shift `σ` as a partial map on the depth-`d` atoms, so that
/// `α(a)(x) = a(τ(x))`. `τ(x)` is the atom comparable with `σ(x)` in prefix
/// order. `None` when some `σ(x)` meets several atoms, i.e. `α` does not
/// preserve the truncation.
pub fn truncated_shift_map(g: &Arc<Graph>, d: usize) -> Option<PointMap> {
    let pts = atoms(g, d);
    let mut map = vec![None; pts.len()];
    for (i, x) in pts.iter().enumerate() {
        if x.is_vertex() {
            continue;
        }
        let y = x.shift(g).ok()?;
        let hits: Vec<usize> = (0..pts.len()).filter(|&j| y.is_prefix_of(&pts[j]) || pts[j].is_prefix_of(&y)).collect();
        match hits[..] {
            [j] => map[i] = Some(j),
            _ => return None,
        }
    }
    PointMap::new(pts.len(), map).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn g(vs: &[&str], es: &[(&str, &str, &str)]) -> Arc<Graph> {
        Arc::new(Graph::new(vs, es).unwrap())
    }

    #[test]
    fn transfer_identity_on_small_graphs() {
        let line = g(&["w", "v"], &[("e", "w", "v")]);
        assert!(verify_transfer_identity(&line, &WeightSystem::constant(&line, qi(1)).unwrap(), 2).holds);
        let two = g(&["v"], &[("e", "v", "v"), ("f", "v", "v")]);
        let r = verify_transfer_identity(&two, &WeightSystem::constant(&two, q(1, 2)).unwrap(), 3);
        assert!(r.holds);
        assert_eq!(r.pairs_checked, 15 * 15);
    }

    #[test]
    fn identity_alpha_breaks_the_identity() {
        let two = g(&["v"], &[("e", "v", "v"), ("f", "v", "v")]);
        let w = WeightSystem::constant(&two, q(1, 2)).unwrap();
        let r = verify_transfer_identity_with(&two, 2, &|a| a.clone(), &|a| a.transfer(&w));
        assert!(!r.holds);
        assert!(r.witness.is_some());
    }

    #[test]
    fn regularity_examples() {
        let lp = g(&["v"], &[("e", "v", "v")]);
        let c = classify_system(&lp, &WeightSystem::constant(&lp, qi(1)).unwrap(), 3).unwrap();
        assert!(c.is_regular && c.is_corner);
        let two = g(&["v"], &[("e", "v", "v"), ("f", "v", "v")]);
        let c = classify_system(&two, &WeightSystem::constant(&two, q(1, 2)).unwrap(), 3).unwrap();
        assert!(c.is_exel && c.is_regular && !c.is_corner);
        let c = classify_system(&two, &WeightSystem::constant(&two, qi(1)).unwrap(), 3).unwrap();
        assert!(c.is_exel && !c.is_regular);
        let wit = c.witness.unwrap();
        assert_eq!(wit.elements, ["v"]);
        assert_eq!(wit.factor.as_deref(), Some("2"));
        let line = g(&["w", "v"], &[("e", "w", "v")]);
        let c = classify_system(&line, &WeightSystem::constant(&line, qi(1)).unwrap(), 2).unwrap();
        assert!(c.is_regular && c.is_corner && c.hereditary_range);
        assert!(!c.normalization.all_vertices);
    }

    #[test]
    fn truncated_line_system() {
        let line = g(&["w", "v"], &[("e", "w", "v")]);
        let (pts, m) = truncated_transfer_matrix(&line, &WeightSystem::constant(&line, qi(1)).unwrap(), 1).unwrap();
        let names: Vec<String> = pts.iter().map(|p| p.display(&line)).collect();
        assert_eq!(names, ["e", "w"]);
        assert_eq!(m.to_strings(), [["0", "0"], ["1", "0"]]);
        let sigma = truncated_shift_map(&line, 1).unwrap();
        assert_eq!(sigma.as_slice(), [Some(1), None]);
        assert!(sigma.has_hereditary_range());
        let found = enumerate_regular_endomorphisms(&m).unwrap();
        let hereditary: Vec<_> = found.endomorphisms.iter().filter(|e| e.point_map.has_hereditary_range()).collect();
        assert_eq!(hereditary.len(), 1);
        assert_eq!(hereditary[0].point_map, sigma);
    }

    #[test]
    fn two_loop_truncation_leaves_no_regular_endomorphism() {
        let two = g(&["v"], &[("e", "v", "v"), ("f", "v", "v")]);
        let (_, m) = truncated_transfer_matrix(&two, &WeightSystem::constant(&two, q(1, 2)).unwrap(), 1).unwrap();
        assert!(truncated_shift_map(&two, 1).is_none());
        let lp = g(&["v"], &[("e", "v", "v")]);
        assert_eq!(truncated_shift_map(&lp, 1).unwrap().as_slice(), [Some(0)]);
        let found = enumerate_regular_endomorphisms(&m).unwrap();
        assert!(found.endomorphisms.is_empty() && found.reason.is_some());
    }
}
