//! Redundancies and the covariance ideal of a concrete pair `(π, S)`.
//!
//! `S = D^ε T D^{-ε}` as in [`super::u`]. Conjugating by `D` turns
//! `span π(A) S π(A) S* π(A)` into `D^ε · span π(x) T π(y) Λ^{-ε} T* π(z) · D^ε`,
//! which has a rational spanning set.

use num_traits::{One, Zero};
use serde::Serialize;

use super::scalar::{flatten, q_to_twofloat, SparseMat};
use super::u::ScaledOperator;
use super::{MatrixRep, RepError};
use crate::cp::Subalgebra;
use crate::diag::DiagElement;
use crate::graph::basis_paths;
use crate::linalg::{QMatrix, SpanBasis, SparseVec};
use crate::rational::{sqrt_exact, Q};

/// Minimal projections of `π(A)` as index blocks, together with the basis
/// elements used to find them.
fn algebra_blocks(rep: &MatrixRep, depth: usize) -> (Vec<(String, DiagElement)>, Vec<Vec<usize>>) {
    let g = rep.graph();
    let elements: Vec<(String, DiagElement)> = basis_paths(g, depth)
        .into_iter()
        .map(|p| (format!("q_{}", p.display(g)), DiagElement::projection(g, p)))
        .collect();
    let diagonals: Vec<Vec<Q>> = elements.iter().map(|(_, a)| rep.pi_diagonal(a)).collect();
    // Projections generate a subalgebra, so the span is closed.
    let sub = Subalgebra::from_span(rep.dim(), &diagonals).expect("span of commuting projections is an algebra");
    (elements, sub.blocks().to_vec())
}

fn block_projection(n: usize, block: &[usize]) -> Vec<Q> {
    let mut d = vec![Q::zero(); n];
    for &i in block {
        d[i] = Q::one();
    }
    d
}

/// Rational generators `E_B T E_C Λ^{-ε} T* E_F` of the conjugated span.
fn generator_span(s: &ScaledOperator, blocks: &[Vec<usize>]) -> (SpanBasis, Vec<SparseMat<Q>>) {
    let n = s.dim();
    let inv = s.lambda_pow(-s.eps);
    let projections: Vec<Vec<Q>> = blocks.iter().map(|b| block_projection(n, b)).collect();
    let mut span = SpanBasis::new();
    let mut kept = Vec::new();
    for y in &projections {
        let d: Vec<Q> = y.iter().zip(&inv).map(|(a, b)| a * b).collect();
        let middle = s.t.scale_cols(&d).mul(&s.t.transpose());
        if middle.is_zero() {
            continue;
        }
        for x in &projections {
            let left = middle.scale_rows(x);
            if left.is_zero() {
                continue;
            }
            for z in &projections {
                let m = left.scale_cols(z);
                if !m.is_zero() && span.insert(&flatten(&m)) {
                    kept.push(m);
                }
            }
        }
    }
    (span, kept)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RedundancyResult {
    pub span_dimension: usize,
    /// Some `k` in the span satisfies `π(a)π(b)S = kπ(b)S` for every `b`.
    pub k_exists: bool,
    /// `π(a)` itself lies in the span, so `(π(a), π(a))` is a redundancy.
    pub member: bool,
    pub k_is_zero: Option<bool>,
    /// Entries of `k`, exact when every needed square root is rational.
    pub k: Option<Vec<Vec<String>>>,
    pub k_exact: bool,
}

pub fn redundancy_test(rep: &MatrixRep, s: &ScaledOperator, a: &DiagElement, depth: usize) -> RedundancyResult {
    let n = rep.dim();
    let (_, blocks) = algebra_blocks(rep, depth);
    let (span, gens) = generator_span(s, &blocks);
    let pa = rep.pi_diagonal(a);
    let lam_e = s.lambda_pow(s.eps);
    let lam_inv = s.lambda_pow(-s.eps);
    // π(a) = D^ε k'' D^ε means k'' = π(a) Λ^{-ε}.
    let target: Vec<Q> = pa.iter().zip(&lam_inv).map(|(x, l)| x * l).collect();
    let member = span.contains(&flatten(&SparseMat::diagonal(&target)));
    let k_inner =
        if member { Some(SparseMat::diagonal(&target)) } else { solve_for_k(s, &gens, &blocks, &pa, &lam_e, n) };
    let (k, k_exact) = match &k_inner {
        Some(m) => render_k(s, m),
        None => (None, false),
    };
    RedundancyResult {
        span_dimension: span.dim(),
        k_exists: k_inner.is_some(),
        member,
        k_is_zero: k_inner.as_ref().map(SparseMat::is_zero),
        k,
        k_exact,
    }
}

/// Solves `k'' Λ^ε π(b) T = π(a) π(b) T` for every block projection `b`,
/// with `k''` in the span of `gens`.
fn solve_for_k(
    s: &ScaledOperator,
    gens: &[SparseMat<Q>],
    blocks: &[Vec<usize>],
    pa: &[Q],
    lam_e: &[Q],
    n: usize,
) -> Option<SparseMat<Q>> {
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let mut rhs: Vec<Q> = Vec::new();
    for b in blocks {
        let pb = block_projection(n, b);
        let bt = s.t.scale_rows(&pb);
        let target = bt.scale_rows(pa);
        let scaled: Vec<SparseVec> = gens.iter().map(|g| flatten(&g.scale_cols(lam_e).mul(&bt))).collect();
        let t = flatten(&target);
        let mut coords: Vec<usize> = scaled.iter().flat_map(|v| v.keys().copied()).chain(t.keys().copied()).collect();
        coords.sort_unstable();
        coords.dedup();
        for c in coords {
            rows.push(scaled.iter().map(|v| v.get(&c).cloned().unwrap_or_else(Q::zero)).collect());
            rhs.push(t.get(&c).cloned().unwrap_or_else(Q::zero));
        }
    }
    if gens.is_empty() {
        return rhs.iter().all(Zero::is_zero).then(|| SparseMat::zeros(n));
    }
    if rows.is_empty() {
        return Some(SparseMat::zeros(n));
    }
    let c = QMatrix::from_rows(rows).solve(&rhs)?;
    Some(gens.iter().zip(&c).fold(SparseMat::zeros(n), |acc, (g, ci)| acc.add(&g.scale(ci))))
}

/// `k = D^ε k'' D^ε`, entry `(i, j)` scaled by `(λ_i λ_j)^{ε/2}`.
fn render_k(s: &ScaledOperator, k_inner: &SparseMat<Q>) -> (Option<Vec<Vec<String>>>, bool) {
    let lam = s.lambda_pow(s.eps);
    let mut exact = SparseMat::<Q>::zeros(k_inner.dim());
    let mut all_exact = true;
    for (r, c, v) in k_inner.entries() {
        match sqrt_exact(&(&lam[r] * &lam[c])) {
            Some(f) => exact.set(r, c, v * f),
            None => all_exact = false,
        }
    }
    if all_exact {
        return (Some(exact.to_dense_strings()), true);
    }
    let mut approx = SparseMat::zeros(k_inner.dim());
    for (r, c, v) in k_inner.entries() {
        approx.set(r, c, q_to_twofloat(v) * (q_to_twofloat(&lam[r]) * q_to_twofloat(&lam[c])).sqrt());
    }
    (Some(approx.to_dense_strings()), false)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EndoCovarianceIdeal {
    pub partial_isometry: bool,
    pub range_commutes: bool,
    /// Basis elements `a` with `SS*π(a) = π(a)`.
    pub members: Vec<String>,
    /// Basis indices where `SS* = 1`; `J` is the functions supported here.
    pub support: Vec<usize>,
    pub redundancy_agrees: bool,
}

/// `J = {a : SS*π(a) = π(a)}` for `S` implementing the endomorphism `beta`
/// through `S*π(a)S = π(beta(a))`.
pub fn endo_covariance_ideal(
    rep: &MatrixRep,
    s: &ScaledOperator,
    beta: &dyn Fn(&DiagElement) -> DiagElement,
    depth: usize,
) -> Result<EndoCovarianceIdeal, RepError> {
    let n = rep.dim();
    let (elements, _) = algebra_blocks(rep, depth);
    let lam_e = s.lambda_pow(s.eps);
    let lam_inv = s.lambda_pow(-s.eps);
    let times = |a: &[Q], d: &[Q]| a.iter().zip(d).map(|(x, y)| x * y).collect::<Vec<Q>>();
    for (name, a) in &elements {
        let lhs = s.compress(&rep.pi_diagonal(a));
        let rhs = SparseMat::diagonal(&times(&rep.pi_diagonal(&beta(a)), &lam_e));
        if lhs != rhs {
            return Err(RepError::Precondition(format!("S* pi(a) S != pi(beta(a)) at a = {name}")));
        }
    }
    // S*S = D^{-ε} Y D^{-ε} with Y = T* Λ^ε T.
    let y = s.compress(&vec![Q::one(); n]);
    let partial_isometry = y.scale_cols(&lam_inv).mul(&y) == y;
    if !partial_isometry {
        return Err(RepError::Falsified {
            relation: "S is a partial isometry".into(),
            detail: "S*S is not idempotent although S* pi(.) S is multiplicative".into(),
        });
    }
    // SS* = D^ε X D^ε with X = T Λ^{-ε} T*.
    let x = s.sandwich(&vec![Q::one(); n]);
    let range_commutes = elements.iter().all(|(_, a)| {
        let d = rep.pi_diagonal(a);
        x.scale_cols(&d) == x.scale_rows(&d)
    });
    let mut members = Vec::new();
    let mut agrees = true;
    for (name, a) in &elements {
        let d = rep.pi_diagonal(a);
        let inside = x.scale_cols(&d) == SparseMat::diagonal(&times(&d, &lam_inv));
        if inside {
            members.push(name.clone());
        }
        if redundancy_test(rep, s, a, depth).member != inside {
            agrees = false;
        }
    }
    let support = (0..n).filter(|&i| x.get(i, i) == lam_inv[i] && !x.get(i, i).is_zero()).collect();
    Ok(EndoCovarianceIdeal { partial_isometry, range_commutes, members, support, redundancy_agrees: agrees })
}
