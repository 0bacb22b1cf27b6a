//! The weighted shift `u = Σ_e √λ_e S_e`.
//!
//! Let `λ_μ` be the product of the weights along `μ`, `Λ = diag(λ_μ)` and
//! `D = Λ^{1/2}`. Then `u = D U' D⁻¹` with `U' = Σ_e S_e`. `D` commutes with
//! the diagonal, so every identity involving `u`, `u*` and `π(a)` becomes a
//! rational identity between `U'`, `Λ` and `π(a)`. Square roots are only
//! needed to print `u` itself.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;
use twofloat::TwoFloat;

use super::scalar::{div, q_to_twofloat, SparseMat};
use super::MatrixRep;
use crate::graph::WeightSystem;
use crate::rational::{fmt_q, square_decompose, Q};

/// `S = D^ε T D^{-ε}` with `D² = Λ` and `ε ∈ {-1, 0, 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledOperator {
    pub t: SparseMat<Q>,
    pub lambda: Vec<Q>,
    pub eps: i8,
}

impl ScaledOperator {
    /// An operator with rational entries.
    pub fn rational(t: SparseMat<Q>) -> Self {
        let n = t.dim();
        ScaledOperator { t, lambda: vec![Q::one(); n], eps: 0 }
    }

    pub fn u(rep: &MatrixRep, w: &WeightSystem) -> Self {
        let lambda = rep.basis().iter().map(|mu| mu.edges().iter().fold(Q::one(), |acc, &e| acc * w.get(e))).collect();
        ScaledOperator { t: rep.unweighted_shift(), lambda, eps: 1 }
    }

    pub fn dim(&self) -> usize {
        self.t.dim()
    }

    pub fn adjoint(&self) -> Self {
        ScaledOperator { t: self.t.transpose(), lambda: self.lambda.clone(), eps: -self.eps }
    }

    /// `Λ^k`.
    pub fn lambda_pow(&self, k: i8) -> Vec<Q> {
        self.lambda
            .iter()
            .map(|l| match k {
                0 => Q::one(),
                1 => l.clone(),
                -1 => l.recip(),
                _ => unreachable!("only powers -1, 0, 1 occur"),
            })
            .collect()
    }

    /// `X` with `S* π(a) S = D^{-ε} X D^{-ε}`, namely `T* π(a) Λ^ε T`.
    pub fn compress(&self, pi_a: &[Q]) -> SparseMat<Q> {
        let d: Vec<Q> = pi_a.iter().zip(self.lambda_pow(self.eps)).map(|(a, l)| a * l).collect();
        self.t.transpose().mul(&self.t.scale_rows(&d))
    }

    /// `Y` with `S π(a) S* = D^ε Y D^ε`, namely `T π(a) Λ^{-ε} T*`.
    pub fn sandwich(&self, pi_a: &[Q]) -> SparseMat<Q> {
        let d: Vec<Q> = pi_a.iter().zip(self.lambda_pow(-self.eps)).map(|(a, l)| a * l).collect();
        self.t.scale_cols(&d).mul(&self.t.transpose())
    }

    /// The operator itself in double-double precision.
    pub fn to_float(&self) -> SparseMat<TwoFloat> {
        let d: Vec<TwoFloat> = self.lambda.iter().map(|l| q_to_twofloat(l).sqrt()).collect();
        let mut out = SparseMat::zeros(self.dim());
        for (r, c, v) in self.t.entries() {
            let x = match self.eps {
                0 => q_to_twofloat(v),
                1 => div(q_to_twofloat(v) * d[r], d[c]),
                _ => div(q_to_twofloat(v) * d[c], d[r]),
            };
            out.set(r, c, x);
        }
        out
    }

    /// Entries as rationals, when every needed ratio is a square.
    pub fn to_rational(&self) -> Option<SparseMat<Q>> {
        let mut out = SparseMat::zeros(self.dim());
        for (r, c, v) in self.t.entries() {
            let ratio = match self.eps {
                0 => Q::one(),
                1 => &self.lambda[r] / &self.lambda[c],
                _ => &self.lambda[c] / &self.lambda[r],
            };
            out.set(r, c, v * crate::rational::sqrt_exact(&ratio)?);
        }
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum UMode {
    /// `u = √radicand · coefficients`.
    Exact { radicand: String, coefficients: Vec<Vec<String>> },
    /// Double-double entries; verdicts that use these are labeled as float.
    Float { entries: Vec<Vec<String>> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UMatrix {
    #[serde(flatten)]
    pub mode: UMode,
    /// Diagonal of `u*u`, which is `Σ_{s(e)=r(μ)} λ_e` on `δ_μ`.
    pub u_star_u: Vec<String>,
    pub partial_isometry: bool,
    /// Every emitting vertex has `Σ_{s⁻¹(v)} λ = 1`.
    pub normalized: bool,
    #[serde(skip)]
    pub operator: ScaledOperator,
}

pub fn build_u(rep: &MatrixRep, w: &WeightSystem) -> UMatrix {
    let g = rep.graph();
    let op = ScaledOperator::u(rep, w);
    let n = rep.dim();
    let radicands: Vec<Option<(Q, BigInt)>> = g.edges().map(|e| square_decompose(w.get(e))).collect();
    let common = radicands
        .first()
        .cloned()
        .flatten()
        .map(|x| x.1)
        .filter(|r| radicands.iter().all(|x| x.as_ref().is_some_and(|(_, s)| s == r)));
    let mode = match common {
        Some(r) => {
            let mut m = SparseMat::<Q>::zeros(n);
            for (e, rc) in g.edges().zip(&radicands) {
                m = m.add(&rep.s(e).scale(&rc.as_ref().unwrap().0));
            }
            UMode::Exact { radicand: r.to_string(), coefficients: m.to_dense_strings() }
        }
        None if g.edge_count() == 0 => {
            UMode::Exact { radicand: "1".into(), coefficients: SparseMat::<Q>::zeros(n).to_dense_strings() }
        }
        None => UMode::Float { entries: op.to_float().to_dense_strings() },
    };
    // u*u = D⁻¹ Y D⁻¹ with Y = U'* Λ U'; it is idempotent iff Y Λ⁻¹ Y = Y.
    let y = op.compress(&vec![Q::one(); n]);
    let y_scaled = y.scale_cols(&op.lambda_pow(-1));
    let partial_isometry = y_scaled.mul(&y) == y;
    let u_star_u = (0..n).map(|i| fmt_q(&(y.get(i, i) / &op.lambda[i]))).collect();
    let normalized = g.vertices().filter(|&v| !g.emits(v).is_empty()).all(|v| w.emitted_sum(g, v).is_one());
    UMatrix { mode, u_star_u, partial_isometry, normalized, operator: op }
}

impl UMatrix {
    pub fn is_exact(&self) -> bool {
        matches!(self.mode, UMode::Exact { .. })
    }
}
