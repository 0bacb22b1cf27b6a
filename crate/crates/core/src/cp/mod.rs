//! Positive maps on `C(X)` for a finite set `X = {0, …, n-1}`.
//!
//! A map is stored as a nonnegative matrix whose row `x` is the measure
//! `μ_x`: `φ(a)(x) = Σ_y M[x,y] a(y)`. The topology is discrete, so the
//! closedness and openness subtleties of relations on general spaces do not
//! arise here.

mod quiver;
mod subalgebra;
mod transfer_pair;

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::QMatrix;
use crate::rational::{fmt_q, parse_q, serde_q, FloatPolicy, RationalError, Q};

pub use quiver::{quiver, support_relation, Quiver, QuiverEdge, SupportRelation};
pub use subalgebra::Subalgebra;
pub use transfer_pair::{check_transfer_pair, PointMap, RegularTransferCount, TransferPairClassification};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CpError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("not an endomorphism: {0}")]
    NotAnEndomorphism(String),
    #[error("not an Exel system: {0}")]
    NotExel(String),
    #[error("solution space is not closed under multiplication")]
    NotASubalgebra,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Rational(#[from] RationalError),
    #[error("malformed matrix document: {0}")]
    Malformed(String),
}

/// Nonnegative square rational matrix, rows are the measures `μ_x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositiveMapMatrix {
    m: QMatrix,
}

impl PositiveMapMatrix {
    pub fn new(m: QMatrix) -> Result<Self, CpError> {
        if m.rows() != m.cols() {
            return Err(CpError::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                if m[(r, c)].is_negative() {
                    return Err(CpError::NegativeEntry { row: r, col: c, value: fmt_q(&m[(r, c)]) });
                }
            }
        }
        Ok(PositiveMapMatrix { m })
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Result<Self, CpError> {
        if rows.iter().any(|r| r.len() != rows.len()) {
            return Err(CpError::NotSquare { rows: rows.len(), cols: rows.first().map_or(0, Vec::len) });
        }
        Self::new(QMatrix::from_rows(rows))
    }

    /// JSON array of arrays of `"p/q"` strings (or integers).
    pub fn from_json(text: &str, policy: FloatPolicy) -> Result<Self, CpError> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| CpError::Malformed(e.to_string()))?;
        let rows = v.as_array().ok_or_else(|| CpError::Malformed("expected an array of rows".into()))?;
        let mut out = Vec::new();
        for row in rows {
            let row = row.as_array().ok_or_else(|| CpError::Malformed("expected an array of entries".into()))?;
            let mut r = Vec::new();
            for x in row {
                let text = match x {
                    serde_json::Value::String(s) => s.clone(),
                    serde_json::Value::Number(n) => n.to_string(),
                    other => return Err(CpError::Malformed(format!("bad entry {other}"))),
                };
                r.push(parse_q(&text, policy)?);
            }
            out.push(r);
        }
        Self::from_rows(out)
    }

    /// Comma-separated rows, one per line; blank lines and `#` comments skipped.
    pub fn from_csv(text: &str, policy: FloatPolicy) -> Result<Self, CpError> {
        let mut rows = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            rows.push(line.split(',').map(|x| parse_q(x, policy)).collect::<Result<Vec<_>, _>>()?);
        }
        Self::from_rows(rows)
    }

    pub fn identity(n: usize) -> Self {
        PositiveMapMatrix { m: QMatrix::identity(n) }
    }

    pub fn zero(n: usize) -> Self {
        PositiveMapMatrix { m: QMatrix::zeros(n, n) }
    }

    pub fn n(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.m
    }

    pub fn get(&self, x: usize, y: usize) -> &Q {
        &self.m[(x, y)]
    }

    pub fn apply(&self, a: &[Q]) -> Vec<Q> {
        self.m.mul_vec(a)
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.m.to_rows().iter().map(|r| r.iter().map(fmt_q).collect()).collect()
    }

    pub fn row_sum(&self, x: usize) -> Q {
        self.m.row(x).iter().sum()
    }

    pub fn column_is_zero(&self, y: usize) -> bool {
        (0..self.n()).all(|x| self.m[(x, y)].is_zero())
    }
}

/// `χ_S` as a vector.
pub fn indicator(n: usize, points: impl IntoIterator<Item = usize>) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    for p in points {
        v[p] = Q::one();
    }
    v
}

pub fn pointwise(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// `‖φ‖ = ‖φ(1)‖ = max_x Σ_y M[x,y]`.
pub fn op_norm(m: &PositiveMapMatrix) -> Q {
    (0..m.n()).map(|x| m.row_sum(x)).max().unwrap_or_else(Q::zero)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GnsKernel {
    /// `N_φ` is the set of functions supported here.
    pub points: Vec<usize>,
    /// Largest-ideal property confirmed by enumerating all support sets.
    pub brute_force_checked: bool,
}

/// Zero columns of `M`; cross-checked for `n ≤ 12` against all support sets.
pub fn gns_kernel(m: &PositiveMapMatrix) -> Result<GnsKernel, CpError> {
    let n = m.n();
    let z: Vec<usize> = (0..n).filter(|&y| m.column_is_zero(y)).collect();
    let checked = n <= 12;
    if checked {
        // S is admissible when φ kills every function supported in S.
        let ok =
            |s: u32| (0..n).filter(|i| s >> i & 1 == 1).all(|y| m.apply(&indicator(n, [y])).iter().all(Zero::is_zero));
        let admissible: Vec<u32> = (0..1u32 << n).filter(|&s| ok(s)).collect();
        let largest = admissible.iter().copied().max_by_key(|s| s.count_ones()).unwrap_or(0);
        let zmask: u32 = z.iter().map(|&i| 1 << i).sum();
        if largest != zmask || admissible.iter().any(|&s| s & !zmask != 0) {
            return Err(CpError::Inconsistent(format!("largest kernel ideal {largest:#b}, zero columns {zmask:#b}")));
        }
    }
    Ok(GnsKernel { points: z, brute_force_checked: checked })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplicativeDomain {
    pub subalgebra: Subalgebra,
    pub dimension: usize,
    /// Result of comparing with `{a : φ(a²) = φ(a)²}` on a test family, when
    /// `‖φ‖ ≤ 1`.
    pub single_variable_check: Option<bool>,
}

/// Solves `a(y) = Σ_z M[x,z] a(z)` for every `(x, y)` with `M[x,y] > 0`.
pub fn multiplicative_domain(m: &PositiveMapMatrix) -> Result<MultiplicativeDomain, CpError> {
    let sub = md_subalgebra(m)?;
    let single_variable_check = if op_norm(m) <= Q::one() {
        let ok = test_family(m.n(), &sub).iter().all(|a| sub.contains(a) == single_variable_member(m, a));
        if !ok {
            return Err(CpError::Inconsistent(
                "single-variable characterisation of the multiplicative domain differs".into(),
            ));
        }
        Some(true)
    } else {
        None
    };
    Ok(MultiplicativeDomain { dimension: sub.dimension(), subalgebra: sub, single_variable_check })
}

/// The multiplicative domain as a subalgebra, without cross-checks.
pub fn md_subalgebra(m: &PositiveMapMatrix) -> Result<Subalgebra, CpError> {
    let n = m.n();
    let mut rows = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if m.get(x, y).is_zero() {
                continue;
            }
            let mut row: Vec<Q> = m.matrix().row(x).iter().map(|c| -c.clone()).collect();
            row[y] += Q::one();
            rows.push(row);
        }
    }
    let basis = if rows.is_empty() {
        (0..n).map(|i| indicator(n, [i])).collect()
    } else {
        QMatrix::from_rows(rows).nullspace()
    };
    Subalgebra::from_span(n, &basis).ok_or(CpError::NotASubalgebra)
}

fn single_variable_member(m: &PositiveMapMatrix, a: &[Q]) -> bool {
    let fa = m.apply(a);
    m.apply(&pointwise(a, a)) == pointwise(&fa, &fa)
}

/// Indicators of all subsets (n ≤ 8) or singletons and pairs, the subalgebra
/// basis, and a few deterministic integer vectors.
fn test_family(n: usize, sub: &Subalgebra) -> Vec<Vec<Q>> {
    let mut out = Vec::new();
    if n <= 8 {
        for s in 0..1u32 << n {
            out.push(indicator(n, (0..n).filter(|i| s >> i & 1 == 1)));
        }
    } else {
        for i in 0..n {
            for j in i..n {
                out.push(indicator(n, [i, j]));
            }
        }
    }
    out.extend(sub.basis());
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    for _ in 0..16 {
        out.push(
            (0..n)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    Q::from_integer(((state >> 33) as i64 % 7 - 3).into())
                })
                .collect(),
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FaithfulnessReport {
    /// `φ` faithful on the ideal generated by `C`.
    pub faithful_on_ideal: bool,
    /// `φ` faithful on `CAC`.
    pub faithful_on_corner: bool,
    /// `φ` almost faithful on the ideal generated by `C`.
    pub almost_faithful: bool,
    pub verdict: bool,
}

/// Evaluates the three faithfulness conditions separately for the
/// subalgebra of functions supported in `support`.
pub fn faithfulness_report(m: &PositiveMapMatrix, support: &BTreeSet<usize>) -> Result<FaithfulnessReport, CpError> {
    let n = m.n();
    if support.iter().any(|&p| p >= n) {
        return Err(CpError::Dimension(format!("support point out of range for n = {n}")));
    }
    let nonzero = |v: &[Q]| v.iter().any(|x| !x.is_zero());
    let phi_sq = |a: &[Q]| m.apply(&pointwise(a, a));
    let points: Vec<Vec<Q>> = (0..n).map(|x| indicator(n, [x])).collect();
    let c_basis: Vec<Vec<Q>> = support.iter().map(|&p| indicator(n, [p])).collect();

    // Ideal generated by C: spanned by a·c.
    let ideal: Vec<Vec<Q>> =
        points.iter().flat_map(|a| c_basis.iter().map(move |c| pointwise(a, c))).filter(|v| nonzero(v)).collect();
    let faithful_on_ideal = ideal.iter().all(|a| nonzero(&phi_sq(a)));

    // CAC: spanned by c·a·c'.
    let mut corner = Vec::new();
    for c in &c_basis {
        for a in &points {
            for d in &c_basis {
                let v = pointwise(&pointwise(c, a), d);
                if nonzero(&v) {
                    corner.push(v);
                }
            }
        }
    }
    let faithful_on_corner = corner.iter().all(|a| nonzero(&phi_sq(a)));

    // Almost faithful: no nonzero a in the ideal with φ((ab)*(ab)) = 0 for all b.
    let almost_faithful = ideal.iter().all(|a| points.iter().any(|b| nonzero(&phi_sq(&pointwise(a, b)))));

    if faithful_on_ideal != faithful_on_corner || faithful_on_corner != almost_faithful {
        return Err(CpError::Inconsistent(format!(
            "faithfulness conditions disagree: ideal {faithful_on_ideal}, corner {faithful_on_corner}, almost {almost_faithful}"
        )));
    }
    Ok(FaithfulnessReport { faithful_on_ideal, faithful_on_corner, almost_faithful, verdict: faithful_on_ideal })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectationFailure {
    NotIdempotent,
    ImageNotInSubalgebra,
    NotIdentityOnSubalgebra,
    SubalgebraNotInMultiplicativeDomain,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectationReport {
    pub is_conditional_expectation: bool,
    pub failure: Option<ExpectationFailure>,
    pub witness: Option<Vec<String>>,
}

/// Checks, in order: `M² = M`, image in `B`, `M = id` on `B`, `B ⊆ MD(M)`.
pub fn is_conditional_expectation(m: &PositiveMapMatrix, b: &Subalgebra) -> Result<ExpectationReport, CpError> {
    let n = m.n();
    if b.n() != n {
        return Err(CpError::Dimension(format!("subalgebra on {} points, map on {n}", b.n())));
    }
    let fail = |f, v: &[Q]| ExpectationReport {
        is_conditional_expectation: false,
        failure: Some(f),
        witness: Some(v.iter().map(fmt_q).collect()),
    };
    for x in 0..n {
        let d = indicator(n, [x]);
        if m.apply(&m.apply(&d)) != m.apply(&d) {
            return Ok(fail(ExpectationFailure::NotIdempotent, &d));
        }
    }
    for x in 0..n {
        let d = indicator(n, [x]);
        if !b.contains(&m.apply(&d)) {
            return Ok(fail(ExpectationFailure::ImageNotInSubalgebra, &d));
        }
    }
    for v in b.basis() {
        if m.apply(&v) != v {
            return Ok(fail(ExpectationFailure::NotIdentityOnSubalgebra, &v));
        }
    }
    let md = md_subalgebra(m)?;
    if let Some(v) = b.basis().into_iter().find(|v| !md.contains(v)) {
        return Ok(fail(ExpectationFailure::SubalgebraNotInMultiplicativeDomain, &v));
    }
    Ok(ExpectationReport { is_conditional_expectation: true, failure: None, witness: None })
}

/// Summary used by `cp analyze`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CpAnalysis {
    pub n: usize,
    #[serde(with = "serde_q")]
    pub norm: Q,
    pub gns_kernel: GnsKernel,
    pub multiplicative_domain: MultiplicativeDomain,
    pub katsura_ideal: Vec<usize>,
    pub zero_rows: Vec<usize>,
}

pub fn analyze(m: &PositiveMapMatrix) -> Result<CpAnalysis, CpError> {
    let k = gns_kernel(m)?;
    let katsura_ideal = (0..m.n()).filter(|p| !k.points.contains(p)).collect();
    Ok(CpAnalysis {
        n: m.n(),
        norm: op_norm(m),
        katsura_ideal,
        zero_rows: (0..m.n()).filter(|&x| m.row_sum(x).is_zero()).collect(),
        gns_kernel: k,
        multiplicative_domain: multiplicative_domain(m)?,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixDoc(pub Vec<Vec<String>>);
