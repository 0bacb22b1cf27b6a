//! GNS correspondences of positive maps on `C^n`.
//!
//! The ambient space is spanned by `e_x ⊗ e_y`. Its `A`-valued inner product
//! is `⟨a⊗b, c⊗d⟩ = b* φ(a*c) d`, and on basis tensors this gives
//! `⟨e_x⊗e_y, e_x⊗e_y⟩ = M[y,x] e_y`. The row index of `M` sits on the
//! right-hand factor. This transpose is easy to get wrong, so the Gram matrix
//! is computed from the general formula and then compared with it.
//!
//! The tensor `e_x⊗e_y` matches the quiver edge with source `y` and range `x`.
//! The left action multiplies by `a(x)`, the value at the range. The right
//! action multiplies by `b(y)`, the value at the source.

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cp::{check_transfer_pair, gns_kernel, indicator, pointwise, quiver, CpError, PointMap, PositiveMapMatrix};
use crate::linalg::{dense_to_sparse, Inertia, QMatrix, SpanBasis};
use crate::rational::{fmt_q, Q};

/// Default bound on the number of points; the ambient space has `n²` vectors.
pub const DEFAULT_MAX_POINTS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorrespondenceError {
    #[error("{n} points exceed the configured bound {max}")]
    TooLarge { n: usize, max: usize },
    #[error("structure mismatch: {0}")]
    Mismatch(String),
    #[error("not an Exel system: {0}")]
    NotExel(String),
    #[error(transparent)]
    Cp(#[from] CpError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Correspondence {
    n: usize,
    /// `(x, y)` for `e_x ⊗ e_y`, ordered `x * n + y`.
    ambient: Vec<(usize, usize)>,
    gram: QMatrix,
    /// A-valued norms `⟨ξ, ξ⟩` of the ambient vectors.
    a_norms: Vec<Vec<Q>>,
    surviving: Vec<usize>,
    left: Vec<QMatrix>,
    right: Vec<QMatrix>,
    inertia: Inertia,
}

fn tensor(n: usize, x: usize, y: usize) -> (Vec<Q>, Vec<Q>) {
    (indicator(n, [x]), indicator(n, [y]))
}

/// `⟨a⊗b, c⊗d⟩ = b* φ(a*c) d` for real vectors.
fn a_inner(m: &PositiveMapMatrix, (a, b): &(Vec<Q>, Vec<Q>), (c, d): &(Vec<Q>, Vec<Q>)) -> Vec<Q> {
    pointwise(&pointwise(b, &m.apply(&pointwise(a, c))), d)
}

fn trace(v: &[Q]) -> Q {
    v.iter().sum()
}

pub fn gns_correspondence(m: &PositiveMapMatrix) -> Result<Correspondence, CorrespondenceError> {
    gns_correspondence_bounded(m, DEFAULT_MAX_POINTS)
}

pub fn gns_correspondence_bounded(m: &PositiveMapMatrix, max: usize) -> Result<Correspondence, CorrespondenceError> {
    let n = m.n();
    if n > max {
        return Err(CorrespondenceError::TooLarge { n, max });
    }
    let ambient: Vec<(usize, usize)> = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).collect();
    let tensors: Vec<_> = ambient.iter().map(|&(x, y)| tensor(n, x, y)).collect();
    let k = ambient.len();
    let mut gram = QMatrix::zeros(k, k);
    let mut a_norms = Vec::with_capacity(k);
    for i in 0..k {
        for j in 0..k {
            let v = a_inner(m, &tensors[i], &tensors[j]);
            if i == j {
                a_norms.push(v.clone());
            }
            gram[(i, j)] = trace(&v);
        }
    }
    for (i, &(x, y)) in ambient.iter().enumerate() {
        for j in 0..k {
            let expect = if i == j { m.get(y, x).clone() } else { Q::zero() };
            if gram[(i, j)] != expect {
                return Err(CorrespondenceError::Mismatch(format!(
                    "Gram entry at ({:?}, {:?}) is {}, expected {}",
                    ambient[i],
                    ambient[j],
                    fmt_q(&gram[(i, j)]),
                    fmt_q(&expect)
                )));
            }
        }
    }
    let inertia = gram.inertia();
    if inertia.negative > 0 {
        return Err(CorrespondenceError::Mismatch(format!("Gram matrix has {} negative directions", inertia.negative)));
    }
    let surviving: Vec<usize> = (0..k).filter(|&i| !gram[(i, i)].is_zero()).collect();
    let rank = gram.rank();
    if rank != surviving.len() || rank != inertia.positive {
        return Err(CorrespondenceError::Mismatch(format!(
            "Gram rank {rank}, nonzero diagonal {}, positive pivots {}",
            surviving.len(),
            inertia.positive
        )));
    }
    // With a diagonal Gram matrix the quotient keeps the surviving coordinates.
    let d = surviving.len();
    let act = |f: &dyn Fn(usize, usize) -> Q| {
        let mut a = QMatrix::zeros(d, d);
        for (qi, &i) in surviving.iter().enumerate() {
            let (x, y) = ambient[i];
            a[(qi, qi)] = f(x, y);
        }
        a
    };
    let left: Vec<QMatrix> = (0..n).map(|p| act(&|x, _| if x == p { Q::one() } else { Q::zero() })).collect();
    let right: Vec<QMatrix> = (0..n).map(|p| act(&|_, y| if y == p { Q::one() } else { Q::zero() })).collect();
    let c = Correspondence { n, ambient, gram, a_norms, surviving, left, right, inertia };
    let kernel: Vec<usize> = (0..n).filter(|&p| c.left[p].is_zero()).collect();
    let expected = gns_kernel(m)?.points;
    if kernel != expected {
        return Err(CorrespondenceError::Mismatch(format!("left-action kernel {kernel:?}, GNS kernel {expected:?}")));
    }
    Ok(c)
}

impl Correspondence {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.surviving.len()
    }

    pub fn ambient_dimension(&self) -> usize {
        self.ambient.len()
    }

    pub fn gram(&self) -> &QMatrix {
        &self.gram
    }

    pub fn inertia(&self) -> Inertia {
        self.inertia
    }

    /// Surviving pairs `(x, y)`, in quotient order.
    pub fn surviving_pairs(&self) -> Vec<(usize, usize)> {
        self.surviving.iter().map(|&i| self.ambient[i]).collect()
    }

    /// `⟨ξ_i, ξ_i⟩` for the quotient basis vector `i`.
    pub fn a_norm(&self, i: usize) -> &[Q] {
        &self.a_norms[self.surviving[i]]
    }

    /// Left action of `e_x` on the quotient.
    pub fn left_action(&self, x: usize) -> &QMatrix {
        &self.left[x]
    }

    pub fn right_action(&self, y: usize) -> &QMatrix {
        &self.right[y]
    }

    /// Left action of an arbitrary function.
    pub fn left_of(&self, a: &[Q]) -> QMatrix {
        combine(&self.left, a, self.dimension())
    }

    pub fn right_of(&self, b: &[Q]) -> QMatrix {
        combine(&self.right, b, self.dimension())
    }

    /// A-valued inner product of two quotient vectors. It is diagonal in the
    /// quotient basis.
    pub fn inner(&self, xi: &[Q], eta: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.n];
        for i in 0..self.dimension() {
            let c = &xi[i] * &eta[i];
            if c.is_zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(self.a_norm(i)) {
                *o += &c * v;
            }
        }
        out
    }

    pub fn report(&self) -> CorrespondenceReport {
        let strings = |m: &QMatrix| m.to_rows().iter().map(|r| r.iter().map(fmt_q).collect()).collect();
        CorrespondenceReport {
            n: self.n,
            ambient_dimension: self.ambient_dimension(),
            dimension: self.dimension(),
            surviving_pairs: self.surviving_pairs(),
            gram_diagonal: self.surviving.iter().map(|&i| fmt_q(&self.gram[(i, i)])).collect(),
            gram_inertia: self.inertia,
            left_action: self.left.iter().map(strings).collect(),
            right_action: self.right.iter().map(strings).collect(),
        }
    }
}

fn combine(ms: &[QMatrix], coeffs: &[Q], d: usize) -> QMatrix {
    let mut out = QMatrix::zeros(d, d);
    for (m, c) in ms.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for r in 0..d {
            for s in 0..d {
                if !m[(r, s)].is_zero() {
                    out[(r, s)] += c * &m[(r, s)];
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrespondenceReport {
    pub n: usize,
    pub ambient_dimension: usize,
    pub dimension: usize,
    pub surviving_pairs: Vec<(usize, usize)>,
    pub gram_diagonal: Vec<String>,
    pub gram_inertia: Inertia,
    pub left_action: Vec<Vec<Vec<String>>>,
    pub right_action: Vec<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuiverDimensionReport {
    pub correspondence_dimension: usize,
    pub relation_size: usize,
    pub actions_match: bool,
    pub inner_products_match: bool,
}

/// Compares `X_φ` with the module of functions on the quiver edges. Each edge
/// `u → v` carries `f(e)`. The actions are `(a·f·b)(e) = a(v) f(e) b(u)` and
/// the inner product is `⟨f, g⟩(u) = Σ_{s(e)=u} M[u,v] f(e) g(e)`.
pub fn quiver_dimension_check(m: &PositiveMapMatrix) -> Result<QuiverDimensionReport, CorrespondenceError> {
    let c = gns_correspondence(m)?;
    let qv = quiver(m);
    let n = m.n();
    let pairs = c.surviving_pairs();
    if c.dimension() != qv.edges.len() {
        return Err(CorrespondenceError::Mismatch(format!(
            "dim X = {} but the support relation has {} pairs",
            c.dimension(),
            qv.edges.len()
        )));
    }
    // Tensor e_x ⊗ e_y goes to the edge with source y and range x.
    let edge_of: Vec<usize> = pairs
        .iter()
        .map(|&(x, y)| qv.edges.iter().position(|e| e.source == y && e.range == x))
        .collect::<Option<_>>()
        .ok_or_else(|| CorrespondenceError::Mismatch("surviving tensor without a quiver edge".into()))?;
    let mut seen = edge_of.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != edge_of.len() {
        return Err(CorrespondenceError::Mismatch("two tensors map to one edge".into()));
    }
    for (i, &k) in edge_of.iter().enumerate() {
        let e = &qv.edges[k];
        for p in 0..n {
            let l = if e.range == p { Q::one() } else { Q::zero() };
            let r = if e.source == p { Q::one() } else { Q::zero() };
            if c.left_action(p)[(i, i)] != l || c.right_action(p)[(i, i)] != r {
                return Err(CorrespondenceError::Mismatch(format!(
                    "action of e_{p} differs on edge {} -> {}",
                    e.source, e.range
                )));
            }
        }
        let mut norm = vec![Q::zero(); n];
        norm[e.source] = e.measure.clone();
        if c.a_norm(i) != norm.as_slice() {
            return Err(CorrespondenceError::Mismatch(format!(
                "inner product differs on edge {} -> {}",
                e.source, e.range
            )));
        }
    }
    Ok(QuiverDimensionReport {
        correspondence_dimension: c.dimension(),
        relation_size: qv.edges.len(),
        actions_match: true,
        inner_products_match: true,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KatsuraIdeal {
    /// Functions supported here form `J_X`.
    pub support: Vec<usize>,
    pub whole_algebra: bool,
    /// Every operator on a finite-dimensional module is compact, so `J(X) = A`
    /// and only the kernel of the left action matters.
    pub compacts_are_everything: bool,
}

pub fn katsura_ideal(m: &PositiveMapMatrix) -> Result<KatsuraIdeal, CorrespondenceError> {
    let k = gns_kernel(m)?.points;
    let support: Vec<usize> = (0..m.n()).filter(|p| !k.contains(p)).collect();
    Ok(KatsuraIdeal { whole_algebra: support.len() == m.n(), support, compacts_are_everything: true })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompactFrame {
    /// `(i, j)` for `Θ_{ξ_i, ξ_j}`, in the order of `matrices`.
    pub labels: Vec<(usize, usize)>,
    #[serde(skip)]
    pub matrices: Vec<QMatrix>,
    pub span_dimension: usize,
    /// `d²` for a quotient of dimension `d`.
    pub operator_space_dimension: usize,
    /// Dimension of the operators commuting with the right action.
    pub module_endomorphism_dimension: usize,
}

/// Rank-one operators `Θ_{ξ,η}(ζ) = ξ⟨η, ζ⟩` on the quotient basis.
///
/// On a right Hilbert module these span the adjointable operators. Over
/// `C^n`, those are the matrices commuting with the right action. This is the
/// whole matrix algebra only when every surviving tensor shares one right
/// point.
pub fn compact_operator_frame(c: &Correspondence) -> Result<CompactFrame, CorrespondenceError> {
    let d = c.dimension();
    let mut labels = Vec::with_capacity(d * d);
    let mut matrices = Vec::with_capacity(d * d);
    let mut span = SpanBasis::new();
    for i in 0..d {
        for j in 0..d {
            let mut t = QMatrix::zeros(d, d);
            for k in 0..d {
                let mut zeta = vec![Q::zero(); d];
                zeta[k] = Q::one();
                let mut eta = vec![Q::zero(); d];
                eta[j] = Q::one();
                let coeff = c.inner(&eta, &zeta);
                // ξ_i · ⟨η, ζ⟩ = Σ_p coeff(p) ξ_i·e_p.
                for (p, cp) in coeff.iter().enumerate() {
                    if !cp.is_zero() {
                        t[(i, k)] += cp * &c.right_action(p)[(i, i)];
                    }
                }
            }
            span.insert(&dense_to_sparse(&t.to_rows().concat()));
            labels.push((i, j));
            matrices.push(t);
        }
    }
    let commutant = right_commutant_dimension(c);
    if span.dim() != commutant {
        return Err(CorrespondenceError::Mismatch(format!(
            "rank-one operators span {} dimensions, module endomorphisms {commutant}",
            span.dim()
        )));
    }
    Ok(CompactFrame {
        labels,
        matrices,
        span_dimension: span.dim(),
        operator_space_dimension: d * d,
        module_endomorphism_dimension: commutant,
    })
}

/// `dim {T : T R_p = R_p T for all p}` by solving the linear system.
fn right_commutant_dimension(c: &Correspondence) -> usize {
    let d = c.dimension();
    if d == 0 {
        return 0;
    }
    let mut rows = Vec::new();
    for p in 0..c.n() {
        let r = c.right_action(p);
        for a in 0..d {
            for b in 0..d {
                // (T R - R T)[a,b] = Σ_k T[a,k] R[k,b] - R[a,k] T[k,b]
                let mut row = vec![Q::zero(); d * d];
                for k in 0..d {
                    row[a * d + k] += &r[(k, b)];
                    row[k * d + b] -= &r[(a, k)];
                }
                rows.push(row);
            }
        }
    }
    d * d - QMatrix::from_rows(rows).rank()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModuleIsoReport {
    pub tensor_dimension: usize,
    pub transfer_module_dimension: usize,
    pub isometric: bool,
    pub bimodule_map: bool,
    pub surjective: bool,
}

/// Compares `X_L` with `M_L`, the module `A` with `⟨m, n⟩ = L(m*n)` and
/// `m·a = mα(a)`, via `a ⊗ b ↦ aα(b)`.
pub fn exel_module_iso_check(alpha: &PointMap, l: &PositiveMapMatrix) -> Result<ModuleIsoReport, CorrespondenceError> {
    let pair = check_transfer_pair(alpha, l)?;
    if !pair.is_exel {
        return Err(CorrespondenceError::NotExel(pair.witness.unwrap_or_default()));
    }
    let n = l.n();
    let x = gns_correspondence(l)?;
    // M_L: ⟨e_x, e_y⟩ = δ_xy L(e_x), so the quotient keeps points with a
    // nonzero column.
    let ml_inner = |m: &[Q], k: &[Q]| l.apply(&pointwise(m, k));
    let ml_keep: Vec<usize> = (0..n).filter(|&p| !l.column_is_zero(p)).collect();
    let phi = |a: &[Q], b: &[Q]| pointwise(a, &alpha.apply(b));
    let tensors: Vec<(Vec<Q>, Vec<Q>)> = (0..n).flat_map(|x| (0..n).map(move |y| tensor(n, x, y))).collect();
    let mut isometric = true;
    for s in &tensors {
        for t in &tensors {
            if ml_inner(&phi(&s.0, &s.1), &phi(&t.0, &t.1)) != a_inner(l, s, t) {
                isometric = false;
            }
        }
    }
    let mut bimodule_map = true;
    for s in &tensors {
        for p in 0..n {
            let e = indicator(n, [p]);
            let right = phi(&s.0, &pointwise(&s.1, &e));
            if right != pointwise(&phi(&s.0, &s.1), &alpha.apply(&e)) {
                bimodule_map = false;
            }
            if phi(&pointwise(&e, &s.0), &s.1) != pointwise(&e, &phi(&s.0, &s.1)) {
                bimodule_map = false;
            }
        }
    }
    // Image of the surviving tensors in the M_L quotient coordinates.
    let mut span = SpanBasis::new();
    for (xx, y) in x.surviving_pairs() {
        let (a, b) = tensor(n, xx, y);
        let v = phi(&a, &b);
        let coords: Vec<Q> = ml_keep.iter().map(|&p| v[p].clone()).collect();
        span.insert(&dense_to_sparse(&coords));
    }
    let surjective = span.dim() == ml_keep.len();
    if !(isometric && bimodule_map && surjective && x.dimension() == ml_keep.len()) {
        return Err(CorrespondenceError::Mismatch(format!(
            "X_L -> M_L: isometric {isometric}, bimodule {bimodule_map}, rank {} of {}, dim X_L {}",
            span.dim(),
            ml_keep.len(),
            x.dimension()
        )));
    }
    Ok(ModuleIsoReport {
        tensor_dimension: x.dimension(),
        transfer_module_dimension: ml_keep.len(),
        isometric,
        bimodule_map,
        surjective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn half() -> PositiveMapMatrix {
        PositiveMapMatrix::from_rows(vec![vec![q(1, 2), q(1, 2)], vec![qi(0), qi(1)]]).unwrap()
    }

    #[test]
    fn half_matrix_has_three_dimensions() {
        let c = gns_correspondence(&half()).unwrap();
        assert_eq!(c.dimension(), 3);
        assert_eq!(c.ambient_dimension(), 4);
        // M[1,0] = 0 kills e_0 ⊗ e_1.
        assert_eq!(c.surviving_pairs(), [(0, 0), (1, 0), (1, 1)]);
        assert_eq!(c.inertia(), Inertia { positive: 3, negative: 0, zero: 1 });
        let r = quiver_dimension_check(&half()).unwrap();
        assert_eq!((r.correspondence_dimension, r.relation_size), (3, 3));
    }

    #[test]
    fn trivial_sizes() {
        assert_eq!(gns_correspondence(&PositiveMapMatrix::identity(4)).unwrap().dimension(), 4);
        assert_eq!(gns_correspondence(&PositiveMapMatrix::zero(3)).unwrap().dimension(), 0);
        assert!(matches!(
            gns_correspondence_bounded(&PositiveMapMatrix::identity(4), 3),
            Err(CorrespondenceError::TooLarge { .. })
        ));
    }

    #[test]
    fn katsura_examples() {
        assert!(katsura_ideal(&half()).unwrap().whole_algebra);
        assert!(katsura_ideal(&PositiveMapMatrix::zero(1)).unwrap().support.is_empty());
        let m = PositiveMapMatrix::from_rows(vec![vec![qi(1), qi(0)], vec![qi(1), qi(0)]]).unwrap();
        assert_eq!(katsura_ideal(&m).unwrap().support, [0]);
    }

    #[test]
    fn frame_spans_module_endomorphisms() {
        // Right points of the surviving tensors: 0, 0, 1, giving 2² + 1².
        let f = compact_operator_frame(&gns_correspondence(&half()).unwrap()).unwrap();
        assert_eq!(f.matrices.len(), 9);
        assert_eq!(f.span_dimension, 5);
        assert_eq!(f.operator_space_dimension, 9);
        let one = compact_operator_frame(&gns_correspondence(&PositiveMapMatrix::identity(1)).unwrap()).unwrap();
        assert_eq!(one.matrices, [QMatrix::identity(1)]);
        let zero = compact_operator_frame(&gns_correspondence(&PositiveMapMatrix::zero(2)).unwrap()).unwrap();
        assert!(zero.matrices.is_empty());
    }

    #[test]
    fn module_iso() {
        let r = exel_module_iso_check(&PointMap::identity(3), &PositiveMapMatrix::identity(3)).unwrap();
        assert_eq!((r.tensor_dimension, r.transfer_module_dimension), (3, 3));
        let alpha = PointMap::new(2, vec![None, Some(0)]).unwrap();
        let l = PositiveMapMatrix::from_rows(vec![vec![qi(0), qi(1)], vec![qi(0), qi(0)]]).unwrap();
        let r = exel_module_iso_check(&alpha, &l).unwrap();
        assert_eq!((r.tensor_dimension, r.transfer_module_dimension), (1, 1));
        let bad = PointMap::identity(2);
        assert!(matches!(exel_module_iso_check(&bad, &l), Err(CorrespondenceError::NotExel(_))));
    }
}
