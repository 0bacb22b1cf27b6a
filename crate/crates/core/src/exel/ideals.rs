//! Ideals attached to `L_λ`, the covariance span, and the depth-relative
//! multiplicative domain.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use super::{atom_index, atom_vector, classify_system, ExelError};
use crate::cp::Subalgebra;
use crate::diag::{raw_product, DiagElement};
use crate::graph::{atoms, basis_paths, enumerate_boundary, Graph, Path, WeightSystem};
use crate::linalg::{dense_to_sparse, QMatrix, SpanBasis, SparseVec};
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdealReport {
    pub depth: usize,
    /// Generators `q_v`, `v` a source.
    pub n_l: Vec<String>,
    /// Generators `q_μ`, `μ` not a source vertex.
    pub n_l_perp: Vec<String>,
    /// All basis paths: a finite graph has no infinite receivers.
    pub j_xl: Vec<String>,
    /// Generators `q_η`, `|η| ≥ 1`.
    pub intersection: Vec<String>,
    /// Dimensions of the spans in the depth-`depth` truncation.
    pub dims: IdealDims,
    pub brute_force: Option<BruteForceIdeals>,
    pub depth_relative: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IdealDims {
    pub algebra: usize,
    pub n_l: usize,
    pub n_l_perp: usize,
    pub j_xl: usize,
    pub intersection: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BruteForceIdeals {
    pub boundary_size: usize,
    /// Points of `∂E` whose indicator `L` kills.
    pub kernel_points: Vec<String>,
    /// Whether every subset of `∂E` was enumerated.
    pub exhaustive: bool,
}

/// Closed-form ideal generators, checked against their spans in the
/// truncation and, on acyclic graphs, against a brute-force computation of
/// the largest ideal in `ker L` on `∂E`.
pub fn compute_ideals(g: &Arc<Graph>, w: &WeightSystem, depth: usize) -> Result<IdealReport, ExelError> {
    let basis = basis_paths(g, depth);
    let is_source_vertex = |p: &Path| p.is_vertex() && g.is_source(p.range());
    let n_l: Vec<Path> = basis.iter().filter(|p| is_source_vertex(p)).cloned().collect();
    let n_l_perp: Vec<Path> = basis.iter().filter(|p| !is_source_vertex(p)).cloned().collect();
    let inter: Vec<Path> = basis.iter().filter(|p| !p.is_vertex()).cloned().collect();

    for a in &n_l {
        for b in &n_l_perp {
            if !raw_product(
                &[(a.clone(), Q::from_integer(1.into()))].into(),
                &[(b.clone(), Q::from_integer(1.into()))].into(),
            )
            .is_empty()
            {
                return Err(ExelError::Inconsistent(format!("q_{} q_{} != 0", a.display(g), b.display(g))));
            }
        }
    }

    let index = atom_index(g, depth);
    let span_of = |ps: &[Path]| {
        let mut s = SpanBasis::new();
        for p in ps {
            s.insert(&atom_vector(&DiagElement::projection(g, p.clone()), &index));
        }
        s
    };
    let s_nl = span_of(&n_l);
    let s_perp = span_of(&n_l_perp);
    let s_j = span_of(&basis);
    let s_int = span_of(&inter);
    let mut sum = s_perp.clone();
    for p in &basis {
        sum.insert(&atom_vector(&DiagElement::projection(g, p.clone()), &index));
    }
    let meet_dim = s_perp.dim() + s_j.dim() - sum.dim();
    let inter_inside = inter.iter().all(|p| {
        let v = atom_vector(&DiagElement::projection(g, p.clone()), &index);
        s_perp.contains(&v) && s_j.contains(&v)
    });
    if !inter_inside || meet_dim != s_int.dim() {
        return Err(ExelError::Inconsistent(format!(
            "span of |eta| >= 1 generators has dimension {} but the intersection has {meet_dim}",
            s_int.dim()
        )));
    }

    let brute_force = if g.has_cycle() { None } else { Some(brute_force_kernel_ideal(g, w)?) };
    let names = |ps: &[Path]| ps.iter().map(|p| p.display(g)).collect();
    Ok(IdealReport {
        depth,
        n_l: names(&n_l),
        n_l_perp: names(&n_l_perp),
        j_xl: names(&basis),
        intersection: names(&inter),
        dims: IdealDims {
            algebra: index.len(),
            n_l: s_nl.dim(),
            n_l_perp: s_perp.dim(),
            j_xl: s_j.dim(),
            intersection: s_int.dim(),
        },
        brute_force,
        depth_relative: g.has_cycle(),
    })
}

/// `L` evaluated pointwise on `∂E`: `(La)(x) = Σ_{s(e) = r(x)} λ_e a(ex)`.
fn pointwise_transfer_of_delta(g: &Graph, w: &WeightSystem, points: &[Path], y: &Path) -> Vec<Q> {
    points
        .iter()
        .map(|x| g.emits(x.range()).iter().filter(|&&e| x.prepend(g, e) == *y).map(|&e| w.get(e).clone()).sum())
        .collect()
}

fn brute_force_kernel_ideal(g: &Arc<Graph>, w: &WeightSystem) -> Result<BruteForceIdeals, ExelError> {
    let points = enumerate_boundary(g, 0).boundary_paths;
    let n = points.len();
    let images: Vec<Vec<Q>> = points.iter().map(|y| pointwise_transfer_of_delta(g, w, &points, y)).collect();
    let killed: Vec<bool> = images.iter().map(|v| v.iter().all(Zero::is_zero)).collect();
    let z: BTreeSet<usize> = (0..n).filter(|&i| killed[i]).collect();

    // An ideal χ_S·A lies in ker L iff L vanishes on every function on S.
    let exhaustive = n <= 14;
    if exhaustive {
        let in_kernel = |mask: u32| {
            let cols: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let m = QMatrix::from_rows((0..n).map(|x| cols.iter().map(|&c| images[c][x].clone()).collect()).collect());
            cols.is_empty() || m.is_zero()
        };
        let valid: Vec<u32> = (0..1u32 << n).filter(|&m| in_kernel(m)).collect();
        let maximal: Vec<u32> =
            valid.iter().copied().filter(|&m| !valid.iter().any(|&o| o != m && o & m == m)).collect();
        let zmask: u32 = z.iter().map(|&i| 1u32 << i).sum();
        if maximal != [zmask] {
            return Err(ExelError::IdealMismatch(format!("maximal kernel ideals {maximal:?}, expected {zmask:#b}")));
        }
    }

    // Closed forms evaluated on ∂E.
    let closed: BTreeSet<usize> = (0..n).filter(|&i| points[i].is_vertex() && g.is_source(points[i].range())).collect();
    if closed != z {
        let show = |s: &BTreeSet<usize>| s.iter().map(|&i| points[i].display(g)).collect::<Vec<_>>();
        return Err(ExelError::IdealMismatch(format!(
            "kernel points {:?}, source vertices {:?}",
            show(&z),
            show(&closed)
        )));
    }
    let mut perp = SpanBasis::new();
    for p in basis_paths(g, g.vertex_count()) {
        if p.is_vertex() && g.is_source(p.range()) {
            continue;
        }
        let v: Vec<Q> =
            points.iter().map(|x| if p.is_prefix_of(x) { Q::from_integer(1.into()) } else { Q::zero() }).collect();
        perp.insert(&dense_to_sparse(&v));
    }
    let complement_ok = perp.dim() == n - z.len()
        && (0..n).filter(|i| !z.contains(i)).all(|i| perp.contains(&SparseVec::from([(i, Q::from_integer(1.into()))])));
    if !complement_ok {
        return Err(ExelError::IdealMismatch(
            "closed form of the annihilator does not match ∂E minus the kernel".into(),
        ));
    }
    Ok(BruteForceIdeals {
        boundary_size: n,
        kernel_points: z.iter().map(|&i| points[i].display(g)).collect(),
        exhaustive,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovarianceSpanReport {
    pub depth: usize,
    pub equal: bool,
    pub dimension_products: usize,
    pub dimension_generators: usize,
}

/// Compares `span{α(q_μ) q_ν : |μ| < d, |ν| ≤ d}` with `span{q_η : 1 ≤ |η| ≤ d}`
/// inside the depth-`d` truncation.
pub fn covariance_span_check(g: &Arc<Graph>, depth: usize) -> CovarianceSpanReport {
    let index = atom_index(g, depth);
    let basis = basis_paths(g, depth);
    let mut products = SpanBasis::new();
    let short: Vec<DiagElement> = if depth == 0 {
        Vec::new()
    } else {
        basis_paths(g, depth - 1).into_iter().map(|p| DiagElement::projection(g, p).alpha()).collect()
    };
    for a in &short {
        for p in &basis {
            let prod = a.multiply(&DiagElement::projection(g, p.clone())).expect("same graph");
            products.insert(&atom_vector(&prod, &index));
        }
    }
    let mut gens = SpanBasis::new();
    for p in basis.iter().filter(|p| !p.is_vertex()) {
        gens.insert(&atom_vector(&DiagElement::projection(g, p.clone()), &index));
    }
    let mut joint = products.clone();
    for p in basis.iter().filter(|p| !p.is_vertex()) {
        joint.insert(&atom_vector(&DiagElement::projection(g, p.clone()), &index));
    }
    CovarianceSpanReport {
        depth,
        equal: joint.dim() == products.dim() && joint.dim() == gens.dim(),
        dimension_products: products.dim(),
        dimension_generators: gens.dim(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncatedMultiplicativeDomain {
    pub depth: usize,
    pub atoms: Vec<String>,
    pub subalgebra: Subalgebra,
    pub dimension: usize,
    pub whole: bool,
    /// Checked against `pAp ⊕ (1-p)A(1-p)` when the system is a corner.
    pub corner_closed_form: Option<bool>,
    pub depth_relative: bool,
}

/// Solves `L(ba) = L(b)L(a)` for `a` in the depth-`d` truncation and all `b`
/// in the depth-`(d+1)` truncation.
pub fn multiplicative_domain_truncated(
    g: &Arc<Graph>,
    w: &WeightSystem,
    depth: usize,
) -> Result<TruncatedMultiplicativeDomain, ExelError> {
    let small = atoms(g, depth);
    let big = atoms(g, depth + 1);
    let parent = |y: &Path| small.iter().position(|z| z.is_prefix_of(y)).expect("atoms refine");
    let l_small: Vec<DiagElement> = small.iter().map(|z| DiagElement::projection(g, z.clone()).transfer(w)).collect();
    let l_big: Vec<DiagElement> = big.iter().map(|y| DiagElement::projection(g, y.clone()).transfer(w)).collect();
    // Rows: a(π y) - L(a)(x) = 0 whenever L(δ_y)(x) ≠ 0.
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (yi, y) in big.iter().enumerate() {
        for x in &big {
            if l_big[yi].evaluate(x).is_zero() {
                continue;
            }
            let py = parent(y);
            let xi = big.iter().position(|b| b == x).unwrap();
            if !seen.insert((py, xi)) {
                continue;
            }
            let mut row: Vec<Q> = l_small.iter().map(|lz| -lz.evaluate(x)).collect();
            row[py] += Q::from_integer(1.into());
            rows.push(row);
        }
    }
    let n = small.len();
    let solution = if rows.is_empty() {
        (0..n).map(|i| (0..n).map(|j| Q::from_integer(((i == j) as i64).into())).collect()).collect()
    } else {
        QMatrix::from_rows(rows).nullspace()
    };
    let sub = Subalgebra::from_span(n, &solution).ok_or(ExelError::NotASubalgebra)?;
    let dimension = sub.dimension();
    let whole = dimension == n;
    let corner_closed_form = if classify_system(g, w, depth)?.is_corner { Some(whole) } else { None };
    if corner_closed_form == Some(false) {
        return Err(ExelError::Inconsistent("corner system whose multiplicative domain is not pAp + p'Ap'".into()));
    }
    Ok(TruncatedMultiplicativeDomain {
        depth,
        atoms: small.iter().map(|p| p.display(g)).collect(),
        subalgebra: sub,
        dimension,
        whole,
        corner_closed_form,
        depth_relative: true,
    })
}
