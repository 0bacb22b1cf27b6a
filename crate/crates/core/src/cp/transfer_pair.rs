//! Pairs `(α, L)` of an endomorphism and a positive map on `C^n`.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{indicator, pointwise, CpError, PositiveMapMatrix};
use crate::linalg::QMatrix;
use crate::rational::{fmt_q, Q};

/// An endomorphism of `C^n`: `α(a)(x) = a(τ(x))` where `τ` is defined, else 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PointMap {
    map: Vec<Option<usize>>,
}

impl PointMap {
    pub fn new(n: usize, map: Vec<Option<usize>>) -> Result<Self, CpError> {
        if map.len() != n || map.iter().flatten().any(|&t| t >= n) {
            return Err(CpError::Dimension(format!("point map must send 0..{n} into 0..{n}")));
        }
        Ok(PointMap { map })
    }

    pub fn identity(n: usize) -> Self {
        PointMap { map: (0..n).map(Some).collect() }
    }

    /// Reads an endomorphism from its matrix (`α(a) = M a`), checking that
    /// it is multiplicative on indicators.
    pub fn from_matrix(m: &QMatrix) -> Result<Self, CpError> {
        let n = m.rows();
        if m.cols() != n {
            return Err(CpError::NotSquare { rows: n, cols: m.cols() });
        }
        for y in 0..n {
            for z in 0..n {
                let lhs = m.mul_vec(&pointwise(&indicator(n, [y]), &indicator(n, [z])));
                let rhs = pointwise(&m.mul_vec(&indicator(n, [y])), &m.mul_vec(&indicator(n, [z])));
                if lhs != rhs {
                    return Err(CpError::NotAnEndomorphism(format!("alpha(e_{y} e_{z}) != alpha(e_{y}) alpha(e_{z})")));
                }
            }
        }
        let map = (0..n)
            .map(|x| {
                let ones: Vec<usize> = (0..n).filter(|&y| !m[(x, y)].is_zero()).collect();
                match ones.as_slice() {
                    [] => Ok(None),
                    [y] if m[(x, *y)].is_one() => Ok(Some(*y)),
                    _ => Err(CpError::NotAnEndomorphism(format!("row {x} is not a point evaluation"))),
                }
            })
            .collect::<Result<_, _>>()?;
        Ok(PointMap { map })
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    pub fn get(&self, x: usize) -> Option<usize> {
        self.map[x]
    }

    pub fn as_slice(&self) -> &[Option<usize>] {
        &self.map
    }

    pub fn apply(&self, a: &[Q]) -> Vec<Q> {
        self.map.iter().map(|t| t.map_or_else(Q::zero, |t| a[t].clone())).collect()
    }

    pub fn matrix(&self) -> QMatrix {
        let n = self.n();
        let mut m = QMatrix::zeros(n, n);
        for (x, t) in self.map.iter().enumerate() {
            if let Some(t) = t {
                m[(x, *t)] = Q::one();
            }
        }
        m
    }

    /// Image of `τ`; `(ker α)^⊥` is the set of functions supported here.
    pub fn range(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.map.iter().flatten().copied().collect();
        r.sort_unstable();
        r.dedup();
        r
    }

    /// `α(C^n)` is hereditary iff `τ` is injective on its domain.
    pub fn has_hereditary_range(&self) -> bool {
        self.range().len() == self.map.iter().flatten().count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularTransferCount {
    /// 0 or 1; more would contradict uniqueness and is reported as an error.
    pub solutions: usize,
    pub nonnegative: Option<bool>,
    pub matrix: Option<Vec<Vec<String>>>,
    pub matches_given: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferPairClassification {
    pub is_exel: bool,
    pub is_regular: bool,
    pub is_corner: bool,
    pub hereditary_range: bool,
    /// `L(1) = χ_R` for the range `R` of the point map.
    pub l_one_is_range_projection: bool,
    pub witness: Option<String>,
    pub regular_transfers: Option<RegularTransferCount>,
}

fn basis(n: usize) -> Vec<Vec<Q>> {
    (0..n).map(|x| indicator(n, [x])).collect()
}

pub fn check_transfer_pair(alpha: &PointMap, l: &PositiveMapMatrix) -> Result<TransferPairClassification, CpError> {
    let n = l.n();
    if alpha.n() != n {
        return Err(CpError::Dimension(format!("alpha on {} points, L on {n}", alpha.n())));
    }
    let e = basis(n);
    let mut witness = None;
    let mut is_exel = true;
    'outer: for x in 0..n {
        for y in 0..n {
            if l.apply(&pointwise(&e[x], &alpha.apply(&e[y]))) != pointwise(&l.apply(&e[x]), &e[y]) {
                is_exel = false;
                witness = Some(format!("L(e_{x} alpha(e_{y})) != L(e_{x}) e_{y}"));
                break 'outer;
            }
        }
    }
    let ones = vec![Q::one(); n];
    let l_one_is_range_projection = l.apply(&ones) == indicator(n, alpha.range());
    let mut idempotent = true;
    for y in 0..n {
        let a = alpha.apply(&e[y]);
        if alpha.apply(&l.apply(&a)) != a {
            idempotent = false;
            if witness.is_none() {
                witness = Some(format!("alpha(L(alpha(e_{y}))) != alpha(e_{y})"));
            }
            break;
        }
    }
    if is_exel && idempotent != l_one_is_range_projection {
        return Err(CpError::Inconsistent(format!(
            "alpha L alpha = alpha is {idempotent} but L(1) = chi_range is {l_one_is_range_projection}"
        )));
    }
    let is_regular = is_exel && idempotent;
    let p = alpha.apply(&ones);
    let corner_identity = (0..n).all(|x| alpha.apply(&l.apply(&e[x])) == pointwise(&p, &e[x]));
    if is_regular && !corner_identity && witness.is_none() {
        witness = Some("alpha(L(a)) != alpha(1) a alpha(1)".into());
    }
    let hereditary_range = alpha.has_hereditary_range();
    let regular_transfers = if hereditary_range { Some(regular_transfers_for(alpha, l)?) } else { None };
    Ok(TransferPairClassification {
        is_exel,
        is_regular,
        is_corner: is_regular && corner_identity && hereditary_range,
        hereditary_range,
        l_one_is_range_projection,
        witness,
        regular_transfers,
    })
}

/// Solves for every matrix `L` with `L(aα(b)) = L(a)b` and `αLα = α`.
fn regular_transfers_for(alpha: &PointMap, given: &PositiveMapMatrix) -> Result<RegularTransferCount, CpError> {
    let n = alpha.n();
    let var = |t: usize, z: usize| t * n + z;
    let e = basis(n);
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let mut rhs: Vec<Q> = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let f = pointwise(&e[x], &alpha.apply(&e[y]));
            for t in 0..n {
                let mut row = vec![Q::zero(); n * n];
                for z in 0..n {
                    row[var(t, z)] += &f[z];
                }
                if t == y {
                    row[var(t, x)] -= Q::one();
                }
                rows.push(row);
                rhs.push(Q::zero());
            }
        }
    }
    for y in 0..n {
        let a = alpha.apply(&e[y]);
        for s in 0..n {
            let mut row = vec![Q::zero(); n * n];
            if let Some(t) = alpha.get(s) {
                for z in 0..n {
                    row[var(t, z)] += &a[z];
                }
            }
            rows.push(row);
            rhs.push(a[s].clone());
        }
    }
    let system = QMatrix::from_rows(rows);
    let Some(sol) = system.solve(&rhs) else {
        return Ok(RegularTransferCount { solutions: 0, nonnegative: None, matrix: None, matches_given: None });
    };
    let free = system.nullspace().len();
    if free > 0 {
        return Err(CpError::Inconsistent(format!("{free}-dimensional family of regular transfer operators")));
    }
    let m = QMatrix::from_rows(sol.chunks(n).map(<[Q]>::to_vec).collect());
    let nonnegative = sol.iter().all(|x| !x.is_negative());
    Ok(RegularTransferCount {
        solutions: 1,
        nonnegative: Some(nonnegative),
        matches_given: Some(&m == given.matrix()),
        matrix: Some(m.to_rows().iter().map(|r| r.iter().map(fmt_q).collect()).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    #[test]
    fn identity_pair_is_corner() {
        let c = check_transfer_pair(&PointMap::identity(2), &PositiveMapMatrix::identity(2)).unwrap();
        assert!(c.is_exel && c.is_regular && c.is_corner);
        assert_eq!(c.regular_transfers.unwrap().solutions, 1);
    }

    #[test]
    fn two_point_shift() {
        // α(a)(1) = a(0): τ(1) = 0.
        let alpha = PointMap::new(2, vec![None, Some(0)]).unwrap();
        let l = PositiveMapMatrix::from_rows(vec![vec![qi(0), qi(1)], vec![qi(0), qi(0)]]).unwrap();
        let c = check_transfer_pair(&alpha, &l).unwrap();
        assert!(c.is_exel && c.is_regular && c.is_corner);
        let r = c.regular_transfers.unwrap();
        assert_eq!((r.solutions, r.matches_given, r.nonnegative), (1, Some(true), Some(true)));
    }

    #[test]
    fn doubled_identity_is_not_regular() {
        let l = PositiveMapMatrix::from_rows(vec![vec![qi(2), qi(0)], vec![qi(0), qi(2)]]).unwrap();
        let c = check_transfer_pair(&PointMap::identity(2), &l).unwrap();
        assert!(c.is_exel && !c.is_regular && !c.is_corner);
        assert!(!c.l_one_is_range_projection);
    }

    #[test]
    fn matrices_that_are_not_endomorphisms() {
        let m = QMatrix::from_rows(vec![vec![qi(1), qi(1)], vec![qi(0), qi(1)]]);
        assert!(matches!(PointMap::from_matrix(&m), Err(CpError::NotAnEndomorphism(_))));
        let m = QMatrix::from_rows(vec![vec![qi(2), qi(0)], vec![qi(0), qi(1)]]);
        assert!(matches!(PointMap::from_matrix(&m), Err(CpError::NotAnEndomorphism(_))));
        let ok = QMatrix::from_rows(vec![vec![qi(0), qi(0)], vec![qi(1), qi(0)]]);
        assert_eq!(PointMap::from_matrix(&ok).unwrap().as_slice(), &[None, Some(0)]);
    }
}
