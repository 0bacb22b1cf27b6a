//! Dense and sparse exact linear algebra over [`Q`].

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{fmt_q, Q};

/// Row-major dense rational matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| fmt_q(&self[(r, c)])).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Q;
    fn index(&self, (r, c): (usize, usize)) -> &Q {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Q {
        &mut self.data[r * self.cols + c]
    }
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        QMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Q] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Q>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).filter(|(a, b)| !a.is_zero() && !b.is_zero()).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
            m.swap_rows(p, r);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        if !m[(r, j)].is_zero() {
                            let v = &m[(r, j)] * &f;
                            m[(i, j)] -= v;
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : self * x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<Q>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Q::zero(); self.cols];
                v[f] = Q::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(i, f)].clone();
                }
                v
            })
            .collect()
    }

    /// One solution of `self * x = b`, if any.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = QMatrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug[(r, c)] = self[(r, c)].clone();
            }
            aug[(r, self.cols)] = b[r].clone();
        }
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Q::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = red[(i, self.cols)].clone();
        }
        Some(x)
    }

    /// Inverse of a square matrix, if invertible.
    pub fn inverse(&self) -> Option<QMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = QMatrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug[(r, c)] = self[(r, c)].clone();
            }
            aug[(r, n + r)] = Q::one();
        }
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut inv = QMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv[(r, c)] = red[(r, n + c)].clone();
            }
        }
        Some(inv)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Signs of the pivots of a symmetric LDLᵀ elimination with symmetric
    /// pivoting. By Sylvester's law these count the positive, negative and
    /// zero eigenvalues.
    pub fn inertia(&self) -> Inertia {
        assert!(self.is_symmetric(), "inertia needs a symmetric matrix");
        let mut m = self.clone();
        let n = m.rows;
        let mut alive: Vec<usize> = (0..n).collect();
        let mut out = Inertia::default();
        while !alive.is_empty() {
            if let Some(pos) = alive.iter().position(|&i| !m[(i, i)].is_zero()) {
                let k = alive.remove(pos);
                let d = m[(k, k)].clone();
                if d.is_positive() {
                    out.positive += 1;
                } else {
                    out.negative += 1;
                }
                for &i in &alive {
                    if m[(i, k)].is_zero() {
                        continue;
                    }
                    let f = &m[(i, k)] / &d;
                    for &j in &alive {
                        if !m[(k, j)].is_zero() {
                            let v = &f * &m[(k, j)];
                            m[(i, j)] -= v;
                        }
                    }
                }
                continue;
            }
            // Zero diagonal: either the remaining block vanishes or a 2x2
            // pivot [[0,b],[b,0]] contributes one positive and one negative.
            let pair = alive
                .iter()
                .enumerate()
                .find_map(|(a, &i)| alive[a + 1..].iter().find(|&&j| !m[(i, j)].is_zero()).map(|&j| (i, j)));
            let Some((i, j)) = pair else {
                out.zero += alive.len();
                break;
            };
            // Replace row/col i by row/col i + j: congruence keeps inertia.
            for &c in &(0..n).collect::<Vec<_>>() {
                let v = m[(j, c)].clone();
                m[(i, c)] += v;
            }
            for r in 0..n {
                let v = m[(r, j)].clone();
                m[(r, i)] += v;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

/// Sparse vector keyed by coordinate.
pub type SparseVec = BTreeMap<usize, Q>;

/// Incrementally built echelon basis of a span of sparse vectors.
#[derive(Debug, Clone, Default)]
pub struct SpanBasis {
    // pivot coordinate -> row normalised to 1 at the pivot
    rows: BTreeMap<usize, SparseVec>,
}

impl SpanBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the current basis.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut v: SparseVec = v.iter().filter(|(_, x)| !x.is_zero()).map(|(k, x)| (*k, x.clone())).collect();
        let mut cursor = 0usize;
        loop {
            let next = v.range(cursor..).find(|(k, _)| self.rows.contains_key(k)).map(|(k, x)| (*k, x.clone()));
            let Some((k, f)) = next else { break };
            for (c, x) in &self.rows[&k] {
                let e = v.entry(*c).or_insert_with(Q::zero);
                *e -= &f * x;
                if e.is_zero() {
                    v.remove(c);
                }
            }
            cursor = k + 1;
        }
        v
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v`; returns whether the span grew.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let r = self.reduce(v);
        let Some((&p, x)) = r.iter().next() else { return false };
        let inv = x.recip();
        let r: SparseVec = r.into_iter().map(|(k, x)| (k, x * &inv)).collect();
        for row in self.rows.values_mut() {
            if let Some(f) = row.get(&p).cloned() {
                for (c, x) in &r {
                    let e = row.entry(*c).or_insert_with(Q::zero);
                    *e -= &f * x;
                    if e.is_zero() {
                        row.remove(c);
                    }
                }
            }
        }
        self.rows.insert(p, r);
        true
    }
}

pub fn span_dim<'a>(vectors: impl IntoIterator<Item = &'a SparseVec>) -> usize {
    let mut b = SpanBasis::new();
    for v in vectors {
        b.insert(v);
    }
    b.dim()
}

pub fn dense_to_sparse(v: &[Q]) -> SparseVec {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}
