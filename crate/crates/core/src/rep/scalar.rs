//! Sparse square matrices over exact rationals or double-double floats.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_traits::{Signed, Zero};
use twofloat::TwoFloat;

use crate::rational::{fmt_q, to_f64, Q};

pub trait Scalar: Clone + Debug + PartialEq + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn magnitude(&self) -> f64;
    fn from_q(x: &Q) -> Self;
    fn render(&self) -> String;
}

impl Scalar for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn magnitude(&self) -> f64 {
        to_f64(&self.abs())
    }
    fn from_q(x: &Q) -> Self {
        x.clone()
    }
    fn render(&self) -> String {
        fmt_q(self)
    }
}

/// Converts through numerator and denominator so that the quotient keeps
/// double-double precision.
pub fn q_to_twofloat(x: &Q) -> TwoFloat {
    let part = |b: &num_bigint::BigInt| {
        let hi = num_traits::ToPrimitive::to_f64(b).unwrap_or(f64::NAN);
        let rest = b - num_bigint::BigInt::from(hi as i128);
        TwoFloat::new_add(hi, num_traits::ToPrimitive::to_f64(&rest).unwrap_or(0.0))
    };
    div(part(x.numer()), part(x.denom()))
}

/// Quotient with one Newton correction. The library division can drop the
/// low word when both operands are plain doubles.
pub fn div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q0 = TwoFloat::from(a.hi() / b.hi());
    let r = a - q0 * b;
    let q1 = q0 + TwoFloat::from(r.hi() / b.hi());
    let r = a - q1 * b;
    q1 + TwoFloat::from(r.hi() / b.hi())
}

impl Scalar for TwoFloat {
    fn zero() -> Self {
        TwoFloat::from(0.0)
    }
    fn one() -> Self {
        TwoFloat::from(1.0)
    }
    fn add(&self, o: &Self) -> Self {
        *self + *o
    }
    fn mul(&self, o: &Self) -> Self {
        *self * *o
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn is_zero(&self) -> bool {
        self.hi() == 0.0 && self.lo() == 0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs().hi()
    }
    fn from_q(x: &Q) -> Self {
        q_to_twofloat(x)
    }
    fn render(&self) -> String {
        format!("{:.24e}", self.hi() + self.lo())
    }
}

/// Square sparse matrix, rows stored as ordered maps.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMat<T> {
    n: usize,
    rows: Vec<BTreeMap<usize, T>>,
}

impl<T: Scalar> SparseMat<T> {
    pub fn zeros(n: usize) -> Self {
        SparseMat { n, rows: vec![BTreeMap::new(); n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![T::one(); n])
    }

    pub fn diagonal(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.rows[r].get(&c).cloned().unwrap_or_else(T::zero)
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        if v.is_zero() {
            self.rows[r].remove(&c);
        } else {
            self.rows[r].insert(c, v);
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.rows.iter().enumerate().flat_map(|(r, row)| row.iter().map(move |(&c, v)| (r, c, v)))
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(BTreeMap::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries().all(|(r, c, _)| r == c)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for (r, c, v) in self.entries() {
            t.rows[c].insert(r, v.clone());
        }
        t
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n, "dimension mismatch");
        let mut out = Self::zeros(self.n);
        for (r, row) in self.rows.iter().enumerate() {
            let mut acc: BTreeMap<usize, T> = BTreeMap::new();
            for (&k, a) in row {
                for (&c, b) in &o.rows[k] {
                    let p = a.mul(b);
                    acc.entry(c).and_modify(|x| *x = x.add(&p)).or_insert(p);
                }
            }
            acc.retain(|_, v| !v.is_zero());
            out.rows[r] = acc;
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (r, c, v) in o.entries() {
            let s = out.get(r, c).add(v);
            out.set(r, c, s);
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&T::one().neg()))
    }

    pub fn scale(&self, k: &T) -> Self {
        let mut out = Self::zeros(self.n);
        for (r, c, v) in self.entries() {
            out.set(r, c, v.mul(k));
        }
        out
    }

    /// Multiplies row `i` by `d[i]` (left diagonal factor).
    pub fn scale_rows(&self, d: &[T]) -> Self {
        let mut out = Self::zeros(self.n);
        for (r, c, v) in self.entries() {
            out.set(r, c, d[r].mul(v));
        }
        out
    }

    pub fn scale_cols(&self, d: &[T]) -> Self {
        let mut out = Self::zeros(self.n);
        for (r, c, v) in self.entries() {
            out.set(r, c, v.mul(&d[c]));
        }
        out
    }

    pub fn max_entry(&self) -> f64 {
        self.entries().map(|(_, _, v)| v.magnitude()).fold(0.0, f64::max)
    }

    /// Basis indices touched by a nonzero row or column.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.entries().flat_map(|(r, c, _)| [r, c]).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// `Σ |m_ij|²`, exact for rationals.
    pub fn frobenius_sq(&self) -> T {
        self.entries().fold(T::zero(), |acc, (_, _, v)| acc.add(&v.mul(v)))
    }

    pub fn to_dense_strings(&self) -> Vec<Vec<String>> {
        (0..self.n).map(|r| (0..self.n).map(|c| self.get(r, c).render()).collect()).collect()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SparseMat<U> {
        let mut out = SparseMat::<U>::zeros(self.n);
        for (r, c, v) in self.entries() {
            out.set(r, c, f(v));
        }
        out
    }
}

/// Entrywise vectorization, used for span computations.
pub fn flatten(m: &SparseMat<Q>) -> crate::linalg::SparseVec {
    m.entries().map(|(r, c, v)| (r * m.dim() + c, v.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn products_and_transpose() {
        let mut a = SparseMat::<Q>::zeros(2);
        a.set(1, 0, qi(1));
        let p = a.transpose().mul(&a);
        assert_eq!(p, SparseMat::diagonal(&[qi(1), qi(0)]));
        assert_eq!(a.mul(&a), SparseMat::zeros(2));
        assert!(a.sub(&a).is_zero());
        assert_eq!(a.scale_rows(&[qi(5), q(1, 2)]).get(1, 0), q(1, 2));
    }

    #[test]
    fn twofloat_conversion_is_precise() {
        let x = q_to_twofloat(&q(1, 3));
        let err = (x * TwoFloat::from(3.0) - TwoFloat::from(1.0)).abs();
        assert!(err.hi() < 1e-30);
    }
}
