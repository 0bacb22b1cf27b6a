//! Subalgebras of `C^n`.
//!
//! Every subalgebra of `C^n` is the set of functions constant on each block
//! of a family of disjoint blocks and zero off their union.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{indicator, CpError};
use crate::linalg::{dense_to_sparse, span_dim};
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subalgebra {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl Subalgebra {
    pub fn new(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self, CpError> {
        let mut seen = vec![false; n];
        for b in &mut blocks {
            b.sort_unstable();
            b.dedup();
            for &p in b.iter() {
                if p >= n || std::mem::replace(&mut seen[p], true) {
                    return Err(CpError::Dimension(format!("blocks must be disjoint subsets of 0..{n}")));
                }
            }
        }
        blocks.retain(|b| !b.is_empty());
        blocks.sort();
        Ok(Subalgebra { n, blocks })
    }

    pub fn whole(n: usize) -> Self {
        Subalgebra { n, blocks: (0..n).map(|i| vec![i]).collect() }
    }

    pub fn zero(n: usize) -> Self {
        Subalgebra { n, blocks: Vec::new() }
    }

    /// The subalgebra spanned by `vectors`, or `None` when the span is not
    /// closed under pointwise multiplication.
    pub fn from_span(n: usize, vectors: &[Vec<Q>]) -> Option<Self> {
        // Points are equivalent when every vector takes the same value there.
        let mut classes: BTreeMap<Vec<Q>, Vec<usize>> = BTreeMap::new();
        for p in 0..n {
            let sig: Vec<Q> = vectors.iter().map(|v| v[p].clone()).collect();
            if sig.iter().all(Zero::is_zero) {
                continue;
            }
            classes.entry(sig).or_default().push(p);
        }
        let sub = Subalgebra::new(n, classes.into_values().collect()).ok()?;
        let dim = span_dim(&vectors.iter().map(|v| dense_to_sparse(v)).collect::<Vec<_>>());
        (dim == sub.dimension()).then_some(sub)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn dimension(&self) -> usize {
        self.blocks.len()
    }

    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.blocks.iter().flatten().copied().collect();
        s.sort_unstable();
        s
    }

    pub fn basis(&self) -> Vec<Vec<Q>> {
        self.blocks.iter().map(|b| indicator(self.n, b.iter().copied())).collect()
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        let mut covered = vec![false; self.n];
        for b in &self.blocks {
            let first = &v[b[0]];
            if b.iter().any(|&p| &v[p] != first) {
                return false;
            }
            for &p in b {
                covered[p] = true;
            }
        }
        (0..self.n).all(|p| covered[p] || v[p].is_zero())
    }

    pub fn is_subalgebra_of(&self, other: &Subalgebra) -> bool {
        self.basis().iter().all(|v| other.contains(v))
    }

    /// Whether this is `χ_S · C^n` for its support `S`.
    pub fn is_hereditary(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    pub fn unit(&self) -> Vec<Q> {
        indicator(self.n, self.support())
    }

    pub fn contains_unit_of_algebra(&self) -> bool {
        self.contains(&vec![Q::one(); self.n])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    #[test]
    fn spans() {
        let v = vec![vec![qi(1), qi(1), qi(0)]];
        let s = Subalgebra::from_span(3, &v).unwrap();
        assert_eq!(s.blocks(), &[vec![0, 1]]);
        assert!(s.contains(&[qi(5), qi(5), qi(0)]));
        assert!(!s.contains(&[qi(5), qi(5), qi(1)]));
        // span{(1,2)} is not closed: (1,4) is outside.
        assert!(Subalgebra::from_span(2, &[vec![qi(1), qi(2)]]).is_none());
        assert!(Subalgebra::new(2, vec![vec![0], vec![0, 1]]).is_err());
        assert!(Subalgebra::whole(2).is_hereditary());
        assert!(!s.is_hereditary());
    }
}
