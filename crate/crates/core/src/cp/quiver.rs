//! The support relation of a positive map and the discrete quiver it defines.

use num_traits::Zero;
use serde::Serialize;

use super::PositiveMapMatrix;
use crate::linalg::QMatrix;
use crate::rational::{serde_q, Q};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportRelation {
    /// `(x, y)` with `M[x,y] > 0`, row-major.
    pub pairs: Vec<(usize, usize)>,
    /// `Φ(x)`, the support of row `x`.
    pub rows: Vec<Vec<usize>>,
}

pub fn support_relation(m: &PositiveMapMatrix) -> SupportRelation {
    let n = m.n();
    let rows: Vec<Vec<usize>> = (0..n).map(|x| (0..n).filter(|&y| !m.get(x, y).is_zero()).collect()).collect();
    let pairs = rows.iter().enumerate().flat_map(|(x, r)| r.iter().map(move |&y| (x, y))).collect();
    SupportRelation { pairs, rows }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuiverEdge {
    pub source: usize,
    pub range: usize,
    #[serde(with = "serde_q")]
    pub measure: Q,
}

/// Edges `(x, y)` of the support relation with `s = x`, `r = y`, carrying
/// the mass `M[x,y]` of the measure on the fibre `s⁻¹(x)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Quiver {
    pub vertices: usize,
    pub edges: Vec<QuiverEdge>,
    /// `Dom(Φ)`: rows with nonzero support.
    pub domain: Vec<usize>,
    pub domain_is_proper: bool,
    /// Openness of the source map carries no information on a discrete space.
    pub openness: &'static str,
}

impl Quiver {
    /// Rebuilds the positive map from the edge measures.
    pub fn to_map(&self) -> PositiveMapMatrix {
        let mut m = QMatrix::zeros(self.vertices, self.vertices);
        for e in &self.edges {
            m[(e.source, e.range)] += &e.measure;
        }
        PositiveMapMatrix::new(m).expect("measures are positive")
    }
}

pub fn quiver(m: &PositiveMapMatrix) -> Quiver {
    let rel = support_relation(m);
    let edges: Vec<QuiverEdge> =
        rel.pairs.iter().map(|&(x, y)| QuiverEdge { source: x, range: y, measure: m.get(x, y).clone() }).collect();
    let domain: Vec<usize> = (0..m.n()).filter(|&x| !rel.rows[x].is_empty()).collect();
    // Axiom: supp λ_x = s⁻¹(x).
    debug_assert!(edges.iter().all(|e| !e.measure.is_zero()));
    Quiver {
        vertices: m.n(),
        domain_is_proper: domain.len() < m.n(),
        domain,
        edges,
        openness: "vacuously true (discrete)",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn relation_and_quiver() {
        let m = PositiveMapMatrix::from_rows(vec![vec![q(1, 2), q(1, 2)], vec![qi(0), qi(1)]]).unwrap();
        assert_eq!(support_relation(&m).pairs, [(0, 0), (0, 1), (1, 1)]);
        let qv = quiver(&m);
        assert_eq!(qv.edges.len(), 3);
        assert!(!qv.domain_is_proper);
        assert_eq!(qv.to_map(), m);
        let id = quiver(&PositiveMapMatrix::identity(3));
        assert!(id.edges.iter().all(|e| e.source == e.range));
        let zero_row = PositiveMapMatrix::from_rows(vec![vec![qi(1), qi(1)], vec![qi(0), qi(0)]]).unwrap();
        let qz = quiver(&zero_row);
        assert_eq!(qz.domain, [0]);
        assert!(qz.domain_is_proper);
    }
}
