//! The boundedness conditions on a weight system.
//!
//! (ℓ∞) `sup_{v ∈ s(E¹)} Σ_{e ∈ s⁻¹(v)} λ_e < ∞`.
//! (c0) for each receiver `v`, the family `w ↦ Σ_{e ∈ r⁻¹(v) ∩ s⁻¹(w)} λ_e`
//! vanishes at infinity.
//! Both hold trivially on finite graphs; the lazy variant reports evidence.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use super::{Graph, WeightSystem};
use crate::rational::{serde_q, serde_q_map, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    HoldsOnEvidence,
    FailsOnEvidence,
    Inconclusive,
}

impl Verdict {
    pub fn is_failure(self) -> bool {
        self == Verdict::FailsOnEvidence
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub linf: Verdict,
    pub c0: Verdict,
    /// Exact supremum for finite graphs; a lower bound otherwise.
    #[serde(with = "serde_q")]
    pub sup: Q,
    #[serde(serialize_with = "serde_q_map::serialize")]
    pub emitted_sums: BTreeMap<String, Q>,
    pub exact: bool,
    pub budget: Option<usize>,
    pub note: Option<String>,
}

pub fn check_lambda_conditions(g: &Graph, w: &WeightSystem) -> ConditionReport {
    let emitted_sums: BTreeMap<String, Q> =
        g.vertices().filter(|&v| !g.is_sink(v)).map(|v| (g.vertex_name(v).to_string(), w.emitted_sum(g, v))).collect();
    let sup = emitted_sums.values().max().cloned().unwrap_or_else(Q::zero);
    ConditionReport {
        linf: Verdict::Holds,
        c0: Verdict::Holds,
        sup,
        emitted_sums,
        exact: true,
        budget: None,
        note: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn finite_graphs_hold_with_exact_sup() {
        let g = Graph::new(&["v"], &[("e", "v", "v"), ("f", "v", "v")]).unwrap();
        let r = check_lambda_conditions(&g, &WeightSystem::constant(&g, q(1, 2)).unwrap());
        assert_eq!((r.linf, r.c0, r.sup.clone()), (Verdict::Holds, Verdict::Holds, qi(1)));
        let l = Graph::new(&["w", "v"], &[("e", "w", "v")]).unwrap();
        let r = check_lambda_conditions(&l, &WeightSystem::constant(&l, qi(3)).unwrap());
        assert_eq!(r.sup, qi(3));
        assert_eq!(r.emitted_sums.len(), 1);
    }
}
