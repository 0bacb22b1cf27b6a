//! Countable graphs given by an edge generator, examined within a budget.
//!
//! Nothing here certifies a property of an infinite graph; every verdict is
//! relative to the number of edges inspected and says so.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::lambda::{ConditionReport, Verdict};
use super::VertexClassification;
use crate::rational::{q, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LazyEdge {
    pub id: String,
    pub src: String,
    pub rng: String,
    pub lambda: Q,
}

/// Weight of the `k`-th generated edge (`k ≥ 0`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LambdaRule {
    Constant(Q),
    /// `ratio^(k+1)`
    Geometric(Q),
    /// `1/(k+1)`
    Harmonic,
}

impl LambdaRule {
    pub fn weight(&self, k: usize) -> Q {
        match self {
            LambdaRule::Constant(c) => c.clone(),
            LambdaRule::Geometric(r) => num_traits::pow(r.clone(), k + 1),
            LambdaRule::Harmonic => q(1, k as i64 + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LazyFamily {
    /// One vertex `v` with loops `e0, e1, …`.
    Rose,
    /// Vertex `v` receiving `e_k : w_k → v`.
    Star,
}

type Generator = Arc<dyn Fn(usize) -> Option<LazyEdge> + Send + Sync>;

/// A graph known only through the enumeration `k ↦ k-th edge`; the
/// enumeration may end (finite graph) or not.
#[derive(Clone)]
pub struct LazyGraph {
    name: String,
    generator: Generator,
}

impl fmt::Debug for LazyGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LazyGraph").field("name", &self.name).finish_non_exhaustive()
    }
}

impl LazyGraph {
    pub fn from_fn(name: impl Into<String>, f: impl Fn(usize) -> Option<LazyEdge> + Send + Sync + 'static) -> Self {
        LazyGraph { name: name.into(), generator: Arc::new(f) }
    }

    pub fn family(family: LazyFamily, rule: LambdaRule) -> Self {
        match family {
            LazyFamily::Rose => Self::from_fn("rose", move |k| {
                Some(LazyEdge { id: format!("e{k}"), src: "v".into(), rng: "v".into(), lambda: rule.weight(k) })
            }),
            LazyFamily::Star => Self::from_fn("star", move |k| {
                Some(LazyEdge { id: format!("e{k}"), src: format!("w{k}"), rng: "v".into(), lambda: rule.weight(k) })
            }),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn edge(&self, k: usize) -> Option<LazyEdge> {
        (self.generator)(k)
    }

    /// The first `budget` edges, and whether the enumeration ended before.
    pub fn prefix(&self, budget: usize) -> (Vec<LazyEdge>, bool) {
        let mut out = Vec::with_capacity(budget.min(1 << 16));
        for k in 0..budget {
            match self.edge(k) {
                Some(e) => out.push(e),
                None => return (out, true),
            }
        }
        let ended = self.edge(budget).is_none();
        (out, ended)
    }
}

/// Counts per vertex of edges seen in `[0, budget/2)` and `[budget/2, budget)`.
fn halves<'a>(
    edges: &'a [LazyEdge],
    budget: usize,
    key: impl Fn(&'a LazyEdge) -> &'a str,
) -> BTreeMap<&'a str, (usize, usize)> {
    let mut m: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for (k, e) in edges.iter().enumerate() {
        let c = m.entry(key(e)).or_default();
        if 2 * k < budget {
            c.0 += 1;
        } else {
            c.1 += 1;
        }
    }
    m
}

/// A vertex seen in the first half of the window and still gaining edges in
/// the second half is flagged as a suspected infinite receiver/emitter.
pub fn classify_lazy(g: &LazyGraph, budget: usize) -> VertexClassification {
    let (edges, ended) = g.prefix(budget);
    let mut vertices: BTreeSet<String> = BTreeSet::new();
    for e in &edges {
        vertices.insert(e.src.clone());
        vertices.insert(e.rng.clone());
    }
    let recv = halves(&edges, budget, |e| e.rng.as_str());
    let emit = halves(&edges, budget, |e| e.src.as_str());
    let growing = |m: &BTreeMap<&str, (usize, usize)>| -> BTreeSet<String> {
        if ended {
            return BTreeSet::new();
        }
        m.iter().filter(|(_, c)| c.0 > 0 && c.1 > 0).map(|(v, _)| v.to_string()).collect()
    };
    let infinite_receivers = growing(&recv);
    let infinite_emitters = growing(&emit);
    let sources: BTreeSet<String> = vertices.iter().filter(|v| !recv.contains_key(v.as_str())).cloned().collect();
    let sinks: BTreeSet<String> = vertices.iter().filter(|v| !emit.contains_key(v.as_str())).cloned().collect();
    let regular_receivers = vertices
        .iter()
        .filter(|v| recv.contains_key(v.as_str()) && !infinite_receivers.contains(*v))
        .cloned()
        .collect();
    VertexClassification {
        sources,
        sinks,
        regular_receivers,
        suspected: !infinite_receivers.is_empty() || !infinite_emitters.is_empty(),
        infinite_receivers,
        infinite_emitters,
        budget: Some(budget),
    }
}

fn max_emitted(edges: &[LazyEdge]) -> Q {
    let mut sums: BTreeMap<&str, Q> = BTreeMap::new();
    for e in edges {
        *sums.entry(&e.src).or_insert_with(Q::zero) += &e.lambda;
    }
    sums.into_values().max().unwrap_or_else(Q::zero)
}

/// Compares the growth of a monotone quantity over the last two doublings of
/// the window: no growth or a fourfold slowdown counts as evidence of
/// convergence, steady growth as evidence of divergence.
fn growth_verdict(inc_early: &Q, inc_late: &Q) -> Verdict {
    if inc_late.is_zero() {
        Verdict::HoldsOnEvidence
    } else if inc_late * q(4, 1) >= inc_early * q(3, 1) {
        Verdict::FailsOnEvidence
    } else if inc_late * q(4, 1) <= inc_early.clone() {
        Verdict::HoldsOnEvidence
    } else {
        Verdict::Inconclusive
    }
}

pub fn check_lambda_lazy(g: &LazyGraph, budget: usize) -> ConditionReport {
    let (edges, ended) = g.prefix(budget);
    let mut per_source: BTreeMap<String, Q> = BTreeMap::new();
    for e in &edges {
        *per_source.entry(e.src.clone()).or_insert_with(Q::zero) += &e.lambda;
    }
    let sup = per_source.values().max().cloned().unwrap_or_else(Q::zero);
    if ended {
        return ConditionReport {
            linf: Verdict::Holds,
            c0: Verdict::Holds,
            sup,
            emitted_sums: per_source,
            exact: true,
            budget: Some(budget),
            note: Some(format!("enumeration ended after {} edges; graph is finite", edges.len())),
        };
    }
    let m4 = max_emitted(&edges[..budget / 4]);
    let m2 = max_emitted(&edges[..budget / 2]);
    let linf = growth_verdict(&(&m2 - &m4), &(&sup - &m2));

    // c0: per receiver, the mass sent by each sender; compare the largest
    // masses of senders first seen in the second quarter and the second half.
    let mut first_seen: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    let mut mass: BTreeMap<(&str, &str), Q> = BTreeMap::new();
    for (k, e) in edges.iter().enumerate() {
        first_seen.entry((&e.rng, &e.src)).or_insert(k);
        *mass.entry((&e.rng, &e.src)).or_insert_with(Q::zero) += &e.lambda;
    }
    let receivers: BTreeSet<&str> = edges.iter().map(|e| e.rng.as_str()).collect();
    let mut c0 = Verdict::HoldsOnEvidence;
    for v in receivers {
        let window_max = |lo: usize, hi: usize| {
            mass.iter()
                .filter(|((r, s), _)| *r == v && (lo..hi).contains(&first_seen[&(*r, *s)]))
                .map(|(_, m)| m.clone())
                .max()
        };
        let late = window_max(budget / 2, budget);
        let Some(late) = late else { continue };
        let mid = window_max(budget / 4, budget / 2).unwrap_or_else(Q::one);
        let verdict = if &late * q(4, 1) >= &mid * q(3, 1) {
            Verdict::FailsOnEvidence
        } else if &late * q(4, 1) <= mid {
            Verdict::HoldsOnEvidence
        } else {
            Verdict::Inconclusive
        };
        c0 = match (c0, verdict) {
            (Verdict::FailsOnEvidence, _) | (_, Verdict::FailsOnEvidence) => Verdict::FailsOnEvidence,
            (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
            _ => Verdict::HoldsOnEvidence,
        };
    }
    ConditionReport {
        linf,
        c0,
        sup,
        emitted_sums: BTreeMap::new(),
        exact: false,
        budget: Some(budget),
        note: Some(format!("verdicts from the first {budget} edges only; sup is a lower bound")),
    }
}
