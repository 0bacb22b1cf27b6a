//! Shipped fixtures and seeded random instances.
//!
//! Every random instance comes from a `ChaCha8Rng` seeded with a `u64`, so a
//! seed reproduces its instance exactly on every platform.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cp::PositiveMapMatrix;
use crate::graph::{Graph, GraphDocument, WeightSystem};
use crate::rational::{q, Q};

#[derive(Debug, Clone)]
pub struct GraphFixture {
    pub name: String,
    pub graph: Arc<Graph>,
    pub weights: WeightSystem,
    pub acyclic: bool,
}

impl GraphFixture {
    fn new(name: &str, graph: Graph, weights: Vec<Q>) -> Self {
        let weights = WeightSystem::new(&graph, weights).expect("fixture weights");
        GraphFixture { name: name.into(), acyclic: !graph.has_cycle(), graph: Arc::new(graph), weights }
    }

    pub fn document(&self) -> GraphDocument {
        GraphDocument::from_graph(&self.graph, Some(&self.weights))
    }
}

#[derive(Debug, Clone)]
pub struct MatrixFixture {
    pub name: String,
    pub matrix: PositiveMapMatrix,
}

/// `w --e--> v`.
pub fn g_line() -> GraphFixture {
    GraphFixture::new("g_line", Graph::new(&["v", "w"], &[("e", "w", "v")]).unwrap(), vec![Q::one()])
}

pub fn g_loop() -> GraphFixture {
    GraphFixture::new("g_loop", Graph::new(&["v"], &[("e", "v", "v")]).unwrap(), vec![Q::one()])
}

pub fn g_2loop() -> GraphFixture {
    let g = Graph::new(&["v"], &[("e", "v", "v"), ("f", "v", "v")]).unwrap();
    GraphFixture::new("g_2loop", g, vec![q(1, 2), q(1, 2)])
}

/// `w1 --e--> v <--f-- w2`.
pub fn g_fork() -> GraphFixture {
    let g = Graph::new(&["v", "w1", "w2"], &[("e", "w1", "v"), ("f", "w2", "v")]).unwrap();
    GraphFixture::new("g_fork", g, vec![q(1, 3), q(2, 3)])
}

pub fn named_fixtures() -> Vec<GraphFixture> {
    vec![g_line(), g_loop(), g_2loop(), g_fork()]
}

pub const REGRESSION_SEEDS: std::ops::Range<u64> = 0..20;

/// The frozen regression corpus; even seeds are acyclic.
pub fn regression_corpus() -> Vec<GraphFixture> {
    REGRESSION_SEEDS
        .map(|seed| {
            let (g, w) = seeded_graph(seed, 8, 16, seed % 2 == 0);
            GraphFixture { name: format!("r{seed:02}"), acyclic: !g.has_cycle(), graph: Arc::new(g), weights: w }
        })
        .collect()
}

pub fn matrix_fixtures() -> Vec<MatrixFixture> {
    let m = |name: &str, rows: Vec<Vec<Q>>| MatrixFixture {
        name: name.into(),
        matrix: PositiveMapMatrix::from_rows(rows).unwrap(),
    };
    let (z, o) = (Q::zero(), Q::one());
    vec![
        m("m_half", vec![vec![q(1, 2), q(1, 2)], vec![z.clone(), o.clone()]]),
        m("m_shift", vec![vec![z.clone(), o], vec![z.clone(), z]]),
    ]
}

pub fn all_graph_fixtures() -> Vec<GraphFixture> {
    let mut v = named_fixtures();
    v.extend(regression_corpus());
    v
}

pub fn graph_fixture(name: &str) -> Option<GraphFixture> {
    all_graph_fixtures().into_iter().find(|f| f.name == name)
}

pub fn matrix_fixture(name: &str) -> Option<MatrixFixture> {
    matrix_fixtures().into_iter().find(|f| f.name == name)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Positive rational with denominator at most 6, in `(0, 2]`.
pub fn random_weight<R: Rng>(rng: &mut R) -> Q {
    let d = rng.gen_range(1..=6i64);
    q(rng.gen_range(1..=2 * d), d)
}

/// `n ∈ 1..=max_vertices` and at most `min(2n, max_edges)` edges. Acyclic
/// graphs only use edges from higher to lower vertex index.
pub fn random_graph<R: Rng>(rng: &mut R, max_vertices: usize, max_edges: usize, acyclic: bool) -> Graph {
    let n = rng.gen_range(1..=max_vertices);
    let m = rng.gen_range(0..=(2 * n).min(max_edges));
    let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::with_capacity(m);
    for k in 0..m {
        let (s, r) = if acyclic {
            if n < 2 {
                break;
            }
            let s = rng.gen_range(1..n);
            (s, rng.gen_range(0..s))
        } else {
            (rng.gen_range(0..n), rng.gen_range(0..n))
        };
        edges.push((format!("e{k}"), vertices[s].clone(), vertices[r].clone()));
    }
    Graph::new(&vertices, &edges).expect("generated graph is valid")
}

pub fn random_weights<R: Rng>(rng: &mut R, g: &Graph) -> WeightSystem {
    WeightSystem::new(g, g.edges().map(|_| random_weight(rng)).collect()).unwrap()
}

/// Weights summing to 1 at every emitting vertex.
pub fn normalized_weights<R: Rng>(rng: &mut R, g: &Graph) -> WeightSystem {
    let mut w = vec![Q::zero(); g.edge_count()];
    for v in g.vertices() {
        let out = g.emits(v);
        let raw: Vec<i64> = out.iter().map(|_| rng.gen_range(1..=4)).collect();
        let total: i64 = raw.iter().sum();
        for (&e, &r) in out.iter().zip(&raw) {
            w[e.0 as usize] = q(r, total);
        }
    }
    WeightSystem::new(g, w).unwrap()
}

pub fn seeded_graph(seed: u64, max_vertices: usize, max_edges: usize, acyclic: bool) -> (Graph, WeightSystem) {
    let mut r = rng(seed);
    let g = random_graph(&mut r, max_vertices, max_edges, acyclic);
    let w = random_weights(&mut r, &g);
    (g, w)
}

/// Nonnegative `n × n` matrix; about a third of the entries are zero.
pub fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> PositiveMapMatrix {
    let rows = (0..n)
        .map(|_| (0..n).map(|_| if rng.gen_bool(1.0 / 3.0) { Q::zero() } else { random_weight(rng) }).collect())
        .collect();
    PositiveMapMatrix::from_rows(rows).unwrap()
}

/// A random partial map on `0..n`, as used for endomorphisms of `C^n`.
pub fn random_point_map<R: Rng>(rng: &mut R, n: usize) -> Vec<Option<usize>> {
    let mut targets: Vec<usize> = (0..n).collect();
    targets.shuffle(rng);
    (0..n).map(|i| rng.gen_bool(0.75).then(|| targets[i % n])).collect()
}
