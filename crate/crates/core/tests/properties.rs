//! Randomized invariants. Instances come from seeded generators, so a failing
//! case is reproduced by its seed alone.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::{One, Zero};
use proptest::prelude::*;

use exelkit::corpus::{random_matrix, random_point_map, rng, seeded_graph};
use exelkit::correspondence::{exel_module_iso_check, gns_correspondence, quiver_dimension_check};
use exelkit::cp::{
    check_transfer_pair, gns_kernel, indicator, md_subalgebra, op_norm, pointwise, quiver, PointMap, PositiveMapMatrix,
};
use exelkit::graph::{basis_paths, enumerate_boundary};
use exelkit::rational::{parse_q, q, FloatPolicy};
use exelkit::rep::{boundary_representation, truncated_representation, verify_representation, Window};
use exelkit::{DiagElement, Graph, Path, WeightSystem, Q};
use rand::Rng;

fn graph(seed: u64, acyclic: bool) -> (Arc<Graph>, WeightSystem) {
    let (g, w) = seeded_graph(seed, 6, 10, acyclic);
    (Arc::new(g), w)
}

/// A random element supported on paths of length at most `depth`.
fn element(g: &Arc<Graph>, seed: u64, depth: usize) -> DiagElement {
    let mut r = rng(seed);
    let terms: Vec<(Path, Q)> = basis_paths(g, depth)
        .into_iter()
        .filter_map(|p| r.gen_bool(0.4).then(|| (p, q(r.gen_range(-4..=4), r.gen_range(1..=3)))))
        .collect();
    DiagElement::from_terms(g, terms)
}

/// All boundary paths of an acyclic graph, found by walking backwards from
/// every vertex until a vertex that receives nothing.
fn boundary_by_search(g: &Graph) -> BTreeSet<Path> {
    let mut out = BTreeSet::new();
    let mut stack: Vec<Path> = g.vertices().map(Path::vertex).collect();
    while let Some(p) = stack.pop() {
        let v = p.source(g);
        let incoming = g.receives(v);
        if incoming.is_empty() {
            out.insert(p);
            continue;
        }
        for &e in incoming {
            let mut edges = p.edges().to_vec();
            edges.push(e);
            stack.push(Path::from_edges(g, edges).expect("walk stays connected"));
        }
    }
    out
}

/// `L(a)(x) = Σ_{s(e)=r(x)} λ_e a(ex)`, evaluated pointwise.
fn transfer_at(g: &Graph, w: &WeightSystem, a: &DiagElement, x: &Path) -> Q {
    g.emits(x.range()).iter().fold(Q::zero(), |acc, &e| {
        let mut edges = vec![e];
        edges.extend_from_slice(x.edges());
        acc + w.get(e) * a.evaluate(&Path::from_edges(g, edges).expect("e x is a path"))
    })
}

/// Equality after refining both sides to a common depth.
fn same(a: &DiagElement, b: &DiagElement) -> bool {
    let d = Some(a.depth().max(b.depth()));
    a.normalize(d).unwrap() == b.normalize(d).unwrap()
}

fn random_vector(seed: u64, n: usize) -> Vec<Q> {
    let mut r = rng(seed);
    (0..n).map(|_| q(r.gen_range(0..=6), 6)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boundary_matches_search(seed in any::<u64>()) {
        let (g, _) = graph(seed, true);
        let atlas = enumerate_boundary(&g, 0);
        prop_assert!(atlas.complete);
        let found: BTreeSet<Path> = atlas.boundary_paths.into_iter().collect();
        prop_assert_eq!(found, boundary_by_search(&g));
    }

    #[test]
    fn shift_twice_drops_two_edges(seed in any::<u64>()) {
        let (g, _) = graph(seed, false);
        for p in basis_paths(&g, 4).into_iter().filter(|p| p.len() >= 2) {
            let twice = p.shift(&g).unwrap().shift(&g).unwrap();
            prop_assert_eq!(twice.edges(), &p.edges()[2..]);
        }
    }

    #[test]
    fn classification_is_stable_under_relabel(seed in any::<u64>()) {
        let (g, _) = graph(seed, false);
        let h = g.relabel(|v| format!("z{v}"), |e| format!("y{e}")).unwrap();
        let (a, b) = (g.classify_vertices(), h.classify_vertices());
        let rename = |s: &BTreeSet<String>| s.iter().map(|v| format!("z{v}")).collect::<BTreeSet<_>>();
        prop_assert_eq!(rename(&a.sources), b.sources);
        prop_assert_eq!(rename(&a.sinks), b.sinks);
        prop_assert_eq!(rename(&a.regular_receivers), b.regular_receivers);
        prop_assert_eq!(h.has_cycle(), g.has_cycle());
    }

    #[test]
    fn pointwise_product_laws(seed in any::<u64>()) {
        let (g, _) = graph(seed, false);
        let (a, b, c) = (element(&g, seed, 2), element(&g, seed ^ 1, 2), element(&g, seed ^ 2, 1));
        prop_assert!(same(&a.multiply(&b).unwrap(), &b.multiply(&a).unwrap()));
        let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        prop_assert!(same(&left, &right));
        for p in basis_paths(&g, 3) {
            let e = DiagElement::projection(&g, p);
            prop_assert!(same(&e.multiply(&e).unwrap(), &e));
        }
    }

    #[test]
    fn alpha_is_a_unital_homomorphism(seed in any::<u64>()) {
        let (g, _) = graph(seed, false);
        let (a, b) = (element(&g, seed, 2), element(&g, seed ^ 7, 2));
        let lhs = a.multiply(&b).unwrap().alpha();
        prop_assert!(same(&lhs, &a.alpha().multiply(&b.alpha()).unwrap()));
        prop_assert!(same(&a.add(&b).unwrap().alpha(), &a.alpha().add(&b.alpha()).unwrap()));
        let one = DiagElement::one(&g);
        // α(1) is the sum of the edge projections.
        let edges = DiagElement::from_terms(&g, g.edges().map(|e| (Path::edge(&g, e), Q::one())));
        prop_assert!(same(&one.alpha(), &edges));
    }

    #[test]
    fn operators_agree_with_pointwise_formulas(seed in any::<u64>()) {
        let (g, w) = graph(seed, true);
        let a = element(&g, seed, 3);
        let (alpha, l) = (a.alpha(), a.transfer(&w));
        for x in boundary_by_search(&g) {
            let shifted = if x.is_vertex() { None } else { Some(x.shift(&g).unwrap()) };
            let expected = shifted.map_or_else(Q::zero, |s| a.evaluate(&s));
            prop_assert_eq!(alpha.evaluate(&x), expected);
            prop_assert_eq!(l.evaluate(&x), transfer_at(&g, &w, &a, &x));
        }
    }

    #[test]
    fn transfer_is_positive(seed in any::<u64>()) {
        let (g, w) = graph(seed, false);
        let mut r = rng(seed);
        let terms: Vec<(Path, Q)> = basis_paths(&g, 3)
            .into_iter()
            .filter_map(|p| r.gen_bool(0.5).then(|| (p, q(r.gen_range(0..=5), 4))))
            .collect();
        let a = DiagElement::from_terms(&g, terms);
        prop_assert!(a.is_nonnegative());
        prop_assert!(a.transfer(&w).is_nonnegative());
    }

    #[test]
    fn transfer_identity_on_random_pairs(seed in any::<u64>()) {
        let (g, w) = graph(seed, false);
        let (a, b) = (element(&g, seed, 2), element(&g, seed ^ 3, 2));
        let lhs = a.multiply(&b.alpha()).unwrap().transfer(&w);
        let rhs = a.transfer(&w).multiply(&b).unwrap();
        prop_assert!(same(&lhs, &rhs));
    }

    #[test]
    fn norm_dominates_random_test_vectors(seed in any::<u64>(), n in 1usize..6) {
        let m = random_matrix(&mut rng(seed), n);
        let norm = op_norm(&m);
        let ones = vec![Q::one(); n];
        let at_one = m.apply(&ones).into_iter().max().unwrap_or_else(Q::zero);
        prop_assert_eq!(&at_one, &norm);
        for k in 0..8 {
            let v = random_vector(seed ^ k, n);
            prop_assert!(m.apply(&v).into_iter().all(|x| x <= norm));
        }
    }

    #[test]
    fn quiver_round_trips(seed in any::<u64>(), n in 1usize..6) {
        let m = random_matrix(&mut rng(seed), n);
        let qv = quiver(&m);
        prop_assert_eq!(qv.to_map(), m.clone());
        let nonzero = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| !m.get(x, y).is_zero());
        prop_assert_eq!(qv.edges.len(), nonzero.count());
    }

    #[test]
    fn gns_kernel_is_the_largest_killed_set(seed in any::<u64>(), n in 1usize..6) {
        let m = random_matrix(&mut rng(seed), n);
        let k = gns_kernel(&m).unwrap();
        for y in 0..n {
            let killed = m.apply(&indicator(n, [y])).iter().all(Zero::is_zero);
            prop_assert_eq!(killed, k.points.contains(&y));
        }
    }

    #[test]
    fn multiplicative_domain_matches_projection_search(seed in any::<u64>(), n in 1usize..6) {
        let m = random_matrix(&mut rng(seed), n);
        let md = md_subalgebra(&m).unwrap();
        let multiplicative = |a: &[Q]| {
            (0..n).all(|y| {
                let b = indicator(n, [y]);
                m.apply(&pointwise(a, &b)) == pointwise(&m.apply(a), &m.apply(&b))
            })
        };
        for s in 0..1u32 << n {
            let p = indicator(n, (0..n).filter(|i| s >> i & 1 == 1));
            prop_assert_eq!(md.contains(&p), multiplicative(&p), "support {:#b}", s);
        }
    }

    #[test]
    fn correspondence_dimension_is_support_size(seed in any::<u64>(), n in 1usize..5) {
        let m = random_matrix(&mut rng(seed), n);
        let c = gns_correspondence(&m).unwrap();
        let report = quiver_dimension_check(&m).unwrap();
        prop_assert_eq!(c.dimension(), report.relation_size);
        prop_assert!(report.actions_match && report.inner_products_match);
        prop_assert_eq!(c.inertia().negative, 0);
    }

    #[test]
    fn transfers_supported_on_fibres_are_accepted(seed in any::<u64>(), n in 1usize..6) {
        let mut r = rng(seed);
        let tau = random_point_map(&mut r, n);
        // L[x,y] may be nonzero only when τ(y) = x.
        let rows = (0..n)
            .map(|x| (0..n).map(|y| if tau[y] == Some(x) && r.gen_bool(0.7) { q(r.gen_range(1..=4), 3) } else { Q::zero() }).collect())
            .collect();
        let l = PositiveMapMatrix::from_rows(rows).unwrap();
        let alpha = PointMap::new(n, tau).unwrap();
        let c = check_transfer_pair(&alpha, &l).unwrap();
        prop_assert!(c.is_exel, "{:?}", c.witness);
        let iso = exel_module_iso_check(&alpha, &l).unwrap();
        prop_assert!(iso.isometric && iso.bimodule_map && iso.surjective);
    }

    #[test]
    fn exact_representations_satisfy_every_relation(seed in any::<u64>()) {
        let (g, w) = graph(seed, true);
        let rep = boundary_representation(&g).unwrap();
        prop_assert!(rep.relation_defects().iter().all(|d| d.is_zero()));
        let report = verify_representation(&rep, &w, 3).unwrap();
        prop_assert!(report.all_pass, "{:?}", report.checks.iter().find(|c| !c.passed()));
    }
}

fn normalized_hs(rep: &exelkit::rep::MatrixRep) -> Q {
    rep.relation_defects()
        .iter()
        .map(|d| parse_q(&d.normalized_hs, FloatPolicy::Reject).unwrap())
        .max()
        .unwrap_or_else(Q::zero)
}

#[test]
fn loop_defects_shrink_with_the_window() {
    let g = exelkit::corpus::g_loop().graph;
    let sizes: Vec<Q> = (2..=8).map(|n| normalized_hs(&truncated_representation(&g, n, Window::Fock))).collect();
    assert!(sizes.iter().all(|s| s > &Q::zero()), "a finite window cannot be exact");
    assert!(sizes.windows(2).all(|p| p[1] < p[0]), "{sizes:?}");
    // The boundary window of a loop is a single atom, so only locality holds.
    for window in [Window::Boundary, Window::Fock] {
        for rep in (2..=8).map(|n| truncated_representation(&g, n, window)) {
            assert!(rep.relation_defects().iter().all(|d| d.on_frontier), "{window:?}");
        }
    }
}
