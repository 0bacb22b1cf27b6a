//! Small examples computed by hand, and the shipped fixture files.

use std::sync::Arc;

use num_traits::{One, Zero};

use exelkit::corpus::{all_graph_fixtures, g_2loop, g_fork, g_line, matrix_fixture, matrix_fixtures};
use exelkit::correspondence::gns_correspondence;
use exelkit::cp::{analyze, PositiveMapMatrix};
use exelkit::graph::{atoms, GraphDocument};
use exelkit::rational::{q, FloatPolicy};
use exelkit::rep::boundary_representation;
use exelkit::{DiagElement, Graph, Path, WeightSystem, Q};

fn proj(g: &Arc<Graph>, edges: &[&str]) -> DiagElement {
    DiagElement::projection(g, Path::parse(g, edges).unwrap())
}

fn vertex(g: &Arc<Graph>, name: &str) -> DiagElement {
    DiagElement::projection(g, Path::vertex(g.vertex(name).unwrap()))
}

fn same(a: &DiagElement, b: &DiagElement) -> bool {
    let d = Some(a.depth().max(b.depth()));
    a.normalize(d).unwrap() == b.normalize(d).unwrap()
}

#[test]
fn line_operators() {
    let f = g_line();
    let g = &f.graph;
    let (qv, qw, qe) = (vertex(g, "v"), vertex(g, "w"), proj(g, &["e"]));
    // v receives only e, so the two projections coincide.
    assert!(same(&qv, &qe));
    // α(q_w) sums over edges leaving w; nothing leaves v.
    assert!(same(&qw.alpha(), &qe));
    assert!(qv.alpha().is_zero());
    assert!(same(&qe.transfer(&f.weights), &qw));
    assert!(qw.transfer(&f.weights).is_zero());
    assert!(same(&DiagElement::one(g).alpha(), &qe));
}

#[test]
fn line_representation() {
    let f = g_line();
    let rep = boundary_representation(&f.graph).unwrap();
    assert_eq!(rep.basis_names(), ["e", "w"]);
    let s = rep.s(f.graph.edge("e").unwrap());
    assert_eq!(s.get(0, 1), Q::one());
    assert_eq!(s.get(1, 0), Q::zero());
    assert_eq!(s.get(0, 0), Q::zero());
    assert!(rep.relation_defects().iter().all(|d| d.is_zero()));
}

#[test]
fn fork_transfer_of_one() {
    let f = g_fork();
    let g = &f.graph;
    let expected = DiagElement::from_terms(
        g,
        [(Path::vertex(g.vertex("w1").unwrap()), q(1, 3)), (Path::vertex(g.vertex("w2").unwrap()), q(2, 3))],
    );
    assert!(same(&DiagElement::one(g).transfer(&f.weights), &expected));
    assert!(same(&vertex(g, "v").transfer(&f.weights), &expected));
    assert_eq!(atoms(g, 1).iter().map(|p| p.display(g)).collect::<Vec<_>>(), ["e", "f", "w1", "w2"]);
}

#[test]
fn two_loop_is_regular() {
    let f = g_2loop();
    let g = &f.graph;
    let one = DiagElement::one(g);
    assert!(same(&one.transfer(&f.weights), &one));
    assert!(same(&vertex(g, "v").alpha(), &proj(g, &["e"]).add(&proj(g, &["f"])).unwrap()));
    assert!(same(&proj(g, &["e", "f"]).transfer(&f.weights), &proj(g, &["f"]).scale(&q(1, 2))));
    assert!(same(&proj(g, &["e"]).alpha(), &proj(g, &["e", "e"]).add(&proj(g, &["f", "e"])).unwrap()));
}

#[test]
fn half_matrix() {
    let m = matrix_fixture("m_half").unwrap().matrix;
    let a = analyze(&m).unwrap();
    assert_eq!(a.norm, Q::one());
    assert!(a.gns_kernel.points.is_empty());
    // Only constants survive: φ(δ₁δ₀) = 0 but φ(δ₁)φ(δ₀) = (1/4, 0).
    assert_eq!(a.multiplicative_domain.dimension, 1);
    assert_eq!(gns_correspondence(&m).unwrap().dimension(), 3);
}

#[test]
fn shift_matrix() {
    let m = matrix_fixture("m_shift").unwrap().matrix;
    let a = analyze(&m).unwrap();
    assert_eq!(a.norm, Q::one());
    assert_eq!(a.gns_kernel.points, [0]);
    assert_eq!(a.zero_rows, [1]);
    assert_eq!(gns_correspondence(&m).unwrap().dimension(), 1);
}

fn fixture_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

#[test]
fn fixture_files_match_the_corpus() {
    let dir = fixture_dir();
    for f in all_graph_fixtures() {
        let text = std::fs::read_to_string(dir.join(format!("{}.json", f.name))).unwrap();
        let (g, w) = GraphDocument::from_json(&text).unwrap().load(FloatPolicy::Reject).unwrap();
        assert_eq!(&g, f.graph.as_ref(), "{}", f.name);
        // Edgeless documents carry no weights.
        let w = w.unwrap_or_else(|| WeightSystem::new(&g, Vec::new()).unwrap());
        assert_eq!(w, f.weights, "{}", f.name);
    }
    for m in matrix_fixtures() {
        let text = std::fs::read_to_string(dir.join(format!("{}.json", m.name))).unwrap();
        assert_eq!(PositiveMapMatrix::from_json(&text, FloatPolicy::Reject).unwrap(), m.matrix, "{}", m.name);
    }
}
