//! Boundary paths and cylinder trees.

use serde::Serialize;

use super::{Graph, Path};

/// Finite data about `∂E`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryAtlas {
    /// Finite boundary paths (those whose source is a source vertex). For
    /// acyclic graphs this is all of `∂E`; otherwise only those up to `depth`.
    pub boundary_paths: Vec<Path>,
    /// All paths of length at most `depth`, shortest first.
    pub cylinder_tree: Vec<Path>,
    pub depth: usize,
    /// False when infinite paths exist, i.e. the graph has a cycle.
    pub complete: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryAtlasDoc {
    pub boundary_paths: Vec<String>,
    pub cylinder_tree: Vec<String>,
    pub depth: usize,
    pub complete: bool,
}

impl BoundaryAtlas {
    pub fn to_doc(&self, g: &Graph) -> BoundaryAtlasDoc {
        BoundaryAtlasDoc {
            boundary_paths: self.boundary_paths.iter().map(|p| p.display(g)).collect(),
            cylinder_tree: self.cylinder_tree.iter().map(|p| p.display(g)).collect(),
            depth: self.depth,
            complete: self.complete,
        }
    }
}

pub fn enumerate_boundary(g: &Graph, depth: usize) -> BoundaryAtlas {
    let complete = !g.has_cycle();
    let limit = if complete { usize::MAX } else { depth };
    let mut boundary_paths = Vec::new();
    let mut stack: Vec<Path> = g.vertices().map(Path::vertex).collect();
    stack.reverse();
    while let Some(p) = stack.pop() {
        if g.is_source(p.source(g)) {
            boundary_paths.push(p);
            continue;
        }
        if p.len() < limit {
            let mut kids: Vec<Path> = p.children(g).collect();
            kids.reverse();
            stack.extend(kids);
        }
    }
    boundary_paths.sort();
    BoundaryAtlas { boundary_paths, cylinder_tree: basis_paths(g, depth), depth, complete }
}

/// All paths of length at most `depth`, grouped by length.
pub fn basis_paths(g: &Graph, depth: usize) -> Vec<Path> {
    let mut out: Vec<Path> = g.vertices().map(Path::vertex).collect();
    let mut layer = out.clone();
    for _ in 0..depth {
        let next: Vec<Path> = layer.iter().flat_map(|p| p.children(g).collect::<Vec<_>>()).collect();
        if next.is_empty() {
            break;
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Minimal projections of the depth-`d` truncation: paths of length exactly
/// `d`, and shorter paths ending at a source.
pub fn atoms(g: &Graph, d: usize) -> Vec<Path> {
    let mut out = Vec::new();
    let mut layer: Vec<Path> = g.vertices().map(Path::vertex).collect();
    for _ in 0..d {
        let mut next = Vec::new();
        for p in layer {
            if g.is_source(p.source(g)) {
                out.push(p);
            } else {
                next.extend(p.children(g));
            }
        }
        layer = next;
    }
    out.extend(layer);
    out.sort();
    out
}
