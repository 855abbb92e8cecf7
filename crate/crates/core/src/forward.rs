//! Instances of `CSP(A)` to instances of `CSP(D(A))`.
//!
//! Every tuple `t` gets an apex `y:<t>` and, for each position `i`, a fresh
//! copy of `Q_{i}` from the element at position `i` to the apex.

use crate::dbuild::{PathShape, PathSpec};
use crate::error::{Error, Result};
use crate::model::{DVertex, Digraph, Positions, Structure};

/// Number of vertices `forward_instance` produces.
pub fn forward_size(elements: usize, tuples: usize, k: usize) -> usize {
    elements + tuples * (1 + k * (3 * k - 1))
}

pub fn forward_instance(x: &Structure, k: usize) -> Result<Digraph> {
    let rel = x.single_relation()?;
    if rel.arity != k {
        return Err(Error::ArityMismatch {
            relation: rel.name.clone(),
            arity: k,
            got: rel.arity,
        });
    }
    if k > 62 {
        return Err(Error::ArityTooLarge(k));
    }
    let mut names: Vec<String> = x.domain().iter().map(|e| format!("x:{e}")).collect();
    let mut levels = vec![0usize; x.size()];
    let mut prov: Vec<DVertex> = (0..x.size()).map(DVertex::Element).collect();
    let mut edges = Vec::new();

    let shapes: Vec<PathShape> = (1..=k)
        .map(|i| {
            let mut s = Positions::empty();
            s.insert(i);
            PathShape::new(PathSpec { k, singles: s })
        })
        .collect();
    for (ti, t) in rel.tuples.iter().enumerate() {
        let apex = names.len();
        names.push(format!("y:{ti}"));
        levels.push(k + 2);
        prov.push(DVertex::Tuple(t.clone()));
        for (p, shape) in shapes.iter().enumerate() {
            let mut verts = vec![t[p]];
            for j in 1..shape.tau() {
                verts.push(names.len());
                names.push(format!("q:{ti}:{}:{j}", p + 1));
                levels.push(shape.levels[j]);
                prov.push(DVertex::Internal {
                    element: t[p],
                    tuple: t.clone(),
                    position: j,
                });
            }
            verts.push(apex);
            edges.extend(shape.edges().map(|(a, b)| (verts[a], verts[b])));
        }
    }
    Digraph::new(format!("F_{}", x.name()), names, edges)?
        .with_levels(levels)?
        .with_provenance(prov)
}

/// A one-vertex instance; always a YES instance of `CSP(D(A))`.
pub fn fixed_yes_digraph() -> Digraph {
    Digraph::new("yes", vec!["v".into()], vec![]).expect("one vertex")
}

/// A single directed edge; YES for every `D(A)` since `R` is nonempty.
pub fn single_edge_probe() -> Digraph {
    Digraph::new("edge", vec!["u".into(), "v".into()], vec![(0, 1)]).expect("one edge")
}
