//! Seeded random structures and digraphs for the property suites.

use crate::dbuild::DMeta;
use crate::model::{Digraph, Relation, Role, Structure};
use crate::reverse::assign_levels;
use crate::rng::Lcg;

/// `count` distinct tuples over `0..size` (fewer if the space is smaller).
fn distinct_tuples(rng: &mut Lcg, size: usize, arity: usize, count: usize) -> Vec<Vec<usize>> {
    let space = size.saturating_pow(arity as u32);
    let want = count.min(space);
    let mut out: Vec<Vec<usize>> = Vec::with_capacity(want);
    while out.len() < want {
        let t: Vec<usize> = (0..arity).map(|_| rng.below(size)).collect();
        if !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

/// A template with one nonempty relation of arity `1..=max_k`.
pub fn template(rng: &mut Lcg, max_elements: usize, max_k: usize, max_tuples: usize) -> Structure {
    let n = rng.range(1, max_elements);
    let k = rng.range(1, max_k);
    let r = rng.range(1, max_tuples);
    let tuples = distinct_tuples(rng, n, k, r);
    Structure::with_indices("A", Role::Template, n, vec![Relation::new("R", k, tuples)])
        .expect("valid template")
}

/// Like [`template`] but without constant tuples, so its CSP has NO instances.
pub fn nontrivial_template(
    rng: &mut Lcg,
    max_elements: usize,
    max_k: usize,
    max_tuples: usize,
) -> Structure {
    loop {
        // Unary tuples are constant, so the arity is at least 2.
        let n = rng.range(2, max_elements.max(2));
        let k = rng.range(2, max_k.max(2));
        let r = rng.range(1, max_tuples);
        let tuples: Vec<Vec<usize>> = distinct_tuples(rng, n, k, r * 2)
            .into_iter()
            .filter(|t| t.iter().any(|&x| x != t[0]))
            .take(r)
            .collect();
        if tuples.is_empty() {
            continue;
        }
        return Structure::with_indices(
            "A",
            Role::Template,
            n,
            vec![Relation::new("R", k, tuples)],
        )
        .expect("valid template");
    }
}

/// One or two relations with arities summing to at most `max_total`.
pub fn multi_template(
    rng: &mut Lcg,
    max_elements: usize,
    max_total: usize,
    max_tuples: usize,
) -> Structure {
    let n = rng.range(1, max_elements);
    let arities: Vec<usize> = if max_total >= 2 && rng.coin() {
        let a = rng.range(1, max_total - 1);
        vec![a, rng.range(1, max_total - a)]
    } else {
        vec![rng.range(1, max_total)]
    };
    let rels = arities
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let r = rng.range(1, max_tuples);
            Relation::new(format!("R{}", i + 1), k, distinct_tuples(rng, n, k, r))
        })
        .collect();
    Structure::with_indices("A", Role::Template, n, rels).expect("valid template")
}

/// An instance over the signature of `a`, possibly with empty relations.
pub fn instance_for(
    rng: &mut Lcg,
    a: &Structure,
    max_elements: usize,
    max_tuples: usize,
) -> Structure {
    let n = rng.range(1, max_elements);
    let rels = a
        .relations()
        .iter()
        .map(|r| {
            let c = rng.below(max_tuples + 1);
            Relation::new(r.name.clone(), r.arity, distinct_tuples(rng, n, r.arity, c))
        })
        .collect();
    Structure::with_indices("X", Role::Instance, n, rels).expect("valid instance")
}

/// Random edges between vertices of random levels; every component is
/// balanced by construction.
pub fn levelled_digraph(rng: &mut Lcg, n: usize, height: usize, edge_tries: usize) -> Digraph {
    let levels: Vec<usize> = (0..n).map(|_| rng.range(0, height)).collect();
    let mut edges = Vec::new();
    for _ in 0..edge_tries {
        let (u, v) = (rng.below(n), rng.below(n));
        if levels[u] + 1 == levels[v] && !edges.contains(&(u, v)) {
            edges.push((u, v));
        }
    }
    Digraph::anonymous(n, edges).expect("valid digraph")
}

/// Arbitrary edges; usually unbalanced once there are a few.
pub fn arbitrary_digraph(rng: &mut Lcg, n: usize, edge_count: usize) -> Digraph {
    let mut edges = Vec::new();
    for _ in 0..edge_count {
        let e = (rng.below(n), rng.below(n));
        if !edges.contains(&e) {
            edges.push(e);
        }
    }
    Digraph::anonymous(n, edges).expect("valid digraph")
}

/// A tree grown by copying edges of `D(A)` at the image of an existing
/// vertex, so it always maps to `D(A)`. Optionally glues two vertices with
/// the same image, which keeps the map.
pub fn unfolded_tree(rng: &mut Lcg, meta: &DMeta, n: usize, glue: bool) -> Digraph {
    let d = meta.digraph();
    let root = rng.below(d.len());
    grow(rng, d, vec![root], Vec::new(), n, glue)
}

/// Like [`unfolded_tree`] but seeded with a whole path of `D(A)`, so the
/// result has full height whenever the path fits in `n` vertices.
pub fn spanning_tree(rng: &mut Lcg, meta: &DMeta, n: usize, glue: bool) -> Digraph {
    let e = rng.below(meta.pair_count());
    let image = meta.pair_vertices(e).to_vec();
    let edges = meta.pair_shape(e).edges().collect();
    grow(rng, meta.digraph(), image, edges, n, glue)
}

fn grow(
    rng: &mut Lcg,
    d: &Digraph,
    mut image: Vec<usize>,
    mut edges: Vec<(usize, usize)>,
    n: usize,
    glue: bool,
) -> Digraph {
    let mut stuck = 0;
    while image.len() < n && stuck < 50 {
        let u = rng.below(image.len());
        let (outs, ins) = (d.out_neighbors(image[u]), d.in_neighbors(image[u]));
        if outs.is_empty() && ins.is_empty() {
            stuck += 1;
            continue;
        }
        let v = image.len();
        if rng.below(outs.len() + ins.len()) < outs.len() {
            image.push(*rng.choose(outs));
            edges.push((u, v));
        } else {
            image.push(*rng.choose(ins));
            edges.push((v, u));
        }
    }
    if glue {
        for _ in 0..3 {
            let (x, y) = (rng.below(image.len()), rng.below(image.len()));
            if x != y && image[x] == image[y] {
                let keep = x.min(y);
                let drop = x.max(y);
                edges = edges
                    .into_iter()
                    .map(|(a, b)| {
                        let f = |z: usize| {
                            if z == drop {
                                keep
                            } else if z > drop {
                                z - 1
                            } else {
                                z
                            }
                        };
                        (f(a), f(b))
                    })
                    .collect();
                edges.sort_unstable();
                edges.dedup();
                image.remove(drop);
            }
        }
    }
    Digraph::anonymous(image.len(), edges).expect("valid digraph")
}

/// Adds an edge from level `l` to level `l + 1` of a connected balanced
/// digraph, so it stays balanced while the map may break.
pub fn perturb_levelled(rng: &mut Lcg, g: &Digraph) -> Digraph {
    let all: Vec<usize> = (0..g.len()).collect();
    let Ok(levels) = assign_levels(g, &all) else {
        return g.clone();
    };
    let mut edges = g.edges().to_vec();
    for _ in 0..20 {
        let (u, v) = (rng.below(g.len()), rng.below(g.len()));
        if levels.levels[u] + 1 == levels.levels[v] && !edges.contains(&(u, v)) {
            edges.push((u, v));
            break;
        }
    }
    Digraph::anonymous(g.len(), edges).expect("valid digraph")
}

/// Adds one edge between two random vertices, which may or may not break
/// the map or the balance.
pub fn perturb(rng: &mut Lcg, g: &Digraph) -> Digraph {
    let mut edges = g.edges().to_vec();
    let n = g.len();
    if n >= 2 {
        let e = (rng.below(n), rng.below(n));
        if e.0 != e.1 && !edges.contains(&e) {
            edges.push(e);
        }
    }
    Digraph::anonymous(n, edges).expect("valid digraph")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dbuild::build_d;
    use crate::solver::hom_exists;

    #[test]
    fn same_seed_same_template() {
        let a = template(&mut Lcg::new(5), 4, 4, 6);
        let b = template(&mut Lcg::new(5), 4, 4, 6);
        assert_eq!(a, b);
    }

    #[test]
    fn nontrivial_has_no_constant_tuple() {
        let mut rng = Lcg::new(1);
        for _ in 0..50 {
            assert!(nontrivial_template(&mut rng, 3, 3, 4)
                .constant_tuple_element()
                .is_none());
        }
    }

    #[test]
    fn unfolded_trees_map_into_d() {
        let mut rng = Lcg::new(9);
        for _ in 0..10 {
            let a = nontrivial_template(&mut rng, 3, 2, 3);
            let m = build_d(&a).unwrap();
            let g = unfolded_tree(&mut rng, &m, 12, true);
            assert!(hom_exists(&g.to_structure(), &m.digraph().to_structure()).unwrap());
            let s = spanning_tree(&mut rng, &m, 14, true);
            let all: Vec<usize> = (0..s.len()).collect();
            assert_eq!(assign_levels(&s, &all).unwrap().height, m.height());
            assert!(hom_exists(&s.to_structure(), &m.digraph().to_structure()).unwrap());
        }
    }
}
