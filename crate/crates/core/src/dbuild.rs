//! The oriented paths `Q_I` and the digraph `D(A)`.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{DVertex, Digraph, Positions, Structure};

/// Which positions of a `k`-segment path carry a single edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PathSpec {
    pub k: usize,
    pub singles: Positions,
}

impl PathSpec {
    pub fn new(k: usize, singles: Positions) -> Result<Self> {
        if !singles.is_subset(Positions::full(k)) {
            return Err(Error::IndexOutOfRange {
                index: singles.iter().last().unwrap_or(0),
                size: k,
            });
        }
        Ok(PathSpec { k, singles })
    }
}

/// Vertex-by-vertex description of `Q_I`, listed from `ι` to `τ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathShape {
    pub spec: PathSpec,
    /// `true` for a forward edge between vertex `p` and `p + 1`.
    pub forward: Vec<bool>,
    pub levels: Vec<usize>,
    /// Index of the first vertex of segment `l` (at `seg_start[l - 1]`).
    pub seg_start: Vec<usize>,
}

impl PathShape {
    pub fn new(spec: PathSpec) -> Self {
        let mut forward = vec![true];
        let mut seg_start = Vec::with_capacity(spec.k);
        for l in 1..=spec.k {
            seg_start.push(forward.len());
            if spec.singles.contains(l) {
                forward.push(true);
            } else {
                forward.extend([true, false, true]);
            }
        }
        forward.push(true);
        let mut levels = vec![0usize];
        for &f in &forward {
            let last = *levels.last().unwrap();
            levels.push(if f { last + 1 } else { last - 1 });
        }
        PathShape {
            spec,
            forward,
            levels,
            seg_start,
        }
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.forward.len()
    }

    pub fn tau(&self) -> usize {
        self.levels.len() - 1
    }

    /// The edges as (tail, head) vertex positions.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.forward
            .iter()
            .enumerate()
            .map(|(p, &f)| if f { (p, p + 1) } else { (p + 1, p) })
    }

    pub fn segment_len(&self, l: usize) -> usize {
        if self.spec.singles.contains(l) {
            2
        } else {
            4
        }
    }

    /// Segments containing vertex position `p`.
    pub fn segments_of(&self, p: usize) -> Positions {
        let mut s = Positions::empty();
        for l in 1..=self.spec.k {
            let start = self.seg_start[l - 1];
            if p >= start && p < start + self.segment_len(l) {
                s.insert(l);
            }
        }
        s
    }

    /// Offset of position `p` inside segment `l`, if it lies there.
    pub fn offset_in(&self, p: usize, l: usize) -> Option<usize> {
        let start = self.seg_start[l - 1];
        (p >= start && p < start + self.segment_len(l)).then(|| p - start)
    }
}

/// `Q_I` as a levelled digraph with vertices `q0` (= ι) through `q<len-1>` (= τ).
pub fn build_path(spec: PathSpec) -> Digraph {
    let shape = PathShape::new(spec);
    Digraph::new(
        format!("Q{}", spec.singles),
        (0..shape.len()).map(|i| format!("q{i}")).collect(),
        shape.edges().collect(),
    )
    .and_then(|g| g.with_levels(shape.levels.clone()))
    .expect("Q_I is a valid levelled digraph")
}

/// `{ i : a = r_i }`.
pub fn index_set(a: usize, r: &[usize]) -> Positions {
    let mut s = Positions::empty();
    for (i, &x) in r.iter().enumerate() {
        if x == a {
            s.insert(i + 1);
        }
    }
    s
}

/// What a vertex of `D(A)` is, in index terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VKind {
    Element(usize),
    /// Index into [`DMeta::tuples`].
    Tuple(usize),
    /// Interior vertex of the path for pair `pair`; `dist` is its position
    /// counted from the element end (1-based).
    Interior {
        pair: usize,
        dist: usize,
    },
}

/// `D(A)` together with everything needed to reason about its vertices.
#[derive(Debug, Clone)]
pub struct DMeta {
    template: Structure,
    k: usize,
    elements: usize,
    tuples: Vec<Vec<usize>>,
    tuple_lookup: HashMap<Vec<usize>, usize>,
    digraph: Digraph,
    levels: Vec<usize>,
    kinds: Vec<VKind>,
    /// Per pair `e = a * |R| + t`: the path shape and its vertex list from ι to τ.
    pair_shapes: Vec<PathShape>,
    pair_vertices: Vec<Vec<usize>>,
}

/// Vertex and edge counts predicted by the closed-form formulas.
pub fn formula_counts(elements: usize, tuples: usize, k: usize) -> (usize, usize) {
    let (a, r, k) = (elements as i64, tuples as i64, k as i64);
    let v = (3 * k + 1) * r * a + (1 - 2 * k) * r + a;
    let e = (3 * k + 2) * r * a - 2 * k * r;
    (v as usize, e as usize)
}

impl DMeta {
    pub fn template(&self) -> &Structure {
        &self.template
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn height(&self) -> usize {
        self.k + 2
    }

    pub fn element_count(&self) -> usize {
        self.elements
    }

    /// The relation's tuples in lexicographic order.
    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn tuple_index(&self, r: &[usize]) -> Option<usize> {
        self.tuple_lookup.get(r).copied()
    }

    pub fn digraph(&self) -> &Digraph {
        &self.digraph
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn level(&self, v: usize) -> usize {
        self.levels[v]
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn kind(&self, v: usize) -> VKind {
        self.kinds[v]
    }

    pub fn element_vertex(&self, a: usize) -> usize {
        a
    }

    pub fn tuple_vertex(&self, t: usize) -> usize {
        self.elements + t
    }

    pub fn pair_count(&self) -> usize {
        self.elements * self.tuples.len()
    }

    pub fn pair_index(&self, a: usize, t: usize) -> usize {
        a * self.tuples.len() + t
    }

    /// `(a, t)` for pair index `e`.
    pub fn pair(&self, e: usize) -> (usize, usize) {
        (e / self.tuples.len(), e % self.tuples.len())
    }

    /// Position of pair `e` in the `R x A` lexicographic order.
    pub fn pair_rank_star(&self, e: usize) -> usize {
        let (a, t) = self.pair(e);
        t * self.elements + a
    }

    pub fn pair_shape(&self, e: usize) -> &PathShape {
        &self.pair_shapes[e]
    }

    /// Vertices of `P_e` from ι to τ.
    pub fn pair_vertices(&self, e: usize) -> &[usize] {
        &self.pair_vertices[e]
    }

    pub fn pair_index_set(&self, e: usize) -> Positions {
        self.pair_shapes[e].spec.singles
    }

    /// Pair and position of an interior vertex.
    pub fn interior(&self, v: usize) -> Option<(usize, usize)> {
        match self.kinds[v] {
            VKind::Interior { pair, dist } => Some((pair, dist)),
            _ => None,
        }
    }

    pub fn path_of(&self, v: usize) -> Result<(usize, usize)> {
        self.interior(v)
            .map(|(e, _)| self.pair(e))
            .ok_or_else(|| Error::NotInterior(self.digraph.vertices()[v].clone()))
    }

    pub fn segment_indices(&self, v: usize) -> Result<Positions> {
        let (e, dist) = self
            .interior(v)
            .ok_or_else(|| Error::NotInterior(self.digraph.vertices()[v].clone()))?;
        Ok(self.pair_shapes[e].segments_of(dist))
    }

    pub fn stats(&self) -> Stats {
        let (fv, fe) = formula_counts(self.elements, self.tuples.len(), self.k);
        Stats {
            vertices: self.digraph.len(),
            edges: self.digraph.edges().len(),
            height: self.levels.iter().copied().max().unwrap_or(0),
            formula_vertices: fv,
            formula_edges: fe,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stats {
    pub vertices: usize,
    pub edges: usize,
    pub height: usize,
    pub formula_vertices: usize,
    pub formula_edges: usize,
}

impl Stats {
    pub fn matches(&self) -> bool {
        self.vertices == self.formula_vertices && self.edges == self.formula_edges
    }
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flag = if self.matches() { "ok" } else { "mismatch" };
        write!(f, "{} {} {} {flag}", self.vertices, self.edges, self.height)
    }
}

/// Builds `D(A)` for a single-relation template.
pub fn build_d(a: &Structure) -> Result<DMeta> {
    let rel = a.single_relation()?;
    if rel.tuples.is_empty() {
        return Err(Error::NonemptyRelationRequired(rel.name.clone()));
    }
    if rel.arity > 62 {
        return Err(Error::ArityTooLarge(rel.arity));
    }
    let k = rel.arity;
    let elements = a.size();
    let mut tuples = rel.tuples.clone();
    tuples.sort();
    let tuple_lookup: HashMap<Vec<usize>, usize> = tuples
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    let dom = a.domain();
    let tuple_name = |t: &[usize]| {
        t.iter()
            .map(|&x| dom[x].as_str())
            .collect::<Vec<_>>()
            .join(",")
    };

    let mut names: Vec<String> = Vec::new();
    let mut prov: Vec<DVertex> = Vec::new();
    let mut kinds: Vec<VKind> = Vec::new();
    let mut levels: Vec<usize> = Vec::new();
    for x in 0..elements {
        names.push(format!("a:{}", dom[x]));
        prov.push(DVertex::Element(x));
        kinds.push(VKind::Element(x));
        levels.push(0);
    }
    for (t, r) in tuples.iter().enumerate() {
        names.push(format!("r:{}", tuple_name(r)));
        prov.push(DVertex::Tuple(r.clone()));
        kinds.push(VKind::Tuple(t));
        levels.push(k + 2);
    }

    let mut edges = Vec::new();
    let mut pair_shapes = Vec::with_capacity(elements * tuples.len());
    let mut pair_vertices = Vec::with_capacity(elements * tuples.len());
    for x in 0..elements {
        for (t, r) in tuples.iter().enumerate() {
            let e = x * tuples.len() + t;
            let shape = PathShape::new(PathSpec {
                k,
                singles: index_set(x, r),
            });
            let mut verts = vec![x];
            let rname = tuple_name(r);
            for dist in 1..shape.tau() {
                verts.push(names.len());
                names.push(format!("p:{}|{rname}|{dist}", dom[x]));
                prov.push(DVertex::Internal {
                    element: x,
                    tuple: r.clone(),
                    position: dist,
                });
                kinds.push(VKind::Interior { pair: e, dist });
                levels.push(shape.levels[dist]);
            }
            verts.push(elements + t);
            edges.extend(shape.edges().map(|(p, q)| (verts[p], verts[q])));
            pair_shapes.push(shape);
            pair_vertices.push(verts);
        }
    }

    let digraph = Digraph::new(format!("D_{}", a.name()), names, edges)?
        .with_levels(levels.clone())?
        .with_provenance(prov)?;
    Ok(DMeta {
        template: a.clone(),
        k,
        elements,
        tuples,
        tuple_lookup,
        digraph,
        levels,
        kinds,
        pair_shapes,
        pair_vertices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(k: usize, items: &[usize]) -> PathSpec {
        PathSpec::new(
            k,
            Positions::from_iter_checked(k, items.iter().copied()).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn full_index_set_gives_directed_path() {
        let g = build_path(p(2, &[1, 2]));
        assert_eq!(g.len(), 5);
        assert!(g.edges().iter().all(|&(u, v)| v == u + 1));
        assert_eq!(g.height(), Some(4));
    }

    #[test]
    fn empty_index_set_k1() {
        let s = PathShape::new(p(1, &[]));
        assert_eq!(s.len(), 6);
        assert_eq!(s.edge_count(), 5);
        assert_eq!(s.forward, vec![true, true, false, true, true]);
    }

    #[test]
    fn fig1_path() {
        // k = 3, I = {3}: zigzag, zigzag, edge between the outer edges.
        let s = PathShape::new(p(3, &[3]));
        assert_eq!(
            s.forward,
            vec![true, true, false, true, true, false, true, true, true]
        );
        assert_eq!(s.levels, vec![0, 1, 2, 1, 2, 3, 2, 3, 4, 5]);
        assert_eq!(*s.levels.iter().max().unwrap(), 5);
    }

    #[test]
    fn index_sets() {
        assert_eq!(index_set(0, &[0, 1]).to_vec(), vec![1]);
        assert_eq!(index_set(1, &[0, 0, 0, 1]).to_vec(), vec![4]);
        assert!(index_set(2, &[0, 1]).is_empty());
    }

    fn two_cycle() -> Structure {
        Structure::single(2, 2, vec![vec![0, 1], vec![1, 0]]).unwrap()
    }

    fn fixture7() -> Structure {
        Structure::single(
            2,
            4,
            vec![
                vec![0, 0, 0, 1],
                vec![0, 1, 1, 1],
                vec![1, 0, 1, 1],
                vec![1, 1, 0, 1],
            ],
        )
        .unwrap()
    }

    #[test]
    fn two_cycle_counts() {
        let m = build_d(&two_cycle()).unwrap();
        let s = m.stats();
        assert_eq!((s.vertices, s.edges, s.height), (24, 24, 4));
        assert!(s.matches());
        assert_eq!(s.to_string(), "24 24 4 ok");
    }

    #[test]
    fn fixture_counts() {
        let s = build_d(&fixture7()).unwrap().stats();
        assert_eq!(s.to_string(), "78 80 6 ok");
    }

    #[test]
    fn unary_singleton_counts() {
        let a = Structure::single(1, 1, vec![vec![0]]).unwrap();
        let s = build_d(&a).unwrap().stats();
        assert_eq!((s.vertices, s.edges, s.height), (4, 3, 3));
        assert!(s.matches());
    }

    #[test]
    fn single_edge_template_has_13_vertices() {
        let a = Structure::single(2, 2, vec![vec![0, 1]]).unwrap();
        let s = build_d(&a).unwrap().stats();
        assert_eq!((s.vertices, s.edges), (13, 12));
    }

    #[test]
    fn vertex_names_and_segments() {
        let m = build_d(&two_cycle()).unwrap();
        let g = m.digraph();
        assert_eq!(g.vertices()[0], "a:0");
        assert_eq!(g.vertices()[2], "r:0,1");
        assert_eq!(g.vertices()[4], "p:0|0,1|1");
        // pair (0, (0,1)) has I = {1}: edge, edge, zigzag, edge.
        let v1 = 4;
        assert_eq!(m.level(v1), 1);
        assert_eq!(m.segment_indices(v1).unwrap().to_vec(), vec![1]);
        let boundary = m.pair_vertices(0)[2];
        assert_eq!(m.segment_indices(boundary).unwrap().to_vec(), vec![1, 2]);
        let zig_inner = m.pair_vertices(0)[3];
        assert_eq!(m.segment_indices(zig_inner).unwrap().to_vec(), vec![2]);
        assert!(matches!(m.segment_indices(0), Err(Error::NotInterior(_))));
        assert_eq!(m.path_of(v1).unwrap(), (0, 0));
    }

    #[test]
    fn every_path_matches_its_shape() {
        let m = build_d(&fixture7()).unwrap();
        for e in 0..m.pair_count() {
            let verts = m.pair_vertices(e);
            let shape = m.pair_shape(e);
            for (p, q) in shape.edges() {
                assert!(m.digraph().has_edge(verts[p], verts[q]));
            }
            for (i, &v) in verts.iter().enumerate() {
                assert_eq!(m.level(v), shape.levels[i]);
            }
            let (a, t) = m.pair(e);
            assert_eq!(m.pair_index_set(e), index_set(a, &m.tuples()[t]));
        }
    }
}
