//! Relational structures, digraphs and the canonical orders used throughout.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};

/// Whether a structure is a CSP template or an instance.
///
/// Templates must have a nonempty signature and nonempty relations;
/// instances may have empty relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Template,
    Instance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    pub arity: usize,
    /// Element indices, deduplicated, in first-occurrence order.
    pub tuples: Vec<Vec<usize>>,
}

impl Relation {
    pub fn new(name: impl Into<String>, arity: usize, tuples: Vec<Vec<usize>>) -> Self {
        let mut seen = HashSet::new();
        let tuples = tuples
            .into_iter()
            .filter(|t| seen.insert(t.clone()))
            .collect();
        Relation {
            name: name.into(),
            arity,
            tuples,
        }
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.tuples.iter().any(|t| t == tuple)
    }
}

/// A finite relational structure: a named domain plus named relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    name: String,
    role: Role,
    domain: Vec<String>,
    relations: Vec<Relation>,
    /// Arities of the original relations when this structure is a merged
    /// single-relation structure.
    blocks: Option<Vec<usize>>,
}

impl Structure {
    pub fn new(
        name: impl Into<String>,
        role: Role,
        domain: Vec<String>,
        relations: Vec<Relation>,
    ) -> Result<Self> {
        let s = Structure {
            name: name.into(),
            role,
            domain,
            relations,
            blocks: None,
        };
        s.validate()?;
        Ok(s)
    }

    /// Structure whose elements are named `0..size`.
    pub fn with_indices(
        name: impl Into<String>,
        role: Role,
        size: usize,
        relations: Vec<Relation>,
    ) -> Result<Self> {
        Self::new(
            name,
            role,
            (0..size).map(|i| i.to_string()).collect(),
            relations,
        )
    }

    /// Template over `0..size` with a single relation `R`.
    pub fn single(size: usize, arity: usize, tuples: Vec<Vec<usize>>) -> Result<Self> {
        Self::with_indices(
            "A",
            Role::Template,
            size,
            vec![Relation::new("R", arity, tuples)],
        )
    }

    fn validate(&self) -> Result<()> {
        let mut names = HashSet::new();
        for e in &self.domain {
            check_token(e)?;
            if !names.insert(e.as_str()) {
                return Err(Error::DuplicateName(e.clone()));
            }
        }
        let mut rel_names = HashSet::new();
        if self.role == Role::Template && self.relations.is_empty() {
            return Err(Error::EmptySignature);
        }
        for r in &self.relations {
            check_token(&r.name)?;
            if !rel_names.insert(r.name.as_str()) {
                return Err(Error::DuplicateName(r.name.clone()));
            }
            if r.arity == 0 {
                return Err(Error::ArityMismatch {
                    relation: r.name.clone(),
                    arity: 0,
                    got: 0,
                });
            }
            if self.role == Role::Template && r.tuples.is_empty() {
                return Err(Error::NonemptyRelationRequired(r.name.clone()));
            }
            for t in &r.tuples {
                if t.len() != r.arity {
                    return Err(Error::ArityMismatch {
                        relation: r.name.clone(),
                        arity: r.arity,
                        got: t.len(),
                    });
                }
                if let Some(&bad) = t.iter().find(|&&x| x >= self.domain.len()) {
                    return Err(Error::IndexOutOfRange {
                        index: bad,
                        size: self.domain.len(),
                    });
                }
            }
        }
        if let Some(blocks) = &self.blocks {
            let total: usize = blocks.iter().sum();
            if self.relations.len() != 1
                || blocks.is_empty()
                || blocks.contains(&0)
                || total != self.relations[0].arity
            {
                return Err(Error::SignatureMismatch(format!(
                    "blocks {blocks:?} do not match the relation arities {:?}",
                    self.arities()
                )));
            }
        }
        Ok(())
    }

    pub fn with_blocks(mut self, blocks: Option<Vec<usize>>) -> Result<Self> {
        self.blocks = blocks;
        self.validate()?;
        Ok(self)
    }

    pub fn with_role(mut self, role: Role) -> Result<Self> {
        self.role = role;
        self.validate()?;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn size(&self) -> usize {
        self.domain.len()
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn blocks(&self) -> Option<&[usize]> {
        self.blocks.as_deref()
    }

    pub fn arities(&self) -> Vec<usize> {
        self.relations.iter().map(|r| r.arity).collect()
    }

    pub fn element_index(&self, name: &str) -> Option<usize> {
        self.domain.iter().position(|e| e == name)
    }

    /// The single relation of a merged structure.
    pub fn single_relation(&self) -> Result<&Relation> {
        match self.relations.as_slice() {
            [r] => Ok(r),
            _ => Err(Error::SignatureMismatch(format!(
                "expected a single relation, found {}",
                self.relations.len()
            ))),
        }
    }

    /// Checks a total map against every relation tuple.
    pub fn is_hom_to(&self, target: &Structure, map: &[usize]) -> bool {
        if map.len() != self.size() || self.arities() != target.arities() {
            return false;
        }
        if map.iter().any(|&v| v >= target.size()) {
            return false;
        }
        self.relations.iter().zip(&target.relations).all(|(r, tr)| {
            let set: HashSet<&[usize]> = tr.tuples.iter().map(|t| t.as_slice()).collect();
            r.tuples.iter().all(|t| {
                let img: Vec<usize> = t.iter().map(|&x| map[x]).collect();
                set.contains(img.as_slice())
            })
        })
    }

    /// Induced substructure on `elements` (kept in the given order).
    pub fn induced(&self, elements: &[usize]) -> Result<Structure> {
        let pos: HashMap<usize, usize> =
            elements.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let relations = self
            .relations
            .iter()
            .map(|r| {
                let tuples = r
                    .tuples
                    .iter()
                    .filter_map(|t| t.iter().map(|x| pos.get(x).copied()).collect())
                    .collect();
                Relation::new(r.name.clone(), r.arity, tuples)
            })
            .collect();
        Structure::new(
            self.name.clone(),
            self.role,
            elements.iter().map(|&e| self.domain[e].clone()).collect(),
            relations,
        )
    }

    /// Some element `a` with `(a, ..., a)` in every relation, if any.
    pub fn constant_tuple_element(&self) -> Option<usize> {
        (0..self.size()).find(|&a| {
            self.relations
                .iter()
                .all(|r| r.tuples.iter().any(|t| t.iter().all(|&x| x == a)))
        })
    }
}

pub(crate) fn check_token(name: &str) -> Result<()> {
    if name.is_empty() || name.chars().any(char::is_whitespace) || name.starts_with('#') {
        return Err(Error::Syntax {
            line: 0,
            message: format!("`{name}` is not a valid name"),
        });
    }
    Ok(())
}

/// Where a vertex of `D(A)` comes from. Indices refer to the template's
/// domain (element indices) and tuples are written as element indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DVertex {
    Element(usize),
    Tuple(Vec<usize>),
    /// Interior vertex of the path joining `element` to `tuple`; `position`
    /// counts from the element end starting at 1.
    Internal {
        element: usize,
        tuple: Vec<usize>,
        position: usize,
    },
}

/// A finite digraph with optional provenance tags and levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    name: String,
    vertices: Vec<String>,
    edges: Vec<(usize, usize)>,
    provenance: Option<Vec<DVertex>>,
    levels: Option<Vec<usize>>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl Digraph {
    /// Builds a digraph; duplicate edges are dropped.
    pub fn new(
        name: impl Into<String>,
        vertices: Vec<String>,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let mut names = HashSet::new();
        for v in &vertices {
            check_token(v)?;
            if !names.insert(v.as_str()) {
                return Err(Error::DuplicateName(v.clone()));
            }
        }
        let n = vertices.len();
        let mut seen = HashSet::new();
        let mut kept = Vec::with_capacity(edges.len());
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::IndexOutOfRange {
                    index: u.max(v),
                    size: n,
                });
            }
            if seen.insert((u, v)) {
                kept.push((u, v));
                out_adj[u].push(v);
                in_adj[v].push(u);
            }
        }
        Ok(Digraph {
            name: name.into(),
            vertices,
            edges: kept,
            provenance: None,
            levels: None,
            out_adj,
            in_adj,
        })
    }

    /// Digraph whose vertices are named `v0, v1, ...`.
    pub fn anonymous(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::new("G", (0..n).map(|i| format!("v{i}")).collect(), edges)
    }

    pub fn with_levels(mut self, levels: Vec<usize>) -> Result<Self> {
        if levels.len() != self.vertices.len() {
            return Err(Error::IndexOutOfRange {
                index: levels.len(),
                size: self.vertices.len(),
            });
        }
        if self.edges.iter().any(|&(u, v)| levels[v] != levels[u] + 1) {
            return Err(Error::UnbalancedInput);
        }
        self.levels = Some(levels);
        Ok(self)
    }

    pub fn with_provenance(mut self, provenance: Vec<DVertex>) -> Result<Self> {
        if provenance.len() != self.vertices.len() {
            return Err(Error::IndexOutOfRange {
                index: provenance.len(),
                size: self.vertices.len(),
            });
        }
        self.provenance = Some(provenance);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out_adj[u].contains(&v)
    }

    pub fn provenance(&self) -> Option<&[DVertex]> {
        self.provenance.as_deref()
    }

    pub fn levels(&self) -> Option<&[usize]> {
        self.levels.as_deref()
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    /// Height of a levelled digraph.
    pub fn height(&self) -> Option<usize> {
        self.levels
            .as_ref()
            .map(|l| l.iter().copied().max().unwrap_or(0))
    }

    /// The digraph as a structure with one binary relation `E`.
    pub fn to_structure(&self) -> Structure {
        Structure {
            name: self.name.clone(),
            role: Role::Instance,
            domain: self.vertices.clone(),
            relations: vec![Relation {
                name: "E".into(),
                arity: 2,
                tuples: self.edges.iter().map(|&(u, v)| vec![u, v]).collect(),
            }],
            blocks: None,
        }
    }

    /// Reads a structure with a single binary relation as a digraph.
    pub fn from_structure(s: &Structure) -> Result<Self> {
        let r = s.single_relation()?;
        if r.arity != 2 {
            return Err(Error::SignatureMismatch(format!(
                "a digraph needs one binary relation, `{}` has arity {}",
                r.name, r.arity
            )));
        }
        Digraph::new(
            s.name(),
            s.domain().to_vec(),
            r.tuples.iter().map(|t| (t[0], t[1])).collect(),
        )
    }

    /// Induced subgraph on `keep` (in the given order). Levels and
    /// provenance are carried over.
    pub fn induced(&self, keep: &[usize]) -> Digraph {
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges = self
            .edges
            .iter()
            .filter_map(|&(u, v)| Some((*pos.get(&u)?, *pos.get(&v)?)))
            .collect();
        let mut g = Digraph::new(
            self.name.clone(),
            keep.iter().map(|&v| self.vertices[v].clone()).collect(),
            edges,
        )
        .expect("induced subgraph of a valid digraph");
        g.levels = self
            .levels
            .as_ref()
            .map(|l| keep.iter().map(|&v| l[v]).collect());
        g.provenance = self
            .provenance
            .as_ref()
            .map(|p| keep.iter().map(|&v| p[v].clone()).collect());
        g
    }

    /// Weakly connected components, each listed in vertex order; components
    /// are ordered by their first vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![s];
            comp[s] = id;
            let mut members = Vec::new();
            while let Some(u) = stack.pop() {
                members.push(u);
                for &w in self.out_adj[u].iter().chain(&self.in_adj[u]) {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }
}

/// The kind of comparison requested from [`canonical_compare`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderKind {
    Element,
    TupleLex,
    ElementTupleLex,
    TupleElementLex,
}

/// Items compared by [`canonical_compare`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CanonItem<'a> {
    Element(usize),
    Tuple(&'a [usize]),
    Pair(usize, &'a [usize]),
}

/// The fixed linear order on elements (declaration order) and the
/// lexicographic orders it induces on tuples, on `A x R` and on `R x A`.
///
/// Items of a shape that does not fit `kind` compare by their shape
/// (elements < tuples < pairs) so the result is still a total order.
pub fn canonical_compare(kind: OrderKind, x: CanonItem<'_>, y: CanonItem<'_>) -> Ordering {
    use CanonItem::*;
    match (kind, x, y) {
        (OrderKind::Element, Element(a), Element(b)) => a.cmp(&b),
        (OrderKind::TupleLex, Tuple(r), Tuple(s)) => r.cmp(s),
        (OrderKind::ElementTupleLex, Pair(a, r), Pair(b, s)) => a.cmp(&b).then_with(|| r.cmp(s)),
        (OrderKind::TupleElementLex, Pair(a, r), Pair(b, s)) => r.cmp(s).then_with(|| a.cmp(&b)),
        _ => shape_rank(x)
            .cmp(&shape_rank(y))
            .then_with(|| fallback(x).cmp(&fallback(y))),
    }
}

fn shape_rank(x: CanonItem<'_>) -> u8 {
    match x {
        CanonItem::Element(_) => 0,
        CanonItem::Tuple(_) => 1,
        CanonItem::Pair(..) => 2,
    }
}

fn fallback(x: CanonItem<'_>) -> (usize, Vec<usize>) {
    match x {
        CanonItem::Element(a) => (a, Vec::new()),
        CanonItem::Tuple(r) => (0, r.to_vec()),
        CanonItem::Pair(a, r) => (a, r.to_vec()),
    }
}

/// A subset of `{1, ..., k}` stored as a bit mask (bit `l - 1` for `l`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Positions(u64);

impl Positions {
    pub const fn empty() -> Self {
        Positions(0)
    }

    pub fn full(k: usize) -> Self {
        if k >= 64 {
            Positions(u64::MAX)
        } else {
            Positions((1u64 << k) - 1)
        }
    }

    pub fn from_iter_checked(k: usize, items: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut p = Positions::empty();
        for l in items {
            if l == 0 || l > k {
                return Err(Error::IndexOutOfRange { index: l, size: k });
            }
            p.insert(l);
        }
        Ok(p)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn from_bits(bits: u64) -> Self {
        Positions(bits)
    }

    pub fn contains(self, l: usize) -> bool {
        l >= 1 && l <= 64 && self.0 & (1 << (l - 1)) != 0
    }

    pub fn insert(&mut self, l: usize) {
        self.0 |= 1 << (l - 1);
    }

    pub fn remove(&mut self, l: usize) {
        self.0 &= !(1 << (l - 1));
    }

    pub fn without(mut self, l: usize) -> Self {
        self.remove(l);
        self
    }

    pub fn is_subset(self, other: Positions) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersect(self, other: Positions) -> Positions {
        Positions(self.0 & other.0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (1..=64).filter(move |&l| self.contains(l))
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of `{1..k}` in increasing mask order.
    pub fn all_subsets(k: usize) -> impl Iterator<Item = Positions> {
        (0..(1u64 << k)).map(Positions)
    }
}

impl std::fmt::Display for Positions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_order_is_declaration_order() {
        assert_eq!(
            canonical_compare(
                OrderKind::Element,
                CanonItem::Element(0),
                CanonItem::Element(1)
            ),
            Ordering::Less
        );
    }

    #[test]
    fn tuple_and_pair_orders() {
        let t01 = [0, 1];
        let t10 = [1, 0];
        assert_eq!(
            canonical_compare(
                OrderKind::TupleLex,
                CanonItem::Tuple(&t01),
                CanonItem::Tuple(&t10)
            ),
            Ordering::Less
        );
        // A x R compares the element first.
        assert_eq!(
            canonical_compare(
                OrderKind::ElementTupleLex,
                CanonItem::Pair(1, &t01),
                CanonItem::Pair(0, &t10)
            ),
            Ordering::Greater
        );
        // R x A compares the tuple first.
        assert_eq!(
            canonical_compare(
                OrderKind::TupleElementLex,
                CanonItem::Pair(1, &t01),
                CanonItem::Pair(0, &t10)
            ),
            Ordering::Less
        );
    }

    #[test]
    fn canonical_orders_are_strict_total_orders() {
        for n in 1..=6usize {
            let mut items: Vec<(usize, Vec<usize>)> = Vec::new();
            for a in 0..n {
                for b in 0..n {
                    items.push((a, vec![b, (a + b) % n]));
                }
            }
            for kind in [OrderKind::ElementTupleLex, OrderKind::TupleElementLex] {
                let cmp = |x: &(usize, Vec<usize>), y: &(usize, Vec<usize>)| {
                    canonical_compare(kind, CanonItem::Pair(x.0, &x.1), CanonItem::Pair(y.0, &y.1))
                };
                for x in &items {
                    assert_eq!(cmp(x, x), Ordering::Equal);
                    for y in &items {
                        assert_eq!(cmp(x, y), cmp(y, x).reverse());
                        if x != y {
                            assert_ne!(cmp(x, y), Ordering::Equal);
                        }
                        for z in &items {
                            if cmp(x, y) == Ordering::Less && cmp(y, z) == Ordering::Less {
                                assert_eq!(cmp(x, z), Ordering::Less);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn template_rejects_empty_relation() {
        let err = Structure::single(2, 2, vec![]).unwrap_err();
        assert!(matches!(err, Error::NonemptyRelationRequired(_)));
        let inst =
            Structure::with_indices("X", Role::Instance, 2, vec![Relation::new("R", 2, vec![])]);
        assert!(inst.is_ok());
    }

    #[test]
    fn duplicate_tuples_are_dropped() {
        let s = Structure::single(2, 2, vec![vec![0, 1], vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(s.relations()[0].tuples.len(), 2);
    }

    #[test]
    fn digraph_components_and_duplicate_edges() {
        let g = Digraph::anonymous(5, vec![(0, 1), (0, 1), (2, 1), (3, 4)]).unwrap();
        assert_eq!(g.edges().len(), 3);
        assert_eq!(g.components(), vec![vec![0, 1, 2], vec![3, 4]]);
    }

    #[test]
    fn levels_must_increment_along_edges() {
        let g = Digraph::anonymous(2, vec![(0, 1)]).unwrap();
        assert!(g.clone().with_levels(vec![0, 1]).is_ok());
        assert!(g.with_levels(vec![1, 0]).is_err());
    }

    #[test]
    fn positions_basics() {
        let p = Positions::from_iter_checked(4, [1, 4]).unwrap();
        assert_eq!(p.to_vec(), vec![1, 4]);
        assert!(p.is_subset(Positions::full(4)));
        assert!(!Positions::full(4).is_subset(p));
        assert_eq!(p.to_string(), "{1,4}");
        assert!(Positions::from_iter_checked(3, [4]).is_err());
        assert_eq!(Positions::all_subsets(3).count(), 8);
    }
}
