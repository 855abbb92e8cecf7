//! Internal components, their position sets, the intermediate objects and
//! the identification of their vertices.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::levels::LevelAssignment;
use crate::dbuild::{PathShape, PathSpec};
use crate::error::{Error, Result};
use crate::model::{Digraph, Positions, Relation, Role, Structure};
use crate::solver::{gamma_by_paths, interpretable_at_levels};

/// A connected piece of a height-`n` component strictly between levels 0 and `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InternalComponent {
    pub id: usize,
    /// Digraph indices, increasing.
    pub vertices: Vec<usize>,
    /// Adjacent level-0 vertices, increasing.
    pub base: Vec<usize>,
    /// Adjacent level-`n` vertices, increasing.
    pub top: Vec<usize>,
    pub gamma: Positions,
    pub height: usize,
}

/// Splits off the internal components of a height-`n` component. Ids are
/// assigned from `first_id` upward; `gamma` is left empty.
pub fn internal_components(
    g: &Digraph,
    levels: &LevelAssignment,
    n: usize,
    first_id: usize,
) -> Vec<InternalComponent> {
    let inner: Vec<usize> = levels
        .vertices
        .iter()
        .zip(&levels.levels)
        .filter(|&(_, &l)| l > 0 && l < n)
        .map(|(&v, _)| v)
        .collect();
    let sub = g.induced(&inner);
    sub.components()
        .into_iter()
        .enumerate()
        .map(|(i, comp)| {
            let vertices: Vec<usize> = comp.iter().map(|&c| inner[c]).collect();
            let mut base = Vec::new();
            let mut top = Vec::new();
            let (mut lo, mut hi) = (usize::MAX, 0);
            for &v in &vertices {
                let l = levels.level_of(v).unwrap();
                lo = lo.min(l);
                hi = hi.max(l);
                for &w in g.out_neighbors(v).iter().chain(g.in_neighbors(v)) {
                    match levels.level_of(w) {
                        Some(0) => base.push(w),
                        Some(l) if l == n => top.push(w),
                        _ => {}
                    }
                }
            }
            base.sort_unstable();
            base.dedup();
            top.sort_unstable();
            top.dedup();
            InternalComponent {
                id: first_id + i,
                vertices,
                base,
                top,
                gamma: Positions::empty(),
                height: hi - lo,
            }
        })
        .collect()
}

/// The digraph `C ∪ base ∪ top` with its absolute levels.
fn closure_digraph(g: &Digraph, levels: &LevelAssignment, c: &InternalComponent) -> Digraph {
    let mut keep = c.vertices.clone();
    keep.extend(&c.base);
    keep.extend(&c.top);
    let lv: Vec<usize> = keep.iter().map(|&v| levels.level_of(v).unwrap()).collect();
    g.induced(&keep)
        .with_levels(lv)
        .expect("levels of a balanced component")
}

/// `{ j : C is not interpretable in Q_{[k]\{j}} at its levels }`, checked
/// against the three-edge directed path criterion.
pub fn gamma(
    g: &Digraph,
    levels: &LevelAssignment,
    c: &InternalComponent,
    k: usize,
) -> Result<Positions> {
    let h = closure_digraph(g, levels, c);
    let nb = c.vertices.len();
    let mut out = Positions::empty();
    for j in 1..=k {
        let spec = PathSpec {
            k,
            singles: Positions::full(k).without(j),
        };
        let tau_pos = PathShape::new(spec).tau();
        let mut anchors: Vec<(usize, usize)> = (0..c.base.len()).map(|i| (nb + i, 0)).collect();
        anchors.extend((0..c.top.len()).map(|i| (nb + c.base.len() + i, tau_pos)));
        if !interpretable_at_levels(&h, spec, &anchors)? {
            out.insert(j);
        }
    }
    let fast = gamma_by_paths(&h, k)?;
    if fast != out {
        return Err(Error::InternalInvariantViolation(format!(
            "position sets disagree for internal component {}: {} vs {}",
            c.id, out, fast
        )));
    }
    Ok(out)
}

/// Elements of the set `X` the output is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum XVertex {
    /// A level-0 vertex of the input.
    Ground(usize),
    /// Fills position `i` next to base vertex `base` of a topless component.
    Alpha { comp: usize, base: usize, i: usize },
    /// Stands in at position `i` of `top` for a baseless component.
    Beta { comp: usize, top: usize, i: usize },
    /// Position `i` of `top` that no internal component fills.
    Gamma { top: usize, i: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopObject {
    pub top: usize,
    /// `sets[i - 1]` is `V_i`, as indices into [`ReverseObjects::x`].
    pub sets: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseObject {
    pub base: usize,
    pub component: usize,
    pub sets: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReverseObjects {
    pub k: usize,
    /// `X` in canonical order: ground vertices, then alpha, beta, gamma.
    pub x: Vec<XVertex>,
    pub x_names: Vec<String>,
    pub type1: Vec<TopObject>,
    pub type2: Vec<BaseObject>,
    /// Pairs of top vertices sharing an internal component (digraph indices).
    pub type3: Vec<(usize, usize)>,
    /// Pairs of base vertices sharing an internal component.
    pub type4: Vec<(usize, usize)>,
    index: HashMap<XVertex, usize>,
}

impl ReverseObjects {
    pub fn x_index(&self, v: XVertex) -> Option<usize> {
        self.index.get(&v).copied()
    }
}

fn pairs(items: &[usize], out: &mut Vec<(usize, usize)>) {
    for (i, &a) in items.iter().enumerate() {
        for &b in &items[i + 1..] {
            out.push((a, b));
        }
    }
}

/// Builds `X` and the objects of types I to IV. `names` are the digraph's
/// vertex names; `ground` and `tops` list its level-0 and level-`n`
/// vertices in file order.
pub fn build_objects(
    names: &[String],
    ground: &[usize],
    tops: &[usize],
    internals: &[InternalComponent],
    k: usize,
) -> ReverseObjects {
    let mut x: Vec<XVertex> = ground.iter().map(|&b| XVertex::Ground(b)).collect();
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    for c in internals {
        if c.top.is_empty() {
            for &b in &c.base {
                for i in (1..=k).filter(|&i| !c.gamma.contains(i)) {
                    alpha.push(XVertex::Alpha {
                        comp: c.id,
                        base: b,
                        i,
                    });
                }
            }
        }
        if c.base.is_empty() {
            for &e in &c.top {
                for i in c.gamma.iter() {
                    beta.push(XVertex::Beta {
                        comp: c.id,
                        top: e,
                        i,
                    });
                }
            }
        }
    }
    let mut gam = Vec::new();
    for &e in tops {
        for i in 1..=k {
            if !internals
                .iter()
                .any(|c| c.top.contains(&e) && c.gamma.contains(i))
            {
                gam.push(XVertex::Gamma { top: e, i });
            }
        }
    }
    alpha.sort();
    beta.sort();
    x.extend(alpha);
    x.extend(beta);
    x.extend(gam);
    let index: HashMap<XVertex, usize> = x.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let x_names = x
        .iter()
        .map(|v| match *v {
            XVertex::Ground(b) => names[b].clone(),
            XVertex::Alpha { comp, base, i } => format!("xa:{comp}:{}:{i}", names[base]),
            XVertex::Beta { comp, top, i } => format!("xb:{comp}:{}:{i}", names[top]),
            XVertex::Gamma { top, i } => format!("xg:{}:{i}", names[top]),
        })
        .collect();

    let type1 = tops
        .iter()
        .map(|&e| {
            let sets = (1..=k)
                .map(|i| {
                    let mut v = Vec::new();
                    for c in internals {
                        if !c.top.contains(&e) || !c.gamma.contains(i) {
                            continue;
                        }
                        if c.base.is_empty() {
                            v.push(
                                index[&XVertex::Beta {
                                    comp: c.id,
                                    top: e,
                                    i,
                                }],
                            );
                        } else {
                            v.extend(c.base.iter().map(|&b| index[&XVertex::Ground(b)]));
                        }
                    }
                    if v.is_empty() {
                        v.push(index[&XVertex::Gamma { top: e, i }]);
                    }
                    v.sort_unstable();
                    v.dedup();
                    v
                })
                .collect();
            TopObject { top: e, sets }
        })
        .collect();

    let mut type2 = Vec::new();
    for &b in ground {
        for c in internals
            .iter()
            .filter(|c| c.top.is_empty() && c.base.contains(&b))
        {
            let sets = (1..=k)
                .map(|i| {
                    if c.gamma.contains(i) {
                        vec![index[&XVertex::Ground(b)]]
                    } else {
                        vec![
                            index[&XVertex::Alpha {
                                comp: c.id,
                                base: b,
                                i,
                            }],
                        ]
                    }
                })
                .collect();
            type2.push(BaseObject {
                base: b,
                component: c.id,
                sets,
            });
        }
    }

    let mut type3 = Vec::new();
    let mut type4 = Vec::new();
    for c in internals {
        pairs(&c.top, &mut type3);
        pairs(&c.base, &mut type4);
    }
    type3.sort_unstable();
    type3.dedup();
    type4.sort_unstable();
    type4.dedup();

    ReverseObjects {
        k,
        x,
        x_names,
        type1,
        type2,
        type3,
        type4,
        index,
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// The smaller root wins, so every root is its class minimum.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    fn union_all(&mut self, items: impl IntoIterator<Item = usize>) {
        let mut it = items.into_iter();
        if let Some(first) = it.next() {
            for y in it {
                self.union(first, y);
            }
        }
    }
}

/// Classes of `X`; each class is represented by its earliest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimPartition {
    pub rep: Vec<usize>,
}

impl SimPartition {
    /// Classes with more than one member, each sorted, ordered by representative.
    pub fn nontrivial_classes(&self) -> Vec<Vec<usize>> {
        let mut by_rep: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (x, &r) in self.rep.iter().enumerate() {
            by_rep.entry(r).or_default().push(x);
        }
        by_rep.into_values().filter(|c| c.len() > 1).collect()
    }

    pub fn representatives(&self) -> Vec<usize> {
        (0..self.rep.len()).filter(|&x| self.rep[x] == x).collect()
    }
}

/// The least equivalence on `X` containing the pairs generated by shared
/// positions (rule 1), base edges (rule 2) and top edges (rule 3).
///
/// Rule 1 pairs every object with itself too, so each `V_i` is a clique;
/// overlapping sets at one position are then joined through their common
/// member, and it suffices to merge each `V_i`.
pub fn sim_closure(obj: &ReverseObjects) -> Result<SimPartition> {
    let mut uf = UnionFind::new(obj.x.len());
    for sets in obj
        .type1
        .iter()
        .map(|o| &o.sets)
        .chain(obj.type2.iter().map(|o| &o.sets))
    {
        for v in sets {
            uf.union_all(v.iter().copied());
        }
    }
    for &(b, c) in &obj.type4 {
        let (Some(xb), Some(xc)) = (
            obj.x_index(XVertex::Ground(b)),
            obj.x_index(XVertex::Ground(c)),
        ) else {
            return Err(Error::InternalInvariantViolation(
                "base edge outside level 0".into(),
            ));
        };
        uf.union(xb, xc);
    }
    let by_top: HashMap<usize, &TopObject> = obj.type1.iter().map(|o| (o.top, o)).collect();
    for &(e, f) in &obj.type3 {
        let (Some(oe), Some(of)) = (by_top.get(&e), by_top.get(&f)) else {
            return Err(Error::InternalInvariantViolation(
                "top edge without its objects".into(),
            ));
        };
        for (v, w) in oe.sets.iter().zip(&of.sets) {
            uf.union_all(v.iter().chain(w).copied());
        }
    }
    let rep: Vec<usize> = (0..obj.x.len()).map(|x| uf.find(x)).collect();
    let all_sets = obj
        .type1
        .iter()
        .flat_map(|o| o.sets.iter())
        .chain(obj.type2.iter().flat_map(|o| o.sets.iter()));
    for v in all_sets {
        if v.iter().any(|&y| rep[y] != rep[v[0]]) {
            return Err(Error::InternalInvariantViolation(format!(
                "a position set spans several classes: {:?}",
                v.iter().map(|&y| &obj.x_names[y]).collect::<Vec<_>>()
            )));
        }
    }
    Ok(SimPartition { rep })
}

/// One hyperedge per object of type I and II, over the class representatives.
pub fn assemble_b(
    obj: &ReverseObjects,
    part: &SimPartition,
    name: &str,
    relation: &str,
) -> Result<Structure> {
    let reps = part.representatives();
    let pos: HashMap<usize, usize> = reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let tuples = obj
        .type1
        .iter()
        .map(|o| &o.sets)
        .chain(obj.type2.iter().map(|o| &o.sets))
        .map(|sets| sets.iter().map(|v| pos[&part.rep[v[0]]]).collect())
        .collect();
    Structure::new(
        name,
        Role::Instance,
        reps.iter().map(|&r| obj.x_names[r].clone()).collect(),
        vec![Relation::new(relation, obj.k, tuples)],
    )
}

/// Human-readable dump of the objects and the partition.
pub fn objects_report(obj: &ReverseObjects, part: &SimPartition, names: &[String]) -> String {
    let set = |v: &Vec<usize>| {
        let items: Vec<&str> = v.iter().map(|&y| obj.x_names[y].as_str()).collect();
        format!("{{{}}}", items.join(","))
    };
    let mut out = String::new();
    for o in &obj.type1 {
        let sets: Vec<String> = o.sets.iter().map(set).collect();
        let _ = writeln!(out, "I {} {}", names[o.top], sets.join(" "));
    }
    for o in &obj.type2 {
        let sets: Vec<String> = o.sets.iter().map(set).collect();
        let _ = writeln!(
            out,
            "II {} C{} {}",
            names[o.base],
            o.component,
            sets.join(" ")
        );
    }
    for &(e, f) in &obj.type3 {
        let _ = writeln!(out, "III {} {}", names[e], names[f]);
    }
    for &(b, c) in &obj.type4 {
        let _ = writeln!(out, "IV {} {}", names[b], names[c]);
    }
    for class in part.nontrivial_classes() {
        let items: Vec<&str> = class.iter().map(|&y| obj.x_names[y].as_str()).collect();
        let _ = writeln!(out, "class {}", items.join(" "));
    }
    out
}
