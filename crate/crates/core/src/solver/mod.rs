//! Complete homomorphism search between finite relational structures.
//!
//! Backtracking over source elements with generalized arc consistency over
//! the relation tuples. Binary relations get a bitset fast path. Variable
//! choice is smallest domain first, then most constraints, then lowest index,
//! so every search is deterministic.

use std::collections::HashMap;
use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::model::Structure;

mod core;
mod interpret;
mod ops;

pub use self::core::{core_of, count_endomorphisms, endomorphisms, is_core, CoreResult};
pub use interpret::{gamma_by_paths, interpretable_at_levels};
pub use ops::{
    find_operations, first_identity_failure, is_polymorphism, parse_identities, parse_op_table,
    preservation_failure, satisfies, serialize_op_table, Identity, IdentitySet, OpTable, Term,
};

/// A total map from source elements to target elements.
pub type Hom = Vec<usize>;

/// Per-source-element allowed target sets; `None` means unrestricted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Restriction {
    allowed: HashMap<usize, Vec<usize>>,
}

impl Restriction {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn allow(&mut self, x: usize, targets: impl IntoIterator<Item = usize>) -> &mut Self {
        let mut t: Vec<usize> = targets.into_iter().collect();
        t.sort_unstable();
        t.dedup();
        match self.allowed.get_mut(&x) {
            Some(prev) => prev.retain(|v| t.binary_search(v).is_ok()),
            None => {
                self.allowed.insert(x, t);
            }
        }
        self
    }

    pub fn get(&self, x: usize) -> Option<&[usize]> {
        self.allowed.get(&x).map(|v| v.as_slice())
    }

    pub fn is_empty(&self) -> bool {
        self.allowed.is_empty()
    }

    /// Parses `allow <x> <a1> <a2> ...` lines, names resolved in the two structures.
    pub fn parse(text: &str, source: &Structure, target: &Structure) -> Result<Self> {
        let mut r = Restriction::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = body.split_whitespace().collect();
            match toks.as_slice() {
                [] => {}
                ["allow", x, rest @ ..] => {
                    let xi = source
                        .element_index(x)
                        .ok_or_else(|| Error::UnknownElement {
                            line,
                            name: x.to_string(),
                        })?;
                    let ts = rest
                        .iter()
                        .map(|a| {
                            target
                                .element_index(a)
                                .ok_or_else(|| Error::UnknownElement {
                                    line,
                                    name: a.to_string(),
                                })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    r.allow(xi, ts);
                }
                _ => {
                    return Err(Error::Syntax {
                        line,
                        message: "expected `allow <x> <a1> ...`".into(),
                    })
                }
            }
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    /// Arc consistency on; when off, constraints are only checked once all
    /// their variables are assigned.
    pub propagate: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { propagate: true }
    }
}

#[derive(Debug)]
enum Cons {
    Binary {
        x: usize,
        y: usize,
        rel: usize,
    },
    Table {
        scope: Vec<usize>,
        tuples: Vec<Vec<usize>>,
    },
}

impl Cons {
    fn scope(&self) -> Vec<usize> {
        match self {
            Cons::Binary { x, y, .. } => vec![*x, *y],
            Cons::Table { scope, .. } => scope.clone(),
        }
    }
}

/// A prepared search from one structure into another.
pub struct Search {
    n_src: usize,
    n_tgt: usize,
    cons: Vec<Cons>,
    watch: Vec<Vec<usize>>,
    degree: Vec<usize>,
    initial: Option<Vec<FixedBitSet>>,
    /// `fwd[rel][a]` = successors of `a` in binary target relation `rel`.
    fwd: Vec<Vec<FixedBitSet>>,
    bwd: Vec<Vec<FixedBitSet>>,
    options: SolverOptions,
}

pub fn check_signature(source: &Structure, target: &Structure) -> Result<()> {
    if source.arities() != target.arities() {
        return Err(Error::SignatureMismatch(format!(
            "source arities {:?} differ from target arities {:?}",
            source.arities(),
            target.arities()
        )));
    }
    Ok(())
}

impl Search {
    pub fn new(
        source: &Structure,
        target: &Structure,
        restriction: Option<&Restriction>,
        options: SolverOptions,
    ) -> Result<Self> {
        check_signature(source, target)?;
        let n_src = source.size();
        let n_tgt = target.size();
        let mut domains: Vec<FixedBitSet> = (0..n_src)
            .map(|x| {
                let mut d = FixedBitSet::with_capacity(n_tgt);
                match restriction.and_then(|r| r.get(x)) {
                    Some(allowed) => allowed
                        .iter()
                        .filter(|&&a| a < n_tgt)
                        .for_each(|&a| d.insert(a)),
                    None => d.insert_range(..),
                }
                d
            })
            .collect();
        let mut feasible = true;

        let mut fwd = Vec::new();
        let mut bwd = Vec::new();
        let mut cons = Vec::new();
        for (ri, (sr, tr)) in source
            .relations()
            .iter()
            .zip(target.relations())
            .enumerate()
        {
            let (mut f, mut b) = (Vec::new(), Vec::new());
            if tr.arity == 2 {
                f = vec![FixedBitSet::with_capacity(n_tgt); n_tgt];
                b = vec![FixedBitSet::with_capacity(n_tgt); n_tgt];
                for t in &tr.tuples {
                    f[t[0]].insert(t[1]);
                    b[t[1]].insert(t[0]);
                }
            }
            for t in &sr.tuples {
                if tr.arity == 2 && t[0] != t[1] {
                    cons.push(Cons::Binary {
                        x: t[0],
                        y: t[1],
                        rel: ri,
                    });
                    continue;
                }
                // Keep only target tuples consistent with repeated variables.
                let tuples: Vec<Vec<usize>> = tr
                    .tuples
                    .iter()
                    .filter(|u| (0..t.len()).all(|p| (0..p).all(|q| t[p] != t[q] || u[p] == u[q])))
                    .cloned()
                    .collect();
                let mut scope: Vec<usize> = t.clone();
                let mut seen = Vec::new();
                let mut keep_pos = Vec::new();
                for (p, &x) in t.iter().enumerate() {
                    if !seen.contains(&x) {
                        seen.push(x);
                        keep_pos.push(p);
                    }
                }
                if keep_pos.len() < t.len() {
                    scope = keep_pos.iter().map(|&p| t[p]).collect();
                }
                let tuples: Vec<Vec<usize>> = if keep_pos.len() < t.len() {
                    let mut v: Vec<Vec<usize>> = tuples
                        .iter()
                        .map(|u| keep_pos.iter().map(|&p| u[p]).collect())
                        .collect();
                    v.sort();
                    v.dedup();
                    v
                } else {
                    tuples
                };
                if scope.len() == 1 {
                    let mut d = FixedBitSet::with_capacity(n_tgt);
                    tuples.iter().for_each(|u| d.insert(u[0]));
                    domains[scope[0]].intersect_with(&d);
                    continue;
                }
                if tuples.is_empty() {
                    feasible = false;
                }
                cons.push(Cons::Table { scope, tuples });
            }
            fwd.push(f);
            bwd.push(b);
        }
        let mut watch = vec![Vec::new(); n_src];
        let mut degree = vec![0; n_src];
        for (ci, c) in cons.iter().enumerate() {
            for x in c.scope() {
                if !watch[x].contains(&ci) {
                    watch[x].push(ci);
                    degree[x] += 1;
                }
            }
        }
        if domains.iter().any(|d| d.is_clear()) {
            feasible = false;
        }
        Ok(Search {
            n_src,
            n_tgt,
            cons,
            watch,
            degree,
            initial: feasible.then_some(domains),
            fwd,
            bwd,
            options,
        })
    }

    /// Revises one constraint; returns the variables whose domains shrank,
    /// or `None` on a wipe-out.
    fn revise(&self, ci: usize, dom: &mut [FixedBitSet]) -> Option<Vec<usize>> {
        let mut changed = Vec::new();
        match &self.cons[ci] {
            Cons::Binary { x, y, rel } => {
                let (x, y) = (*x, *y);
                let mut sup = FixedBitSet::with_capacity(self.n_tgt);
                for a in dom[x].ones() {
                    sup.union_with(&self.fwd[*rel][a]);
                }
                let before = dom[y].count_ones(..);
                dom[y].intersect_with(&sup);
                let after = dom[y].count_ones(..);
                if after == 0 {
                    return None;
                }
                if after < before {
                    changed.push(y);
                }
                let mut sup = FixedBitSet::with_capacity(self.n_tgt);
                for b in dom[y].ones() {
                    sup.union_with(&self.bwd[*rel][b]);
                }
                let before = dom[x].count_ones(..);
                dom[x].intersect_with(&sup);
                let after = dom[x].count_ones(..);
                if after == 0 {
                    return None;
                }
                if after < before {
                    changed.push(x);
                }
            }
            Cons::Table { scope, tuples } => {
                let mut sup = vec![FixedBitSet::with_capacity(self.n_tgt); scope.len()];
                for u in tuples {
                    if u.iter().zip(scope).all(|(&a, &x)| dom[x].contains(a)) {
                        for (p, &a) in u.iter().enumerate() {
                            sup[p].insert(a);
                        }
                    }
                }
                for (p, &x) in scope.iter().enumerate() {
                    let before = dom[x].count_ones(..);
                    dom[x].intersect_with(&sup[p]);
                    let after = dom[x].count_ones(..);
                    if after == 0 {
                        return None;
                    }
                    if after < before {
                        changed.push(x);
                    }
                }
            }
        }
        Some(changed)
    }

    fn propagate(&self, dom: &mut [FixedBitSet], seeds: &[usize]) -> bool {
        let mut queued = vec![false; self.cons.len()];
        let mut queue = std::collections::VecDeque::new();
        for &x in seeds {
            for &ci in &self.watch[x] {
                if !queued[ci] {
                    queued[ci] = true;
                    queue.push_back(ci);
                }
            }
        }
        while let Some(ci) = queue.pop_front() {
            queued[ci] = false;
            let Some(changed) = self.revise(ci, dom) else {
                return false;
            };
            for x in changed {
                for &cj in &self.watch[x] {
                    if cj != ci && !queued[cj] {
                        queued[cj] = true;
                        queue.push_back(cj);
                    }
                }
            }
        }
        true
    }

    /// Calls `visit` on every homomorphism until it returns `Break`.
    /// Returns `Break` if the visitor stopped the search.
    pub fn for_each(&self, mut visit: impl FnMut(&[usize]) -> ControlFlow<()>) -> ControlFlow<()> {
        let Some(initial) = &self.initial else {
            return ControlFlow::Continue(());
        };
        let mut dom = initial.clone();
        if self.options.propagate {
            let all: Vec<usize> = (0..self.n_src).collect();
            if !self.propagate(&mut dom, &all) {
                return ControlFlow::Continue(());
            }
            self.branch(dom, &mut visit)
        } else {
            let mut order: Vec<usize> = (0..self.n_src).collect();
            order.sort_by_key(|&x| (dom[x].count_ones(..), std::cmp::Reverse(self.degree[x]), x));
            let mut assign = vec![usize::MAX; self.n_src];
            self.plain(&order, 0, &dom, &mut assign, &mut visit)
        }
    }

    fn branch(
        &self,
        dom: Vec<FixedBitSet>,
        visit: &mut impl FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let pick = (0..self.n_src)
            .filter(|&x| dom[x].count_ones(..) > 1)
            .min_by_key(|&x| (dom[x].count_ones(..), std::cmp::Reverse(self.degree[x]), x));
        let Some(x) = pick else {
            let h: Vec<usize> = dom.iter().map(|d| d.ones().next().unwrap()).collect();
            return visit(&h);
        };
        for a in dom[x].ones() {
            let mut next = dom.clone();
            next[x].clear();
            next[x].insert(a);
            if self.propagate(&mut next, &[x]) {
                self.branch(next, visit)?;
            }
        }
        ControlFlow::Continue(())
    }

    fn satisfied(&self, ci: usize, assign: &[usize]) -> bool {
        match &self.cons[ci] {
            Cons::Binary { x, y, rel } => {
                let (a, b) = (assign[*x], assign[*y]);
                a == usize::MAX || b == usize::MAX || self.fwd[*rel][a].contains(b)
            }
            Cons::Table { scope, tuples } => {
                if scope.iter().any(|&x| assign[x] == usize::MAX) {
                    return true;
                }
                tuples
                    .iter()
                    .any(|u| u.iter().zip(scope).all(|(&a, &x)| assign[x] == a))
            }
        }
    }

    fn plain(
        &self,
        order: &[usize],
        depth: usize,
        dom: &[FixedBitSet],
        assign: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if depth == order.len() {
            return visit(assign);
        }
        let x = order[depth];
        for a in dom[x].ones() {
            assign[x] = a;
            if self.watch[x].iter().all(|&ci| self.satisfied(ci, assign)) {
                self.plain(order, depth + 1, dom, assign, visit)?;
            }
        }
        assign[x] = usize::MAX;
        ControlFlow::Continue(())
    }

    pub fn first(&self) -> Option<Hom> {
        let mut found = None;
        let _ = self.for_each(|h| {
            found = Some(h.to_vec());
            ControlFlow::Break(())
        });
        found
    }

    /// Counts homomorphisms, stopping once `limit` is reached.
    pub fn count(&self, limit: usize) -> usize {
        let mut n = 0;
        let _ = self.for_each(|_| {
            n += 1;
            if n >= limit {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        n
    }
}

pub fn find_hom(
    source: &Structure,
    target: &Structure,
    restriction: Option<&Restriction>,
) -> Result<Option<Hom>> {
    Ok(Search::new(source, target, restriction, SolverOptions::default())?.first())
}

pub fn find_hom_with(
    source: &Structure,
    target: &Structure,
    restriction: Option<&Restriction>,
    options: SolverOptions,
) -> Result<Option<Hom>> {
    Ok(Search::new(source, target, restriction, options)?.first())
}

pub fn hom_exists(source: &Structure, target: &Structure) -> Result<bool> {
    Ok(find_hom(source, target, None)?.is_some())
}

/// Every homomorphism, in search order.
pub fn enumerate_homs(
    source: &Structure,
    target: &Structure,
    restriction: Option<&Restriction>,
) -> Result<Vec<Hom>> {
    let search = Search::new(source, target, restriction, SolverOptions::default())?;
    let mut all = Vec::new();
    let _ = search.for_each(|h| {
        all.push(h.to_vec());
        ControlFlow::Continue(())
    });
    Ok(all)
}

/// Checks every map in `target^source` directly. Only for tiny inputs.
pub fn brute_force_homs(source: &Structure, target: &Structure) -> Result<Vec<Hom>> {
    check_signature(source, target)?;
    let (n, m) = (source.size(), target.size());
    let mut out = Vec::new();
    if m == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return Ok(out);
    }
    let mut map = vec![0usize; n];
    loop {
        if source.is_hom_to(target, &map) {
            out.push(map.clone());
        }
        let mut i = 0;
        loop {
            if i == n {
                return Ok(out);
            }
            map[i] += 1;
            if map[i] < m {
                break;
            }
            map[i] = 0;
            i += 1;
        }
    }
}
