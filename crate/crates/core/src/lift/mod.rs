//! Lifting polymorphisms of `A` (together with zigzag polymorphisms) to
//! polymorphisms of `D(A)` satisfying the same identities.
//!
//! The lifted operation is never tabulated up front. [`LiftedOp::eval`]
//! classifies its argument tuple and applies the matching rule.

mod endo;
mod orders;
mod zigzag;

pub use endo::{lift_endomorphism, restrict_endomorphism};
pub use orders::{
    delta2_by_search, delta2_mismatches, extremes_adjacent, in_delta, order_cmp, order_key,
    order_less, order_max, order_min, total_order_violation, Order,
};
pub use zigzag::{
    zigzag, zigzag_structure, zz_allmin, zz_by_name, zz_join, zz_median, zz_meet, zz_p1, zz_p2,
    Z00, Z01, Z10, Z11, Z_NAMES,
};

use std::collections::BTreeMap;
use std::fmt;

use crate::dbuild::{DMeta, VKind};
use crate::error::{Error, Result};
use crate::solver::{
    find_operations, first_identity_failure, is_polymorphism, IdentitySet, OpTable,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CaseTag {
    Elements,
    Tuples,
    ForcedVertex,
    AllZigzag,
    MixedZigzag,
    TwoPaths,
    TwoLevels,
    Fallback,
}

impl CaseTag {
    pub fn label(self) -> &'static str {
        match self {
            CaseTag::Elements => "1a",
            CaseTag::Tuples => "1b",
            CaseTag::ForcedVertex => "2a",
            CaseTag::AllZigzag => "2b",
            CaseTag::MixedZigzag => "2c",
            CaseTag::TwoPaths => "3a",
            CaseTag::TwoLevels => "3b",
            CaseTag::Fallback => "3c",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A classified argument tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classified {
    pub tag: CaseTag,
    /// Path of every entry (diagonal cases only).
    pub pairs: Vec<usize>,
    /// Image pair and common segment (diagonal cases only).
    pub target: Option<(usize, usize)>,
    /// Zigzag coordinate of every entry: the position on the segment in the
    /// diagonal cases, the two-valued split in the two-path and two-level
    /// cases. `None` where undefined.
    pub coords: Vec<Option<usize>>,
}

impl Classified {
    fn plain(tag: CaseTag) -> Self {
        Classified {
            tag,
            pairs: Vec::new(),
            target: None,
            coords: Vec::new(),
        }
    }
}

fn image_tuple(meta: &DMeta, f: &OpTable, ts: &[usize]) -> Result<usize> {
    let k = meta.k();
    let mut args = vec![0; ts.len()];
    let mut img = Vec::with_capacity(k);
    for j in 0..k {
        for (slot, &t) in args.iter_mut().zip(ts) {
            *slot = meta.tuples()[t][j];
        }
        img.push(f.apply(&args));
    }
    meta.tuple_index(&img)
        .ok_or_else(|| Error::NotAPolymorphism(f.name.clone()))
}

pub fn classify(meta: &DMeta, fa: &OpTable, c: &[usize]) -> Result<Classified> {
    let kinds: Vec<VKind> = c.iter().map(|&v| meta.kind(v)).collect();
    if kinds.iter().all(|k| matches!(k, VKind::Element(_))) {
        return Ok(Classified::plain(CaseTag::Elements));
    }
    if kinds.iter().all(|k| matches!(k, VKind::Tuple(_))) {
        return Ok(Classified::plain(CaseTag::Tuples));
    }
    if in_delta(meta, c) {
        return classify_diagonal(meta, fa, c);
    }

    let mut levels: Vec<usize> = c.iter().map(|&v| meta.level(v)).collect();
    levels.sort_unstable();
    levels.dedup();
    match levels.len() {
        1 => {
            // Equal levels off the diagonal: all entries are interior.
            let pairs: Vec<usize> = c
                .iter()
                .map(|&v| meta.interior(v).expect("interior").0)
                .collect();
            let mut distinct = pairs.clone();
            distinct.sort_unstable();
            distinct.dedup();
            let coords: Option<Vec<usize>> = if distinct.len() == 2 {
                Some(
                    pairs
                        .iter()
                        .map(|&e| if e == distinct[0] { Z00 } else { Z10 })
                        .collect(),
                )
            } else if distinct.len() == 1 {
                // One path and exactly two entries: split them by order.
                let mut vs = c.to_vec();
                vs.sort_by(|&x, &y| order_cmp(meta, x, y, Order::Plain));
                vs.dedup();
                (vs.len() == 2).then(|| {
                    c.iter()
                        .map(|&v| if v == vs[0] { Z00 } else { Z10 })
                        .collect()
                })
            } else {
                None
            };
            Ok(match coords {
                Some(coords) => Classified {
                    tag: CaseTag::TwoPaths,
                    pairs,
                    target: None,
                    coords: coords.into_iter().map(Some).collect(),
                },
                None => Classified::plain(CaseTag::Fallback),
            })
        }
        2 => Ok(Classified {
            tag: CaseTag::TwoLevels,
            pairs: Vec::new(),
            target: None,
            coords: c
                .iter()
                .map(|&v| Some(if meta.level(v) == levels[0] { Z00 } else { Z10 }))
                .collect(),
        }),
        _ => Ok(Classified::plain(CaseTag::Fallback)),
    }
}

fn classify_diagonal(meta: &DMeta, fa: &OpTable, c: &[usize]) -> Result<Classified> {
    let mut pairs = Vec::with_capacity(c.len());
    let mut common = crate::model::Positions::full(meta.k());
    for &v in c {
        let (e, dist) = meta.interior(v).ok_or_else(|| {
            Error::InternalInvariantViolation(format!(
                "diagonal tuple mixes path ends and interiors at {}",
                meta.digraph().vertices()[v]
            ))
        })?;
        pairs.push(e);
        common = common.intersect(meta.pair_shape(e).segments_of(dist));
    }
    let l = common.iter().next().ok_or_else(|| {
        Error::InternalInvariantViolation("diagonal tuple has no common segment".into())
    })?;
    let elems: Vec<usize> = pairs.iter().map(|&e| meta.pair(e).0).collect();
    let ts: Vec<usize> = pairs.iter().map(|&e| meta.pair(e).1).collect();
    let e = meta.pair_index(fa.apply(&elems), image_tuple(meta, fa, &ts)?);
    let coords: Vec<Option<usize>> = c
        .iter()
        .zip(&pairs)
        .map(|(&v, &ei)| {
            let shape = meta.pair_shape(ei);
            if shape.spec.singles.contains(l) {
                None
            } else {
                shape.offset_in(meta.interior(v).unwrap().1, l)
            }
        })
        .collect();
    let tag = if meta.pair_index_set(e).contains(l) {
        CaseTag::ForcedVertex
    } else if coords.iter().all(|x| x.is_some()) {
        CaseTag::AllZigzag
    } else if coords.iter().any(|x| x.is_some()) {
        CaseTag::MixedZigzag
    } else {
        return Err(Error::InternalInvariantViolation(format!(
            "segment {l} of the image path is a zigzag but no argument segment is"
        )));
    };
    Ok(Classified {
        tag,
        pairs,
        target: Some((e, l)),
        coords,
    })
}

/// `f^A` and `f^Z` combined into an operation on `D(A)`.
#[derive(Debug, Clone)]
pub struct LiftedOp<'a> {
    meta: &'a DMeta,
    fa: OpTable,
    fz: OpTable,
}

impl<'a> LiftedOp<'a> {
    pub fn name(&self) -> &str {
        &self.fa.name
    }

    pub fn arity(&self) -> usize {
        self.fa.arity
    }

    pub fn eval(&self, c: &[usize]) -> Result<usize> {
        self.eval_classified(c).map(|(v, _)| v)
    }

    pub fn eval_classified(&self, c: &[usize]) -> Result<(usize, CaseTag)> {
        let meta = self.meta;
        let cl = classify(meta, &self.fa, c)?;
        let zval = |coords: &[usize]| -> Result<usize> {
            let z = self.fz.apply(coords);
            if z == Z00 || z == Z10 {
                Ok(z)
            } else {
                Err(Error::ZigzagWitnessFails(format!(
                    "`{}` leaves {{00,10}} on {:?}",
                    self.fz.name, coords
                )))
            }
        };
        let v = match cl.tag {
            CaseTag::Elements => meta.element_vertex(self.fa.apply(c)),
            CaseTag::Tuples => {
                let ts: Vec<usize> = c.iter().map(|&v| v - meta.element_count()).collect();
                meta.tuple_vertex(image_tuple(meta, &self.fa, &ts)?)
            }
            CaseTag::ForcedVertex | CaseTag::AllZigzag | CaseTag::MixedZigzag => {
                let (e, l) = cl.target.expect("diagonal case");
                let shape = meta.pair_shape(e);
                let start = shape.seg_start[l - 1];
                let off = match cl.tag {
                    CaseTag::ForcedVertex => meta.level(c[0]) - l,
                    CaseTag::AllZigzag => {
                        let zs: Vec<usize> = cl.coords.iter().map(|z| z.unwrap()).collect();
                        self.fz.apply(&zs)
                    }
                    _ => cl.coords.iter().flatten().copied().min().unwrap(),
                };
                meta.pair_vertices(e)[start + off]
            }
            CaseTag::TwoPaths | CaseTag::TwoLevels => {
                let coords: Vec<usize> = cl.coords.iter().map(|z| z.unwrap()).collect();
                let z = zval(&coords)?;
                let chosen = c
                    .iter()
                    .zip(&coords)
                    .filter(|&(_, &w)| w == z)
                    .map(|(&v, _)| v);
                let pick = if cl.tag == CaseTag::TwoLevels && z == Z10 {
                    order_max(meta, chosen, Order::Star)
                } else {
                    order_min(meta, chosen, Order::Plain)
                };
                pick.ok_or_else(|| {
                    Error::ZigzagWitnessFails(format!(
                        "`{}` picks a value absent from {:?}",
                        self.fz.name, coords
                    ))
                })?
            }
            CaseTag::Fallback => {
                order_min(meta, c.iter().copied(), Order::Plain).expect("nonempty")
            }
        };
        Ok((v, cl.tag))
    }

    /// Full table; only sensible for small `|D(A)|^m`.
    pub fn to_table(&self) -> Result<OpTable> {
        let n = self.meta.len();
        let err = std::cell::RefCell::new(None);
        let t = OpTable::from_fn(self.fa.name.clone(), self.arity(), n, |args| {
            self.eval(args).unwrap_or_else(|e| {
                err.borrow_mut().get_or_insert(e);
                0
            })
        });
        match err.into_inner() {
            Some(e) => Err(e),
            None => Ok(t),
        }
    }
}

pub fn lift_op<'a>(meta: &'a DMeta, fa: &OpTable, fz: &OpTable) -> Result<LiftedOp<'a>> {
    if fa.arity != fz.arity {
        return Err(Error::OpArityMismatch(format!(
            "`{}` has arity {} but `{}` has arity {}",
            fa.name, fa.arity, fz.name, fz.arity
        )));
    }
    if fz.size != 4 {
        return Err(Error::OpArityMismatch(format!(
            "`{}` is not over the zigzag",
            fz.name
        )));
    }
    if !is_polymorphism(fa, meta.template())? {
        return Err(Error::NotAPolymorphism(fa.name.clone()));
    }
    Ok(LiftedOp {
        meta,
        fa: fa.clone(),
        fz: fz.clone(),
    })
}

/// Σ must be idempotent symbol by symbol, and every identity balanced or in
/// at most two variables.
pub fn check_lift_shape(sigma: &IdentitySet) -> Result<()> {
    for (s, _) in &sigma.symbols {
        if !sigma.identities.iter().any(|id| id.is_idempotency_of(s)) {
            return Err(Error::ShapeViolation(format!(
                "no idempotency identity for `{s}`"
            )));
        }
    }
    for id in &sigma.identities {
        if !id.is_balanced() && id.variables().len() > 2 {
            return Err(Error::ShapeViolation(id.to_string()));
        }
    }
    Ok(())
}

/// Outcome of the exhaustive sweeps for one lifted symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolReport {
    pub name: String,
    pub arity: usize,
    pub edge_tuples: u64,
    /// First edge tuple (as tail and head tuples) whose images are not
    /// adjacent.
    pub failure: Option<(Vec<usize>, Vec<usize>)>,
    /// How many evaluations of the sweep fell in each case.
    pub cases: BTreeMap<CaseTag, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftReport {
    pub vertices: usize,
    pub edges: usize,
    pub symbols: Vec<SymbolReport>,
    /// Identity text, evaluations tried, first failing assignment.
    pub identities: Vec<(String, u64, Option<Vec<usize>>)>,
}

impl LiftReport {
    pub fn ok(&self) -> bool {
        self.symbols.iter().all(|s| s.failure.is_none())
            && self.identities.iter().all(|(_, _, f)| f.is_none())
    }
}

impl fmt::Display for LiftReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "digraph {} vertices {} edges", self.vertices, self.edges)?;
        for s in &self.symbols {
            let verdict = match &s.failure {
                None => "ok".to_string(),
                Some((c, d)) => format!("FAIL {c:?} -> {d:?}"),
            };
            let cases: Vec<String> = s.cases.iter().map(|(t, n)| format!("{t}={n}")).collect();
            writeln!(
                f,
                "polymorphism {} arity {} edge-tuples {} {} cases {}",
                s.name,
                s.arity,
                s.edge_tuples,
                verdict,
                cases.join(",")
            )?;
        }
        for (id, n, fail) in &self.identities {
            match fail {
                None => writeln!(f, "identity {id} evaluations {n} ok")?,
                Some(a) => writeln!(f, "identity {id} evaluations {n} FAIL at {a:?}")?,
            }
        }
        write!(f, "result {}", if self.ok() { "ok" } else { "FAIL" })
    }
}

/// Checks `op` on every tuple of edges, spread over threads by the first
/// coordinate.
pub fn sweep_polymorphism(op: &LiftedOp) -> Result<SymbolReport> {
    let d = op.meta.digraph();
    let edges = d.edges();
    let m = op.arity();
    let ne = edges.len();
    let total = (ne as u64).pow(m as u32);
    let threads = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(ne.max(1));
    let results: Vec<Result<(Option<(Vec<usize>, Vec<usize>)>, BTreeMap<CaseTag, u64>)>> =
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads)
                .map(|w| {
                    scope.spawn(move || {
                        let mut cases = BTreeMap::new();
                        let mut pick = vec![0usize; m];
                        let mut tails = vec![0; m];
                        let mut heads = vec![0; m];
                        let rest = (ne as u64).pow(m as u32 - 1);
                        for first in (w..ne).step_by(threads) {
                            pick[0] = first;
                            for idx in 0..rest {
                                let mut x = idx;
                                for slot in pick[1..].iter_mut().rev() {
                                    *slot = (x % ne as u64) as usize;
                                    x /= ne as u64;
                                }
                                for (p, &ei) in pick.iter().enumerate() {
                                    tails[p] = edges[ei].0;
                                    heads[p] = edges[ei].1;
                                }
                                let (a, ta) = op.eval_classified(&tails)?;
                                let (b, tb) = op.eval_classified(&heads)?;
                                *cases.entry(ta).or_insert(0) += 1;
                                *cases.entry(tb).or_insert(0) += 1;
                                if !d.has_edge(a, b) {
                                    return Ok((Some((tails, heads)), cases));
                                }
                            }
                        }
                        Ok((None, cases))
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sweep thread"))
                .collect()
        });
    let mut report = SymbolReport {
        name: op.name().to_string(),
        arity: m,
        edge_tuples: total,
        failure: None,
        cases: BTreeMap::new(),
    };
    for r in results {
        let (fail, cases) = r?;
        if report.failure.is_none() {
            report.failure = fail;
        }
        for (t, n) in cases {
            *report.cases.entry(t).or_insert(0) += n;
        }
    }
    Ok(report)
}

/// Looks up the symbol tables, checks them, lifts and verifies.
pub fn lift_all<'a>(
    meta: &'a DMeta,
    sigma: &IdentitySet,
    on_a: &[OpTable],
    on_z: Option<&[OpTable]>,
) -> Result<(Vec<LiftedOp<'a>>, LiftReport)> {
    check_lift_shape(sigma)?;
    let a = meta.template();
    let find = |tables: &[OpTable], s: &str, m: usize, size: usize| -> Result<OpTable> {
        let t = tables
            .iter()
            .find(|t| t.name == s)
            .ok_or_else(|| Error::OpArityMismatch(format!("no table for `{s}`")))?;
        if t.arity != m || t.size != size {
            return Err(Error::OpArityMismatch(format!(
                "`{s}` expects arity {m} over {size}, table has arity {} over {}",
                t.arity, t.size
            )));
        }
        Ok(t.clone())
    };
    let mut fas = Vec::new();
    for (s, m) in &sigma.symbols {
        let t = find(on_a, s, *m, a.size())?;
        if !is_polymorphism(&t, a)? {
            return Err(Error::NotAPolymorphism(s.clone()));
        }
        fas.push(t);
    }
    let op_a = |s: &str, args: &[usize]| fas.iter().find(|t| t.name == s).unwrap().apply(args);
    if let Some((id, vals)) = first_identity_failure(sigma, a.size(), &op_a) {
        return Err(Error::NotAPolymorphism(format!(
            "template operations break `{id}` at {vals:?}"
        )));
    }

    let z = zigzag_structure();
    let fzs: Vec<OpTable> = match on_z {
        Some(tables) => {
            let mut v = Vec::new();
            for (s, m) in &sigma.symbols {
                let t =
                    find(tables, s, *m, 4).map_err(|e| Error::ZigzagWitnessFails(e.to_string()))?;
                if !is_polymorphism(&t, &z)? {
                    return Err(Error::ZigzagWitnessFails(format!(
                        "`{s}` is not a polymorphism of the zigzag"
                    )));
                }
                v.push(t);
            }
            v
        }
        None => find_operations(&z, sigma)?
            .ok_or_else(|| Error::ZigzagWitnessFails("the zigzag has no such operations".into()))?,
    };
    let op_z = |s: &str, args: &[usize]| fzs.iter().find(|t| t.name == s).unwrap().apply(args);
    if let Some((id, vals)) = first_identity_failure(sigma, 4, &op_z) {
        return Err(Error::ZigzagWitnessFails(format!(
            "`{id}` fails at {vals:?}"
        )));
    }

    let lifted: Vec<LiftedOp> = fas
        .iter()
        .zip(&fzs)
        .map(|(fa, fz)| lift_op(meta, fa, fz))
        .collect::<Result<_>>()?;
    let mut symbols = Vec::new();
    for op in &lifted {
        symbols.push(sweep_polymorphism(op)?);
    }
    let identities = verify_identities(meta, sigma, &lifted)?;
    let report = LiftReport {
        vertices: meta.len(),
        edges: meta.digraph().edges().len(),
        symbols,
        identities,
    };
    Ok((lifted, report))
}

/// Every identity under every assignment over `D(A)`, one at a time so a
/// failure names its identity.
pub fn verify_identities(
    meta: &DMeta,
    sigma: &IdentitySet,
    ops: &[LiftedOp],
) -> Result<Vec<(String, u64, Option<Vec<usize>>)>> {
    let err = std::cell::RefCell::new(None);
    let op = |s: &str, args: &[usize]| -> usize {
        let o = ops.iter().find(|o| o.name() == s).expect("symbol lifted");
        o.eval(args).unwrap_or_else(|e| {
            err.borrow_mut().get_or_insert(e);
            usize::MAX
        })
    };
    let mut out = Vec::new();
    for id in &sigma.identities {
        let single = IdentitySet {
            symbols: sigma.symbols.clone(),
            identities: vec![id.clone()],
        };
        let n = (meta.len() as u64).pow(id.variables().len() as u32);
        let fail = first_identity_failure(&single, meta.len(), &op).map(|(_, v)| v);
        if let Some(e) = err.borrow_mut().take() {
            return Err(e);
        }
        out.push((id.to_string(), n, fail));
    }
    Ok(out)
}
