//! Instances of `CSP(D(A))` back to instances of `CSP(A)`.
//!
//! Each weakly connected component of the input digraph is levelled. Any
//! unbalanced or too tall component makes the whole instance a NO instance.
//! Components shorter than `D(A)` are decided outright. Components of full
//! height are rebuilt as a structure `B` over `A`'s signature from their
//! internal components.

mod levels;
mod objects;

pub use levels::{assign_levels, LevelAssignment};
pub use objects::{
    assemble_b, build_objects, gamma, internal_components, objects_report, sim_closure, BaseObject,
    InternalComponent, ReverseObjects, SimPartition, TopObject, XVertex,
};

use crate::dbuild::DMeta;
use crate::error::{Error, Result};
use crate::model::{Digraph, Relation, Role, Structure};
use crate::solver::hom_exists;

/// The one-element instance with a constant tuple. NO exactly when `A`
/// has no constant tuple.
pub fn fixed_no(meta: &DMeta) -> Structure {
    let rel = meta.template().relations()[0].name.clone();
    Structure::new(
        "B",
        Role::Instance,
        vec!["no".into()],
        vec![Relation::new(rel, meta.k(), vec![vec![0; meta.k()]])],
    )
    .expect("valid fixed instance")
}

/// `k` distinct elements in one tuple; always YES since `R` is nonempty.
pub fn fixed_yes(meta: &DMeta) -> Structure {
    let k = meta.k();
    let rel = meta.template().relations()[0].name.clone();
    Structure::new(
        "B",
        Role::Instance,
        (1..=k).map(|i| format!("yes:{i}")).collect(),
        vec![Relation::new(rel, k, vec![(0..k).collect()])],
    )
    .expect("valid fixed instance")
}

/// Targets a short component can land in: single connecting paths and the
/// fans of paths at each element and at each tuple.
pub fn fan_targets(meta: &DMeta) -> Vec<Structure> {
    let d = meta.digraph();
    let mut out = Vec::new();
    for e in 0..meta.pair_count() {
        out.push(d.induced(meta.pair_vertices(e)).to_structure());
    }
    let r = meta.tuples().len();
    for a in 0..meta.element_count() {
        let mut keep = vec![meta.element_vertex(a)];
        for t in 0..r {
            let p = meta.pair_vertices(meta.pair_index(a, t));
            keep.extend(&p[1..p.len() - 1]);
        }
        keep.extend((0..r).map(|t| meta.tuple_vertex(t)));
        out.push(d.induced(&keep).to_structure());
    }
    for t in 0..r {
        let mut keep = vec![meta.tuple_vertex(t)];
        for a in 0..meta.element_count() {
            let p = meta.pair_vertices(meta.pair_index(a, t));
            keep.extend(&p[1..p.len() - 1]);
        }
        keep.extend((0..meta.element_count()).map(|a| meta.element_vertex(a)));
        out.push(d.induced(&keep).to_structure());
    }
    out
}

/// Decides a component of height below `k + 2` against `D(A)` directly.
pub fn stage2_decide(g: &Digraph, component: &[usize], meta: &DMeta) -> Result<bool> {
    hom_exists(
        &g.induced(component).to_structure(),
        &meta.digraph().to_structure(),
    )
}

/// The same decision through the fan targets.
pub fn stage2_by_fans(g: &Digraph, component: &[usize], fans: &[Structure]) -> Result<bool> {
    let c = g.induced(component).to_structure();
    for f in fans {
        if hom_exists(&c, f)? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComponentVerdict {
    Unbalanced(Vec<String>),
    TooTall(usize),
    Short(bool),
    Assembled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shortcut {
    FixedNo,
    FixedYes,
    Assembled,
}

#[derive(Debug, Clone)]
pub struct ComponentReport {
    pub vertices: Vec<usize>,
    pub verdict: ComponentVerdict,
}

#[derive(Debug, Clone)]
pub struct ReverseOutcome {
    pub instance: Structure,
    pub shortcut: Shortcut,
    pub components: Vec<ComponentReport>,
    /// Objects and partition of every full-height component.
    pub objects: Vec<(ReverseObjects, SimPartition)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReverseOptions {
    /// Also decide short components through the fan targets and fail on
    /// disagreement.
    pub cross_check: bool,
}

impl Default for ReverseOptions {
    fn default() -> Self {
        ReverseOptions { cross_check: true }
    }
}

pub fn reverse_instance(g: &Digraph, meta: &DMeta) -> Result<ReverseOutcome> {
    reverse_instance_with(g, meta, ReverseOptions::default())
}

pub fn reverse_instance_with(
    g: &Digraph,
    meta: &DMeta,
    options: ReverseOptions,
) -> Result<ReverseOutcome> {
    let a = meta.template();
    if let Some(c) = a.constant_tuple_element() {
        return Err(Error::TrivialTemplate(a.domain()[c].clone()));
    }
    let n = meta.height();
    let k = meta.k();
    let fans = if options.cross_check {
        fan_targets(meta)
    } else {
        Vec::new()
    };
    let no = |components| ReverseOutcome {
        instance: fixed_no(meta),
        shortcut: Shortcut::FixedNo,
        components,
        objects: Vec::new(),
    };

    let mut reports = Vec::new();
    let mut objects = Vec::new();
    let mut next_id = 0;
    for comp in g.components() {
        let levels = match assign_levels(g, &comp) {
            Ok(l) => l,
            Err(Error::Unbalanced { witness }) => {
                reports.push(ComponentReport {
                    vertices: comp,
                    verdict: ComponentVerdict::Unbalanced(witness),
                });
                return Ok(no(reports));
            }
            Err(e) => return Err(e),
        };
        if levels.height > n {
            reports.push(ComponentReport {
                vertices: comp,
                verdict: ComponentVerdict::TooTall(levels.height),
            });
            return Ok(no(reports));
        }
        if levels.height < n {
            let yes = stage2_decide(g, &comp, meta)?;
            if options.cross_check && stage2_by_fans(g, &comp, &fans)? != yes {
                return Err(Error::InternalInvariantViolation(
                    "fan targets disagree with the direct decision".into(),
                ));
            }
            reports.push(ComponentReport {
                vertices: comp,
                verdict: ComponentVerdict::Short(yes),
            });
            if !yes {
                return Ok(no(reports));
            }
            continue;
        }
        let mut internals = internal_components(g, &levels, n, next_id);
        next_id += internals.len();
        for c in internals.iter_mut() {
            c.gamma = gamma(g, &levels, c, k)?;
        }
        let ground: Vec<usize> = levels
            .vertices
            .iter()
            .zip(&levels.levels)
            .filter(|&(_, &l)| l == 0)
            .map(|(&v, _)| v)
            .collect();
        let tops: Vec<usize> = levels
            .vertices
            .iter()
            .zip(&levels.levels)
            .filter(|&(_, &l)| l == n)
            .map(|(&v, _)| v)
            .collect();
        let obj = build_objects(g.vertices(), &ground, &tops, &internals, k);
        let part = sim_closure(&obj)?;
        objects.push((obj, part));
        reports.push(ComponentReport {
            vertices: comp,
            verdict: ComponentVerdict::Assembled,
        });
    }

    if objects.is_empty() {
        return Ok(ReverseOutcome {
            instance: fixed_yes(meta),
            shortcut: Shortcut::FixedYes,
            components: reports,
            objects,
        });
    }
    let rel = a.relations()[0].name.clone();
    let mut domain = Vec::new();
    let mut tuples = Vec::new();
    for (obj, part) in &objects {
        let b = assemble_b(obj, part, "B", &rel)?;
        let off = domain.len();
        domain.extend(b.domain().iter().cloned());
        tuples.extend(
            b.relations()[0]
                .tuples
                .iter()
                .map(|t| t.iter().map(|&x| x + off).collect::<Vec<_>>()),
        );
    }
    let instance = Structure::new(
        "B",
        Role::Instance,
        domain,
        vec![Relation::new(rel, k, tuples)],
    )?;
    Ok(ReverseOutcome {
        instance,
        shortcut: Shortcut::Assembled,
        components: reports,
        objects,
    })
}

#[cfg(test)]
mod tests;
