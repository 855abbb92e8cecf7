//! Endomorphisms and cores.

use std::ops::ControlFlow;

use super::{Hom, Restriction, Search, SolverOptions};
use crate::error::Result;
use crate::model::Structure;

pub fn endomorphisms(a: &Structure) -> Result<Vec<Hom>> {
    super::enumerate_homs(a, a, None)
}

pub fn count_endomorphisms(a: &Structure, limit: usize) -> Result<usize> {
    Ok(Search::new(a, a, None, SolverOptions::default())?.count(limit))
}

/// An endomorphism whose image misses at least one element, if any.
fn non_surjective_endo(a: &Structure) -> Result<Option<Hom>> {
    for v in 0..a.size() {
        let mut r = Restriction::new();
        for x in 0..a.size() {
            r.allow(x, (0..a.size()).filter(|&u| u != v));
        }
        let s = Search::new(a, a, Some(&r), SolverOptions::default())?;
        if let Some(h) = s.first() {
            return Ok(Some(h));
        }
    }
    Ok(None)
}

/// True iff every endomorphism is surjective.
pub fn is_core(a: &Structure) -> Result<bool> {
    Ok(non_surjective_endo(a)?.is_none())
}

#[derive(Debug, Clone)]
pub struct CoreResult {
    pub core: Structure,
    /// Elements of the original structure kept in the core, increasing.
    pub elements: Vec<usize>,
    /// A retraction of the original onto `elements`.
    pub retraction: Hom,
}

/// Shrinks to the image of a non-surjective endomorphism until none exists.
pub fn core_of(a: &Structure) -> Result<CoreResult> {
    let mut elements: Vec<usize> = (0..a.size()).collect();
    let mut current = a.clone();
    let mut map: Hom = (0..a.size()).collect();
    while let Some(h) = non_surjective_endo(&current)? {
        let mut image: Vec<usize> = h.clone();
        image.sort_unstable();
        image.dedup();
        let pos = |v: usize| image.binary_search(&v).unwrap();
        for m in map.iter_mut() {
            *m = pos(h[*m]);
        }
        elements = image.iter().map(|&i| elements[i]).collect();
        current = current.induced(&image)?;
    }
    // `map` points into the core's indices; compose once more so the
    // retraction fixes every core element.
    let idempotent = {
        let mut r = None;
        let s = Search::new(&current, &current, None, SolverOptions::default())?;
        let _ = s.for_each(|g| {
            // find g with g∘map fixing the core pointwise
            if elements
                .iter()
                .enumerate()
                .all(|(ci, &orig)| g[map[orig]] == ci)
            {
                r = Some(g.to_vec());
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        r.expect("an automorphism of the core inverts its restriction")
    };
    let retraction = map.iter().map(|&c| elements[idempotent[c]]).collect();
    Ok(CoreResult {
        core: current,
        elements,
        retraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Digraph;

    #[test]
    fn two_cycle_is_core() {
        let c = Digraph::anonymous(2, vec![(0, 1), (1, 0)])
            .unwrap()
            .to_structure();
        assert!(is_core(&c).unwrap());
        assert_eq!(endomorphisms(&c).unwrap().len(), 2);
    }

    #[test]
    fn full_relation_has_one_element_core() {
        let a =
            Structure::single(2, 2, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]).unwrap();
        assert!(!is_core(&a).unwrap());
        let c = core_of(&a).unwrap();
        assert_eq!(c.core.size(), 1);
        assert!(a.is_hom_to(&a, &c.retraction));
        for &e in &c.elements {
            assert_eq!(c.retraction[e], e);
        }
    }

    #[test]
    fn fixture_is_core_with_one_endo() {
        let a = Structure::single(
            2,
            4,
            vec![
                vec![0, 0, 0, 1],
                vec![0, 1, 1, 1],
                vec![1, 0, 1, 1],
                vec![1, 1, 0, 1],
            ],
        )
        .unwrap();
        assert!(is_core(&a).unwrap());
        assert_eq!(endomorphisms(&a).unwrap(), vec![vec![0, 1]]);
    }

    #[test]
    fn path_retracts_to_edge() {
        // 0 -> 1 -> 2 with an extra 3 -> 2 folds onto one edge chain.
        let g = Digraph::anonymous(4, vec![(0, 1), (1, 2), (3, 2)])
            .unwrap()
            .to_structure();
        let c = core_of(&g).unwrap();
        assert_eq!(c.core.size(), 3);
        assert!(is_core(&c.core).unwrap());
        assert!(g.is_hom_to(&g, &c.retraction));
    }
}
