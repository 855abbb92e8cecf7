//! Level-pinned interpretability of levelled digraphs in `Q_S`.

use super::{find_hom, Restriction};
use crate::dbuild::{PathShape, PathSpec};
use crate::error::{Error, Result};
use crate::model::{Digraph, Positions};

/// Whether `h` maps into `Q_spec` sending every vertex to a vertex of the
/// same level, with `anchors` (vertex, path position) pinned as given.
pub fn interpretable_at_levels(
    h: &Digraph,
    spec: PathSpec,
    anchors: &[(usize, usize)],
) -> Result<bool> {
    let levels = h.levels().ok_or(Error::UnbalancedInput)?;
    let shape = PathShape::new(spec);
    let q = crate::dbuild::build_path(spec).to_structure();
    let mut r = Restriction::new();
    for (v, &l) in levels.iter().enumerate() {
        r.allow(v, (0..shape.len()).filter(|&p| shape.levels[p] == l));
    }
    for &(v, p) in anchors {
        r.allow(v, [p]);
    }
    Ok(find_hom(&h.to_structure(), &q, Some(&r))?.is_some())
}

/// Positions `j` such that `h` has a directed path of three edges starting
/// at level `j - 1`.
pub fn gamma_by_paths(h: &Digraph, k: usize) -> Result<Positions> {
    let levels = h.levels().ok_or(Error::UnbalancedInput)?;
    let mut out = Positions::empty();
    for (u, &l) in levels.iter().enumerate() {
        let j = l + 1;
        if j > k || out.contains(j) {
            continue;
        }
        let found = h.out_neighbors(u).iter().any(|&v| {
            h.out_neighbors(v)
                .iter()
                .any(|&w| !h.out_neighbors(w).is_empty())
        });
        if found {
            out.insert(j);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(k: usize, items: &[usize]) -> PathSpec {
        PathSpec::new(
            k,
            Positions::from_iter_checked(k, items.iter().copied()).unwrap(),
        )
        .unwrap()
    }

    fn zigzag_at(l: usize) -> Digraph {
        Digraph::anonymous(4, vec![(0, 1), (2, 1), (2, 3)])
            .unwrap()
            .with_levels(vec![l, l + 1, l, l + 1])
            .unwrap()
    }

    #[test]
    fn zigzag_folds_into_any_path() {
        // A zigzag maps onto a single edge, so it fits wherever an edge does.
        assert!(interpretable_at_levels(&zigzag_at(1), spec(2, &[]), &[]).unwrap());
        assert!(interpretable_at_levels(&zigzag_at(1), spec(2, &[1]), &[]).unwrap());
        assert!(interpretable_at_levels(&zigzag_at(1), spec(2, &[1, 2]), &[]).unwrap());
    }

    #[test]
    fn lone_edge_fits_everywhere() {
        let e = Digraph::anonymous(2, vec![(0, 1)]).unwrap();
        for l in 0..4 {
            let g = e.clone().with_levels(vec![l, l + 1]).unwrap();
            for s in Positions::all_subsets(2) {
                assert!(interpretable_at_levels(&g, PathSpec::new(2, s).unwrap(), &[]).unwrap());
            }
        }
    }

    #[test]
    fn directed_three_path_forces_single_edge() {
        let k = 3;
        for i in 1..=k {
            let p = Digraph::anonymous(4, vec![(0, 1), (1, 2), (2, 3)])
                .unwrap()
                .with_levels(vec![i - 1, i, i + 1, i + 2])
                .unwrap();
            let without = Positions::full(k).without(i);
            assert!(!interpretable_at_levels(&p, PathSpec::new(k, without).unwrap(), &[]).unwrap());
            assert!(interpretable_at_levels(
                &p,
                PathSpec::new(k, Positions::full(k)).unwrap(),
                &[]
            )
            .unwrap());
            assert_eq!(gamma_by_paths(&p, k).unwrap().to_vec(), vec![i]);
        }
    }

    #[test]
    fn anchors_are_respected() {
        let e = Digraph::anonymous(2, vec![(0, 1)])
            .unwrap()
            .with_levels(vec![0, 1])
            .unwrap();
        assert!(interpretable_at_levels(&e, spec(1, &[]), &[(0, 0)]).unwrap());
        assert!(!interpretable_at_levels(&e, spec(1, &[]), &[(0, 5)]).unwrap());
    }

    #[test]
    fn needs_levels() {
        let e = Digraph::anonymous(2, vec![(0, 1)]).unwrap();
        assert_eq!(
            interpretable_at_levels(&e, spec(1, &[]), &[]),
            Err(Error::UnbalancedInput)
        );
    }
}
