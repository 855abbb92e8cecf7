//! The two linear orders on `D(A)` and membership in the diagonal component.

use std::cmp::Ordering;
use std::collections::VecDeque;

use crate::dbuild::{DMeta, VKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    /// Paths ranked by `(a, r)`.
    Plain,
    /// Paths ranked by `(r, a)`.
    Star,
}

/// Sort key realising the order: level first, then elements by index,
/// tuples lexicographically, interiors by path rank and distance from `ι`.
pub fn order_key(meta: &DMeta, v: usize, order: Order) -> (usize, usize, usize) {
    match meta.kind(v) {
        VKind::Element(a) => (0, a, 0),
        VKind::Tuple(t) => (meta.height(), t, 0),
        VKind::Interior { pair, dist } => {
            let rank = match order {
                Order::Plain => pair,
                Order::Star => meta.pair_rank_star(pair),
            };
            (meta.level(v), rank, dist)
        }
    }
}

pub fn order_cmp(meta: &DMeta, x: usize, y: usize, order: Order) -> Ordering {
    order_key(meta, x, order).cmp(&order_key(meta, y, order))
}

pub fn order_less(meta: &DMeta, x: usize, y: usize, order: Order) -> bool {
    order_cmp(meta, x, y, order) == Ordering::Less
}

pub fn order_min(meta: &DMeta, xs: impl IntoIterator<Item = usize>, order: Order) -> Option<usize> {
    xs.into_iter().min_by_key(|&v| order_key(meta, v, order))
}

pub fn order_max(meta: &DMeta, xs: impl IntoIterator<Item = usize>, order: Order) -> Option<usize> {
    xs.into_iter().max_by_key(|&v| order_key(meta, v, order))
}

/// Equal levels and a common direction with a neighbor: the only
/// non-singleton equal-level component of the power is the diagonal one.
pub fn in_delta(meta: &DMeta, c: &[usize]) -> bool {
    let Some(&first) = c.first() else {
        return false;
    };
    let d = meta.digraph();
    let l = meta.level(first);
    c.iter().all(|&v| meta.level(v) == l)
        && (c.iter().all(|&v| !d.out_neighbors(v).is_empty())
            || c.iter().all(|&v| !d.in_neighbors(v).is_empty()))
}

/// Membership in the diagonal component of `D(A)^2` by search in the
/// square, indexed `x * |D| + y`.
pub fn delta2_by_search(meta: &DMeta) -> Vec<bool> {
    let d = meta.digraph();
    let n = d.len();
    let mut seen = vec![false; n * n];
    let mut queue = VecDeque::new();
    for v in 0..n {
        seen[v * n + v] = true;
        queue.push_back((v, v));
    }
    while let Some((x, y)) = queue.pop_front() {
        let mut visit = |x2: usize, y2: usize| {
            if !seen[x2 * n + y2] {
                seen[x2 * n + y2] = true;
                queue.push_back((x2, y2));
            }
        };
        for &x2 in d.out_neighbors(x) {
            for &y2 in d.out_neighbors(y) {
                visit(x2, y2);
            }
        }
        for &x2 in d.in_neighbors(x) {
            for &y2 in d.in_neighbors(y) {
                visit(x2, y2);
            }
        }
    }
    seen
}

/// Equal-level pairs on which [`in_delta`] and the search disagree.
pub fn delta2_mismatches(meta: &DMeta) -> Vec<(usize, usize)> {
    let n = meta.len();
    let reach = delta2_by_search(meta);
    let mut bad = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if meta.level(x) == meta.level(y) && in_delta(meta, &[x, y]) != reach[x * n + y] {
                bad.push((x, y));
            }
        }
    }
    bad
}

/// First pair of distinct vertices the order fails to separate, or a
/// transitivity failure on sorted neighbours. Keys are tuples, so this
/// mostly guards against two vertices sharing a key.
pub fn total_order_violation(meta: &DMeta, order: Order) -> Option<(usize, usize)> {
    let n = meta.len();
    for x in 0..n {
        if order_less(meta, x, x, order) {
            return Some((x, x));
        }
        for y in x + 1..n {
            let a = order_less(meta, x, y, order);
            let b = order_less(meta, y, x, order);
            if a == b {
                return Some((x, y));
            }
        }
    }
    let mut all: Vec<usize> = (0..n).collect();
    all.sort_by(|&x, &y| order_cmp(meta, x, y, order));
    all.windows(3)
        .find(|w| !order_less(meta, w[0], w[2], order))
        .map(|w| (w[0], w[2]))
}

/// Whether the ⊑-minima (and ⊑*-maxima) of `c` and `d` are adjacent, for sets
/// where every `c` has an out-neighbor in `d` and every `d` an in-neighbor in `c`.
/// Returns which parts apply and whether they hold.
pub fn extremes_adjacent(meta: &DMeta, c: &[usize], d: &[usize]) -> (Option<bool>, Option<bool>) {
    let g = meta.digraph();
    let is_tuple = |v: usize| matches!(meta.kind(v), VKind::Tuple(_));
    let is_elem = |v: usize| matches!(meta.kind(v), VKind::Element(_));
    let first = (!d.iter().all(|&v| is_tuple(v))).then(|| {
        let cm = order_min(meta, c.iter().copied(), Order::Plain).unwrap();
        let dm = order_min(meta, d.iter().copied(), Order::Plain).unwrap();
        g.has_edge(cm, dm)
    });
    let second = (!c.iter().all(|&v| is_elem(v))).then(|| {
        let cm = order_max(meta, c.iter().copied(), Order::Star).unwrap();
        let dm = order_max(meta, d.iter().copied(), Order::Star).unwrap();
        g.has_edge(cm, dm)
    });
    (first, second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dbuild::build_d;
    use crate::model::Structure;

    fn two_cycle() -> DMeta {
        build_d(&Structure::single(2, 2, vec![vec![0, 1], vec![1, 0]]).unwrap()).unwrap()
    }

    #[test]
    fn element_below_interior() {
        let m = two_cycle();
        let p = m.pair_vertices(0)[2];
        assert_eq!(m.level(p), 2);
        assert!(order_less(&m, 0, p, Order::Plain));
        assert!(order_less(&m, 1, p, Order::Star));
    }

    #[test]
    fn closer_to_start_is_smaller() {
        let m = two_cycle();
        // Pair (0, (0,1)) has index set {1}: segment 2 is a zigzag.
        let e = m.pair_index(0, 0);
        let shape = m.pair_shape(e);
        let s = shape.seg_start[1];
        let (lo, hi) = (m.pair_vertices(e)[s], m.pair_vertices(e)[s + 2]);
        assert_eq!(m.level(lo), m.level(hi));
        assert!(order_less(&m, lo, hi, Order::Plain));
        assert!(order_less(&m, lo, hi, Order::Star));
    }

    #[test]
    fn plain_and_star_disagree() {
        let m = two_cycle();
        // (a=0, r=(1,0)) against (a=1, r=(0,1)).
        let x = m.pair_vertices(m.pair_index(0, 1))[1];
        let y = m.pair_vertices(m.pair_index(1, 0))[1];
        assert_eq!(m.level(x), m.level(y));
        assert!(order_less(&m, x, y, Order::Plain));
        assert!(order_less(&m, y, x, Order::Star));
    }

    #[test]
    fn strict_total_orders() {
        let m = two_cycle();
        assert_eq!(total_order_violation(&m, Order::Plain), None);
        assert_eq!(total_order_violation(&m, Order::Star), None);
    }

    #[test]
    fn delta_examples() {
        let m = two_cycle();
        let p = m.pair_vertices(0)[3];
        assert!(in_delta(&m, &[p, p, p]));
        assert!(!in_delta(&m, &[0, m.tuple_vertex(0)]));
        assert!(in_delta(&m, &[0, 1]));
        assert!(!in_delta(&m, &[0, p]));
    }

    #[test]
    fn delta_matches_search() {
        assert!(delta2_mismatches(&two_cycle()).is_empty());
        let edge = build_d(&Structure::single(2, 2, vec![vec![0, 1]]).unwrap()).unwrap();
        assert!(delta2_mismatches(&edge).is_empty());
    }

    #[test]
    fn extremes_adjacent_on_every_edge_pair() {
        let m = two_cycle();
        let edges = m.digraph().edges().to_vec();
        for (i, &(a, b)) in edges.iter().enumerate() {
            for &(c, d) in &edges[i..] {
                let (p, q) = extremes_adjacent(&m, &[a, c], &[b, d]);
                assert_ne!(p, Some(false));
                assert_ne!(q, Some(false));
            }
        }
    }
}
