//! Endomorphisms of `A` and of `D(A)` correspond one to one.

use crate::dbuild::{DMeta, VKind};
use crate::error::{Error, Result};

/// Checks `phi` against every tuple of the template.
fn check_template_endo(meta: &DMeta, phi: &[usize]) -> Result<()> {
    let n = meta.element_count();
    if phi.len() != n || phi.iter().any(|&x| x >= n) {
        return Err(Error::NotEndomorphism(format!(
            "expected {n} images in 0..{n}, got {:?}",
            phi
        )));
    }
    for r in meta.tuples() {
        let img: Vec<usize> = r.iter().map(|&x| phi[x]).collect();
        if meta.tuple_index(&img).is_none() {
            return Err(Error::NotEndomorphism(format!(
                "tuple {r:?} maps to {img:?}"
            )));
        }
    }
    Ok(())
}

/// Extends `phi` to `D(A)`: elements and tuples map pointwise, every path
/// folds onto the path of the image pair by the unique homomorphism.
pub fn lift_endomorphism(meta: &DMeta, phi: &[usize]) -> Result<Vec<usize>> {
    check_template_endo(meta, phi)?;
    let mut out = vec![0; meta.len()];
    for (v, slot) in out.iter_mut().enumerate() {
        *slot = match meta.kind(v) {
            VKind::Element(a) => meta.element_vertex(phi[a]),
            VKind::Tuple(t) => {
                let img: Vec<usize> = meta.tuples()[t].iter().map(|&x| phi[x]).collect();
                meta.tuple_vertex(meta.tuple_index(&img).expect("checked"))
            }
            VKind::Interior { pair, dist } => {
                let (a, t) = meta.pair(pair);
                let img: Vec<usize> = meta.tuples()[t].iter().map(|&x| phi[x]).collect();
                let target = meta.pair_index(phi[a], meta.tuple_index(&img).expect("checked"));
                let src = meta.pair_shape(pair);
                let dst = meta.pair_shape(target);
                let pos = match src.segments_of(dist).iter().next() {
                    Some(l) => {
                        let off = src.offset_in(dist, l).expect("in segment");
                        let off = if dst.spec.singles.contains(l) {
                            src.levels[dist] - l
                        } else {
                            off
                        };
                        dst.seg_start[l - 1] + off
                    }
                    None => dist,
                };
                meta.pair_vertices(target)[pos]
            }
        };
    }
    Ok(out)
}

/// `big` restricted to the elements of `A`.
pub fn restrict_endomorphism(meta: &DMeta, big: &[usize]) -> Result<Vec<usize>> {
    let d = meta.digraph();
    if big.len() != d.len() || big.iter().any(|&x| x >= d.len()) {
        return Err(Error::NotEndomorphism(format!(
            "expected {} images, got {}",
            d.len(),
            big.len()
        )));
    }
    if let Some(&(u, v)) = d
        .edges()
        .iter()
        .find(|&&(u, v)| !d.has_edge(big[u], big[v]))
    {
        return Err(Error::NotEndomorphism(format!(
            "edge {} -> {} is not preserved",
            d.vertices()[u],
            d.vertices()[v]
        )));
    }
    (0..meta.element_count())
        .map(|a| match meta.kind(big[meta.element_vertex(a)]) {
            VKind::Element(b) => Ok(b),
            _ => Err(Error::NotEndomorphism(format!(
                "element {} leaves the element level",
                d.vertices()[a]
            ))),
        })
        .collect()
}
