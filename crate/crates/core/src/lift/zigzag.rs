//! The zigzag `00 -> 01 <- 10 -> 11` and some of its polymorphisms.
//!
//! Vertices are numbered 0..4 in the order `00 < 01 < 10 < 11`, so the
//! linear order on the zigzag is the order of indices.

use crate::model::{Digraph, Structure};
use crate::solver::OpTable;

pub const Z00: usize = 0;
pub const Z01: usize = 1;
pub const Z10: usize = 2;
pub const Z11: usize = 3;

pub const Z_NAMES: [&str; 4] = ["00", "01", "10", "11"];

pub fn zigzag() -> Digraph {
    Digraph::new(
        "Z",
        Z_NAMES.iter().map(|s| s.to_string()).collect(),
        vec![(Z00, Z01), (Z10, Z01), (Z10, Z11)],
    )
    .expect("zigzag")
    .with_levels(vec![0, 1, 0, 1])
    .expect("zigzag levels")
}

pub fn zigzag_structure() -> Structure {
    zigzag().to_structure()
}

pub fn zz_meet() -> OpTable {
    OpTable::from_fn("meet", 2, 4, |a| a[0].min(a[1]))
}

pub fn zz_join() -> OpTable {
    OpTable::from_fn("join", 2, 4, |a| a[0].max(a[1]))
}

pub fn zz_median() -> OpTable {
    OpTable::from_fn("median", 3, 4, |a| {
        let (x, y, z) = (a[0], a[1], a[2]);
        x.min(y).max(x.min(z)).max(y.min(z))
    })
}

pub fn zz_allmin(m: usize) -> OpTable {
    OpTable::from_fn(format!("allmin{m}"), m, 4, |a| {
        a.iter().copied().min().unwrap_or(Z00)
    })
}

fn middle(args: &[usize]) -> Option<usize> {
    if args.contains(&Z01) {
        Some(Z01)
    } else if args.contains(&Z10) {
        Some(Z10)
    } else {
        None
    }
}

pub fn zz_p1() -> OpTable {
    OpTable::from_fn("p1", 3, 4, |a| {
        if a[1] != a[2] {
            middle(a).unwrap_or(a[0])
        } else {
            a[0]
        }
    })
}

pub fn zz_p2() -> OpTable {
    OpTable::from_fn("p2", 3, 4, |a| {
        if a[0] == a[1] {
            a[2]
        } else {
            middle(a).unwrap_or(a[0])
        }
    })
}

/// Every named zigzag operation, for lookups by name from the command line.
pub fn zz_by_name(name: &str, arity: usize) -> Option<OpTable> {
    let t = match name {
        "meet" => zz_meet(),
        "join" => zz_join(),
        "median" => zz_median(),
        "allmin" => zz_allmin(arity),
        "p1" => zz_p1(),
        "p2" => zz_p2(),
        _ => return None,
    };
    (t.arity == arity).then_some(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{is_polymorphism, parse_identities, satisfies};

    fn renamed(mut t: OpTable, name: &str) -> OpTable {
        t.name = name.into();
        t
    }

    #[test]
    fn spot_values() {
        assert_eq!(zz_median().apply(&[Z00, Z01, Z10]), Z01);
        assert_eq!(zz_p1().apply(&[Z01, Z00, Z11]), Z01);
        assert_eq!(zz_allmin(3).apply(&[Z10, Z11, Z01]), Z01);
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(zz_p1().apply(&[x, y, y]), x);
                assert_eq!(zz_p2().apply(&[x, x, y]), y);
            }
        }
    }

    #[test]
    fn all_are_polymorphisms() {
        let z = zigzag_structure();
        for t in [
            zz_meet(),
            zz_join(),
            zz_median(),
            zz_allmin(2),
            zz_allmin(3),
            zz_allmin(4),
            zz_p1(),
            zz_p2(),
        ] {
            assert!(is_polymorphism(&t, &z).unwrap(), "{}", t.name);
            assert!(t.is_idempotent());
        }
    }

    #[test]
    fn level_classes_are_closed() {
        for t in [zz_median(), zz_allmin(3), zz_p1(), zz_p2()] {
            for cls in [[Z00, Z10], [Z01, Z11]] {
                let ok = (0..8).all(|i| {
                    let args = [cls[i & 1], cls[(i >> 1) & 1], cls[(i >> 2) & 1]];
                    cls.contains(&t.apply(&args))
                });
                assert!(ok, "{}", t.name);
            }
        }
    }

    #[test]
    fn identity_systems() {
        let maj = parse_identities(
            "symbol m 3\nidentity m(x,x,x) = x\nidentity m(x,x,y) = x\nidentity m(x,y,x) = x\nidentity m(y,x,x) = x\n",
        )
        .unwrap();
        assert!(satisfies(&[renamed(zz_median(), "m")], &maj, 4).unwrap());
        let perm = parse_identities(
            "symbol p1 3\nsymbol p2 3\nidentity p1(x,x,x) = x\nidentity p2(x,x,x) = x\n\
             identity p1(x,y,y) = x\nidentity p1(x,x,y) = p2(x,y,y)\nidentity p2(x,x,y) = y\n",
        )
        .unwrap();
        assert!(satisfies(&[zz_p1(), zz_p2()], &perm, 4).unwrap());
        let wnu = parse_identities(
            "symbol w 3\nidentity w(x,x,x) = x\nidentity w(x,x,y) = w(x,y,x)\nidentity w(x,y,x) = w(y,x,x)\n",
        )
        .unwrap();
        assert!(satisfies(&[renamed(zz_allmin(3), "w")], &wnu, 4).unwrap());
        // No Maltsev operation on the zigzag.
        let maltsev = parse_identities(
            "symbol q 3\nidentity q(x,x,x) = x\nidentity q(x,y,y) = x\nidentity q(y,y,x) = x\n",
        )
        .unwrap();
        assert!(
            crate::solver::find_operations(&zigzag_structure(), &maltsev)
                .unwrap()
                .is_none()
        );
    }
}
