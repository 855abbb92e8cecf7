//! Small templates and identity systems used by the suites and tests.

use crate::model::Structure;

/// `({0,1}; {(0,1),(1,0)})`.
pub fn two_cycle() -> Structure {
    Structure::single(2, 2, vec![vec![0, 1], vec![1, 0]]).expect("fixture")
}

/// `({0,1}; {(0,1)})`, whose `D(A)` has 13 vertices.
pub fn single_edge() -> Structure {
    Structure::single(2, 2, vec![vec![0, 1]]).expect("fixture")
}

/// Even-parity triples with a constant flag: 78 vertices and 80 edges.
pub fn parity_flag() -> Structure {
    Structure::single(
        2,
        4,
        vec![
            vec![0, 0, 0, 1],
            vec![0, 1, 1, 1],
            vec![1, 0, 1, 1],
            vec![1, 1, 0, 1],
        ],
    )
    .expect("fixture")
}

pub const MAJORITY: &str = "\
symbol m 3
identity m(x,x,x) = x
identity m(x,x,y) = x
identity m(x,y,x) = x
identity m(y,x,x) = x
";

pub const WNU3: &str = "\
symbol w 3
identity w(x,x,x) = x
identity w(x,x,y) = w(x,y,x)
identity w(x,y,x) = w(y,x,x)
";

pub const PERMUTABLE3: &str = "\
symbol p1 3
symbol p2 3
identity p1(x,x,x) = x
identity p2(x,x,x) = x
identity p1(x,y,y) = x
identity p1(x,x,y) = p2(x,y,y)
identity p2(x,x,y) = y
";

pub const MALTSEV: &str = "\
symbol q 3
identity q(x,x,x) = x
identity q(x,y,y) = x
identity q(y,y,x) = x
";
