//! Graphviz export.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::model::Digraph;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// One DOT `digraph`; when levels are known, vertices of a level share a rank.
pub fn export_dot(g: &Digraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(g.name()));
    out.push_str("  rankdir=BT;\n");
    for v in g.vertices() {
        let _ = writeln!(out, "  {};", quote(v));
    }
    if let Some(levels) = g.levels() {
        let mut by_level: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
        for (v, &l) in g.vertices().iter().zip(levels) {
            by_level.entry(l).or_default().push(v);
        }
        for (l, vs) in by_level {
            let names: Vec<String> = vs.iter().map(|v| quote(v)).collect();
            let _ = writeln!(
                out,
                "  {{ rank=same; /* level {l} */ {}; }}",
                names.join("; ")
            );
        }
    }
    for &(u, v) in g.edges() {
        let _ = writeln!(
            out,
            "  {} -> {};",
            quote(&g.vertices()[u]),
            quote(&g.vertices()[v])
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dbuild::{build_path, PathSpec};
    use crate::model::Positions;

    #[test]
    fn isolated_nodes() {
        let g = Digraph::anonymous(3, vec![]).unwrap();
        let d = export_dot(&g);
        assert_eq!(d.matches("->").count(), 0);
        assert!(d.contains("\"v2\";"));
    }

    #[test]
    fn zigzag_shape() {
        // the k = 1 path with I = {} contains a zigzag in its middle
        let g = Digraph::anonymous(4, vec![(0, 1), (2, 1), (2, 3)])
            .unwrap()
            .with_levels(vec![0, 1, 0, 1])
            .unwrap();
        let d = export_dot(&g);
        assert_eq!(d.matches("->").count(), 3);
        assert!(d.contains("\"v2\" -> \"v1\""));
        assert!(d.contains("rank=same"));
        let q = build_path(PathSpec::new(1, Positions::empty()).unwrap());
        assert_eq!(export_dot(&q).matches("->").count(), 5);
    }
}
