//! Line-oriented text formats for structures and digraphs.
//!
//! Structure files:
//!
//! ```text
//! structure A          # or: instance X
//! blocks 2 1           # optional, merged structures only
//! domain 0 1
//! relation R 2
//! tuple 0 1
//! tuple 1 0
//! end
//! ```
//!
//! Digraph files list `vertex` and `edge` lines between `digraph <name>` and
//! `end`. Levels and provenance travel as `# level` / `# provenance` comment
//! lines, which other readers may ignore.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{DVertex, Digraph, Relation, Role, Structure};

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        message: message.into(),
    }
}

/// Strips a trailing comment and splits into tokens.
fn tokens(line: &str) -> Vec<&str> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    body.split_whitespace().collect()
}

fn relocate(line: usize, e: Error) -> Error {
    match e {
        Error::Syntax { line: 0, message } => Error::Syntax { line, message },
        other => other,
    }
}

pub fn parse_structure(text: &str) -> Result<Structure> {
    let mut header: Option<(Role, String)> = None;
    let mut blocks: Option<Vec<usize>> = None;
    let mut domain: Option<Vec<String>> = None;
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut relations: Vec<Relation> = Vec::new();
    let mut ended_at = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = tokens(raw);
        if toks.is_empty() {
            continue;
        }
        if ended_at.is_some() {
            return Err(syntax(line, "content after `end`"));
        }
        match toks[0] {
            kw @ ("structure" | "instance") => {
                if header.is_some() {
                    return Err(syntax(line, "duplicate header"));
                }
                let [_, name] = toks[..] else {
                    return Err(syntax(line, format!("expected `{kw} <name>`")));
                };
                let role = if kw == "structure" {
                    Role::Template
                } else {
                    Role::Instance
                };
                header = Some((role, name.to_string()));
            }
            _ if header.is_none() => {
                return Err(syntax(
                    line,
                    "expected `structure <name>` or `instance <name>`",
                ))
            }
            "blocks" => {
                if blocks.is_some() || toks.len() < 2 {
                    return Err(syntax(
                        line,
                        "expected a single `blocks <k1> <k2> ...` line",
                    ));
                }
                let ks = toks[1..]
                    .iter()
                    .map(|t| t.parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| syntax(line, "block arities must be integers"))?;
                blocks = Some(ks);
            }
            "domain" => {
                if domain.is_some() {
                    return Err(syntax(line, "duplicate `domain` line"));
                }
                let names: Vec<String> = toks[1..].iter().map(|s| s.to_string()).collect();
                for (j, n) in names.iter().enumerate() {
                    if index.insert(n.clone(), j).is_some() {
                        return Err(Error::DuplicateName(n.clone()));
                    }
                }
                domain = Some(names);
            }
            "relation" => {
                if domain.is_none() {
                    return Err(syntax(line, "`relation` before `domain`"));
                }
                let [_, name, arity] = toks[..] else {
                    return Err(syntax(line, "expected `relation <name> <arity>`"));
                };
                let arity: usize = arity
                    .parse()
                    .map_err(|_| syntax(line, "relation arity must be an integer"))?;
                if arity == 0 {
                    return Err(syntax(line, "relation arity must be positive"));
                }
                relations.push(Relation {
                    name: name.to_string(),
                    arity,
                    tuples: Vec::new(),
                });
            }
            "tuple" => {
                let Some(rel) = relations.last_mut() else {
                    return Err(syntax(line, "`tuple` before any `relation`"));
                };
                if toks.len() - 1 != rel.arity {
                    return Err(Error::ArityMismatch {
                        relation: rel.name.clone(),
                        arity: rel.arity,
                        got: toks.len() - 1,
                    });
                }
                let t = toks[1..]
                    .iter()
                    .map(|n| {
                        index.get(*n).copied().ok_or_else(|| Error::UnknownElement {
                            line,
                            name: n.to_string(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                if !rel.tuples.contains(&t) {
                    rel.tuples.push(t);
                }
            }
            "end" => {
                if toks.len() != 1 {
                    return Err(syntax(line, "unexpected tokens after `end`"));
                }
                ended_at = Some(line);
            }
            other => return Err(syntax(line, format!("unknown keyword `{other}`"))),
        }
    }
    let last = text.lines().count().max(1);
    let Some((role, name)) = header else {
        return Err(syntax(last, "missing header"));
    };
    let Some(end_line) = ended_at else {
        return Err(syntax(last, "missing `end`"));
    };
    let domain = domain.ok_or_else(|| syntax(end_line, "missing `domain` line"))?;
    Structure::new(name, role, domain, relations)
        .and_then(|s| s.with_blocks(blocks))
        .map_err(|e| relocate(end_line, e))
}

pub fn serialize_structure(s: &Structure) -> String {
    let mut out = String::new();
    let kw = match s.role() {
        Role::Template => "structure",
        Role::Instance => "instance",
    };
    let _ = writeln!(out, "{kw} {}", s.name());
    if let Some(blocks) = s.blocks() {
        let ks: Vec<String> = blocks.iter().map(|k| k.to_string()).collect();
        let _ = writeln!(out, "blocks {}", ks.join(" "));
    }
    if s.domain().is_empty() {
        out.push_str("domain\n");
    } else {
        let _ = writeln!(out, "domain {}", s.domain().join(" "));
    }
    for r in s.relations() {
        let _ = writeln!(out, "relation {} {}", r.name, r.arity);
        for t in &r.tuples {
            let names: Vec<&str> = t.iter().map(|&x| s.domain()[x].as_str()).collect();
            let _ = writeln!(out, "tuple {}", names.join(" "));
        }
    }
    out.push_str("end\n");
    out
}

fn join_indices(t: &[usize]) -> String {
    t.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_indices(s: &str, line: usize) -> Result<Vec<usize>> {
    s.split(',')
        .map(|x| {
            x.parse::<usize>()
                .map_err(|_| syntax(line, format!("bad index list `{s}`")))
        })
        .collect()
}

pub fn serialize_digraph(g: &Digraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {}", g.name());
    for v in g.vertices() {
        let _ = writeln!(out, "vertex {v}");
    }
    if let Some(prov) = g.provenance() {
        for (v, p) in g.vertices().iter().zip(prov) {
            let _ = match p {
                DVertex::Element(a) => writeln!(out, "# provenance {v} element {a}"),
                DVertex::Tuple(t) => writeln!(out, "# provenance {v} tuple {}", join_indices(t)),
                DVertex::Internal {
                    element,
                    tuple,
                    position,
                } => writeln!(
                    out,
                    "# provenance {v} internal {element} {} {position}",
                    join_indices(tuple)
                ),
            };
        }
    }
    if let Some(levels) = g.levels() {
        for (v, l) in g.vertices().iter().zip(levels) {
            let _ = writeln!(out, "# level {v} {l}");
        }
    }
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "edge {} {}", g.vertices()[u], g.vertices()[v]);
    }
    out.push_str("end\n");
    out
}

pub fn parse_digraph(text: &str) -> Result<Digraph> {
    let mut name: Option<String> = None;
    let mut vertices: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges = Vec::new();
    let mut levels: Vec<(usize, String, usize)> = Vec::new();
    let mut prov: Vec<(usize, String, DVertex)> = Vec::new();
    let mut ended_at = None;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim_start();
        if let Some(rest) = trimmed.strip_prefix('#') {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            match toks.first() {
                Some(&"level") => {
                    let [_, v, l] = toks[..] else {
                        return Err(syntax(line, "expected `# level <vertex> <level>`"));
                    };
                    let l = l
                        .parse()
                        .map_err(|_| syntax(line, "level must be an integer"))?;
                    levels.push((line, v.to_string(), l));
                }
                Some(&"provenance") => {
                    let tag = match toks[..] {
                        [_, _, "element", a] => DVertex::Element(
                            a.parse().map_err(|_| syntax(line, "bad element index"))?,
                        ),
                        [_, _, "tuple", t] => DVertex::Tuple(parse_indices(t, line)?),
                        [_, _, "internal", a, t, j] => DVertex::Internal {
                            element: a.parse().map_err(|_| syntax(line, "bad element index"))?,
                            tuple: parse_indices(t, line)?,
                            position: j.parse().map_err(|_| syntax(line, "bad position"))?,
                        },
                        _ => return Err(syntax(line, "malformed `# provenance` line")),
                    };
                    prov.push((line, toks[1].to_string(), tag));
                }
                _ => {}
            }
            continue;
        }
        let toks = tokens(raw);
        if toks.is_empty() {
            continue;
        }
        if ended_at.is_some() {
            return Err(syntax(line, "content after `end`"));
        }
        match toks[..] {
            ["digraph", n] => {
                if name.is_some() {
                    return Err(syntax(line, "duplicate header"));
                }
                name = Some(n.to_string());
            }
            _ if name.is_none() => return Err(syntax(line, "expected `digraph <name>`")),
            ["vertex", v] => {
                crate::model::check_token(v).map_err(|e| relocate(line, e))?;
                if index.insert(v.to_string(), vertices.len()).is_some() {
                    return Err(Error::DuplicateName(v.to_string()));
                }
                vertices.push(v.to_string());
            }
            ["edge", u, v] => {
                let lookup = |x: &str| {
                    index.get(x).copied().ok_or_else(|| Error::UnknownVertex {
                        line,
                        name: x.to_string(),
                    })
                };
                edges.push((lookup(u)?, lookup(v)?));
            }
            ["end"] => ended_at = Some(line),
            _ => return Err(syntax(line, format!("cannot parse `{}`", raw.trim()))),
        }
    }
    let last = text.lines().count().max(1);
    let name = name.ok_or_else(|| syntax(last, "missing header"))?;
    let end_line = ended_at.ok_or_else(|| syntax(last, "missing `end`"))?;
    let mut g = Digraph::new(name, vertices, edges).map_err(|e| relocate(end_line, e))?;

    if !levels.is_empty() {
        let mut lv: Vec<Option<usize>> = vec![None; g.len()];
        for (line, v, l) in levels {
            let idx = index
                .get(&v)
                .copied()
                .ok_or(Error::UnknownVertex { line, name: v })?;
            lv[idx] = Some(l);
        }
        let lv: Vec<usize> = lv
            .into_iter()
            .collect::<Option<_>>()
            .ok_or_else(|| syntax(end_line, "levels given for only some vertices"))?;
        g = g.with_levels(lv)?;
    }
    if !prov.is_empty() {
        let mut pv: Vec<Option<DVertex>> = vec![None; g.len()];
        for (line, v, tag) in prov {
            let idx = index
                .get(&v)
                .copied()
                .ok_or(Error::UnknownVertex { line, name: v })?;
            pv[idx] = Some(tag);
        }
        let pv: Vec<DVertex> = pv
            .into_iter()
            .collect::<Option<_>>()
            .ok_or_else(|| syntax(end_line, "provenance given for only some vertices"))?;
        g = g.with_provenance(pv)?;
    }
    Ok(g)
}

/// Either kind of input file, told apart by its first keyword.
#[derive(Debug, Clone)]
pub enum Document {
    Structure(Structure),
    Digraph(Digraph),
}

pub fn parse_document(text: &str) -> Result<Document> {
    let first = text
        .lines()
        .map(tokens)
        .find(|t| !t.is_empty())
        .and_then(|t| t.first().map(|s| s.to_string()));
    match first.as_deref() {
        Some("digraph") => parse_digraph(text).map(Document::Digraph),
        _ => parse_structure(text).map(Document::Structure),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_CYCLE: &str = "\
# the directed 2-cycle
structure C2
domain 0 1
relation R 2
tuple 0 1
tuple 1 0
end
";

    #[test]
    fn parses_two_cycle() {
        let s = parse_structure(TWO_CYCLE).unwrap();
        assert_eq!(s.size(), 2);
        assert_eq!(s.relations()[0].tuples.len(), 2);
        assert_eq!(s.role(), Role::Template);
        assert_eq!(parse_structure(&serialize_structure(&s)).unwrap(), s);
    }

    #[test]
    fn empty_relation_depends_on_role() {
        let t = "structure A\ndomain 0 1\nrelation R 2\nend\n";
        assert!(matches!(
            parse_structure(t),
            Err(Error::NonemptyRelationRequired(_))
        ));
        let i = "instance X\ndomain 0 1\nrelation R 2\nend\n";
        assert!(parse_structure(i).unwrap().relations()[0].tuples.is_empty());
    }

    #[test]
    fn reports_line_numbers() {
        let bad = "structure A\ndomain 0 1\nrelation R 2\ntuple 0 7\nend\n";
        assert_eq!(
            parse_structure(bad),
            Err(Error::UnknownElement {
                line: 4,
                name: "7".into()
            })
        );
        let arity = "structure A\ndomain 0 1\nrelation R 2\ntuple 0\nend\n";
        assert!(matches!(
            parse_structure(arity),
            Err(Error::ArityMismatch { .. })
        ));
        let kw = "structure A\ndomian 0 1\nend\n";
        assert!(matches!(
            parse_structure(kw),
            Err(Error::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_structure("structure A\ndomain 0\nrelation R 1\ntuple 0\n"),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn blocks_header_round_trips() {
        let t = "structure M\nblocks 2 1\ndomain 0 1\nrelation R1*R2 3\ntuple 0 1 1\nend\n";
        let s = parse_structure(t).unwrap();
        assert_eq!(s.blocks(), Some(&[2, 1][..]));
        assert_eq!(serialize_structure(&s), t);
        let bad = "structure M\nblocks 2 2\ndomain 0 1\nrelation R 3\ntuple 0 1 1\nend\n";
        assert!(parse_structure(bad).is_err());
    }

    #[test]
    fn minimal_digraph() {
        let g = Digraph::new("G", vec!["v0".into()], vec![]).unwrap();
        let text = serialize_digraph(&g);
        assert_eq!(text, "digraph G\nvertex v0\nend\n");
        assert_eq!(parse_digraph(&text).unwrap(), g);
    }

    #[test]
    fn edge_to_undeclared_vertex_fails() {
        let t = "digraph G\nvertex a\nedge a b\nend\n";
        assert_eq!(
            parse_digraph(t),
            Err(Error::UnknownVertex {
                line: 3,
                name: "b".into()
            })
        );
    }

    #[test]
    fn levels_and_provenance_survive_round_trip() {
        let g = Digraph::new("P", vec!["a".into(), "b".into()], vec![(0, 1)])
            .unwrap()
            .with_levels(vec![0, 1])
            .unwrap()
            .with_provenance(vec![
                DVertex::Element(0),
                DVertex::Internal {
                    element: 0,
                    tuple: vec![0, 1],
                    position: 1,
                },
            ])
            .unwrap();
        let back = parse_digraph(&serialize_digraph(&g)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn document_dispatch() {
        assert!(matches!(
            parse_document(TWO_CYCLE),
            Ok(Document::Structure(_))
        ));
        assert!(matches!(
            parse_document("# x\ndigraph G\nend\n"),
            Ok(Document::Digraph(_))
        ));
    }
}
