//! Operation tables, linear identities and the indicator search for
//! polymorphisms satisfying them.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use super::{Restriction, Search, SolverOptions};
use crate::error::{Error, Result};
use crate::model::{Relation, Role, Structure};

/// A total `arity`-ary operation on `0..size`, first argument most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpTable {
    pub name: String,
    pub arity: usize,
    pub size: usize,
    pub table: Vec<usize>,
}

impl OpTable {
    pub fn from_fn(
        name: impl Into<String>,
        arity: usize,
        size: usize,
        f: impl Fn(&[usize]) -> usize,
    ) -> Self {
        let cells = size.pow(arity as u32);
        let mut args = vec![0; arity];
        let mut table = Vec::with_capacity(cells);
        for idx in 0..cells {
            decode(idx, size, &mut args);
            table.push(f(&args));
        }
        OpTable {
            name: name.into(),
            arity,
            size,
            table,
        }
    }

    pub fn index(&self, args: &[usize]) -> usize {
        args.iter().fold(0, |acc, &a| acc * self.size + a)
    }

    pub fn apply(&self, args: &[usize]) -> usize {
        self.table[self.index(args)]
    }

    pub fn is_idempotent(&self) -> bool {
        (0..self.size).all(|a| self.apply(&vec![a; self.arity]) == a)
    }
}

fn decode(mut idx: usize, size: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = idx % size;
        idx /= size;
    }
}

/// A variable or one symbol applied to variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(String),
    App(String, Vec<String>),
}

impl Term {
    fn vars(&self) -> BTreeSet<&str> {
        match self {
            Term::Var(v) => [v.as_str()].into(),
            Term::App(_, args) => args.iter().map(|s| s.as_str()).collect(),
        }
    }
}

impl std::fmt::Display for Term {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(s, args) => write!(f, "{s}({})", args.join(",")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Identity {
    pub lhs: Term,
    pub rhs: Term,
}

impl Identity {
    pub fn variables(&self) -> Vec<String> {
        let mut v: BTreeSet<&str> = self.lhs.vars();
        v.extend(self.rhs.vars());
        v.into_iter().map(String::from).collect()
    }

    /// Both sides use the same set of variables.
    pub fn is_balanced(&self) -> bool {
        self.lhs.vars() == self.rhs.vars()
    }

    /// `f(x,...,x) = x` for the given symbol.
    pub fn is_idempotency_of(&self, symbol: &str) -> bool {
        let check = |app: &Term, var: &Term| match (app, var) {
            (Term::App(s, args), Term::Var(x)) => s == symbol && args.iter().all(|a| a == x),
            _ => false,
        };
        check(&self.lhs, &self.rhs) || check(&self.rhs, &self.lhs)
    }
}

impl std::fmt::Display for Identity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IdentitySet {
    pub symbols: Vec<(String, usize)>,
    pub identities: Vec<Identity>,
}

impl IdentitySet {
    pub fn arity(&self, symbol: &str) -> Option<usize> {
        self.symbols
            .iter()
            .find(|(s, _)| s == symbol)
            .map(|&(_, m)| m)
    }

    pub fn add_symbol(&mut self, name: &str, arity: usize) -> &mut Self {
        self.symbols.push((name.to_string(), arity));
        self
    }

    /// Parses and appends `lhs = rhs`.
    pub fn add(&mut self, text: &str) -> Result<&mut Self> {
        let id = self.parse_identity(text, 0)?;
        self.identities.push(id);
        Ok(self)
    }

    fn parse_term(&self, s: &str, line: usize) -> Result<Term> {
        let s = s.trim();
        let syntax = |m: String| Error::Syntax { line, message: m };
        match s.find('(') {
            None => {
                if s.is_empty() || !s.chars().all(|c| c.is_alphanumeric() || c == '_') {
                    return Err(syntax(format!("bad variable `{s}`")));
                }
                Ok(Term::Var(s.to_string()))
            }
            Some(open) => {
                let name = s[..open].trim();
                let inner = s[open + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| syntax(format!("unclosed term `{s}`")))?;
                if inner.contains('(') || inner.contains(')') {
                    return Err(Error::NonlinearIdentity(s.to_string()));
                }
                let args: Vec<String> = inner.split(',').map(|a| a.trim().to_string()).collect();
                if args.iter().any(|a| a.is_empty()) {
                    return Err(syntax(format!("empty argument in `{s}`")));
                }
                let arity = self
                    .arity(name)
                    .ok_or_else(|| syntax(format!("undeclared symbol `{name}`")))?;
                if arity != args.len() {
                    return Err(Error::OpArityMismatch(format!(
                        "`{name}` has arity {arity} but `{s}` gives {}",
                        args.len()
                    )));
                }
                Ok(Term::App(name.to_string(), args))
            }
        }
    }

    fn parse_identity(&self, text: &str, line: usize) -> Result<Identity> {
        let (l, r) = text
            .split_once('=')
            .or_else(|| text.split_once('≈'))
            .ok_or_else(|| Error::Syntax {
                line,
                message: "identity needs `=`".into(),
            })?;
        Ok(Identity {
            lhs: self.parse_term(l, line)?,
            rhs: self.parse_term(r, line)?,
        })
    }
}

/// Reads `symbol <f> <arity>` and `identity <lhs> = <rhs>` lines.
pub fn parse_identities(text: &str) -> Result<IdentitySet> {
    let mut set = IdentitySet::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (kw, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        match kw {
            "symbol" => {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                let [name, arity] = toks[..] else {
                    return Err(Error::Syntax {
                        line,
                        message: "expected `symbol <f> <arity>`".into(),
                    });
                };
                let arity: usize = arity.parse().ok().filter(|&m| m > 0).ok_or(Error::Syntax {
                    line,
                    message: "arity must be a positive integer".into(),
                })?;
                if set.arity(name).is_some() {
                    return Err(Error::DuplicateName(name.to_string()));
                }
                set.add_symbol(name, arity);
            }
            "identity" => {
                let id = set.parse_identity(rest, line)?;
                set.identities.push(id);
            }
            _ => {
                return Err(Error::Syntax {
                    line,
                    message: format!("unknown keyword `{kw}`"),
                })
            }
        }
    }
    Ok(set)
}

fn lookup<'a>(tables: &'a [OpTable], name: &str) -> Result<&'a OpTable> {
    tables
        .iter()
        .find(|t| t.name == name)
        .ok_or_else(|| Error::OpArityMismatch(format!("no table for symbol `{name}`")))
}

/// Evaluates a term under `env` with the supplied operation.
fn eval(term: &Term, env: &HashMap<&str, usize>, op: &dyn Fn(&str, &[usize]) -> usize) -> usize {
    match term {
        Term::Var(v) => env[v.as_str()],
        Term::App(s, args) => {
            let vals: Vec<usize> = args.iter().map(|a| env[a.as_str()]).collect();
            op(s, &vals)
        }
    }
}

/// Checks every identity under every assignment of its variables over
/// `0..size`; returns the first failing identity and assignment.
pub fn first_identity_failure(
    sigma: &IdentitySet,
    size: usize,
    op: &dyn Fn(&str, &[usize]) -> usize,
) -> Option<(Identity, Vec<usize>)> {
    for id in &sigma.identities {
        let vars = id.variables();
        let count = size.checked_pow(vars.len() as u32).unwrap_or(usize::MAX);
        let mut vals = vec![0; vars.len()];
        for idx in 0..count {
            decode(idx, size, &mut vals);
            let env: HashMap<&str, usize> = vars
                .iter()
                .map(|s| s.as_str())
                .zip(vals.iter().copied())
                .collect();
            if eval(&id.lhs, &env, op) != eval(&id.rhs, &env, op) {
                return Some((id.clone(), vals.clone()));
            }
        }
    }
    None
}

pub fn satisfies(tables: &[OpTable], sigma: &IdentitySet, size: usize) -> Result<bool> {
    for (s, m) in &sigma.symbols {
        let t = lookup(tables, s)?;
        if t.arity != *m || t.size != size {
            return Err(Error::OpArityMismatch(format!(
                "`{s}` expects arity {m} over {size}, table has arity {} over {}",
                t.arity, t.size
            )));
        }
    }
    let op = |s: &str, args: &[usize]| lookup(tables, s).expect("checked above").apply(args);
    Ok(first_identity_failure(sigma, size, &op).is_none())
}

/// The first tuple of relation images that falls outside its relation.
pub fn preservation_failure(
    a: &Structure,
    arity: usize,
    f: &dyn Fn(&[usize]) -> usize,
) -> Option<(usize, Vec<Vec<usize>>)> {
    for (ri, r) in a.relations().iter().enumerate() {
        let n = r.tuples.len();
        let set: std::collections::HashSet<&[usize]> =
            r.tuples.iter().map(|t| t.as_slice()).collect();
        let count = n.checked_pow(arity as u32).unwrap_or(usize::MAX);
        let mut pick = vec![0; arity];
        let mut args = vec![0; arity];
        let mut img = vec![0; r.arity];
        for idx in 0..count {
            decode(idx, n, &mut pick);
            for (j, slot) in img.iter_mut().enumerate() {
                for (p, &t) in pick.iter().enumerate() {
                    args[p] = r.tuples[t][j];
                }
                *slot = f(&args);
            }
            if !set.contains(img.as_slice()) {
                return Some((ri, pick.iter().map(|&t| r.tuples[t].clone()).collect()));
            }
        }
    }
    None
}

pub fn is_polymorphism(table: &OpTable, a: &Structure) -> Result<bool> {
    if table.size != a.size() {
        return Err(Error::OpArityMismatch(format!(
            "table over {} elements, structure has {}",
            table.size,
            a.size()
        )));
    }
    Ok(preservation_failure(a, table.arity, &|args| table.apply(args)).is_none())
}

/// Polymorphisms of `a` satisfying `sigma`, found by solving the indicator
/// instance whose variables are the table cells. `None` if there are none.
pub fn find_operations(a: &Structure, sigma: &IdentitySet) -> Result<Option<Vec<OpTable>>> {
    let n = a.size();
    let mut offsets = Vec::with_capacity(sigma.symbols.len());
    let mut cells = 0usize;
    for (_, m) in &sigma.symbols {
        offsets.push(cells);
        cells = n
            .checked_pow(*m as u32)
            .and_then(|c| cells.checked_add(c))
            .ok_or(Error::ArityTooLarge(*m))?;
    }
    let cell = |si: usize, args: &[usize]| offsets[si] + args.iter().fold(0, |acc, &x| acc * n + x);
    let sym_index = |s: &str| sigma.symbols.iter().position(|(t, _)| t == s).unwrap();

    let mut relations = Vec::new();
    for r in a.relations() {
        let mut tuples = Vec::new();
        for (si, (_, m)) in sigma.symbols.iter().enumerate() {
            let count = r.tuples.len().pow(*m as u32);
            let mut pick = vec![0; *m];
            let mut args = vec![0; *m];
            for idx in 0..count {
                decode(idx, r.tuples.len(), &mut pick);
                let t: Vec<usize> = (0..r.arity)
                    .map(|j| {
                        for (p, &q) in pick.iter().enumerate() {
                            args[p] = r.tuples[q][j];
                        }
                        cell(si, &args)
                    })
                    .collect();
                tuples.push(t);
            }
        }
        relations.push(Relation::new(r.name.clone(), r.arity, tuples));
    }

    let mut eq = Vec::new();
    let mut restriction = Restriction::new();
    for id in &sigma.identities {
        let vars = id.variables();
        let count = n.pow(vars.len() as u32);
        let mut vals = vec![0; vars.len()];
        for idx in 0..count {
            decode(idx, n, &mut vals);
            let env: HashMap<&str, usize> = vars
                .iter()
                .map(|s| s.as_str())
                .zip(vals.iter().copied())
                .collect();
            let side = |t: &Term| match t {
                Term::Var(v) => Err(env[v.as_str()]),
                Term::App(s, args) => {
                    let xs: Vec<usize> = args.iter().map(|x| env[x.as_str()]).collect();
                    Ok(cell(sym_index(s), &xs))
                }
            };
            match (side(&id.lhs), side(&id.rhs)) {
                (Ok(c), Ok(d)) if c != d => eq.push(vec![c, d]),
                (Ok(_), Ok(_)) => {}
                (Ok(c), Err(v)) | (Err(v), Ok(c)) => {
                    restriction.allow(c, [v]);
                }
                (Err(u), Err(v)) if u != v => return Ok(None),
                (Err(_), Err(_)) => {}
            }
        }
    }
    relations.push(Relation::new("=", 2, eq));
    let indicator = Structure::with_indices("indicator", Role::Instance, cells, relations)?;
    let mut target_rels = a.relations().to_vec();
    target_rels.push(Relation::new("=", 2, (0..n).map(|x| vec![x, x]).collect()));
    let target = Structure::new(a.name(), Role::Instance, a.domain().to_vec(), target_rels)?;

    let search = Search::new(
        &indicator,
        &target,
        Some(&restriction),
        SolverOptions::default(),
    )?;
    Ok(search.first().map(|h| {
        sigma
            .symbols
            .iter()
            .enumerate()
            .map(|(si, (name, m))| {
                let size = n.pow(*m as u32);
                OpTable {
                    name: name.clone(),
                    arity: *m,
                    size: n,
                    table: h[offsets[si]..offsets[si] + size].to_vec(),
                }
            })
            .collect()
    }))
}

pub fn serialize_op_table(t: &OpTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "op {} {} over {}", t.name, t.arity, t.size);
    let mut args = vec![0; t.arity];
    for (idx, &v) in t.table.iter().enumerate() {
        decode(idx, t.size, &mut args);
        let a: Vec<String> = args.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "{} {v}", a.join(" "));
    }
    out
}

/// Reads one or more `op <name> <arity> over <size>` blocks. Every cell must
/// be given exactly once.
pub fn parse_op_table(text: &str) -> Result<Vec<OpTable>> {
    let mut out: Vec<(OpTable, Vec<bool>)> = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let toks: Vec<&str> = raw
            .split('#')
            .next()
            .unwrap_or("")
            .split_whitespace()
            .collect();
        if toks.is_empty() {
            continue;
        }
        let syntax = |m: &str| Error::Syntax {
            line,
            message: m.to_string(),
        };
        if toks[0] == "op" {
            let [_, name, arity, "over", size] = toks[..] else {
                return Err(syntax("expected `op <name> <arity> over <size>`"));
            };
            let arity: usize = arity.parse().map_err(|_| syntax("bad arity"))?;
            let size: usize = size.parse().map_err(|_| syntax("bad domain size"))?;
            let cells = size
                .checked_pow(arity as u32)
                .filter(|&c| c <= 1 << 24)
                .ok_or(Error::ArityTooLarge(arity))?;
            out.push((
                OpTable {
                    name: name.to_string(),
                    arity,
                    size,
                    table: vec![0; cells],
                },
                vec![false; cells],
            ));
            continue;
        }
        let Some((t, seen)) = out.last_mut() else {
            return Err(syntax("table row before `op` header"));
        };
        let nums = toks
            .iter()
            .map(|x| x.parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| syntax("rows are whitespace-separated indices"))?;
        if nums.len() != t.arity + 1 {
            return Err(Error::OpArityMismatch(format!(
                "line {line}: expected {} indices, got {}",
                t.arity + 1,
                nums.len()
            )));
        }
        if let Some(&bad) = nums.iter().find(|&&x| x >= t.size) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                size: t.size,
            });
        }
        let idx = t.index(&nums[..t.arity]);
        if seen[idx] {
            return Err(syntax("cell given twice"));
        }
        seen[idx] = true;
        t.table[idx] = nums[t.arity];
    }
    out.into_iter()
        .map(|(t, seen)| {
            if seen.iter().all(|&s| s) {
                Ok(t)
            } else {
                Err(Error::Syntax {
                    line: last_line,
                    message: format!("table `{}` is not total", t.name),
                })
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Digraph;

    fn zigzag() -> Structure {
        Digraph::anonymous(4, vec![(0, 1), (2, 1), (2, 3)])
            .unwrap()
            .to_structure()
    }

    fn majority() -> IdentitySet {
        parse_identities(
            "symbol m 3\nidentity m(x,x,x) = x\nidentity m(x,x,y) = x\n\
             identity m(x,y,x) = x\nidentity m(y,x,x) = x\n",
        )
        .unwrap()
    }

    fn maltsev() -> IdentitySet {
        parse_identities("symbol p 3\nidentity p(y,x,x) = y\nidentity p(x,x,y) = y\n").unwrap()
    }

    #[test]
    fn parse_rejects_nested_terms() {
        let r = parse_identities("symbol f 2\nidentity f(f(x,y),y) = x\n");
        assert!(matches!(r, Err(Error::NonlinearIdentity(_))));
        let r = parse_identities("symbol f 2\nidentity f(x) = x\n");
        assert!(matches!(r, Err(Error::OpArityMismatch(_))));
    }

    #[test]
    fn balance_and_idempotency_flags() {
        let s =
            parse_identities("symbol w 3\nidentity w(x,x,y) = w(x,y,x)\nidentity w(x,x,x) ≈ x\n")
                .unwrap();
        assert!(s.identities[0].is_balanced());
        assert!(s.identities[1].is_idempotency_of("w"));
        assert!(!majority().identities[1].is_balanced());
    }

    #[test]
    fn majority_on_zigzag() {
        let ops = find_operations(&zigzag(), &majority()).unwrap().unwrap();
        assert!(is_polymorphism(&ops[0], &zigzag()).unwrap());
        assert!(satisfies(&ops, &majority(), 4).unwrap());
    }

    #[test]
    fn maltsev_on_single_edge() {
        let a = Structure::single(2, 2, vec![vec![0, 1]]).unwrap();
        let ops = find_operations(&a, &maltsev()).unwrap().unwrap();
        assert!(is_polymorphism(&ops[0], &a).unwrap());
        let xor = OpTable::from_fn("p", 3, 2, |v| v[0] ^ v[1] ^ v[2]);
        assert!(is_polymorphism(&xor, &a).unwrap());
        assert!(satisfies(&[xor], &maltsev(), 2).unwrap());
    }

    #[test]
    fn no_maltsev_on_zigzag() {
        assert!(find_operations(&zigzag(), &maltsev()).unwrap().is_none());
    }

    #[test]
    fn boolean_majority_preserves_edge() {
        let a = Structure::single(2, 2, vec![vec![0, 1]]).unwrap();
        let maj = OpTable::from_fn("m", 3, 2, |v| usize::from(v[0] + v[1] + v[2] >= 2));
        assert!(is_polymorphism(&maj, &a).unwrap());
    }

    #[test]
    fn op_table_round_trip() {
        let t = OpTable::from_fn("m", 2, 3, |v| v[0].max(v[1]));
        let back = parse_op_table(&serialize_op_table(&t)).unwrap();
        assert_eq!(back, vec![t]);
        assert!(parse_op_table("op f 1 over 2\n0 1\n").is_err());
    }

    #[test]
    fn contradictory_variables() {
        let s = parse_identities("symbol f 1\nidentity x = y\n").unwrap();
        assert!(find_operations(&zigzag(), &s).unwrap().is_none());
    }
}
