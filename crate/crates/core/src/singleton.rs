//! Single-relation normal form: merge a multi-relation signature into one
//! relation (the product of the relations) and split it back.

use crate::error::{Error, Result};
use crate::model::{Relation, Role, Structure};

/// Arities of the original relations and their offsets in the merged tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockInfo {
    arities: Vec<usize>,
    offsets: Vec<usize>,
}

impl BlockInfo {
    pub fn new(arities: Vec<usize>) -> Result<Self> {
        if arities.is_empty() {
            return Err(Error::EmptySignature);
        }
        if arities.contains(&0) {
            return Err(Error::SignatureMismatch("zero block arity".into()));
        }
        let mut offsets = Vec::with_capacity(arities.len());
        let mut acc = 0;
        for &k in &arities {
            offsets.push(acc);
            acc += k;
        }
        Ok(BlockInfo { arities, offsets })
    }

    pub fn arities(&self) -> &[usize] {
        &self.arities
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn total(&self) -> usize {
        self.arities.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.arities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arities.is_empty()
    }

    pub fn range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i] + self.arities[i]
    }
}

fn merged_name(s: &Structure) -> String {
    s.relations()
        .iter()
        .map(|r| r.name.as_str())
        .collect::<Vec<_>>()
        .join("*")
}

fn check_signature(x: &Structure, blocks: &BlockInfo) -> Result<()> {
    if x.arities() != blocks.arities() {
        return Err(Error::SignatureMismatch(format!(
            "instance arities {:?} differ from template arities {:?}",
            x.arities(),
            blocks.arities()
        )));
    }
    Ok(())
}

/// `R = R_1 x ... x R_n`; single-relation templates come back unchanged.
pub fn merge_template(a: &Structure) -> Result<(Structure, BlockInfo)> {
    let blocks = BlockInfo::new(a.arities())?;
    if let Some(r) = a.relations().iter().find(|r| r.tuples.is_empty()) {
        return Err(Error::NonemptyRelationRequired(r.name.clone()));
    }
    if a.relations().len() == 1 {
        return Ok((a.clone(), blocks));
    }
    let mut product: Vec<Vec<usize>> = vec![Vec::new()];
    for r in a.relations() {
        let mut next = Vec::with_capacity(product.len() * r.tuples.len());
        for p in &product {
            for t in &r.tuples {
                let mut q = p.clone();
                q.extend_from_slice(t);
                next.push(q);
            }
        }
        product = next;
    }
    let rel = Relation::new(merged_name(a), blocks.total(), product);
    let merged = Structure::new(a.name(), a.role(), a.domain().to_vec(), vec![rel])?
        .with_blocks(Some(blocks.arities().to_vec()))?;
    Ok((merged, blocks))
}

/// Each tuple of `R_i` becomes one merged tuple, padded with fresh elements
/// outside block `i`.
pub fn merge_instance(x: &Structure, blocks: &BlockInfo) -> Result<Structure> {
    check_signature(x, blocks)?;
    if blocks.len() == 1 {
        return Ok(x.clone());
    }
    let mut domain = x.domain().to_vec();
    let mut tuples = Vec::new();
    for (i, r) in x.relations().iter().enumerate() {
        for (ti, t) in r.tuples.iter().enumerate() {
            let mut merged = Vec::with_capacity(blocks.total());
            for pos in 0..blocks.total() {
                if blocks.range(i).contains(&pos) {
                    merged.push(t[pos - blocks.offsets()[i]]);
                } else {
                    merged.push(domain.len());
                    domain.push(format!("pad:{}:{ti}:{}", r.name, pos + 1));
                }
            }
            tuples.push(merged);
        }
    }
    let rel = Relation::new(merged_name(x), blocks.total(), tuples);
    Structure::new(x.name(), x.role(), domain, vec![rel])?
        .with_blocks(Some(blocks.arities().to_vec()))
}

/// Projects each merged tuple onto every block.
pub fn unmerge_instance(x: &Structure, blocks: &BlockInfo) -> Result<Structure> {
    let rel = x.single_relation()?;
    if rel.arity != blocks.total() {
        return Err(Error::ArityMismatch {
            relation: rel.name.clone(),
            arity: blocks.total(),
            got: rel.arity,
        });
    }
    let parts: Vec<&str> = rel.name.split('*').collect();
    let names: Vec<String> = if parts.len() == blocks.len() && parts.iter().all(|p| !p.is_empty()) {
        parts.iter().map(|p| p.to_string()).collect()
    } else if blocks.len() == 1 {
        vec![rel.name.clone()]
    } else {
        (1..=blocks.len()).map(|i| format!("R{i}")).collect()
    };
    let relations = names
        .into_iter()
        .enumerate()
        .map(|(i, name)| {
            let tuples = rel
                .tuples
                .iter()
                .map(|t| t[blocks.range(i)].to_vec())
                .collect();
            Relation::new(name, blocks.arities()[i], tuples)
        })
        .collect();
    Structure::new(x.name(), Role::Instance, x.domain().to_vec(), relations)
}
