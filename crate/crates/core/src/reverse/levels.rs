use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::model::Digraph;

/// Levels of one weakly connected component, normalized so the minimum is 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelAssignment {
    /// Component vertices (digraph indices), increasing.
    pub vertices: Vec<usize>,
    /// `levels[i]` is the level of `vertices[i]`.
    pub levels: Vec<usize>,
    pub height: usize,
}

impl LevelAssignment {
    pub fn level_of(&self, v: usize) -> Option<usize> {
        self.vertices.binary_search(&v).ok().map(|i| self.levels[i])
    }
}

/// Propagates `+1` along edges and `-1` against them from the first vertex.
/// A contradiction yields [`Error::Unbalanced`] with a cycle of nonzero net
/// orientation as witness.
pub fn assign_levels(g: &Digraph, component: &[usize]) -> Result<LevelAssignment> {
    let mut vertices = component.to_vec();
    vertices.sort_unstable();
    let Some(&root) = vertices.first() else {
        return Ok(LevelAssignment {
            vertices,
            levels: Vec::new(),
            height: 0,
        });
    };
    let mut lvl: Vec<Option<i64>> = vec![None; g.len()];
    let mut parent: Vec<usize> = vec![usize::MAX; g.len()];
    lvl[root] = Some(0);
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let lu = lvl[u].unwrap();
        let steps = g
            .out_neighbors(u)
            .iter()
            .map(|&v| (v, 1))
            .chain(g.in_neighbors(u).iter().map(|&v| (v, -1)));
        for (v, d) in steps {
            match lvl[v] {
                None => {
                    lvl[v] = Some(lu + d);
                    parent[v] = u;
                    queue.push_back(v);
                }
                Some(lv) if lv != lu + d => {
                    return Err(Error::Unbalanced {
                        witness: witness(g, &parent, u, v),
                    })
                }
                Some(_) => {}
            }
        }
    }
    let min = vertices.iter().map(|&v| lvl[v].unwrap()).min().unwrap();
    let levels: Vec<usize> = vertices
        .iter()
        .map(|&v| (lvl[v].unwrap() - min) as usize)
        .collect();
    let height = levels.iter().copied().max().unwrap_or(0);
    Ok(LevelAssignment {
        vertices,
        levels,
        height,
    })
}

/// Tree path `u .. lca .. v`; together with the offending edge it is a cycle.
fn witness(g: &Digraph, parent: &[usize], u: usize, v: usize) -> Vec<String> {
    let chain = |mut x: usize| {
        let mut c = vec![x];
        while parent[x] != usize::MAX {
            x = parent[x];
            c.push(x);
        }
        c
    };
    let cu = chain(u);
    let cv = chain(v);
    let lca = *cu.iter().find(|x| cv.contains(x)).unwrap();
    let mut path: Vec<usize> = cu.iter().copied().take_while(|&x| x != lca).collect();
    path.push(lca);
    let down: Vec<usize> = cv.iter().copied().take_while(|&x| x != lca).collect();
    path.extend(down.into_iter().rev());
    path.into_iter().map(|x| g.vertices()[x].clone()).collect()
}
