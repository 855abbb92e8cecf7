//! Seeded property suites comparing every construction with the solver.
//!
//! Trial `i` of a run with seed `s` draws from `Lcg::new(s + i)`, so a
//! failing trial is reproduced by `--seed <s + i> --trials 1`.

use std::fmt;

use crate::dbuild::{build_d, build_path, DMeta, PathSpec};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::forward::forward_instance;
use crate::gen;
use crate::lift::{
    delta2_mismatches, extremes_adjacent, lift_all, lift_endomorphism, restrict_endomorphism,
    total_order_violation, zz_allmin, zz_median, zz_p1, zz_p2, Order,
};
use crate::model::{Positions, Structure};
use crate::reverse::reverse_instance;
use crate::rng::Lcg;
use crate::singleton::{merge_instance, merge_template};
use crate::solver::{
    endomorphisms, find_operations, hom_exists, is_core, parse_identities, OpTable, Search,
    SolverOptions,
};

pub const SUITES: [&str; 9] = [
    "counts",
    "observation",
    "forward-eq",
    "reverse-eq",
    "orders",
    "delta",
    "lift",
    "endo",
    "core",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trial {
    pub index: usize,
    pub seed: u64,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub trials: Vec<Trial>,
}

impl SuiteReport {
    pub fn passed(&self) -> usize {
        self.trials.iter().filter(|t| t.ok).count()
    }

    pub fn ok(&self) -> bool {
        self.passed() == self.trials.len()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.trials {
            writeln!(
                f,
                "trial {} seed {} {} {}",
                t.index,
                t.seed,
                if t.ok { "ok" } else { "FAIL" },
                t.detail
            )?;
        }
        write!(
            f,
            "suite {} {}/{} {}",
            self.suite,
            self.passed(),
            self.trials.len(),
            if self.ok() { "ok" } else { "FAIL" }
        )
    }
}

fn run_trials(
    suite: &str,
    seed: u64,
    trials: usize,
    mut body: impl FnMut(&mut Lcg) -> Result<(bool, String)>,
) -> SuiteReport {
    let trials = (0..trials)
        .map(|i| {
            let s = seed.wrapping_add(i as u64);
            let (ok, detail) =
                body(&mut Lcg::new(s)).unwrap_or_else(|e| (false, format!("error: {e}")));
            Trial {
                index: i,
                seed: s,
                ok,
                detail,
            }
        })
        .collect();
    SuiteReport {
        suite: suite.into(),
        seed,
        trials,
    }
}

pub fn run_suite(suite: &str, seed: u64, trials: usize) -> Result<SuiteReport> {
    Ok(match suite {
        "counts" => counts(seed, trials),
        "observation" => observation(3),
        "forward-eq" => forward_eq(seed, trials),
        "reverse-eq" => reverse_eq(seed, trials),
        "orders" => orders(seed, trials),
        "delta" => delta(seed, trials),
        "lift" => lift(seed, trials),
        "endo" => endo(seed, trials),
        "core" => core(seed, trials),
        other => {
            return Err(Error::Syntax {
                line: 0,
                message: format!(
                    "unknown suite `{other}`; expected one of {}",
                    SUITES.join(", ")
                ),
            })
        }
    })
}

fn shape(a: &Structure) -> String {
    let r = &a.relations()[0];
    format!("|A|={} k={} |R|={}", a.size(), r.arity, r.tuples.len())
}

/// Random templates with `|A| <= 4`, `k <= 4`, `|R| <= 6`.
pub fn counts(seed: u64, trials: usize) -> SuiteReport {
    run_trials("counts", seed, trials, |rng| {
        let a = gen::template(rng, 4, 4, 6);
        let m = build_d(&a)?;
        let s = m.stats();
        let ok = s.matches() && s.height == a.relations()[0].arity + 2;
        Ok((ok, format!("{} -> {s}", shape(&a))))
    })
}

/// `Q_I -> Q_J` exists exactly when `I` is a subset of `J`, and is then
/// unique and onto. One trial per pair.
pub fn observation(max_k: usize) -> SuiteReport {
    let mut out = Vec::new();
    for k in 1..=max_k {
        for i in Positions::all_subsets(k) {
            for j in Positions::all_subsets(k) {
                let run = || -> Result<(bool, String)> {
                    let qi = build_path(PathSpec::new(k, i)?).to_structure();
                    let qj = build_path(PathSpec::new(k, j)?).to_structure();
                    let search = Search::new(&qi, &qj, None, SolverOptions::default())?;
                    let mut homs = Vec::new();
                    let _ = search.for_each(|h| {
                        homs.push(h.to_vec());
                        if homs.len() > 1 {
                            std::ops::ControlFlow::Break(())
                        } else {
                            std::ops::ControlFlow::Continue(())
                        }
                    });
                    let expect = i.is_subset(j);
                    let ok = if expect {
                        homs.len() == 1 && {
                            let mut img = homs[0].clone();
                            img.sort_unstable();
                            img.dedup();
                            img.len() == qj.size()
                        }
                    } else {
                        homs.is_empty()
                    };
                    Ok((
                        ok,
                        format!("k={k} I={i} J={j} subset={expect} homs={}", homs.len()),
                    ))
                };
                let (ok, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
                out.push(Trial {
                    index: out.len(),
                    seed: 0,
                    ok,
                    detail,
                });
            }
        }
    }
    SuiteReport {
        suite: "observation".into(),
        seed: 0,
        trials: out,
    }
}

/// `X -> A` against `F(X) -> D(A)` after merging to one relation.
pub fn forward_eq(seed: u64, trials: usize) -> SuiteReport {
    run_trials("forward-eq", seed, trials, |rng| {
        let a = gen::multi_template(rng, 3, 3, 4);
        let x = gen::instance_for(rng, &a, 4, 4);
        let (ma, blocks) = merge_template(&a)?;
        let mx = merge_instance(&x, &blocks)?;
        let k = blocks.total();
        let g = forward_instance(&mx, k)?;
        let m = build_d(&ma)?;
        let left = hom_exists(&x, &a)?;
        let right = hom_exists(&g.to_structure(), &m.digraph().to_structure())?;
        Ok((
            left == right,
            format!(
                "|X|={} |A|={} k={k} |F|={} direct={left} reduced={right}",
                x.size(),
                a.size(),
                g.len()
            ),
        ))
    })
}

fn reverse_input(rng: &mut Lcg, meta: &DMeta, kind: usize) -> crate::model::Digraph {
    let n = meta.height();
    let size = rng.range(1, 14);
    match kind {
        0 => {
            let edges = rng.range(0, 2 * size);
            gen::arbitrary_digraph(rng, size, edges)
        }
        1 => gen::levelled_digraph(rng, size, n, 4 * size),
        2 => {
            let h = rng.range(0, n - 1);
            gen::levelled_digraph(rng, size, h, 3 * size)
        }
        3 => gen::unfolded_tree(rng, meta, size, true),
        4 => {
            let t = gen::unfolded_tree(rng, meta, size, true);
            gen::perturb(rng, &t)
        }
        5 => gen::spanning_tree(rng, meta, 14, true),
        _ => {
            let t = gen::spanning_tree(rng, meta, 14, true);
            gen::perturb_levelled(rng, &t)
        }
    }
}

/// `G -> D(A)` against `B -> A` for the reversed instance `B`.
pub fn reverse_eq(seed: u64, trials: usize) -> SuiteReport {
    run_trials("reverse-eq", seed, trials, |rng| {
        let a = gen::nontrivial_template(rng, 3, 3, 4);
        let m = build_d(&a)?;
        let kind = rng.below(7);
        let g = reverse_input(rng, &m, kind);
        let out = reverse_instance(&g, &m)?;
        let left = hom_exists(&g.to_structure(), &m.digraph().to_structure())?;
        let right = hom_exists(&out.instance, &a)?;
        Ok((
            left == right,
            format!(
                "{} kind={kind} |G|={} |B|={} shortcut={:?} digraph={left} reversed={right}",
                shape(&a),
                g.len(),
                out.instance.size(),
                out.shortcut
            ),
        ))
    })
}

/// Both orders are strict total orders, and extreme elements of a random
/// pair of edge-covered sets are adjacent.
pub fn orders(seed: u64, trials: usize) -> SuiteReport {
    run_trials("orders", seed, trials, |rng| {
        let a = gen::template(rng, 3, 3, 4);
        let m = build_d(&a)?;
        let total = [Order::Plain, Order::Star]
            .iter()
            .all(|&o| total_order_violation(&m, o).is_none());
        let edges = m.digraph().edges();
        let count = rng.range(1, 4.min(edges.len()));
        let mut c = Vec::new();
        let mut d = Vec::new();
        for _ in 0..count {
            let (u, v) = *rng.choose(edges);
            c.push(u);
            d.push(v);
        }
        c.sort_unstable();
        c.dedup();
        d.sort_unstable();
        d.dedup();
        let (p, q) = extremes_adjacent(&m, &c, &d);
        let ok = total && p != Some(false) && q != Some(false);
        Ok((
            ok,
            format!("{} total={total} min={p:?} max={q:?}", shape(&a)),
        ))
    })
}

/// `in_delta` against search in the square, on `D(A)` with at most 24
/// vertices; the first trials use the small fixtures.
pub fn delta(seed: u64, trials: usize) -> SuiteReport {
    let mut fixture = vec![fixtures::two_cycle(), fixtures::single_edge()].into_iter();
    run_trials("delta", seed, trials, |rng| {
        let a = match fixture.next() {
            Some(a) => a,
            None => loop {
                let a = gen::template(rng, 3, 3, 3);
                if build_d(&a)?.len() <= 24 {
                    break a;
                }
            },
        };
        let m = build_d(&a)?;
        let bad = delta2_mismatches(&m);
        Ok((
            bad.is_empty(),
            format!("{} |D|={} mismatches={}", shape(&a), m.len(), bad.len()),
        ))
    })
}

fn zigzag_witnesses(system: &str) -> Vec<OpTable> {
    let rename = |mut t: OpTable, n: &str| {
        t.name = n.into();
        t
    };
    match system {
        "majority" => vec![rename(zz_median(), "m")],
        "wnu3" => vec![rename(zz_allmin(3), "w")],
        _ => vec![zz_p1(), zz_p2()],
    }
}

/// Lifts template witnesses of a rotating identity system and verifies the
/// lift exhaustively. Trials whose template has no witnesses are skipped
/// and say so.
pub fn lift(seed: u64, trials: usize) -> SuiteReport {
    let systems = [
        ("majority", fixtures::MAJORITY),
        ("wnu3", fixtures::WNU3),
        ("3-permutable", fixtures::PERMUTABLE3),
    ];
    let mut turn = 0;
    run_trials("lift", seed, trials, |rng| {
        let (name, text) = systems[turn % systems.len()];
        turn += 1;
        let a = gen::template(rng, 3, 3, 3);
        let sigma = parse_identities(text)?;
        let Some(fa) = find_operations(&a, &sigma)? else {
            return Ok((
                true,
                format!("{} {name} skipped: no template witnesses", shape(&a)),
            ));
        };
        let m = build_d(&a)?;
        let (_, report) = lift_all(&m, &sigma, &fa, Some(&zigzag_witnesses(name)))?;
        let tuples: u64 = report.symbols.iter().map(|s| s.edge_tuples).sum();
        Ok((
            report.ok(),
            format!("{} {name} |D|={} edge-tuples={tuples}", shape(&a), m.len()),
        ))
    })
}

/// Endomorphisms of `A` and `D(A)` are in bijection through lifting and
/// restriction.
pub fn endo(seed: u64, trials: usize) -> SuiteReport {
    let mut fixture = vec![fixtures::two_cycle()].into_iter();
    run_trials("endo", seed, trials, |rng| {
        let a = fixture
            .next()
            .unwrap_or_else(|| gen::template(rng, 3, 2, 3));
        let m = build_d(&a)?;
        let small = endomorphisms(&a)?;
        let big = endomorphisms(&m.digraph().to_structure())?;
        let mut ok = small.len() == big.len();
        for phi in &small {
            let l = lift_endomorphism(&m, phi)?;
            ok &= big.contains(&l) && &restrict_endomorphism(&m, &l)? == phi;
        }
        for b in &big {
            ok &= &lift_endomorphism(&m, &restrict_endomorphism(&m, b)?)? == b;
        }
        Ok((
            ok,
            format!(
                "{} |End(A)|={} |End(D)|={}",
                shape(&a),
                small.len(),
                big.len()
            ),
        ))
    })
}

/// `A` is a core exactly when `D(A)` is.
pub fn core(seed: u64, trials: usize) -> SuiteReport {
    let mut fixture = vec![fixtures::two_cycle()].into_iter();
    run_trials("core", seed, trials, |rng| {
        let a = fixture
            .next()
            .unwrap_or_else(|| gen::template(rng, 3, 2, 3));
        let m = build_d(&a)?;
        let small = is_core(&a)?;
        let big = is_core(&m.digraph().to_structure())?;
        Ok((
            small == big,
            format!("{} core(A)={small} core(D)={big}", shape(&a)),
        ))
    })
}
