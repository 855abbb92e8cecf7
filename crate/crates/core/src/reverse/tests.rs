use super::*;
use crate::dbuild::{build_d, build_path, PathSpec};
use crate::forward::forward_instance;
use crate::model::Positions;

fn two_cycle() -> Structure {
    Structure::single(2, 2, vec![vec![0, 1], vec![1, 0]]).unwrap()
}

fn spec(k: usize, items: &[usize]) -> PathSpec {
    PathSpec::new(
        k,
        Positions::from_iter_checked(k, items.iter().copied()).unwrap(),
    )
    .unwrap()
}

fn full_levels(g: &Digraph) -> LevelAssignment {
    let all: Vec<usize> = (0..g.len()).collect();
    assign_levels(g, &all).unwrap()
}

#[test]
fn path_has_one_internal_component() {
    for items in [&[][..], &[1], &[2], &[1, 2]] {
        let s = spec(2, items);
        let q = build_path(s);
        let l = full_levels(&q);
        let mut cs = internal_components(&q, &l, 4, 0);
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].base, vec![0]);
        assert_eq!(cs[0].top, vec![q.len() - 1]);
        cs[0].gamma = gamma(&q, &l, &cs[0], 2).unwrap();
        assert_eq!(cs[0].gamma, s.singles);

        let obj = build_objects(q.vertices(), &[0], &[q.len() - 1], &cs, 2);
        assert_eq!(obj.type1.len(), 1);
        assert!(obj.type2.is_empty() && obj.type3.is_empty() && obj.type4.is_empty());
        for i in 1..=2 {
            let v = &obj.type1[0].sets[i - 1];
            if s.singles.contains(i) {
                assert_eq!(v, &vec![0]);
            } else {
                assert_eq!(
                    obj.x[v[0]],
                    XVertex::Gamma {
                        top: q.len() - 1,
                        i
                    }
                );
            }
        }
        let part = sim_closure(&obj).unwrap();
        assert!(part.nontrivial_classes().is_empty());
        let b = assemble_b(&obj, &part, "B", "R").unwrap();
        assert_eq!(b.size(), 1 + 2 - s.singles.len());
        assert_eq!(b.relations()[0].tuples.len(), 1);
    }
}

#[test]
fn d_of_two_cycle_has_four_internal_components() {
    let m = build_d(&two_cycle()).unwrap();
    let g = m.digraph();
    let l = full_levels(g);
    assert_eq!(internal_components(g, &l, 4, 0).len(), 4);
}

#[test]
fn base_only_component() {
    // b -> v with v at level 1, plus a separate full path so the height is n
    let q = build_path(spec(1, &[]));
    let mut names: Vec<String> = q.vertices().to_vec();
    names.push("b".into());
    names.push("v".into());
    let mut edges = q.edges().to_vec();
    let b = q.len();
    edges.push((b, b + 1));
    // attach b to the path's ι through a level-1 vertex so the whole thing is connected
    edges.push((0, b + 1));
    let g = Digraph::new("G", names, edges).unwrap();
    let l = full_levels(&g);
    assert_eq!(l.height, 3);
    let cs = internal_components(&g, &l, 3, 0);
    let lone = cs.iter().find(|c| c.vertices == vec![b + 1]).unwrap();
    assert_eq!(lone.base, vec![0, b]);
    assert!(lone.top.is_empty());
    assert!(gamma(&g, &l, lone, 1).unwrap().is_empty());
}

fn descriptor(id: usize, base: &[usize], top: &[usize], gamma: &[usize]) -> InternalComponent {
    InternalComponent {
        id,
        vertices: Vec::new(),
        base: base.to_vec(),
        top: top.to_vec(),
        gamma: Positions::from_iter_checked(2, gamma.iter().copied()).unwrap(),
        height: 0,
    }
}

#[test]
fn topless_component_object() {
    let names: Vec<String> = vec!["b".into()];
    let c = descriptor(0, &[0], &[], &[2]);
    let obj = build_objects(&names, &[0], &[], &[c], 2);
    assert_eq!(obj.type2.len(), 1);
    let sets = &obj.type2[0].sets;
    assert_eq!(obj.x_names[sets[0][0]], "xa:0:b:1");
    assert_eq!(obj.x_names[sets[1][0]], "b");
}

#[test]
fn shared_top_pair_gives_top_edge() {
    let names: Vec<String> = ["b", "e", "f"].iter().map(|s| s.to_string()).collect();
    let cs = [
        descriptor(0, &[0], &[1, 2], &[1]),
        descriptor(1, &[], &[1, 2], &[]),
    ];
    let obj = build_objects(&names, &[0], &[1, 2], &cs, 2);
    assert_eq!(obj.type3, vec![(1, 2)]);
}

#[test]
fn shared_base_merges_positions() {
    let names: Vec<String> = ["b", "c", "e", "f"].iter().map(|s| s.to_string()).collect();
    let cs = [
        descriptor(0, &[0], &[2], &[1]),
        descriptor(1, &[0], &[3], &[1]),
        descriptor(2, &[1], &[3], &[1]),
    ];
    let obj = build_objects(&names, &[0, 1], &[2, 3], &cs, 2);
    let part = sim_closure(&obj).unwrap();
    assert_eq!(part.rep[1], 0);
}

/// The worked example: six base vertices, four tops, internal components
/// given by their base, top and position sets.
#[test]
fn worked_example_objects_blocks_and_hyperedges() {
    let names: Vec<String> = ["b1", "b2", "b3", "b4", "b5", "b6", "e1", "e2", "e3", "e4"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let (b, e) = (|i: usize| i - 1, |i: usize| 5 + i);
    let cs = vec![
        descriptor(1, &[], &[e(1), e(2)], &[]),
        descriptor(2, &[b(2)], &[e(2)], &[1]),
        descriptor(3, &[b(3)], &[e(2)], &[2]),
        descriptor(4, &[b(2)], &[e(3)], &[1]),
        descriptor(5, &[b(4)], &[e(3)], &[1]),
        descriptor(6, &[b(4)], &[e(4)], &[1]),
        descriptor(7, &[], &[e(4)], &[1]),
        descriptor(8, &[b(1)], &[], &[2]),
        descriptor(9, &[b(4), b(5)], &[], &[]),
        descriptor(11, &[b(5), b(6)], &[], &[1]),
    ];
    let ground: Vec<usize> = (0..6).collect();
    let tops: Vec<usize> = (6..10).collect();
    let obj = build_objects(&names, &ground, &tops, &cs, 2);

    let x1 = "xg:e1:1";
    let x2 = "xg:e1:2";
    let x3 = "xg:e3:2";
    let x4 = "xb:7:e4:1";
    let x5 = "xg:e4:2";
    let show = |sets: &Vec<Vec<usize>>| -> Vec<Vec<&str>> {
        sets.iter()
            .map(|v| v.iter().map(|&y| obj.x_names[y].as_str()).collect())
            .collect()
    };
    let t1: Vec<(&str, Vec<Vec<&str>>)> = obj
        .type1
        .iter()
        .map(|o| (names[o.top].as_str(), show(&o.sets)))
        .collect();
    assert_eq!(
        t1,
        vec![
            ("e1", vec![vec![x1], vec![x2]]),
            ("e2", vec![vec!["b2"], vec!["b3"]]),
            ("e3", vec![vec!["b2", "b4"], vec![x3]]),
            ("e4", vec![vec!["b4", x4], vec![x5]]),
        ]
    );
    let t2: Vec<(&str, Vec<Vec<&str>>)> = obj
        .type2
        .iter()
        .map(|o| (names[o.base].as_str(), show(&o.sets)))
        .collect();
    assert_eq!(
        t2,
        vec![
            ("b1", vec![vec!["xa:8:b1:1"], vec!["b1"]]),
            ("b4", vec![vec!["xa:9:b4:1"], vec!["xa:9:b4:2"]]),
            ("b5", vec![vec!["xa:9:b5:1"], vec!["xa:9:b5:2"]]),
            ("b5", vec![vec!["b5"], vec!["xa:11:b5:2"]]),
            ("b6", vec![vec!["b6"], vec!["xa:11:b6:2"]]),
        ]
    );
    assert_eq!(obj.type3, vec![(e(1), e(2))]);
    assert_eq!(obj.type4, vec![(b(4), b(5)), (b(5), b(6))]);

    let part = sim_closure(&obj).unwrap();
    let blocks: Vec<Vec<&str>> = part
        .nontrivial_classes()
        .iter()
        .map(|c| c.iter().map(|&y| obj.x_names[y].as_str()).collect())
        .collect();
    assert_eq!(
        blocks,
        vec![vec!["b2", "b4", "b5", "b6", x4, x1], vec!["b3", x2]]
    );

    // Hyperedges in output order, repeats included.
    let hyper: Vec<Vec<&str>> = obj
        .type1
        .iter()
        .map(|o| &o.sets)
        .chain(obj.type2.iter().map(|o| &o.sets))
        .map(|sets| {
            sets.iter()
                .map(|v| obj.x_names[part.rep[v[0]]].as_str())
                .collect()
        })
        .collect();
    assert_eq!(
        hyper,
        vec![
            vec!["b2", "b3"],
            vec!["b2", "b3"],
            vec!["b2", x3],
            vec!["b2", x5],
            vec!["xa:8:b1:1", "b1"],
            vec!["xa:9:b4:1", "xa:9:b4:2"],
            vec!["xa:9:b5:1", "xa:9:b5:2"],
            vec!["b2", "xa:11:b5:2"],
            vec!["b2", "xa:11:b6:2"],
        ]
    );
    let b_out = assemble_b(&obj, &part, "B", "R").unwrap();
    assert_eq!(b_out.relations()[0].tuples.len(), 8);
}

#[test]
fn unbalanced_gives_fixed_no() {
    let m = build_d(&two_cycle()).unwrap();
    let g = Digraph::anonymous(3, vec![(0, 1), (1, 0)]).unwrap();
    let out = reverse_instance(&g, &m).unwrap();
    assert_eq!(out.shortcut, Shortcut::FixedNo);
    assert_eq!(out.instance.domain(), &["no".to_string()]);
    assert_eq!(out.instance.relations()[0].tuples, vec![vec![0, 0]]);
}

#[test]
fn single_vertex_gives_fixed_yes() {
    let m = build_d(&two_cycle()).unwrap();
    let g = Digraph::anonymous(1, vec![]).unwrap();
    let out = reverse_instance(&g, &m).unwrap();
    assert_eq!(out.shortcut, Shortcut::FixedYes);
    assert_eq!(out.instance.size(), 2);
}

#[test]
fn trivial_template_is_rejected() {
    let a = Structure::single(2, 2, vec![vec![0, 0], vec![0, 1]]).unwrap();
    let m = build_d(&a).unwrap();
    let g = Digraph::anonymous(1, vec![]).unwrap();
    assert!(matches!(
        reverse_instance(&g, &m),
        Err(Error::TrivialTemplate(_))
    ));
}

#[test]
fn round_trip_through_forward() {
    use crate::solver::hom_exists;
    let a = two_cycle();
    let m = build_d(&a).unwrap();
    let xs = [
        vec![vec![0, 1]],
        vec![vec![0, 1], vec![1, 2]],
        vec![vec![0, 1], vec![1, 2], vec![2, 0]],
        vec![vec![0, 0]],
    ];
    for tuples in xs {
        let x =
            Structure::with_indices("X", Role::Instance, 3, vec![Relation::new("R", 2, tuples)])
                .unwrap();
        let g = forward_instance(&x, 2).unwrap();
        let b = reverse_instance(&g, &m).unwrap().instance;
        assert_eq!(hom_exists(&x, &a).unwrap(), hom_exists(&b, &a).unwrap());
        assert_eq!(
            hom_exists(&g.to_structure(), &m.digraph().to_structure()).unwrap(),
            hom_exists(&b, &a).unwrap()
        );
    }
}
