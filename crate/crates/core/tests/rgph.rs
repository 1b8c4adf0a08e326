use cohtt::rgph::{
    adjunction_suite, check_interval_axioms, delta, enumerate_homs, gamma, hom_count, nabla, pi0,
    FinRGph,
};
use proptest::prelude::*;

/// Components by depth-first search over edges taken in both directions.
fn components_by_search(g: &FinRGph) -> usize {
    let n = g.vertices();
    let mut seen = vec![false; n];
    let mut count = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in g.edges() {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
    }
    count
}

fn graph(max: usize) -> impl Strategy<Value = FinRGph> {
    (0..=max).prop_flat_map(|n| {
        let pairs = if n == 0 {
            Just(Vec::new()).boxed()
        } else {
            proptest::collection::vec((0..n, 0..n), 0..8).boxed()
        };
        pairs.prop_map(move |es| FinRGph::new(n, es))
    })
}

proptest! {
    #[test]
    fn pi0_agrees_with_search(g in graph(7)) {
        prop_assert_eq!(pi0(&g), components_by_search(&g));
    }

    #[test]
    fn maps_into_codiscrete_are_all_functions(g in graph(5), k in 0usize..4) {
        prop_assert_eq!(hom_count(&g, &nabla(k)).unwrap(), k.pow(g.vertices() as u32));
    }

    #[test]
    fn maps_into_discrete_are_constant_on_components(g in graph(5), k in 0usize..4) {
        prop_assert_eq!(hom_count(&g, &delta(k)).unwrap(), k.pow(components_by_search(&g) as u32));
    }

    #[test]
    fn maps_from_discrete_are_all_functions(g in graph(5), k in 0usize..4) {
        prop_assert_eq!(hom_count(&delta(k), &g).unwrap(), gamma(&g).pow(k as u32));
    }

    #[test]
    fn product_is_a_product(x in graph(3), g in graph(3), h in graph(3)) {
        let both = hom_count(&x, &g.product(&h)).unwrap();
        prop_assert_eq!(both, hom_count(&x, &g).unwrap() * hom_count(&x, &h).unwrap());
    }

    #[test]
    fn sum_is_a_coproduct(g in graph(3), h in graph(3), k in graph(3)) {
        let both = hom_count(&g.disjoint_union(&h), &k).unwrap();
        prop_assert_eq!(both, hom_count(&g, &k).unwrap() * hom_count(&h, &k).unwrap());
        prop_assert_eq!(pi0(&g.disjoint_union(&h)), pi0(&g) + pi0(&h));
    }

    #[test]
    fn homs_compose(g in graph(3), h in graph(3), k in graph(3)) {
        for f in enumerate_homs(&g, &h).unwrap() {
            for f2 in enumerate_homs(&h, &k).unwrap() {
                prop_assert!(f.then(&f2).is_hom(&g, &k));
            }
        }
    }
}

#[test]
fn homs_are_listed_in_order() {
    let w = FinRGph::walking_edge();
    let maps: Vec<Vec<usize>> = enumerate_homs(&w, &w)
        .unwrap()
        .into_iter()
        .map(|h| h.map)
        .collect();
    assert_eq!(maps, [vec![0, 0], vec![0, 1], vec![1, 1]]);
}

#[test]
fn adjunctions_hold_on_all_small_graphs() {
    let report = adjunction_suite(4, 3);
    assert!(report.passed(), "{report}");
    assert_eq!(report.checks.len(), 5);
}

#[test]
fn walking_edge_is_an_interval() {
    let r = check_interval_axioms(&FinRGph::walking_edge(), 0, 1, &[1, 2, 3]);
    assert!(r.passed(), "{r}");
}

#[test]
fn two_points_are_not_connected() {
    let r = check_interval_axioms(&delta(2), 0, 1, &[2]);
    assert!(!r.passed());
    let fail = r.first_failure().unwrap();
    assert_eq!(fail.name, "connected into delta(2)");
    assert_eq!(fail.detail, "non-constant hom [0->0, 1->1]");
}
