use std::collections::BTreeMap;

use proptest::prelude::*;
use tautforms::dsl::{eval, parse, EvalOptions};
use tautforms::{MarkedGraph, Poly, TautExpr};

fn poly() -> impl Strategy<Value = Poly> {
    let term = (-5i64..=5, 0u32..=2, 0u32..=2)
        .prop_map(|(c, a, b)| Poly::int(c) * Poly::var("g").pow(a) * Poly::var("n").pow(b));
    prop::collection::vec(term, 0..4)
        .prop_map(|ts| ts.into_iter().fold(Poly::zero(), |acc, t| acc + t))
}

fn graph(max_r: usize) -> impl Strategy<Value = MarkedGraph> {
    (0..=max_r, 0usize..=4).prop_flat_map(|(r, u)| {
        let n = (r + u).max(1);
        let u = if r + u == 0 { 1 } else { u };
        prop::collection::vec((1..=n, 1..=n), 0..6)
            .prop_map(move |edges| MarkedGraph::new(r, u, edges).unwrap())
    })
}

fn expr() -> impl Strategy<Value = TautExpr> {
    (0usize..=3).prop_flat_map(|r| {
        let term = (
            0usize..=3,
            prop::collection::vec((1usize..=6, 1usize..=6), 0..5),
            poly(),
        )
            .prop_map(move |(u, raw, c)| {
                let n = r + u;
                let edges: Vec<_> = if n == 0 {
                    vec![]
                } else {
                    raw.into_iter()
                        .map(|(a, b)| ((a - 1) % n + 1, (b - 1) % n + 1))
                        .collect()
                };
                TautExpr::from_term(&MarkedGraph::new(r, u, edges).unwrap(), c)
            });
        prop::collection::vec(term, 0..4).prop_map(move |ts| {
            ts.into_iter()
                .fold(TautExpr::zero(r), |acc, t| acc.add(&t).unwrap())
        })
    })
}

proptest! {
    #[test]
    fn poly_ring_laws(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Poly::one(), a.clone());
    }

    #[test]
    fn substitution_is_a_ring_map(a in poly(), b in poly(), s in poly()) {
        let mut m = BTreeMap::new();
        m.insert("g".to_string(), s);
        prop_assert_eq!((&a + &b).substitute(&m), &a.substitute(&m) + &b.substitute(&m));
        prop_assert_eq!((&a * &b).substitute(&m), &a.substitute(&m) * &b.substitute(&m));
    }

    #[test]
    fn degree_sum_is_twice_edges(g in graph(3)) {
        let total: usize = (1..=g.vertex_count()).map(|v| g.degree(v).unwrap()).sum();
        prop_assert_eq!(total, 2 * g.edge_count());
    }

    #[test]
    fn induced_graph_keeps_edges(g in graph(3), seed in any::<u64>()) {
        let n = g.vertex_count();
        let target = n.max(1);
        let map: Vec<usize> = (0..n).map(|i| ((seed >> (i % 32)) as usize + i) % target + 1).collect();
        let h = g.induced_graph(target, &map).unwrap();
        prop_assert_eq!(h.edge_count(), g.edge_count());
    }

    #[test]
    fn parse_of_render_is_identity(x in expr()) {
        let text = x.to_dsl();
        let back = eval(&parse(&text).unwrap(), &EvalOptions::default()).unwrap();
        prop_assert_eq!(back, x, "{}", text);
    }
}
