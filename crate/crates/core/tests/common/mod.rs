//! Brute-force reference implementations, written without the library's graph code.

#![allow(dead_code)]

use std::collections::BTreeSet;

/// Edge multiset as a sorted list of `(a, b)` with `a <= b`; vertices `1..=r` are marked.
pub type Edges = Vec<(usize, usize)>;

pub fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Least edge list over all relabelings of the unmarked vertices.
pub fn naive_canon(r: usize, u: usize, edges: &[(usize, usize)]) -> (usize, usize, Edges) {
    let unmarked: Vec<usize> = (r + 1..=r + u).collect();
    let mut best: Option<Edges> = None;
    for p in permutations(&unmarked) {
        let f = |v: usize| if v <= r { v } else { p[v - r - 1] };
        let mut e: Edges = edges
            .iter()
            .map(|&(a, b)| (f(a).min(f(b)), f(a).max(f(b))))
            .collect();
        e.sort_unstable();
        if best.as_ref().is_none_or(|b| e < *b) {
            best = Some(e);
        }
    }
    (r, u, best.unwrap_or_default())
}

pub fn naive_isomorphic(r: usize, u: usize, a: &[(usize, usize)], b: &[(usize, usize)]) -> bool {
    naive_canon(r, u, a) == naive_canon(r, u, b)
}

/// Unmarked vertices have degree >= 3 (a loop counts twice) and a degree-3 one carries no loop.
pub fn naive_contracted(r: usize, u: usize, edges: &[(usize, usize)]) -> bool {
    (r + 1..=r + u).all(|v| {
        let deg: usize = edges
            .iter()
            .map(|&(a, b)| usize::from(a == v) + usize::from(b == v))
            .sum();
        let looped = edges.iter().any(|&(a, b)| a == v && b == v);
        deg > 3 || (deg == 3 && !looped)
    })
}

fn multisets(
    pairs: &[(usize, usize)],
    k: usize,
    from: usize,
    cur: &mut Edges,
    out: &mut impl FnMut(&Edges),
) {
    if k == 0 {
        out(cur);
        return;
    }
    for i in from..pairs.len() {
        cur.push(pairs[i]);
        multisets(pairs, k - 1, i, cur, out);
        cur.pop();
    }
}

/// Isomorphism classes of contracted graphs with `r` marks and Euler characteristic `r - d`,
/// found by listing every edge multiset on up to `r + 2d` vertices.
pub fn brute_force_classes(r: usize, d: usize) -> BTreeSet<(usize, usize, Edges)> {
    let mut classes = BTreeSet::new();
    for u in 0..=2 * d {
        let n = r + u;
        let pairs: Vec<(usize, usize)> =
            (1..=n).flat_map(|a| (a..=n).map(move |b| (a, b))).collect();
        let e = d + u;
        multisets(&pairs, e, 0, &mut Vec::new(), &mut |edges| {
            if naive_contracted(r, u, edges) {
                classes.insert(naive_canon(r, u, edges));
            }
        });
    }
    classes
}
