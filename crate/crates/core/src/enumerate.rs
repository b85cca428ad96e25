//! Generation of contracted r-marked graphs of a given Euler characteristic, one per
//! isomorphism class.
//!
//! A contracted graph with `chi = r - d` has `u <= 2d` unmarked vertices and exactly
//! `e = d + u` edges, since `2e >= 3u`. For each `u` we distribute `e` edges over the
//! vertex-pair slots and keep the contracted ones, deduplicating by canonical key.

use std::collections::BTreeMap;

use crate::graphs::{CanonicalKey, MarkedGraph};

/// All contracted `r`-marked graphs with `chi = r - d`, sorted by canonical key.
pub fn enumerate_contracted(r: usize, d: usize) -> Vec<MarkedGraph> {
    let mut found: BTreeMap<CanonicalKey, MarkedGraph> = BTreeMap::new();
    for u in 0..=2 * d {
        let n = r + u;
        let slots: Vec<(usize, usize)> =
            (1..=n).flat_map(|a| (a..=n).map(move |b| (a, b))).collect();
        let mut search = Search {
            r,
            u,
            slots: &slots,
            mult: vec![0; slots.len()],
            degree: vec![0; n + 1],
            found: &mut found,
        };
        search.run(0, d + u);
    }
    found.into_values().collect()
}

pub fn count_contracted(r: usize, d: usize) -> usize {
    enumerate_contracted(r, d).len()
}

/// Counts for `r in 0..=max_r` (rows) and `d in 0..=max_d` (columns).
pub fn count_table(max_r: usize, max_d: usize) -> Vec<Vec<usize>> {
    (0..=max_r)
        .map(|r| (0..=max_d).map(|d| count_contracted(r, d)).collect())
        .collect()
}

struct Search<'a> {
    r: usize,
    u: usize,
    slots: &'a [(usize, usize)],
    mult: Vec<usize>,
    degree: Vec<usize>,
    found: &'a mut BTreeMap<CanonicalKey, MarkedGraph>,
}

impl Search<'_> {
    /// Degree still missing on unmarked vertices; one edge closes at most 2 of it.
    fn deficit(&self) -> usize {
        (self.r + 1..=self.r + self.u)
            .map(|v| 3usize.saturating_sub(self.degree[v]))
            .sum()
    }

    fn run(&mut self, slot: usize, remaining: usize) {
        if self.deficit() > 2 * remaining {
            return;
        }
        if remaining == 0 {
            self.emit();
            return;
        }
        if slot == self.slots.len() {
            return;
        }
        let (a, b) = self.slots[slot];
        for k in (0..=remaining).rev() {
            self.mult[slot] = k;
            self.degree[a] += k;
            self.degree[b] += k;
            self.run(slot + 1, remaining - k);
            self.degree[a] -= k;
            self.degree[b] -= k;
        }
        self.mult[slot] = 0;
    }

    fn emit(&mut self) {
        let unmarked = &self.degree[self.r + 1..];
        // every class has a representative with non-increasing unmarked degrees
        if unmarked.windows(2).any(|w| w[0] < w[1]) {
            return;
        }
        let edges: BTreeMap<(usize, usize), usize> = self
            .slots
            .iter()
            .zip(&self.mult)
            .filter(|(_, &k)| k > 0)
            .map(|(&s, &k)| (s, k))
            .collect();
        let g = MarkedGraph::from_map(self.r, self.u, edges);
        if !g.is_contracted() {
            return;
        }
        let (canon, key) = g.canonical_form();
        self.found.entry(key).or_insert(canon);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(r: usize, u: usize, edges: &[(usize, usize)]) -> MarkedGraph {
        MarkedGraph::new(r, u, edges.iter().copied()).unwrap()
    }

    #[test]
    fn degree_two_forms_on_moduli_space() {
        let list = enumerate_contracted(0, 1);
        assert_eq!(list.len(), 2);
        let theta = graph(0, 2, &[(1, 2), (1, 2), (1, 2)]);
        let two_loops = graph(0, 1, &[(1, 1), (1, 1)]);
        assert!(list.iter().any(|g| g.is_isomorphic(&theta).unwrap()));
        assert!(list.iter().any(|g| g.is_isomorphic(&two_loops).unwrap()));
    }

    #[test]
    fn small_counts() {
        assert_eq!(count_contracted(0, 0), 1);
        assert_eq!(count_contracted(1, 1), 3);
        assert_eq!(count_contracted(2, 1), 5);
        assert_eq!(count_contracted(3, 0), 1);
    }

    #[test]
    fn output_is_sorted_contracted_and_distinct() {
        let list = enumerate_contracted(2, 2);
        let keys: Vec<_> = list.iter().map(MarkedGraph::canonical_key).collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(list
            .iter()
            .all(|g| g.is_contracted() && g.euler_char() == 0));
    }

    #[test]
    fn table_shape() {
        let t = count_table(2, 1);
        assert_eq!(t, vec![vec![1, 2], vec![1, 3], vec![1, 5]]);
    }
}
