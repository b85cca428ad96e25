//! r-marked multigraphs.
//!
//! Vertices are numbered `1..=r+u`: ids `1..=r` are the marked vertices (mark `i` sits on
//! vertex `i`), ids `r+1..=r+u` are unmarked. Edges form a multiset of unordered pairs,
//! stored as `(min, max) -> multiplicity`; a loop is a pair `(v, v)` and adds 2 to the
//! degree of `v`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex id {id} out of range 1..={max}")]
    VertexOutOfRange { id: usize, max: usize },
    #[error("vertex map has length {got}, expected {expected}")]
    MapNotTotal { expected: usize, got: usize },
    #[error("marking mismatch: {left}-marked vs {right}-marked")]
    MarkMismatch { left: usize, right: usize },
    #[error("vertex {0} is marked")]
    MarkedVertex(usize),
    #[error("vertex {id} of degree {degree} cannot be contracted")]
    NotContractible { id: usize, degree: usize },
    #[error("map {0:?} is not injective")]
    NotInjective(Vec<usize>),
    #[error("map value {value} out of range 1..={target}")]
    MapOutOfRange { value: usize, target: usize },
    #[error("malformed graph JSON: {0}")]
    Json(String),
}

/// An r-marked multigraph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct MarkedGraph {
    r: usize,
    u: usize,
    edges: BTreeMap<(usize, usize), usize>,
}

/// Isomorphism-class fingerprint: `[r, u, |E|, a1, b1, k1, a2, b2, k2, ...]` for the
/// lexicographically least edge listing over relabelings of the unmarked vertices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(Vec<u32>);

impl CanonicalKey {
    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

fn norm(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl MarkedGraph {
    /// Builds a graph from an edge list, rejecting ids outside `1..=r+u`.
    pub fn new<I>(r: usize, u: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = r + u;
        let mut map = BTreeMap::new();
        for (a, b) in edges {
            for id in [a, b] {
                if id == 0 || id > n {
                    return Err(GraphError::VertexOutOfRange { id, max: n });
                }
            }
            *map.entry(norm(a, b)).or_insert(0) += 1;
        }
        Ok(MarkedGraph { r, u, edges: map })
    }

    /// Internal constructor for ids already known to be in range.
    pub(crate) fn from_map(r: usize, u: usize, edges: BTreeMap<(usize, usize), usize>) -> Self {
        debug_assert!(edges.keys().all(|&(a, b)| 1 <= a && a <= b && b <= r + u));
        debug_assert!(edges.values().all(|&k| k > 0));
        MarkedGraph { r, u, edges }
    }

    /// The empty graph on `r` marks: the unit of gluing.
    pub fn bare(r: usize) -> Self {
        MarkedGraph {
            r,
            u: 0,
            edges: BTreeMap::new(),
        }
    }

    pub fn unit() -> Self {
        MarkedGraph::bare(0)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn vertex_count(&self) -> usize {
        self.r + self.u
    }

    pub fn edge_count(&self) -> usize {
        self.edges.values().sum()
    }

    /// `(a, b, multiplicity)` with `a <= b`, in increasing order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.edges.iter().map(|(&(a, b), &k)| (a, b, k))
    }

    pub(crate) fn edge_map(&self) -> &BTreeMap<(usize, usize), usize> {
        &self.edges
    }

    /// Edge list with repetitions, e.g. `[(1,2),(1,2)]` for a double edge.
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        self.edges()
            .flat_map(|(a, b, k)| std::iter::repeat_n((a, b), k))
            .collect()
    }

    pub fn multiplicity(&self, a: usize, b: usize) -> usize {
        self.edges.get(&norm(a, b)).copied().unwrap_or(0)
    }

    pub fn is_marked(&self, v: usize) -> bool {
        (1..=self.r).contains(&v)
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v == 0 || v > self.vertex_count() {
            Err(GraphError::VertexOutOfRange {
                id: v,
                max: self.vertex_count(),
            })
        } else {
            Ok(())
        }
    }

    /// `|V| - |E|`.
    pub fn euler_char(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64
    }

    /// Real degree `2(r - chi)` of the associated form.
    pub fn form_degree(&self) -> i64 {
        2 * (self.r as i64 - self.euler_char())
    }

    pub fn degree(&self, v: usize) -> Result<usize, GraphError> {
        self.check_vertex(v)?;
        Ok(self.degree_unchecked(v))
    }

    pub(crate) fn degree_unchecked(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|(&(a, b), &k)| (usize::from(a == v) + usize::from(b == v)) * k)
            .sum()
    }

    pub fn loops_at(&self, v: usize) -> usize {
        self.multiplicity(v, v)
    }

    /// Number of edges incident to `v`, a loop counting once.
    pub fn incident_edges(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|(&(a, b), _)| a == v || b == v)
            .map(|(_, &k)| k)
            .sum()
    }

    /// Every unmarked vertex has degree at least 3, and degree exactly 3 only with three
    /// distinct incident edges (no loop).
    pub fn is_contracted(&self) -> bool {
        (self.r + 1..=self.vertex_count()).all(|v| {
            let d = self.degree_unchecked(v);
            d >= 4 || (d == 3 && self.loops_at(v) == 0)
        })
    }

    /// The graph induced by a vertex map `map[v-1] = f(v)` into `1..=target` vertices.
    /// The result carries no marking.
    pub fn induced_graph(&self, target: usize, map: &[usize]) -> Result<MarkedGraph, GraphError> {
        if map.len() != self.vertex_count() {
            return Err(GraphError::MapNotTotal {
                expected: self.vertex_count(),
                got: map.len(),
            });
        }
        if let Some(&bad) = map.iter().find(|&&x| x == 0 || x > target) {
            return Err(GraphError::VertexOutOfRange {
                id: bad,
                max: target,
            });
        }
        Ok(self.relabeled(0, target, |v| map[v - 1]))
    }

    /// Applies a vertex relabeling; callers guarantee range validity.
    pub(crate) fn relabeled<F>(&self, r: usize, n: usize, f: F) -> MarkedGraph
    where
        F: Fn(usize) -> usize,
    {
        let mut edges = BTreeMap::new();
        for (&(a, b), &k) in &self.edges {
            *edges.entry(norm(f(a), f(b))).or_insert(0) += k;
        }
        MarkedGraph::from_map(r, n - r, edges)
    }

    /// Lexicographically least relabeling of the unmarked vertices and its key.
    pub fn canonical_form(&self) -> (MarkedGraph, CanonicalKey) {
        canon::canonical_form(self)
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        self.canonical_form().1
    }

    /// Isomorphism of r-marked graphs: a bijection fixing every mark.
    pub fn is_isomorphic(&self, other: &MarkedGraph) -> Result<bool, GraphError> {
        if self.r != other.r {
            return Err(GraphError::MarkMismatch {
                left: self.r,
                right: other.r,
            });
        }
        Ok(self.canonical_key() == other.canonical_key())
    }

    pub fn to_json_value(&self) -> GraphJson {
        GraphJson {
            r: self.r,
            u: self.u,
            edges: self.edge_list().into_iter().map(|(a, b)| [a, b]).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("graph serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let raw: GraphJson =
            serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
        MarkedGraph::try_from(raw)
    }

    /// Graphviz rendering: marked vertices labeled by their index, unmarked as points.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph {name} {{");
        for v in 1..=self.vertex_count() {
            if self.is_marked(v) {
                let _ = writeln!(out, "  v{v} [label=\"{v}\", shape=circle];");
            } else {
                let _ = writeln!(out, "  v{v} [label=\"\", shape=point];");
            }
        }
        for (a, b) in self.edge_list() {
            let _ = writeln!(out, "  v{a} -- v{b};");
        }
        out.push_str("}\n");
        out
    }
}

/// Wire form `{"r": .., "u": .., "edges": [[a,b], ...]}` with `a <= b` and repeated pairs
/// for multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub r: usize,
    pub u: usize,
    pub edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphJson> for MarkedGraph {
    type Error = GraphError;

    fn try_from(raw: GraphJson) -> Result<Self, GraphError> {
        MarkedGraph::new(raw.r, raw.u, raw.edges.into_iter().map(|[a, b]| (a, b)))
    }
}

impl fmt::Display for MarkedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r={} u={} {{", self.r, self.u)?;
        for (k, (a, b)) in self.edge_list().into_iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}-{b}")?;
        }
        write!(f, "}}")
    }
}

mod canon {
    use super::*;

    /// Isomorphism-invariant colouring of the unmarked vertices by iterated refinement.
    /// Colour `c` of vertex `r+1+i` is `colors[i]`, and colours are dense indices whose
    /// order depends only on the isomorphism class.
    fn refine(g: &MarkedGraph) -> Vec<usize> {
        let (r, u) = (g.r, g.u);
        let mut nbrs: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); r + u + 1];
        for (&(a, b), &k) in &g.edges {
            if a != b {
                *nbrs[a].entry(b).or_insert(0) += k;
                *nbrs[b].entry(a).or_insert(0) += k;
            }
        }

        type Sig = (usize, usize, Vec<(usize, usize)>);
        let initial: Vec<Sig> = (r + 1..=r + u)
            .map(|v| {
                let marked: Vec<(usize, usize)> = nbrs[v]
                    .iter()
                    .filter(|(&w, _)| w <= r)
                    .map(|(&w, &k)| (w, k))
                    .collect();
                (g.degree_unchecked(v), g.loops_at(v), marked)
            })
            .collect();
        let mut colors = dense_rank(&initial);
        loop {
            let sigs: Vec<(usize, Vec<(usize, usize)>)> = (0..u)
                .map(|i| {
                    let v = r + 1 + i;
                    let mut around: Vec<(usize, usize)> = nbrs[v]
                        .iter()
                        .filter(|(&w, _)| w > r)
                        .map(|(&w, &k)| (colors[w - r - 1], k))
                        .collect();
                    around.sort_unstable();
                    (colors[i], around)
                })
                .collect();
            let next = dense_rank(&sigs);
            let before = colors.iter().max().map_or(0, |m| m + 1);
            let after = next.iter().max().map_or(0, |m| m + 1);
            colors = next;
            if after == before {
                return colors;
            }
        }
    }

    fn dense_rank<T: Ord + Clone>(values: &[T]) -> Vec<usize> {
        let mut sorted: Vec<T> = values.to_vec();
        sorted.sort();
        sorted.dedup();
        values
            .iter()
            .map(|v| sorted.binary_search(v).expect("present"))
            .collect()
    }

    fn encode(g: &MarkedGraph, perm: &[usize]) -> Vec<u32> {
        // perm[i] = new id of unmarked vertex r+1+i
        let r = g.r;
        let relabel = |v: usize| if v <= r { v } else { perm[v - r - 1] };
        let mut list: Vec<(usize, usize, usize)> = g
            .edges
            .iter()
            .map(|(&(a, b), &k)| {
                let (x, y) = norm(relabel(a), relabel(b));
                (x, y, k)
            })
            .collect();
        list.sort_unstable();
        list.into_iter()
            .flat_map(|(a, b, k)| [a as u32, b as u32, k as u32])
            .collect()
    }

    /// Advances `slice` to the next lexicographic permutation; false when exhausted.
    fn next_permutation(slice: &mut [usize]) -> bool {
        if slice.len() < 2 {
            return false;
        }
        let mut i = slice.len() - 1;
        while i > 0 && slice[i - 1] >= slice[i] {
            i -= 1;
        }
        if i == 0 {
            slice.reverse();
            return false;
        }
        let mut j = slice.len() - 1;
        while slice[j] <= slice[i - 1] {
            j -= 1;
        }
        slice.swap(i - 1, j);
        slice[i..].reverse();
        true
    }

    pub(super) fn canonical_form(g: &MarkedGraph) -> (MarkedGraph, CanonicalKey) {
        let (r, u) = (g.r, g.u);
        let colors = refine(g);

        // Cells: unmarked vertices grouped by colour, placed in colour order.
        let ncolors = colors.iter().max().map_or(0, |m| m + 1);
        let mut cells: Vec<Vec<usize>> = vec![Vec::new(); ncolors];
        for (i, &c) in colors.iter().enumerate() {
            cells[c].push(i);
        }
        // Target id blocks: cell c occupies consecutive ids after all earlier cells.
        let mut block_start = Vec::with_capacity(ncolors);
        let mut next = r + 1;
        for cell in &cells {
            block_start.push(next);
            next += cell.len();
        }

        // Within each cell, iterate over all orderings of the target ids.
        let mut orders: Vec<Vec<usize>> = cells.iter().map(|c| (0..c.len()).collect()).collect();
        let mut perm = vec![0usize; u];
        let mut best: Option<(Vec<u32>, Vec<usize>)> = None;
        loop {
            for (c, cell) in cells.iter().enumerate() {
                for (pos, &i) in cell.iter().enumerate() {
                    perm[i] = block_start[c] + orders[c][pos];
                }
            }
            let code = encode(g, &perm);
            if best.as_ref().is_none_or(|(b, _)| code < *b) {
                best = Some((code, perm.clone()));
            }
            // Odometer over the per-cell permutations.
            let mut advanced = false;
            for order in orders.iter_mut() {
                if next_permutation(order) {
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }

        let (code, perm) = best.expect("at least one labeling");
        let relabel = |v: usize| if v <= r { v } else { perm[v - r - 1] };
        let canon = g.relabeled(r, r + u, relabel);
        let mut key = Vec::with_capacity(code.len() + 3);
        key.extend([r as u32, u as u32, g.edge_count() as u32]);
        key.extend(code);
        (canon, CanonicalKey(key))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta() -> MarkedGraph {
        MarkedGraph::new(0, 2, [(1, 2), (1, 2), (1, 2)]).unwrap()
    }

    fn dumbbell() -> MarkedGraph {
        MarkedGraph::new(0, 2, [(1, 1), (1, 2), (2, 2)]).unwrap()
    }

    #[test]
    fn construction() {
        let h = MarkedGraph::new(2, 0, [(2, 1)]).unwrap();
        assert_eq!(h.edge_list(), vec![(1, 2)]);
        let ea = MarkedGraph::new(1, 0, [(1, 1)]).unwrap();
        assert_eq!(ea.loops_at(1), 1);
        let unit = MarkedGraph::new(0, 0, []).unwrap();
        assert_eq!(unit, MarkedGraph::unit());
        assert_eq!(
            MarkedGraph::new(1, 0, [(1, 2)]),
            Err(GraphError::VertexOutOfRange { id: 2, max: 1 })
        );
        assert!(MarkedGraph::new(1, 1, [(0, 1)]).is_err());
    }

    #[test]
    fn euler_characteristic() {
        assert_eq!(MarkedGraph::unit().euler_char(), 0);
        assert_eq!(MarkedGraph::new(2, 0, [(1, 2)]).unwrap().euler_char(), 1);
        assert_eq!(theta().euler_char(), -1);
    }

    #[test]
    fn degrees() {
        let ea = MarkedGraph::new(1, 0, [(1, 1)]).unwrap();
        assert_eq!(ea.degree(1), Ok(2));
        let h = MarkedGraph::new(2, 0, [(1, 2)]).unwrap();
        assert_eq!(h.degree(1), Ok(1));
        assert_eq!(dumbbell().degree(1), Ok(3));
        assert!(h.degree(3).is_err());
    }

    #[test]
    fn induced_graphs() {
        let h = MarkedGraph::new(2, 0, [(1, 2)]).unwrap();
        assert_eq!(
            h.induced_graph(2, &[1, 2]).unwrap(),
            MarkedGraph::new(0, 2, [(1, 2)]).unwrap()
        );
        assert_eq!(
            h.induced_graph(1, &[1, 1]).unwrap(),
            MarkedGraph::new(0, 1, [(1, 1)]).unwrap()
        );
        let path = MarkedGraph::new(0, 3, [(1, 2), (2, 3)]).unwrap();
        let merged = path.induced_graph(2, &[1, 2, 1]).unwrap();
        assert_eq!(merged, MarkedGraph::new(0, 2, [(1, 2), (1, 2)]).unwrap());
        let single = MarkedGraph::new(0, 2, [(1, 2)]).unwrap();
        assert_eq!(
            single.induced_graph(1, &[1, 1]).unwrap(),
            MarkedGraph::new(0, 1, [(1, 1)]).unwrap()
        );
        assert!(h.induced_graph(2, &[1]).is_err());
    }

    #[test]
    fn canonical_keys() {
        let t = theta();
        let swapped = t.induced_graph(2, &[2, 1]).unwrap();
        assert_eq!(t.canonical_key(), swapped.canonical_key());
        assert_ne!(theta().canonical_key(), dumbbell().canonical_key());
        let h = MarkedGraph::new(2, 0, [(1, 2)]).unwrap();
        let h_iso = MarkedGraph::new(2, 1, [(1, 2)]).unwrap();
        assert_ne!(h.canonical_key(), h_iso.canonical_key());
        assert_eq!(h.is_isomorphic(&h), Ok(true));
        assert_eq!(h.is_isomorphic(&h_iso), Ok(false));
        assert_eq!(theta().is_isomorphic(&dumbbell()), Ok(false));
        assert!(h.is_isomorphic(&theta()).is_err());
    }

    #[test]
    fn marks_are_not_permuted() {
        let a = MarkedGraph::new(2, 0, [(1, 1)]).unwrap();
        let b = MarkedGraph::new(2, 0, [(2, 2)]).unwrap();
        assert_eq!(a.is_isomorphic(&b), Ok(false));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"r":1,"u":1,"edges":[[1,2],[1,2],[2,2]]}"#;
        let g = MarkedGraph::from_json(text).unwrap();
        assert_eq!(g.to_json(), text);
        assert!(MarkedGraph::from_json(r#"{"r":1,"u":0,"edges":[[1,3]]}"#).is_err());
        assert!(MarkedGraph::from_json(r#"{"r":-1,"u":0,"edges":[]}"#).is_err());
    }

    #[test]
    fn dot_output() {
        let dot = MarkedGraph::new(1, 1, [(1, 2)]).unwrap().to_dot("G");
        assert!(dot.contains("v1 [label=\"1\", shape=circle];"));
        assert!(dot.contains("v2 [label=\"\", shape=point];"));
        assert!(dot.contains("v1 -- v2;"));
    }
}
