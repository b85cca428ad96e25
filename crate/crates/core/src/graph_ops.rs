//! Gluing, pushforward and pullback of marked graphs, and vertex contraction.

use std::collections::BTreeMap;
use std::fmt;

use crate::graphs::{GraphError, MarkedGraph};

/// A map of index sets `{1..s} -> {1..r}`, stored as the list of images.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetMap {
    target: usize,
    images: Vec<usize>,
}

impl SetMap {
    pub fn new(target: usize, images: Vec<usize>) -> Result<Self, GraphError> {
        if let Some(&value) = images.iter().find(|&&x| x == 0 || x > target) {
            return Err(GraphError::MapOutOfRange { value, target });
        }
        Ok(SetMap { target, images })
    }

    pub fn identity(n: usize) -> Self {
        SetMap {
            target: n,
            images: (1..=n).collect(),
        }
    }

    /// The increasing injection `{1..r-k} -> {1..r}` missing the marks in `forget`.
    pub fn forgetting(r: usize, forget: &[usize]) -> Result<Self, GraphError> {
        let mut seen = vec![false; r + 1];
        for &i in forget {
            if i == 0 || i > r {
                return Err(GraphError::MapOutOfRange {
                    value: i,
                    target: r,
                });
            }
            if seen[i] {
                return Err(GraphError::NotInjective(forget.to_vec()));
            }
            seen[i] = true;
        }
        Ok(SetMap {
            target: r,
            images: (1..=r).filter(|&i| !seen[i]).collect(),
        })
    }

    pub fn source(&self) -> usize {
        self.images.len()
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Image of `k` (1-based).
    pub fn apply(&self, k: usize) -> usize {
        self.images[k - 1]
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target + 1];
        self.images
            .iter()
            .all(|&x| !std::mem::replace(&mut seen[x], true))
    }

    /// `self ∘ inner`, defined when `inner.target() == self.source()`.
    pub fn compose(&self, inner: &SetMap) -> Result<SetMap, GraphError> {
        if inner.target != self.source() {
            return Err(GraphError::MarkMismatch {
                left: self.source(),
                right: inner.target,
            });
        }
        Ok(SetMap {
            target: self.target,
            images: inner.images.iter().map(|&k| self.apply(k)).collect(),
        })
    }
}

impl fmt::Display for SetMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().map(usize::to_string).collect();
        write!(f, "[{}] -> {}", parts.join(","), self.target)
    }
}

/// Gluing along the marks: disjoint union with mark `i` of both sides identified.
pub fn glue(a: &MarkedGraph, b: &MarkedGraph) -> Result<MarkedGraph, GraphError> {
    if a.r() != b.r() {
        return Err(GraphError::MarkMismatch {
            left: a.r(),
            right: b.r(),
        });
    }
    let r = a.r();
    let (ua, ub) = (a.u(), b.u());
    let shift = |v: usize| if v <= r { v } else { v + ua };
    let mut edges: BTreeMap<(usize, usize), usize> = a.edge_map().clone();
    for (x, y, k) in b.edges() {
        *edges.entry((shift(x), shift(y))).or_insert(0) += k;
    }
    Ok(MarkedGraph::from_map(r, ua + ub, edges))
}

/// Pushforward along `phi: {1..s} -> {1..r}`: mark `k` is merged into mark `phi(k)`;
/// unmarked vertices keep their relative order.
pub fn pushforward(phi: &SetMap, g: &MarkedGraph) -> Result<MarkedGraph, GraphError> {
    let s = phi.source();
    if g.r() != s {
        return Err(GraphError::MarkMismatch {
            left: s,
            right: g.r(),
        });
    }
    // The marking of `g` is injective, so the pushout of {1..s} -> V along phi just sends
    // marked vertex k to target mark phi(k) and leaves the unmarked vertices distinct.
    let r = phi.target();
    let map = |v: usize| if v <= s { phi.apply(v) } else { v - s + r };
    Ok(g.relabeled(r, r + g.u(), map))
}

/// Pullback along an injective `phi: {1..s} -> {1..r}`: vertex `phi(k)` becomes mark `k`;
/// marks outside the image become unmarked, placed (in increasing order) before the old
/// unmarked vertices.
pub fn pullback(phi: &SetMap, g: &MarkedGraph) -> Result<MarkedGraph, GraphError> {
    let r = phi.target();
    if g.r() != r {
        return Err(GraphError::MarkMismatch {
            left: r,
            right: g.r(),
        });
    }
    if !phi.is_injective() {
        return Err(GraphError::NotInjective(phi.images().to_vec()));
    }
    let s = phi.source();
    let mut new_id = vec![0usize; g.vertex_count() + 1];
    for k in 1..=s {
        new_id[phi.apply(k)] = k;
    }
    let mut next = s + 1;
    for slot in new_id.iter_mut().take(r + 1).skip(1) {
        if *slot == 0 {
            *slot = next;
            next += 1;
        }
    }
    for (v, slot) in new_id.iter_mut().enumerate().skip(r + 1) {
        *slot = v - r + (next - 1);
    }
    Ok(g.relabeled(s, g.vertex_count(), |v| new_id[v]))
}

/// Scalar factor picked up when a vertex is contracted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Multiplier {
    Zero,
    One,
    /// The Euler characteristic `2 - 2g` of a fiber.
    TwoMinus2g,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionResult {
    pub graph: MarkedGraph,
    pub multiplier: Multiplier,
}

/// Whether `v` is unmarked and a contraction rule applies to it.
pub fn is_contractible(g: &MarkedGraph, v: usize) -> bool {
    if g.is_marked(v) || v > g.vertex_count() {
        return false;
    }
    match g.degree_unchecked(v) {
        0..=2 => true,
        3 => g.loops_at(v) == 1,
        _ => false,
    }
}

/// Contracts one unmarked vertex of degree at most 2, or of degree 3 carrying a loop.
pub fn contract_vertex(g: &MarkedGraph, v: usize) -> Result<ContractionResult, GraphError> {
    g.degree(v)?;
    if g.is_marked(v) {
        return Err(GraphError::MarkedVertex(v));
    }
    let degree = g.degree_unchecked(v);
    if !is_contractible(g, v) {
        return Err(GraphError::NotContractible { id: v, degree });
    }

    // Edges away from v, plus the far ends of v's non-loop edges (with repetition).
    let mut rest: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut far: Vec<usize> = Vec::new();
    for (a, b, k) in g.edges() {
        if a == v && b == v {
            continue;
        } else if a == v || b == v {
            let w = if a == v { b } else { a };
            far.extend(std::iter::repeat_n(w, k));
        } else {
            rest.insert((a, b), k);
        }
    }
    let loops = g.loops_at(v);

    let mut add = |a: usize, b: usize| {
        *rest.entry((a.min(b), a.max(b))).or_insert(0) += 1;
    };
    let multiplier = match (degree, loops, far.as_slice()) {
        (0, _, _) => Multiplier::Zero,
        (1, _, [_]) => Multiplier::One,
        (2, 0, &[w, w2]) => {
            // distinct neighbours: bridge them; same neighbour: loop there
            add(w, w2);
            Multiplier::One
        }
        (2, 1, []) => Multiplier::TwoMinus2g,
        (3, 1, &[w]) => {
            add(w, w);
            Multiplier::One
        }
        _ => unreachable!("contractibility checked above"),
    };

    // Drop v and close the gap in the numbering.
    let shift = |x: usize| if x > v { x - 1 } else { x };
    let mut edges = BTreeMap::new();
    for ((a, b), k) in rest {
        *edges.entry((shift(a), shift(b))).or_insert(0) += k;
    }
    Ok(ContractionResult {
        graph: MarkedGraph::from_map(g.r(), g.u() - 1, edges),
        multiplier,
    })
}

/// Result of contracting until no rule applies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Contracted {
    /// Some step had multiplier zero.
    Zero,
    /// The contracted graph and the number `k` of `(2 - 2g)` factors.
    Graph { graph: MarkedGraph, k: u32 },
}

/// Contracts the lowest-numbered contractible vertex until the graph is contracted.
pub fn contract_fully(g: &MarkedGraph) -> Contracted {
    contract_fully_by(g, |_| 0)
}

/// As [`contract_fully`], with `choose` picking which candidate (by position in the list of
/// contractible vertex ids, ascending) to contract at each step.
pub fn contract_fully_by<F>(g: &MarkedGraph, mut choose: F) -> Contracted
where
    F: FnMut(&[usize]) -> usize,
{
    let mut graph = g.clone();
    let mut k = 0;
    loop {
        let candidates: Vec<usize> = (graph.r() + 1..=graph.vertex_count())
            .filter(|&v| is_contractible(&graph, v))
            .collect();
        if candidates.is_empty() {
            return Contracted::Graph { graph, k };
        }
        let pick = candidates[choose(&candidates).min(candidates.len() - 1)];
        let step = contract_vertex(&graph, pick).expect("candidate is contractible");
        match step.multiplier {
            Multiplier::Zero => return Contracted::Zero,
            Multiplier::One => {}
            Multiplier::TwoMinus2g => k += 1,
        }
        graph = step.graph;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(r: usize, u: usize, edges: &[(usize, usize)]) -> MarkedGraph {
        MarkedGraph::new(r, u, edges.iter().copied()).unwrap()
    }

    fn iso(a: &MarkedGraph, b: &MarkedGraph) -> bool {
        a.is_isomorphic(b).unwrap()
    }

    #[test]
    fn glue_examples() {
        let h = graph(2, 0, &[(1, 2)]);
        assert_eq!(glue(&h, &h).unwrap(), graph(2, 0, &[(1, 2), (1, 2)]));

        let a = graph(0, 1, &[(1, 1)]);
        let b = graph(0, 2, &[(1, 2)]);
        assert_eq!(glue(&a, &b).unwrap(), graph(0, 3, &[(1, 1), (2, 3)]));

        let ea = graph(1, 0, &[(1, 1)]);
        let two = glue(&ea, &ea).unwrap();
        assert_eq!(two, graph(1, 0, &[(1, 1), (1, 1)]));
        assert_eq!(two.euler_char(), -1);

        assert!(glue(&h, &ea).is_err());
    }

    #[test]
    fn glue_keeps_unmarked_vertices_apart() {
        let a = graph(1, 1, &[(1, 2)]);
        let glued = glue(&a, &a).unwrap();
        assert_eq!(glued, graph(1, 2, &[(1, 2), (1, 3)]));
    }

    #[test]
    fn pushforward_examples() {
        let h = graph(2, 0, &[(1, 2)]);
        let diag = SetMap::new(1, vec![1, 1]).unwrap();
        assert_eq!(pushforward(&diag, &h).unwrap(), graph(1, 0, &[(1, 1)]));

        let ea = graph(1, 0, &[(1, 1)]);
        let inc = SetMap::new(2, vec![1]).unwrap();
        assert_eq!(pushforward(&inc, &ea).unwrap(), graph(2, 0, &[(1, 1)]));

        let g = graph(2, 1, &[(1, 3), (2, 3), (3, 3)]);
        assert_eq!(pushforward(&SetMap::identity(2), &g).unwrap(), g);

        assert!(pushforward(&inc, &h).is_err());
    }

    #[test]
    fn pushforward_moves_unmarked_ids() {
        let g = graph(1, 1, &[(1, 2)]);
        let phi = SetMap::new(3, vec![2]).unwrap();
        assert_eq!(pushforward(&phi, &g).unwrap(), graph(3, 1, &[(2, 4)]));
    }

    #[test]
    fn pullback_examples() {
        let h = graph(2, 0, &[(1, 2)]);
        let inc = SetMap::new(2, vec![1]).unwrap();
        let pulled = pullback(&inc, &h).unwrap();
        assert_eq!(pulled, graph(1, 1, &[(1, 2)]));
        assert_eq!(pulled.degree(2), Ok(1));

        let ea = graph(1, 0, &[(1, 1)]);
        let empty = SetMap::new(1, vec![]).unwrap();
        assert_eq!(pullback(&empty, &ea).unwrap(), graph(0, 1, &[(1, 1)]));

        assert_eq!(pullback(&SetMap::identity(2), &h).unwrap(), h);

        let not_inj = SetMap::new(2, vec![1, 1]).unwrap();
        assert!(matches!(
            pullback(&not_inj, &h),
            Err(GraphError::NotInjective(_))
        ));
        assert!(pullback(&inc, &ea).is_err());
    }

    #[test]
    fn pullback_reorders_marks() {
        // swap the two marks, keep the unmarked vertex
        let g = graph(2, 1, &[(1, 1), (2, 3)]);
        let swap = SetMap::new(2, vec![2, 1]).unwrap();
        assert_eq!(pullback(&swap, &g).unwrap(), graph(2, 1, &[(2, 2), (1, 3)]));
        // forget mark 1 of three; it lands just before the old unmarked vertex
        let g = graph(3, 1, &[(1, 4), (2, 3)]);
        let phi = SetMap::forgetting(3, &[1]).unwrap();
        assert_eq!(phi.images(), &[2, 3]);
        assert_eq!(pullback(&phi, &g).unwrap(), graph(2, 2, &[(3, 4), (1, 2)]));
    }

    #[test]
    fn contraction_cases() {
        let isolated = graph(1, 1, &[(1, 1)]);
        assert_eq!(
            contract_vertex(&isolated, 2).unwrap().multiplier,
            Multiplier::Zero
        );

        let lone_loop = graph(1, 1, &[(2, 2)]);
        let res = contract_vertex(&lone_loop, 2).unwrap();
        assert_eq!(res.multiplier, Multiplier::TwoMinus2g);
        assert_eq!(res.graph, MarkedGraph::bare(1));

        let bridge = graph(2, 1, &[(1, 3), (2, 3)]);
        let res = contract_vertex(&bridge, 3).unwrap();
        assert_eq!(res.multiplier, Multiplier::One);
        assert_eq!(res.graph, graph(2, 0, &[(1, 2)]));

        let loop_and_edge = graph(1, 1, &[(1, 2), (2, 2)]);
        let res = contract_vertex(&loop_and_edge, 2).unwrap();
        assert_eq!(res.multiplier, Multiplier::One);
        assert_eq!(res.graph, graph(1, 0, &[(1, 1)]));

        let leaf = graph(1, 1, &[(1, 2)]);
        let res = contract_vertex(&leaf, 2).unwrap();
        assert_eq!(
            (res.graph, res.multiplier),
            (MarkedGraph::bare(1), Multiplier::One)
        );

        let double = graph(1, 1, &[(1, 2), (1, 2)]);
        let res = contract_vertex(&double, 2).unwrap();
        assert_eq!(
            (res.graph, res.multiplier),
            (graph(1, 0, &[(1, 1)]), Multiplier::One)
        );
    }

    #[test]
    fn contraction_renumbers_later_vertices() {
        // unmarked 2 is a leaf hanging off unmarked 3, which carries two loops
        let g = graph(1, 2, &[(2, 3), (3, 3), (3, 3), (1, 3)]);
        let res = contract_vertex(&g, 2).unwrap();
        assert_eq!(res.graph, graph(1, 1, &[(2, 2), (2, 2), (1, 2)]));
    }

    #[test]
    fn contraction_errors() {
        let h = graph(2, 0, &[(1, 2)]);
        assert_eq!(contract_vertex(&h, 1), Err(GraphError::MarkedVertex(1)));
        let star = graph(3, 1, &[(1, 4), (2, 4), (3, 4)]);
        assert_eq!(
            contract_vertex(&star, 4),
            Err(GraphError::NotContractible { id: 4, degree: 3 })
        );
        let four = graph(0, 1, &[(1, 1), (1, 1)]);
        assert!(contract_vertex(&four, 1).is_err());
        assert!(contract_vertex(&h, 5).is_err());
    }

    #[test]
    fn contract_fully_examples() {
        assert_eq!(
            contract_fully(&MarkedGraph::unit()),
            Contracted::Graph {
                graph: MarkedGraph::unit(),
                k: 0
            }
        );
        assert_eq!(
            contract_fully(&graph(0, 1, &[(1, 1)])),
            Contracted::Graph {
                graph: MarkedGraph::unit(),
                k: 1
            }
        );
        assert_eq!(
            contract_fully(&graph(1, 1, &[(1, 2), (1, 2)])),
            Contracted::Graph {
                graph: graph(1, 0, &[(1, 1)]),
                k: 0
            }
        );
        // a path of unmarked vertices hanging off nothing collapses to an isolated vertex
        assert_eq!(contract_fully(&graph(0, 2, &[(1, 2)])), Contracted::Zero);
    }

    #[test]
    fn contract_fully_output_is_contracted() {
        let g = graph(
            2,
            3,
            &[(1, 3), (3, 4), (4, 4), (4, 5), (5, 2), (5, 5), (3, 3)],
        );
        match contract_fully(&g) {
            Contracted::Graph { graph, .. } => assert!(graph.is_contracted()),
            Contracted::Zero => panic!("unexpected zero"),
        }
    }

    #[test]
    fn composition() {
        let phi = SetMap::new(3, vec![2, 3]).unwrap();
        assert_eq!(SetMap::identity(3).compose(&phi).unwrap(), phi);
        assert_eq!(phi.compose(&SetMap::identity(2)).unwrap(), phi);
        let a = SetMap::new(2, vec![1]).unwrap();
        let b = SetMap::new(1, vec![1]).unwrap();
        assert_eq!(a.compose(&b).unwrap(), a);
        assert!(a.compose(&phi).is_err());
    }

    #[test]
    fn functor_composition_on_an_example() {
        let g = graph(2, 1, &[(1, 3), (2, 3), (3, 3)]);
        let psi = SetMap::new(3, vec![3, 1]).unwrap();
        let phi = SetMap::new(2, vec![1, 2, 2]).unwrap();
        let lhs = pushforward(&phi.compose(&psi).unwrap(), &g).unwrap();
        let rhs = pushforward(&phi, &pushforward(&psi, &g).unwrap()).unwrap();
        assert!(iso(&lhs, &rhs));
    }
}
