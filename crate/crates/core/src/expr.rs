//! Tautological forms on `C_g^r` as linear combinations of r-marked graphs with
//! polynomial coefficients.
//!
//! A graph term stands for the form attached to the graph: the wedge of one `h` per edge on
//! `C_g^{r+u}`, fiber-integrated over the `u` unmarked points. Wedge is gluing, pullback
//! along a tautological morphism is graph pushforward, and fiber integration is graph
//! pullback followed by contraction.
//!
//! Equality of normal forms implies equality of the forms, but distinct normal forms can
//! still denote the same form (there are relations among contracted graphs), so the
//! comparison offered here is [`TautExpr::normal_eq`], not `==` on forms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Signed;
use serde::Serialize;
use thiserror::Error;

use crate::coeffs::{Monomial, Poly};
use crate::graph_ops::{self, contract_fully, Contracted, SetMap};
use crate::graphs::{CanonicalKey, GraphError, GraphJson, MarkedGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("ambient mismatch: expression on C^{left} combined with C^{right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("mark index {index} out of range 1..={r}")]
    IndexOutOfRange { index: usize, r: usize },
    #[error("ed(d) needs d >= 1, got {0}")]
    InvalidDegree(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A formal linear combination of r-marked graphs, all stored in canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TautExpr {
    r: usize,
    terms: BTreeMap<CanonicalKey, (MarkedGraph, Poly)>,
}

impl TautExpr {
    pub fn zero(r: usize) -> Self {
        TautExpr {
            r,
            terms: BTreeMap::new(),
        }
    }

    /// The constant form 1 on `C^r` (the bare graph on `r` marks).
    pub fn unit(r: usize) -> Self {
        TautExpr::from_graph(&MarkedGraph::bare(r))
    }

    pub fn constant(r: usize, c: Poly) -> Self {
        TautExpr::unit(r).scale(&c)
    }

    pub fn from_graph(g: &MarkedGraph) -> Self {
        TautExpr::from_term(g, Poly::one())
    }

    pub fn from_term(g: &MarkedGraph, c: Poly) -> Self {
        let mut out = TautExpr::zero(g.r());
        out.add_term(g, c);
        out
    }

    /// `h` pulled back along `p_ij`; for `i == j` this is `e^A` at mark `i`.
    pub fn gen_h(r: usize, i: usize, j: usize) -> Result<Self, ExprError> {
        for index in [i, j] {
            if index == 0 || index > r {
                return Err(ExprError::IndexOutOfRange { index, r });
            }
        }
        Ok(TautExpr::from_graph(&MarkedGraph::new(r, 0, [(i, j)])?))
    }

    /// `e^A` pulled back along `p_i`: a loop at mark `i`.
    pub fn gen_ea(r: usize, i: usize) -> Result<Self, ExprError> {
        TautExpr::gen_h(r, i, i)
    }

    /// `e_d^A` pulled back to `C^r`: one unmarked vertex with `d + 1` loops.
    pub fn gen_ed(r: usize, d: usize) -> Result<Self, ExprError> {
        if d == 0 {
            return Err(ExprError::InvalidDegree(d));
        }
        let v = r + 1;
        let g = MarkedGraph::new(r, 1, std::iter::repeat_n((v, v), d + 1))?;
        Ok(TautExpr::from_graph(&g))
    }

    /// `nu` pulled back to `C^r`: two unmarked vertices joined by three edges.
    pub fn gen_nu(r: usize) -> Self {
        let g =
            MarkedGraph::new(r, 2, std::iter::repeat_n((r + 1, r + 2), 3)).expect("ids in range");
        TautExpr::from_graph(&g)
    }

    pub fn ambient_r(&self) -> usize {
        self.r
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical-key order.
    pub fn terms(&self) -> impl Iterator<Item = (&CanonicalKey, &MarkedGraph, &Poly)> {
        self.terms.iter().map(|(k, (g, c))| (k, g, c))
    }

    /// Coefficient of the class of `g` (zero if absent).
    pub fn coefficient(&self, g: &MarkedGraph) -> Poly {
        self.terms
            .get(&g.canonical_key())
            .map(|(_, c)| c.clone())
            .unwrap_or_default()
    }

    fn add_term(&mut self, g: &MarkedGraph, c: Poly) {
        debug_assert_eq!(g.r(), self.r);
        if c.is_zero() {
            return;
        }
        let (canon, key) = g.canonical_form();
        self.add_canonical(key, canon, c);
    }

    fn add_canonical(&mut self, key: CanonicalKey, g: MarkedGraph, c: Poly) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert((g, c));
            }
            Entry::Occupied(mut o) => {
                o.get_mut().1 += c;
                if o.get().1.is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_same(&self, other: &TautExpr) -> Result<(), ExprError> {
        if self.r != other.r {
            Err(ExprError::AmbientMismatch {
                left: self.r,
                right: other.r,
            })
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &TautExpr) -> Result<TautExpr, ExprError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (k, (g, c)) in &other.terms {
            out.add_canonical(k.clone(), g.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TautExpr) -> Result<TautExpr, ExprError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TautExpr {
        self.scale(&Poly::int(-1))
    }

    pub fn scale(&self, c: &Poly) -> TautExpr {
        let mut out = TautExpr::zero(self.r);
        if c.is_zero() {
            return out;
        }
        for (k, (g, coeff)) in &self.terms {
            let p = coeff * c;
            if !p.is_zero() {
                out.terms.insert(k.clone(), (g.clone(), p));
            }
        }
        out
    }

    /// Wedge product: bilinear extension of gluing.
    pub fn wedge(&self, other: &TautExpr) -> Result<TautExpr, ExprError> {
        self.check_same(other)?;
        let mut out = TautExpr::zero(self.r);
        for (ga, ca) in self.terms.values() {
            for (gb, cb) in other.terms.values() {
                out.add_term(&graph_ops::glue(ga, gb)?, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn power(&self, k: u32) -> TautExpr {
        let mut acc = TautExpr::unit(self.r);
        for _ in 0..k {
            acc = acc.wedge(self).expect("same ambient");
        }
        acc
    }

    /// Pullback along the tautological morphism `C^r -> C^s` of `phi: {1..s} -> {1..r}`.
    pub fn pullback(&self, phi: &SetMap) -> Result<TautExpr, ExprError> {
        if phi.source() != self.r {
            return Err(ExprError::AmbientMismatch {
                left: self.r,
                right: phi.source(),
            });
        }
        let mut out = TautExpr::zero(phi.target());
        for (g, c) in self.terms.values() {
            out.add_term(&graph_ops::pushforward(phi, g)?, c.clone());
        }
        Ok(out)
    }

    /// Fiber integral along the submersion `C^r -> C^s` of an injective `phi`.
    pub fn integrate(&self, phi: &SetMap) -> Result<TautExpr, ExprError> {
        if phi.target() != self.r {
            return Err(ExprError::AmbientMismatch {
                left: self.r,
                right: phi.target(),
            });
        }
        if !phi.is_injective() {
            return Err(GraphError::NotInjective(phi.images().to_vec()).into());
        }
        let mut out = TautExpr::zero(phi.source());
        for (g, c) in self.terms.values() {
            out.accumulate_contracted(&graph_ops::pullback(phi, g)?, c);
        }
        Ok(out)
    }

    /// Fiber integral forgetting the listed marks; the rest keep their order.
    pub fn integrate_out(&self, forget: &[usize]) -> Result<TautExpr, ExprError> {
        let phi = SetMap::forgetting(self.r, forget)?;
        self.integrate(&phi)
    }

    fn accumulate_contracted(&mut self, g: &MarkedGraph, c: &Poly) {
        if let Contracted::Graph { graph, k } = contract_fully(g) {
            let factor = Poly::two_minus_2g().pow(k);
            self.add_term(&graph, c * &factor);
        }
    }

    /// Rewrites every term to a contracted graph.
    pub fn normalize(&self) -> TautExpr {
        let mut out = TautExpr::zero(self.r);
        for (g, c) in self.terms.values() {
            out.accumulate_contracted(g, c);
        }
        out
    }

    /// Equality of normal forms. Sound for equality of forms, not complete.
    pub fn normal_eq(&self, other: &TautExpr) -> Result<bool, ExprError> {
        self.check_same(other)?;
        Ok(self.normalize() == other.normalize())
    }

    pub fn is_normalized(&self) -> bool {
        self.terms.values().all(|(g, _)| g.is_contracted())
    }

    pub fn specialize(&self, bindings: &BTreeMap<String, Poly>) -> TautExpr {
        let mut out = TautExpr::zero(self.r);
        for (k, (g, c)) in &self.terms {
            let p = c.substitute(bindings);
            if !p.is_zero() {
                out.terms.insert(k.clone(), (g.clone(), p));
            }
        }
        out
    }

    /// Real degrees `2(r - chi)` of the terms.
    pub fn form_degrees(&self) -> BTreeSet<i64> {
        self.terms.values().map(|(g, _)| g.form_degree()).collect()
    }

    /// Splits coefficients by their monomials in `names`: the result maps each monomial to
    /// the expression formed by its coefficient polynomials.
    pub fn split_by_monomials(&self, names: &[&str]) -> BTreeMap<Monomial, TautExpr> {
        let mut out: BTreeMap<Monomial, TautExpr> = BTreeMap::new();
        for (k, (g, c)) in &self.terms {
            for (m, p) in c.split_by(names) {
                out.entry(m)
                    .or_insert_with(|| TautExpr::zero(self.r))
                    .add_canonical(k.clone(), g.clone(), p);
            }
        }
        out
    }

    /// Text with the ambient directive, e.g. `@r=2 -2*h(1,2) + e(1) + e(2)`.
    pub fn to_dsl(&self) -> String {
        format!("@r={} {}", self.r, self)
    }

    /// Terms with more edges first, ties in key order.
    fn display_order(&self) -> Vec<(&MarkedGraph, &Poly)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by_key(|(k, (g, _))| (std::cmp::Reverse(g.edge_count()), *k));
        v.into_iter().map(|(_, (g, c))| (g, c)).collect()
    }

    pub fn to_json_value(&self) -> ExprJson {
        ExprJson {
            ambient_r: self.r,
            terms: self
                .display_order()
                .into_iter()
                .map(|(g, c)| TermJson {
                    graph: g.to_json_value(),
                    coeff: c.to_string(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("expression serializes")
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        for (n, (g, c)) in self.display_order().into_iter().enumerate() {
            out.push_str(&format!("// coefficient: {c}\n"));
            out.push_str(&g.to_dot(&format!("term{n}")));
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExprJson {
    pub ambient_r: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TermJson {
    pub graph: GraphJson,
    pub coeff: String,
}

/// Generator name for graphs that have one, otherwise `graph(u; a-b, ...)`. The unit graph
/// yields `None`.
pub fn graph_name(g: &MarkedGraph) -> Option<String> {
    let r = g.r();
    let edges: Vec<(usize, usize, usize)> = g.edges().collect();
    match (g.u(), edges.as_slice()) {
        (0, []) => return None,
        (0, &[(a, b, 1)]) if a == b => return Some(format!("e({a})")),
        (0, &[(a, b, 1)]) => return Some(format!("h({a},{b})")),
        (1, &[(a, b, k)]) if a == r + 1 && b == r + 1 && k >= 2 => {
            return Some(if k == 2 {
                "e1".to_string()
            } else {
                format!("ed({})", k - 1)
            });
        }
        (2, &[(a, b, 3)]) if a == r + 1 && b == r + 2 => return Some("nu".to_string()),
        _ => {}
    }
    let list: Vec<String> = g
        .edge_list()
        .into_iter()
        .map(|(a, b)| format!("{a}-{b}"))
        .collect();
    Some(format!("graph({}; {})", g.u(), list.join(", ")))
}

impl fmt::Display for TautExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (g, c)) in self.display_order().into_iter().enumerate() {
            let name = graph_name(g);
            // A single-term coefficient carries its sign into the separator.
            let (negative, coeff) = match c.as_constant() {
                Some(k) if k.is_negative() => (true, -c),
                _ if c.len() == 1 => {
                    let (_, k) = c.terms().next().expect("one term");
                    if k.is_negative() {
                        (true, -c)
                    } else {
                        (false, c.clone())
                    }
                }
                _ => (false, c.clone()),
            };
            match (n, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let coeff_text = if coeff.len() > 1 {
                format!("({coeff})")
            } else {
                coeff.to_string()
            };
            match name {
                None => write!(f, "{coeff_text}")?,
                Some(name) if coeff.is_one() => write!(f, "{name}")?,
                Some(name) => write!(f, "{coeff_text}*{name}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g() -> Poly {
        Poly::var("g")
    }

    fn h(r: usize, i: usize, j: usize) -> TautExpr {
        TautExpr::gen_h(r, i, j).unwrap()
    }

    fn ea(r: usize, i: usize) -> TautExpr {
        TautExpr::gen_ea(r, i).unwrap()
    }

    fn forget(r: usize, marks: &[usize]) -> SetMap {
        SetMap::forgetting(r, marks).unwrap()
    }

    #[test]
    fn generators() {
        let h12 = h(2, 1, 2);
        assert_eq!(h12.len(), 1);
        let (_, graph, c) = h12.terms().next().unwrap();
        assert_eq!(graph, &MarkedGraph::new(2, 0, [(1, 2)]).unwrap());
        assert!(c.is_one());

        let e1 = TautExpr::gen_ed(0, 1).unwrap();
        let (_, graph, _) = e1.terms().next().unwrap();
        assert_eq!(graph, &MarkedGraph::new(0, 1, [(1, 1), (1, 1)]).unwrap());

        assert_eq!(h(2, 1, 1), ea(2, 1));
        assert!(TautExpr::gen_h(2, 1, 3).is_err());
        assert!(TautExpr::gen_ed(1, 0).is_err());
    }

    #[test]
    fn wedge_examples() {
        let hh = h(2, 1, 2).wedge(&h(2, 1, 2)).unwrap();
        let expected = MarkedGraph::new(2, 0, [(1, 2), (1, 2)]).unwrap();
        assert!(hh.coefficient(&expected).is_one());
        assert_eq!(hh.len(), 1);

        let ee = ea(1, 1).wedge(&ea(1, 1)).unwrap();
        let expected = MarkedGraph::new(1, 0, [(1, 1), (1, 1)]).unwrap();
        assert!(ee.coefficient(&expected).is_one());

        let a = h(2, 1, 2).add(&ea(2, 2).scale(&g())).unwrap();
        assert_eq!(a.wedge(&TautExpr::unit(2)).unwrap(), a);
        assert!(a.wedge(&ea(1, 1)).is_err());
    }

    #[test]
    fn pullback_examples() {
        let diag = SetMap::new(1, vec![1, 1]).unwrap();
        assert_eq!(h(2, 1, 2).pullback(&diag).unwrap(), ea(1, 1));
        for i in 1..=2 {
            let phi = SetMap::new(2, vec![i]).unwrap();
            assert_eq!(ea(1, 1).pullback(&phi).unwrap(), ea(2, i));
        }
        let to_three = SetMap::new(3, vec![]).unwrap();
        assert_eq!(
            TautExpr::gen_ed(0, 1).unwrap().pullback(&to_three).unwrap(),
            TautExpr::gen_ed(3, 1).unwrap()
        );
        assert!(h(2, 1, 2).pullback(&to_three).is_err());
    }

    #[test]
    fn integrate_examples() {
        assert_eq!(
            h(2, 1, 2).integrate(&forget(2, &[2])).unwrap(),
            TautExpr::unit(1)
        );
        let hh = h(2, 1, 2).power(2);
        assert_eq!(hh.integrate(&forget(2, &[2])).unwrap(), ea(1, 1));
        assert_eq!(
            ea(1, 1).integrate(&forget(1, &[1])).unwrap(),
            TautExpr::constant(0, Poly::two_minus_2g())
        );
        let prod = h(3, 1, 3).wedge(&h(3, 2, 3)).unwrap();
        assert_eq!(prod.integrate(&forget(3, &[3])).unwrap(), h(2, 1, 2));
        let bad = SetMap::new(2, vec![1, 1]).unwrap();
        assert!(h(2, 1, 2).integrate(&bad).is_err());
    }

    #[test]
    fn normalize_examples() {
        let leaf = TautExpr::from_graph(&MarkedGraph::new(1, 1, [(1, 2)]).unwrap());
        assert_eq!(leaf.normalize(), TautExpr::unit(1));
        let iso = TautExpr::from_graph(&MarkedGraph::new(1, 1, []).unwrap());
        assert!(iso.normalize().is_zero());
        let nu = TautExpr::gen_nu(1);
        assert_eq!(nu.normalize(), nu);
    }

    #[test]
    fn ring_closure_ops() {
        let a = h(2, 1, 2).add(&ea(2, 1)).unwrap();
        assert_eq!(a.power(1), a);
        assert_eq!(TautExpr::unit(3).power(5), TautExpr::unit(3));
        assert!(a.scale(&Poly::zero()).is_zero());
        assert!(a.sub(&a).unwrap().is_zero());
        assert!(a.add(&ea(1, 1)).is_err());
    }

    #[test]
    fn specialization() {
        let a = ea(1, 1).scale(&Poly::two_minus_2g());
        let mut b = BTreeMap::new();
        b.insert("g".to_string(), Poly::int(2));
        assert_eq!(a.specialize(&b), ea(1, 1).scale(&Poly::int(-2)));
        assert!(TautExpr::zero(2).specialize(&b).is_zero());
        let mut unused = BTreeMap::new();
        unused.insert("n".to_string(), Poly::int(7));
        assert_eq!(a.specialize(&unused), a);
    }

    #[test]
    fn degrees() {
        assert_eq!(h(2, 1, 2).form_degrees(), BTreeSet::from([2]));
        assert_eq!(TautExpr::gen_nu(0).form_degrees(), BTreeSet::from([2]));
        assert_eq!(TautExpr::unit(0).form_degrees(), BTreeSet::from([0]));
        let mixed = h(2, 1, 2).add(&TautExpr::unit(2)).unwrap();
        assert_eq!(mixed.form_degrees(), BTreeSet::from([0, 2]));
    }

    #[test]
    fn rendering() {
        let x = h(2, 1, 2)
            .scale(&Poly::int(-2))
            .add(&ea(2, 1))
            .unwrap()
            .add(&ea(2, 2))
            .unwrap();
        assert_eq!(x.to_dsl(), "@r=2 e(1) - 2*h(1,2) + e(2)");
        let c = TautExpr::constant(0, Poly::two_minus_2g());
        assert_eq!(c.to_string(), "(2 - 2*g)");
        assert_eq!(TautExpr::zero(0).to_string(), "0");
        let odd = TautExpr::from_term(
            &MarkedGraph::new(1, 1, [(1, 2), (1, 2), (2, 2)]).unwrap(),
            -Poly::var("g"),
        );
        assert_eq!(odd.to_string(), "-g*graph(1; 1-2, 1-2, 2-2)");
        assert_eq!(TautExpr::gen_ed(0, 3).unwrap().to_string(), "ed(3)");
    }

    #[test]
    fn monomial_split() {
        let m1 = Poly::var("m1");
        let a = h(2, 1, 2)
            .scale(&(&m1 * &g()))
            .add(&ea(2, 1).scale(&(m1.clone() + Poly::int(1))))
            .unwrap();
        let parts = a.split_by_monomials(&["m1"]);
        assert_eq!(parts.len(), 2);
        assert_eq!(
            parts[&Monomial::var("m1")],
            h(2, 1, 2).scale(&g()).add(&ea(2, 1)).unwrap()
        );
        assert_eq!(parts[&Monomial::one()], ea(2, 1));
    }
}
