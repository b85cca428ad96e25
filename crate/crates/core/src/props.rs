//! Seeded randomized checks of the structural laws of the calculus.
//!
//! Each suite draws `cases` random inputs from a `StdRng` seeded with `seed` (mixed with the
//! suite index), so a run is reproducible from the pair.

use std::fmt;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::coeffs::Poly;
use crate::expr::TautExpr;
use crate::graph_ops::{self, contract_fully, contract_fully_by, Contracted, SetMap};
use crate::graphs::MarkedGraph;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    /// First failing input, rendered.
    pub counterexample: Option<String>,
}

impl SuiteResult {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PropertyReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl PropertyReport {
    pub fn all_pass(&self) -> bool {
        self.suites.iter().all(SuiteResult::pass)
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.suites.iter().map(|s| s.name.len()).max().unwrap_or(0);
        for s in &self.suites {
            let flag = if s.pass() { "PASS" } else { "FAIL" };
            writeln!(
                f,
                "{flag}  {:width$}  {} cases, {} failures",
                s.name, s.cases, s.failures
            )?;
            if let Some(c) = &s.counterexample {
                writeln!(f, "      {:width$}  first counterexample: {c}", "")?;
            }
        }
        Ok(())
    }
}

type Check = fn(&mut StdRng) -> Result<(), String>;

/// Suite names in run order.
pub const SUITES: &[(&str, Check)] = &[
    ("chi under glue", chi_glue),
    ("chi under pushforward", chi_pushforward),
    ("chi under pullback", chi_pullback),
    ("pushforward composition", pushforward_composition),
    ("pullback composition", pullback_composition),
    ("glue-pushforward compatibility", glue_pushforward),
    ("contraction confluence", confluence),
    ("canonical key invariance", key_invariance),
    ("normalize idempotence", normalize_idempotent),
    ("projection formula", projection_formula),
    ("degree under wedge", degree_wedge),
    ("degree under integrate", degree_integrate),
    ("wedge commutative and associative", wedge_laws),
    ("normalize commutes with wedge", normalize_wedge),
];

pub fn run_suite(index: usize, seed: u64, cases: usize) -> SuiteResult {
    let (name, check) = SUITES[index];
    let mut rng = StdRng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut failures = 0;
    let mut counterexample = None;
    for _ in 0..cases {
        if let Err(msg) = check(&mut rng) {
            failures += 1;
            counterexample.get_or_insert(msg);
        }
    }
    SuiteResult {
        name: name.to_string(),
        cases,
        failures,
        counterexample,
    }
}

pub fn run_all(seed: u64, cases: usize) -> PropertyReport {
    PropertyReport {
        seed,
        suites: (0..SUITES.len())
            .map(|i| run_suite(i, seed, cases))
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// Generators

pub fn random_graph(rng: &mut StdRng, r: usize, max_u: usize, max_edges: usize) -> MarkedGraph {
    let u = rng.gen_range(0..=max_u);
    let n = r + u;
    let mut edges = Vec::new();
    if n > 0 {
        for _ in 0..rng.gen_range(0..=max_edges) {
            edges.push((rng.gen_range(1..=n), rng.gen_range(1..=n)));
        }
    }
    MarkedGraph::new(r, u, edges).expect("ids in range")
}

/// Any map `{1..s} -> {1..t}`; `t >= 1` unless `s == 0`.
pub fn random_map(rng: &mut StdRng, s: usize, t: usize) -> SetMap {
    let images = (0..s).map(|_| rng.gen_range(1..=t)).collect();
    SetMap::new(t, images).expect("values in range")
}

pub fn random_injection(rng: &mut StdRng, s: usize, t: usize) -> SetMap {
    let mut pool: Vec<usize> = (1..=t).collect();
    pool.shuffle(rng);
    pool.truncate(s);
    SetMap::new(t, pool).expect("values in range")
}

fn random_expr(rng: &mut StdRng, r: usize, max_u: usize, max_edges: usize) -> TautExpr {
    let mut x = TautExpr::zero(r);
    for _ in 0..rng.gen_range(1..=3) {
        let g = random_graph(rng, r, max_u, max_edges);
        let c =
            Poly::int(rng.gen_range(-3..=3)) + Poly::int(rng.gen_range(-1..=1)) * Poly::var("g");
        x = x.add(&TautExpr::from_term(&g, c)).expect("same ambient");
    }
    x
}

// ---------------------------------------------------------------------------
// Checks

fn same_class(a: &MarkedGraph, b: &MarkedGraph) -> bool {
    a.r() == b.r() && a.canonical_key() == b.canonical_key()
}

fn chi_glue(rng: &mut StdRng) -> Result<(), String> {
    let r = rng.gen_range(0..=3);
    let a = random_graph(rng, r, 3, 5);
    let b = random_graph(rng, r, 3, 5);
    let c = graph_ops::glue(&a, &b).map_err(|e| e.to_string())?;
    if c.euler_char() == a.euler_char() + b.euler_char() - r as i64 {
        Ok(())
    } else {
        Err(format!("{a} | {b}"))
    }
}

fn chi_pushforward(rng: &mut StdRng) -> Result<(), String> {
    let s = rng.gen_range(0..=3);
    let r = rng.gen_range(1..=4);
    let g = random_graph(rng, s, 3, 5);
    let phi = random_map(rng, s, r);
    let p = graph_ops::pushforward(&phi, &g).map_err(|e| e.to_string())?;
    if p.euler_char() == g.euler_char() - s as i64 + r as i64 {
        Ok(())
    } else {
        Err(format!("{g} along {phi}"))
    }
}

fn chi_pullback(rng: &mut StdRng) -> Result<(), String> {
    let r = rng.gen_range(0..=4);
    let s = rng.gen_range(0..=r);
    let g = random_graph(rng, r, 3, 5);
    let phi = random_injection(rng, s, r);
    let p = graph_ops::pullback(&phi, &g).map_err(|e| e.to_string())?;
    if p.euler_char() == g.euler_char() && p.r() == s {
        Ok(())
    } else {
        Err(format!("{g} along {phi}"))
    }
}

fn pushforward_composition(rng: &mut StdRng) -> Result<(), String> {
    let s = rng.gen_range(0..=3);
    let r = rng.gen_range(1..=3);
    let t = rng.gen_range(1..=3);
    let g = random_graph(rng, s, 3, 5);
    let phi = random_map(rng, s, r);
    let psi = random_map(rng, r, t);
    let run = || -> Result<bool, crate::graphs::GraphError> {
        let once = graph_ops::pushforward(&psi.compose(&phi)?, &g)?;
        let twice = graph_ops::pushforward(&psi, &graph_ops::pushforward(&phi, &g)?)?;
        Ok(same_class(&once, &twice))
    };
    match run() {
        Ok(true) => Ok(()),
        Ok(false) => Err(format!("{g} along {phi} then {psi}")),
        Err(e) => Err(e.to_string()),
    }
}

fn pullback_composition(rng: &mut StdRng) -> Result<(), String> {
    let t = rng.gen_range(0..=4);
    let r = rng.gen_range(0..=t);
    let s = rng.gen_range(0..=r);
    let g = random_graph(rng, t, 3, 5);
    let phi = random_injection(rng, s, r);
    let psi = random_injection(rng, r, t);
    let run = || -> Result<bool, crate::graphs::GraphError> {
        let once = graph_ops::pullback(&psi.compose(&phi)?, &g)?;
        let twice = graph_ops::pullback(&phi, &graph_ops::pullback(&psi, &g)?)?;
        Ok(same_class(&once, &twice))
    };
    match run() {
        Ok(true) => Ok(()),
        Ok(false) => Err(format!("{g} along {phi} then {psi}")),
        Err(e) => Err(e.to_string()),
    }
}

fn glue_pushforward(rng: &mut StdRng) -> Result<(), String> {
    let s = rng.gen_range(0..=3);
    let r = rng.gen_range(1..=3);
    let a = random_graph(rng, s, 3, 4);
    let b = random_graph(rng, s, 3, 4);
    let phi = random_map(rng, s, r);
    let run = || -> Result<bool, crate::graphs::GraphError> {
        let lhs = graph_ops::pushforward(&phi, &graph_ops::glue(&a, &b)?)?;
        let rhs = graph_ops::glue(
            &graph_ops::pushforward(&phi, &a)?,
            &graph_ops::pushforward(&phi, &b)?,
        )?;
        Ok(same_class(&lhs, &rhs))
    };
    match run() {
        Ok(true) => Ok(()),
        Ok(false) => Err(format!("{a} | {b} along {phi}")),
        Err(e) => Err(e.to_string()),
    }
}

fn summary(c: &Contracted) -> Option<(crate::graphs::CanonicalKey, u32)> {
    match c {
        Contracted::Zero => None,
        Contracted::Graph { graph, k } => Some((graph.canonical_key(), *k)),
    }
}

fn confluence(rng: &mut StdRng) -> Result<(), String> {
    let r = rng.gen_range(0..=3);
    let g = random_graph(rng, r, 5, 7);
    let reference = summary(&contract_fully(&g));
    for _ in 0..3 {
        let mut pick_rng = StdRng::seed_from_u64(rng.gen());
        let other = contract_fully_by(&g, |c| pick_rng.gen_range(0..c.len()));
        if summary(&other) != reference {
            return Err(format!("{g}"));
        }
    }
    Ok(())
}

fn key_invariance(rng: &mut StdRng) -> Result<(), String> {
    let r = rng.gen_range(0..=3);
    let g = random_graph(rng, r, 5, 8);
    let mut perm: Vec<usize> = (r + 1..=g.vertex_count()).collect();
    perm.shuffle(rng);
    let h = g.relabeled(r, g.vertex_count(), |v| {
        if v <= r {
            v
        } else {
            perm[v - r - 1]
        }
    });
    if g.canonical_key() == h.canonical_key() {
        Ok(())
    } else {
        Err(format!("{g} vs {h}"))
    }
}

fn normalize_idempotent(rng: &mut StdRng) -> Result<(), String> {
    let r = rng.gen_range(0..=3);
    let x = random_expr(rng, r, 4, 6);
    let n = x.normalize();
    if n.is_normalized() && n.normalize() == n {
        Ok(())
    } else {
        Err(x.to_dsl())
    }
}

/// `int_phi (a ^ phi^* b) = (int_phi a) ^ b` after normalization.
fn projection_formula(rng: &mut StdRng) -> Result<(), String> {
    let r = rng.gen_range(1..=3);
    let s = rng.gen_range(0..r);
    let phi = random_injection(rng, s, r);
    let a = random_expr(rng, r, 2, 4);
    let b = random_expr(rng, s, 2, 3);
    let run = || -> Result<bool, crate::expr::ExprError> {
        let lhs = a.wedge(&b.pullback(&phi)?)?.integrate(&phi)?;
        let rhs = a.integrate(&phi)?.wedge(&b)?;
        lhs.normal_eq(&rhs)
    };
    match run() {
        Ok(true) => Ok(()),
        Ok(false) => Err(format!(
            "a = {}, b = {}, phi = {phi}",
            a.to_dsl(),
            b.to_dsl()
        )),
        Err(e) => Err(e.to_string()),
    }
}

fn degree_wedge(rng: &mut StdRng) -> Result<(), String> {
    let r = rng.gen_range(0..=3);
    let a = random_graph(rng, r, 3, 5);
    let b = random_graph(rng, r, 3, 5);
    let c = graph_ops::glue(&a, &b).map_err(|e| e.to_string())?;
    let x = TautExpr::from_graph(&a)
        .wedge(&TautExpr::from_graph(&b))
        .map_err(|e| e.to_string())?;
    let want = a.form_degree() + b.form_degree();
    if c.form_degree() == want && x.form_degrees().iter().all(|&d| d == want) {
        Ok(())
    } else {
        Err(format!("{a} | {b}"))
    }
}

fn degree_integrate(rng: &mut StdRng) -> Result<(), String> {
    let r = rng.gen_range(0..=4);
    let s = rng.gen_range(0..=r);
    let g = random_graph(rng, r, 4, 7);
    let phi = random_injection(rng, s, r);
    let x = TautExpr::from_graph(&g)
        .integrate(&phi)
        .map_err(|e| e.to_string())?;
    let want = g.form_degree() - 2 * (r - s) as i64;
    if x.ambient_r() == s && x.form_degrees().iter().all(|&d| d == want) {
        Ok(())
    } else {
        Err(format!("{g} along {phi}"))
    }
}

fn wedge_laws(rng: &mut StdRng) -> Result<(), String> {
    let r = rng.gen_range(0..=3);
    let a = random_expr(rng, r, 2, 3);
    let b = random_expr(rng, r, 2, 3);
    let c = random_expr(rng, r, 2, 3);
    let run = || -> Result<bool, crate::expr::ExprError> {
        let comm = a.wedge(&b)? == b.wedge(&a)?;
        let assoc = a.wedge(&b)?.wedge(&c)? == a.wedge(&b.wedge(&c)?)?;
        Ok(comm && assoc)
    };
    match run() {
        Ok(true) => Ok(()),
        Ok(false) => Err(format!("{} ; {} ; {}", a.to_dsl(), b.to_dsl(), c.to_dsl())),
        Err(e) => Err(e.to_string()),
    }
}

fn normalize_wedge(rng: &mut StdRng) -> Result<(), String> {
    let r = rng.gen_range(0..=3);
    let a = random_expr(rng, r, 3, 4);
    let b = random_expr(rng, r, 3, 4);
    let run = || -> Result<bool, crate::expr::ExprError> {
        let lhs = a.wedge(&b)?.normalize();
        let rhs = a.normalize().wedge(&b.normalize())?.normalize();
        Ok(lhs == rhs)
    };
    match run() {
        Ok(true) => Ok(()),
        Ok(false) => Err(format!("{} ; {}", a.to_dsl(), b.to_dsl())),
        Err(e) => Err(e.to_string()),
    }
}
