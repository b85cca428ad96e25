//! Pullbacks of the Betti form along the normal functions `F_m : C_g^r -> J_g`, relations
//! obtained from the vanishing of its `(g+1)`-st power, and a check of the classical
//! identities the calculus has to reproduce.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::coeffs::Poly;
use crate::expr::{ExprError, TautExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("sum of m is {sum}, but (2g-2)n = {expected}")]
    Constraint { sum: String, expected: String },
    #[error("the exponent g+1 needs a numeric genus")]
    SymbolicGenus,
    #[error("genus must be at least 2, got {0}")]
    GenusTooSmall(u32),
    #[error("cannot integrate C^{r} down to C^{target}")]
    ForgetTo { r: usize, target: usize },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Genus {
    Numeric(u32),
    Symbolic,
}

impl Genus {
    fn as_poly(self) -> Poly {
        match self {
            Genus::Numeric(g) => Poly::int(i64::from(g)),
            Genus::Symbolic => Poly::var("g"),
        }
    }

    fn bindings(self) -> BTreeMap<String, Poly> {
        let mut b = BTreeMap::new();
        if let Genus::Numeric(g) = self {
            b.insert("g".to_string(), Poly::int(i64::from(g)));
        }
        b
    }
}

/// Data `(g, m, n)` of a normal function, and how far to integrate the relation down.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RWQuery {
    pub genus: Genus,
    pub m: Vec<Poly>,
    pub n: Poly,
    pub forget_to: usize,
}

impl RWQuery {
    pub fn numeric(g: u32, m: &[i64], n: i64, forget_to: usize) -> Self {
        RWQuery {
            genus: Genus::Numeric(g),
            m: m.iter().map(|&x| Poly::int(x)).collect(),
            n: Poly::int(n),
            forget_to,
        }
    }

    /// `m = (m1, ..., mr)` and `n` kept as indeterminates.
    pub fn symbolic(genus: Genus, r: usize, forget_to: usize) -> Self {
        RWQuery {
            genus,
            m: (1..=r).map(|i| Poly::var(&format!("m{i}"))).collect(),
            n: Poly::var("n"),
            forget_to,
        }
    }

    pub fn r(&self) -> usize {
        self.m.len()
    }

    /// Numeric mode: once the genus is substituted, `m` and `n` involve no indeterminate
    /// other than `g`.
    pub fn is_numeric(&self) -> bool {
        let b = self.genus.bindings();
        self.m
            .iter()
            .chain(std::iter::once(&self.n))
            .all(|p| p.substitute(&b).variables().iter().all(|v| v == "g"))
    }

    fn check(&self) -> Result<(), RelationError> {
        if let Genus::Numeric(g) = self.genus {
            if g < 2 {
                return Err(RelationError::GenusTooSmall(g));
            }
        }
        if !self.is_numeric() {
            return Ok(());
        }
        let b = self.genus.bindings();
        let sum = self
            .m
            .iter()
            .fold(Poly::zero(), |acc, x| acc + x.clone())
            .substitute(&b);
        let expected =
            (&(Poly::int(2) * self.genus.as_poly() - Poly::int(2)) * &self.n).substitute(&b);
        if sum != expected {
            return Err(RelationError::Constraint {
                sum: sum.to_string(),
                expected: expected.to_string(),
            });
        }
        Ok(())
    }
}

/// `-2 F_m^* omega_0` on `C^r`:
/// `sum_{i<j} 2 m_i m_j h_ij + sum_i (m_i^2 + 2 m_i n) e^A_i + n^2 e_1^A`.
pub fn omega_pullback(q: &RWQuery) -> Result<TautExpr, RelationError> {
    q.check()?;
    let r = q.r();
    let mut out = TautExpr::zero(r);
    for i in 1..=r {
        for j in i + 1..=r {
            let c = Poly::int(2) * q.m[i - 1].clone() * q.m[j - 1].clone();
            out = out.add(&TautExpr::gen_h(r, i, j)?.scale(&c))?;
        }
    }
    for i in 1..=r {
        let mi = &q.m[i - 1];
        let c = mi * mi + Poly::int(2) * mi.clone() * q.n.clone();
        out = out.add(&TautExpr::gen_ea(r, i)?.scale(&c))?;
    }
    out = out.add(&TautExpr::gen_ed(r, 1)?.scale(&(&q.n * &q.n)))?;
    Ok(out.specialize(&q.genus.bindings()))
}

/// The `(g+1)`-st power of `2 F_m^* omega_0 = -`[`omega_pullback`], before any integration
/// or normalization. It vanishes identically as a form.
pub fn rw_power(q: &RWQuery) -> Result<TautExpr, RelationError> {
    let Genus::Numeric(g) = q.genus else {
        return Err(RelationError::SymbolicGenus);
    };
    Ok(omega_pullback(q)?.neg().power(g + 1))
}

/// Integrates the vanishing power down to `C^{forget_to}` (forgetting the last marks) and
/// normalizes. In numeric mode the result is a relation: it represents the zero form. With
/// symbolic `m`, `n` it is a candidate relation to be split by monomials.
pub fn rw_relation(q: &RWQuery) -> Result<TautExpr, RelationError> {
    let r = q.r();
    if q.forget_to > r {
        return Err(RelationError::ForgetTo {
            r,
            target: q.forget_to,
        });
    }
    let power = rw_power(q)?;
    let forget: Vec<usize> = (q.forget_to + 1..=r).collect();
    let integrated = power.integrate_out(&forget)?;
    Ok(integrated.normalize().specialize(&q.genus.bindings()))
}

/// One line of the identity report.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub entries: Vec<IdentityCheck>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    fn push_expr(&mut self, name: &str, expected: &TautExpr, computed: &TautExpr) {
        let pass = expected.normal_eq(computed).unwrap_or(false);
        self.entries.push(IdentityCheck {
            name: name.to_string(),
            expected: expected.to_dsl(),
            computed: computed.to_dsl(),
            pass,
        });
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.entries.iter().map(|e| e.name.len()).max().unwrap_or(0);
        for e in &self.entries {
            let flag = if e.pass { "PASS" } else { "FAIL" };
            writeln!(f, "{flag}  {:width$}  {}", e.name, e.computed)?;
            if !e.pass {
                writeln!(f, "      {:width$}  expected {}", "", e.expected)?;
            }
        }
        Ok(())
    }
}

/// Runs the identity suite with symbolic genus where possible.
pub fn verify_identities() -> Result<Report, RelationError> {
    let mut report = Report::default();
    let g = Poly::var("g");

    let h = |r, i, j| TautExpr::gen_h(r, i, j);
    let ea = |r, i| TautExpr::gen_ea(r, i);

    // -2 delta^* omega_0 on C^2
    let delta = RWQuery {
        genus: Genus::Symbolic,
        m: vec![Poly::int(1), Poly::int(-1)],
        n: Poly::zero(),
        forget_to: 2,
    };
    let x = omega_pullback(&delta)?;
    let expected_x = h(2, 1, 2)?
        .scale(&Poly::int(-2))
        .add(&ea(2, 1)?)?
        .add(&ea(2, 2)?)?;
    report.push_expr("omega pullback, m=(1,-1), n=0", &expected_x, &x);

    let step1 = x.power(2).integrate_out(&[2])?.normalize();
    let expected1 = ea(1, 1)?
        .scale(&(Poly::int(-4) * g.clone()))
        .add(&TautExpr::gen_ed(1, 1)?)?;
    report.push_expr("int_{p1} X^2 = -4g e^A + e1", &expected1, &step1);

    let step2 = step1.power(2).integrate_out(&[1])?.normalize();
    let expected2 =
        TautExpr::gen_ed(0, 1)?.scale(&(Poly::int(32) * g.pow(2) - Poly::int(16) * g.clone()));
    report.push_expr("int_p (step 1)^2 = 16g(2g-1) e1", &expected2, &step2);

    let genus2 = RWQuery::numeric(2, &[1, -1], 0, 0);
    let cube = rw_power(&genus2)?;
    report.entries.push(IdentityCheck {
        name: "genus 2: X^3 has ten 6-form terms".to_string(),
        expected: "10".to_string(),
        computed: cube.len().to_string(),
        pass: cube.len() == 10 && cube.form_degrees().into_iter().eq([6]),
    });
    let relation = rw_relation(&genus2)?;
    let expected_rel = TautExpr::gen_nu(0)
        .scale(&Poly::int(8))
        .add(&TautExpr::gen_ed(0, 1)?.scale(&Poly::int(12)))?;
    report.push_expr("genus 2: 8 nu + 12 e1 = 0", &expected_rel, &relation);

    report.push_expr(
        "int_{p1} h = 1",
        &TautExpr::unit(1),
        &h(2, 1, 2)?.integrate_out(&[2])?,
    );
    report.push_expr(
        "int_{p1} h^2 = e^A",
        &ea(1, 1)?,
        &h(2, 1, 2)?.power(2).integrate_out(&[2])?,
    );
    for i in 1..=2 {
        report.push_expr(
            &format!("int_{{p1}} h e^A_{i} = e^A"),
            &ea(1, 1)?,
            &h(2, 1, 2)?.wedge(&ea(2, i)?)?.integrate_out(&[2])?,
        );
    }
    report.push_expr(
        "int_{p12} p13*h p23*h = h",
        &h(2, 1, 2)?,
        &h(3, 1, 3)?.wedge(&h(3, 2, 3)?)?.integrate_out(&[3])?,
    );
    report.push_expr(
        "int_p e^A = 2 - 2g",
        &TautExpr::constant(0, Poly::two_minus_2g()),
        &ea(1, 1)?.integrate_out(&[1])?,
    );
    Ok(report)
}
