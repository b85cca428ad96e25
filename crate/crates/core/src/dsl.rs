//! Text syntax for tautological expressions.
//!
//! ```text
//! program := "@r=" UINT expr
//! expr    := term (("+" | "-") term)*
//! term    := atom ("*" atom)*
//! atom    := "-" atom | base ("^" UINT)?
//! base    := SCALAR | VAR | GEN
//!          | "int" "[" marks "]" "(" expr ")"
//!          | "pb" "[" marks "]" "(" expr ")"
//!          | "graph" "(" UINT ";" edges ")"
//!          | "(" expr ")"
//! GEN     := "h(" i "," j ")" | "e(" i ")" | "e1" | "ed(" d ")" | "nu"
//! SCALAR  := UINT | UINT "/" UINT
//! ```
//!
//! `@r=K` fixes the number of marks seen by the generators at top level. `int[i1,..](x)`
//! integrates out the listed marks of `x`, renumbering the rest in order. `pb[k1,..,ks](x)`
//! reads `x` on `s` marks and pulls it back along `j -> kj`. `graph(u; a-b, ...)` is the
//! literal graph with `u` unmarked vertices numbered after the marks. Identifiers other than
//! the reserved words are polynomial indeterminates (`g`, `n`, `m1`, ...).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::coeffs::Poly;
use crate::expr::{ExprError, TautExpr};
use crate::graph_ops::SetMap;
use crate::graphs::MarkedGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("missing ambient declaration `@r=K`")]
    MissingAmbient,
    #[error("mark index {index} out of range 1..={r}")]
    IndexOutOfRange { index: usize, r: usize },
    #[error("integration list {0:?} repeats a mark")]
    NotInjective(Vec<usize>),
    #[error("{0}")]
    Eval(#[from] ExprError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {kind}")]
pub struct DslError {
    pub pos: Pos,
    pub kind: DslErrorKind,
}

fn err<T>(pos: Pos, kind: DslErrorKind) -> Result<T, DslError> {
    Err(DslError { pos, kind })
}

fn syntax<T>(pos: Pos, msg: impl Into<String>) -> Result<T, DslError> {
    err(pos, DslErrorKind::Syntax(msg.into()))
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ratio(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    At,
    Eq,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Ratio(q) => write!(f, "`{q}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Caret => write!(f, "`^`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::At => write!(f, "`@`"),
            Tok::Eq => write!(f, "`=`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, DslError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let digits = |i: &mut usize, col: &mut usize| {
        let start = *i;
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
            *col += 1;
        }
        chars[start..*i].iter().collect::<String>()
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let num: BigInt = digits(&mut i, &mut col).parse().expect("digits");
            if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                i += 1;
                col += 1;
                let den: BigInt = digits(&mut i, &mut col).parse().expect("digits");
                if den == BigInt::from(0) {
                    return syntax(pos, "zero denominator");
                }
                out.push((Tok::Ratio(BigRational::new(num, den)), pos));
            } else {
                out.push((Tok::Int(num), pos));
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
                col += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '@' => Tok::At,
            '=' => Tok::Eq,
            other => return syntax(pos, format!("unexpected character `{other}`")),
        };
        out.push((tok, pos));
        i += 1;
        col += 1;
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Syntax tree

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AstKind {
    Scalar(BigRational),
    Var(String),
    H(usize, usize),
    E(usize),
    Ed(usize),
    Nu,
    Graph {
        u: usize,
        edges: Vec<(usize, usize)>,
    },
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Neg(Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, u32),
    Int {
        forget: Vec<usize>,
        body: Box<Ast>,
    },
    Pb {
        images: Vec<usize>,
        body: Box<Ast>,
    },
}

/// A node with the position where it starts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ast {
    pub kind: AstKind,
    pub pos: Pos,
}

/// A parsed program: the declared ambient and the expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprAst {
    pub ambient: usize,
    pub expr: Ast,
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<Pos, DslError> {
        let (tok, pos) = self.bump();
        if tok == want {
            Ok(pos)
        } else {
            syntax(pos, format!("expected {want}, found {tok}"))
        }
    }

    fn uint(&mut self) -> Result<(usize, Pos), DslError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Int(n) => match usize::try_from(&n) {
                Ok(v) => Ok((v, pos)),
                Err(_) => syntax(pos, "integer too large"),
            },
            other => syntax(pos, format!("expected an integer, found {other}")),
        }
    }

    fn index(&mut self, scope: usize) -> Result<usize, DslError> {
        let (i, pos) = self.uint()?;
        if i == 0 || i > scope {
            return err(pos, DslErrorKind::IndexOutOfRange { index: i, r: scope });
        }
        Ok(i)
    }

    fn program(&mut self) -> Result<ExprAst, DslError> {
        if self.peek() != &Tok::At {
            return err(self.pos(), DslErrorKind::MissingAmbient);
        }
        self.bump();
        let (tok, pos) = self.bump();
        if tok != Tok::Ident("r".into()) {
            return syntax(pos, format!("expected `r`, found {tok}"));
        }
        self.expect(Tok::Eq)?;
        let (ambient, _) = self.uint()?;
        let expr = self.expr(ambient)?;
        let (tok, pos) = self.bump();
        if tok != Tok::Eof {
            return syntax(pos, format!("unexpected {tok}"));
        }
        Ok(ExprAst { ambient, expr })
    }

    fn expr(&mut self, scope: usize) -> Result<Ast, DslError> {
        let mut lhs = self.term(scope)?;
        loop {
            let pos = self.pos();
            let op = match self.peek() {
                Tok::Plus => AstKind::Add as fn(Box<Ast>, Box<Ast>) -> AstKind,
                Tok::Minus => AstKind::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term(scope)?;
            lhs = Ast {
                kind: op(Box::new(lhs), Box::new(rhs)),
                pos,
            };
        }
    }

    fn term(&mut self, scope: usize) -> Result<Ast, DslError> {
        let mut lhs = self.atom(scope)?;
        while self.peek() == &Tok::Star {
            let pos = self.pos();
            self.bump();
            let rhs = self.atom(scope)?;
            lhs = Ast {
                kind: AstKind::Mul(Box::new(lhs), Box::new(rhs)),
                pos,
            };
        }
        Ok(lhs)
    }

    fn atom(&mut self, scope: usize) -> Result<Ast, DslError> {
        let pos = self.pos();
        if self.peek() == &Tok::Minus {
            self.bump();
            let inner = self.atom(scope)?;
            return Ok(Ast {
                kind: AstKind::Neg(Box::new(inner)),
                pos,
            });
        }
        let base = self.base(scope)?;
        if self.peek() == &Tok::Caret {
            let caret = self.pos();
            self.bump();
            let (k, kpos) = self.uint()?;
            let k = u32::try_from(k).or_else(|_| syntax(kpos, "exponent too large"))?;
            return Ok(Ast {
                kind: AstKind::Pow(Box::new(base), k),
                pos: caret,
            });
        }
        Ok(base)
    }

    fn marks(&mut self, allow_repeat: bool, scope: usize) -> Result<Vec<usize>, DslError> {
        let open = self.expect(Tok::LBracket)?;
        let mut list = Vec::new();
        if self.peek() != &Tok::RBracket {
            loop {
                list.push(self.index(scope)?);
                if self.peek() == &Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RBracket)?;
        if !allow_repeat {
            let mut sorted = list.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return err(open, DslErrorKind::NotInjective(list));
            }
        }
        Ok(list)
    }

    fn base(&mut self, scope: usize) -> Result<Ast, DslError> {
        let (tok, pos) = self.bump();
        let kind = match tok {
            Tok::Int(n) => AstKind::Scalar(BigRational::from_integer(n)),
            Tok::Ratio(q) => AstKind::Scalar(q),
            Tok::LParen => {
                let inner = self.expr(scope)?;
                self.expect(Tok::RParen)?;
                return Ok(inner);
            }
            Tok::Ident(name) => match name.as_str() {
                "h" => {
                    self.expect(Tok::LParen)?;
                    let i = self.index(scope)?;
                    self.expect(Tok::Comma)?;
                    let j = self.index(scope)?;
                    self.expect(Tok::RParen)?;
                    AstKind::H(i, j)
                }
                "e" => {
                    self.expect(Tok::LParen)?;
                    let i = self.index(scope)?;
                    self.expect(Tok::RParen)?;
                    AstKind::E(i)
                }
                "e1" => AstKind::Ed(1),
                "ed" => {
                    self.expect(Tok::LParen)?;
                    let (d, dpos) = self.uint()?;
                    if d == 0 {
                        return syntax(dpos, "ed(d) needs d >= 1");
                    }
                    self.expect(Tok::RParen)?;
                    AstKind::Ed(d)
                }
                "nu" => AstKind::Nu,
                "int" => {
                    let forget = self.marks(false, usize::MAX)?;
                    self.expect(Tok::LParen)?;
                    let body = self.expr(scope)?;
                    self.expect(Tok::RParen)?;
                    AstKind::Int {
                        forget,
                        body: Box::new(body),
                    }
                }
                "pb" => {
                    let images = self.marks(true, scope)?;
                    self.expect(Tok::LParen)?;
                    let body = self.expr(images.len())?;
                    self.expect(Tok::RParen)?;
                    AstKind::Pb {
                        images,
                        body: Box::new(body),
                    }
                }
                "graph" => {
                    self.expect(Tok::LParen)?;
                    let (u, _) = self.uint()?;
                    self.expect(Tok::Semi)?;
                    let mut edges = Vec::new();
                    if self.peek() != &Tok::RParen {
                        loop {
                            let a = self.index(scope + u)?;
                            self.expect(Tok::Minus)?;
                            let b = self.index(scope + u)?;
                            edges.push((a, b));
                            if self.peek() == &Tok::Comma {
                                self.bump();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RParen)?;
                    AstKind::Graph { u, edges }
                }
                other
                    if other.len() > 1
                        && other.starts_with('e')
                        && other[1..].chars().all(|c| c.is_ascii_digit()) =>
                {
                    return syntax(
                        pos,
                        format!("unknown generator `{other}`; write e(i) or ed(d)"),
                    );
                }
                _ => AstKind::Var(name),
            },
            other => return syntax(pos, format!("unexpected {other}")),
        };
        Ok(Ast { kind, pos })
    }
}

/// Parses a program such as `@r=2 int[2](h(1,2)^2)`.
pub fn parse(text: &str) -> Result<ExprAst, DslError> {
    let toks = lex(text)?;
    Parser { toks, at: 0 }.program()
}

// ---------------------------------------------------------------------------
// Evaluation

#[derive(Clone, Debug, Default)]
pub struct EvalOptions {
    /// Substituted for `g` in the result; `None` keeps the genus symbolic.
    pub genus: Option<u32>,
    /// Further substitutions applied to the result.
    pub bindings: BTreeMap<String, Poly>,
}

enum Value {
    Scalar(Poly),
    Form(TautExpr),
}

impl Value {
    fn into_form(self, r: usize) -> TautExpr {
        match self {
            Value::Scalar(c) => TautExpr::constant(r, c),
            Value::Form(f) => f,
        }
    }
}

fn lift<T>(pos: Pos, res: Result<T, ExprError>) -> Result<T, DslError> {
    res.map_err(|e| DslError {
        pos,
        kind: DslErrorKind::Eval(e),
    })
}

fn eval_node(node: &Ast, scope: usize) -> Result<Value, DslError> {
    let pos = node.pos;
    Ok(match &node.kind {
        AstKind::Scalar(q) => Value::Scalar(Poly::constant(q.clone())),
        AstKind::Var(name) => Value::Scalar(Poly::var(name)),
        AstKind::H(i, j) => Value::Form(lift(pos, TautExpr::gen_h(scope, *i, *j))?),
        AstKind::E(i) => Value::Form(lift(pos, TautExpr::gen_ea(scope, *i))?),
        AstKind::Ed(d) => Value::Form(lift(pos, TautExpr::gen_ed(scope, *d))?),
        AstKind::Nu => Value::Form(TautExpr::gen_nu(scope)),
        AstKind::Graph { u, edges } => {
            let g = lift(
                pos,
                MarkedGraph::new(scope, *u, edges.iter().copied()).map_err(Into::into),
            )?;
            Value::Form(TautExpr::from_graph(&g))
        }
        AstKind::Neg(a) => match eval_node(a, scope)? {
            Value::Scalar(c) => Value::Scalar(-c),
            Value::Form(f) => Value::Form(f.neg()),
        },
        AstKind::Add(a, b) | AstKind::Sub(a, b) => {
            let negate = matches!(node.kind, AstKind::Sub(..));
            let (x, y) = (eval_node(a, scope)?, eval_node(b, scope)?);
            let y = match (y, negate) {
                (Value::Scalar(c), true) => Value::Scalar(-c),
                (Value::Form(f), true) => Value::Form(f.neg()),
                (y, false) => y,
            };
            match (x, y) {
                (Value::Scalar(c), Value::Scalar(d)) => Value::Scalar(c + d),
                (Value::Form(f), Value::Scalar(c)) | (Value::Scalar(c), Value::Form(f)) => {
                    let r = f.ambient_r();
                    Value::Form(lift(pos, f.add(&TautExpr::constant(r, c)))?)
                }
                (Value::Form(f), Value::Form(h)) => Value::Form(lift(pos, f.add(&h))?),
            }
        }
        AstKind::Mul(a, b) => match (eval_node(a, scope)?, eval_node(b, scope)?) {
            (Value::Scalar(c), Value::Scalar(d)) => Value::Scalar(c * d),
            (Value::Form(f), Value::Scalar(c)) | (Value::Scalar(c), Value::Form(f)) => {
                Value::Form(f.scale(&c))
            }
            (Value::Form(f), Value::Form(h)) => Value::Form(lift(pos, f.wedge(&h))?),
        },
        AstKind::Pow(a, k) => match eval_node(a, scope)? {
            Value::Scalar(c) => Value::Scalar(c.pow(*k)),
            Value::Form(f) => Value::Form(f.power(*k)),
        },
        AstKind::Int { forget, body } => {
            let f = eval_node(body, scope)?.into_form(scope);
            let r = f.ambient_r();
            if let Some(&index) = forget.iter().find(|&&i| i > r) {
                return err(pos, DslErrorKind::IndexOutOfRange { index, r });
            }
            Value::Form(lift(pos, f.integrate_out(forget))?)
        }
        AstKind::Pb { images, body } => {
            let f = eval_node(body, images.len())?.into_form(images.len());
            let phi = lift(pos, SetMap::new(scope, images.clone()).map_err(Into::into))?;
            Value::Form(lift(pos, f.pullback(&phi))?)
        }
    })
}

/// Evaluates to an expression on the ambient of the outermost node. The result is not
/// normalized.
pub fn eval(ast: &ExprAst, opts: &EvalOptions) -> Result<TautExpr, DslError> {
    let value = eval_node(&ast.expr, ast.ambient)?;
    let mut bindings = opts.bindings.clone();
    if let Some(g) = opts.genus {
        bindings.insert("g".to_string(), Poly::int(i64::from(g)));
    }
    Ok(value.into_form(ast.ambient).specialize(&bindings))
}

/// Parse, evaluate and normalize.
pub fn eval_str(text: &str, opts: &EvalOptions) -> Result<TautExpr, DslError> {
    Ok(eval(&parse(text)?, opts)?.normalize())
}
