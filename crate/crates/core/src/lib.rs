//! Symbolic calculus of tautological differential forms on moduli spaces of marked curves.
//!
//! Forms on `C_g^r` are linear combinations of r-marked multigraphs with coefficients in
//! `Q[g, n, m1, ...]`. See [`expr::TautExpr`] for the form algebra, [`enumerate`] for the
//! spanning sets of contracted graphs, and [`relations`] for relation generation.

pub mod coeffs;
pub mod dsl;
pub mod enumerate;
pub mod expr;
pub mod graph_ops;
pub mod graphs;
pub mod props;
pub mod relations;

pub use coeffs::{Monomial, Poly};
pub use expr::{ExprError, TautExpr};
pub use graph_ops::{Contracted, ContractionResult, Multiplier, SetMap};
pub use graphs::{CanonicalKey, GraphError, MarkedGraph};
